//! Hardness gadgets: the reduction from satisfiability of `{P, N}` formulas
//! to disconnectedness of `{M}` formulas, and the expression of `M` from
//! any Horn relation that is not safely componentwise IHSB-.

use std::collections::BTreeSet;

use crate::catalog::{self, Library};
use crate::error::{Error, Result};
use crate::formula::{Arg, Constraint, Formula};
use crate::graph::solutions;
use crate::horn::{normalize_nu, HornClause, HornView, VarSet};
use crate::properties::{check_property, safely_witness, BaseProperty, SafeProperty};
use crate::relation::{ArgPattern, Relation, Slot};

fn m_library() -> Library {
    let mut lib = Library::new();
    lib.insert("M".to_string(), catalog::m());
    lib
}

/// `T(u,v,w,x,y,z) = M(u,v,w) ∧ M(x,y,z) ∧ M(w,w,y) ∧ M(z,z,v)`: a Horn
/// formula whose solution graph is disconnected although every constraint
/// projection is connected.
pub fn build_t() -> Formula {
    let v = |i| Arg::Var(i);
    let c = |args: Vec<Arg>| Constraint {
        relation: "M".to_string(),
        args,
    };
    Formula::new(
        ["u", "v", "w", "x", "y", "z"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        vec![
            c(vec![v(0), v(1), v(2)]),
            c(vec![v(3), v(4), v(5)]),
            c(vec![v(2), v(2), v(4)]),
            c(vec![v(5), v(5), v(1)]),
        ],
        m_library(),
    )
    .expect("static formula")
}

/// `F(x,y,z,w) = R(x,y,z) ∧ R(y,x,w)` with
/// `R = ((x ∨ ¬y) ∧ ¬z) ∨ (¬x ∧ y ∧ z)`.
pub fn build_f() -> Formula {
    let mut lib = Library::new();
    lib.insert("R_NONSEP".to_string(), catalog::r_nonsep());
    let v = |i| Arg::Var(i);
    let c = |args: Vec<Arg>| Constraint {
        relation: "R_NONSEP".to_string(),
        args,
    };
    Formula::new(
        ["x", "y", "z", "w"].iter().map(|s| s.to_string()).collect(),
        vec![c(vec![v(0), v(1), v(2)]), c(vec![v(1), v(0), v(3)])],
        lib,
    )
    .expect("static formula")
}

/// Variables introduced for one variable `x_l` of a `P`-constraint `c_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    /// 0-based index of the `P`-constraint among the `P`-constraints.
    pub p: usize,
    /// `x_l`, a variable of both formulas.
    pub x: usize,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone)]
pub struct ReductionOutput {
    pub formula: Formula,
    /// The variables of `psi` keep their indices in `formula`.
    pub psi_vars: usize,
    /// `q_p` for each `P`-constraint.
    pub q: Vec<usize>,
    pub gadgets: Vec<Gadget>,
}

impl ReductionOutput {
    /// Extends an assignment of `psi` by `q_p = 1`, `a_pl = 1`,
    /// `b_pl = x_l`. For a satisfying assignment the result is a locally
    /// minimal nonzero solution.
    pub fn lift_assignment(&self, s: u64) -> u64 {
        let n = self.formula.num_vars();
        let shift = n - self.psi_vars;
        let mut out = s << shift;
        let set = |out: &mut u64, v: usize| *out |= 1 << (n - 1 - v);
        for &q in &self.q {
            set(&mut out, q);
        }
        for g in &self.gadgets {
            set(&mut out, g.a);
            if s >> (self.psi_vars - 1 - g.x) & 1 == 1 {
                set(&mut out, g.b);
            }
        }
        out
    }
}

/// `psi` must use only the relations `P = x ∨ y ∨ z` and `N = ¬x ∨ ¬y`
/// without constants and contain at least one `P`-constraint.
pub fn reduce_sat_to_conn(psi: &Formula) -> Result<ReductionOutput> {
    let (p_rel, n_rel) = (catalog::p(), catalog::n());
    let mut kinds = Vec::new();
    for c in psi.constraints() {
        let r = psi.relation_of(c);
        let is_p = *r == p_rel;
        if !is_p && *r != n_rel {
            return Err(Error::NotPnFormula(format!(
                "{} is neither P nor N",
                c.relation
            )));
        }
        if c.args.iter().any(|a| matches!(a, Arg::Const(_))) {
            return Err(Error::NotPnFormula(format!(
                "constant in {}",
                psi.format_constraint(c)
            )));
        }
        kinds.push(is_p);
    }
    let m = kinds.iter().filter(|&&p| p).count();
    if m == 0 {
        return Err(Error::NoPConstraint);
    }

    let mut names: Vec<String> = psi.variables().to_vec();
    let mut taken: BTreeSet<String> = names.iter().cloned().collect();
    let mut fresh = |base: String, names: &mut Vec<String>| -> usize {
        let mut name = base;
        while taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        names.push(name);
        names.len() - 1
    };
    let q: Vec<usize> = (0..m)
        .map(|p| fresh(format!("q_{}", p + 1), &mut names))
        .collect();
    let mut gadgets = Vec::new();
    let mut constraints = Vec::new();
    let mk = |args: [Arg; 3]| Constraint {
        relation: "M".to_string(),
        args: args.to_vec(),
    };
    let var = |v: usize| Arg::Var(v);
    let zero = Arg::Const(false);
    let mut p = 0;
    for (c, &is_p) in psi.constraints().iter().zip(&kinds) {
        let vars: Vec<usize> = c
            .args
            .iter()
            .map(|a| match a {
                Arg::Var(v) => *v,
                Arg::Const(_) => unreachable!("checked"),
            })
            .collect();
        if !is_p {
            // ¬x_i ∨ ¬x_j = M(0, x_i, x_j)
            constraints.push(mk([zero, var(vars[0]), var(vars[1])]));
            continue;
        }
        let mut distinct = vars.clone();
        distinct.dedup();
        let mut seen = BTreeSet::new();
        distinct.retain(|v| seen.insert(*v));
        for &x in &distinct {
            let xname = &psi.variables()[x];
            let a = fresh(format!("a_{}_{}", p + 1, xname), &mut names);
            let b = fresh(format!("b_{}_{}", p + 1, xname), &mut names);
            // ¬q_p ∨ a_pl
            constraints.push(mk([var(q[p]), zero, var(a)]));
            // (¬x_l ∨ ¬a_pl ∨ b_pl) ∧ (¬b_pl ∨ x_l)
            constraints.push(mk([var(b), var(a), var(x)]));
            // ¬b_pl ∨ q_{p+1 mod m}
            constraints.push(mk([var(b), zero, var(q[(p + 1) % m])]));
            gadgets.push(Gadget { p, x, a, b });
        }
        p += 1;
    }
    let formula = Formula::new(names, constraints, m_library())?;
    Ok(ReductionOutput {
        formula,
        psi_vars: psi.num_vars(),
        q,
        gadgets,
    })
}

/// Which of the three target relations the procedure reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    K,
    L,
    M,
}

#[derive(Debug, Clone)]
pub struct Expression {
    /// A formula over `{R}` with constants, with variables `x, y, z`, whose
    /// solution set is `M`.
    pub formula: Formula,
    pub target: Target,
    /// One line per transformation step.
    pub steps: Vec<String>,
}

/// Coordinates of `R` mapped to constants or to the current variables;
/// `ids` are stable names of the current variables.
#[derive(Debug, Clone)]
struct Stage {
    slots: Vec<Slot>,
    ids: Vec<usize>,
}

impl Stage {
    fn relation(&self, r: &Relation) -> Result<Relation> {
        r.apply(&ArgPattern::new(self.slots.clone())?)
    }

    fn view(&self, r: &Relation) -> Result<HornView> {
        let names = self.ids.iter().map(|i| format!("v{i}")).collect();
        Ok(normalize_nu(&HornView::from_relation(
            &self.relation(r)?,
            names,
        )?))
    }

    fn index_of(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&i| i == id)
    }

    /// Renumbers variables densely, keeping their relative order.
    fn compact(slots: Vec<Slot>, ids: &[usize]) -> Stage {
        let used: BTreeSet<usize> = slots
            .iter()
            .filter_map(|s| match s {
                Slot::Var(j) => Some(*j),
                Slot::Const(_) => None,
            })
            .collect();
        let old: Vec<usize> = used.into_iter().collect();
        let slots = slots
            .into_iter()
            .map(|s| match s {
                Slot::Var(j) => Slot::Var(old.binary_search(&j).expect("used")),
                c => c,
            })
            .collect();
        Stage {
            slots,
            ids: old.iter().map(|&j| ids[j]).collect(),
        }
    }

    fn substitute(&self, vars: &VarSet, value: bool) -> Stage {
        let slots = self
            .slots
            .iter()
            .map(|s| match s {
                Slot::Var(j) if vars.contains(j) => Slot::Const(value),
                s => *s,
            })
            .collect();
        Stage::compact(slots, &self.ids)
    }

    fn identify(&self, vars: &VarSet, into: usize) -> Stage {
        let slots = self
            .slots
            .iter()
            .map(|s| match s {
                Slot::Var(j) if vars.contains(j) => Slot::Var(into),
                s => *s,
            })
            .collect();
        Stage::compact(slots, &self.ids)
    }

    fn describe(&self, view: &HornView, vars: &VarSet) -> String {
        view.format_set(vars)
    }
}

fn find_clause(h: &HornView, head: Option<usize>, body: &[usize]) -> Option<HornClause> {
    let mut body = body.to_vec();
    body.sort_unstable();
    h.clauses()
        .iter()
        .find(|c| c.head == head && c.body == body)
        .cloned()
}

/// Expresses `M` from a Horn relation that is not safely componentwise
/// IHSB-, by substitution of constants and identification of variables
/// followed, for `K` and `L`, by `M(x,y,z) ≡ K(x,y,z) ∧ K(z,x,x)`.
///
/// Where the construction leaves a choice (the multi-implication clause
/// `c*` and the unimplied variable `y`), candidates are tried in clause and
/// variable order until the result is verified to be `M`.
pub fn express_m(r: &Relation) -> Result<Expression> {
    if !check_property(r, BaseProperty::Horn) {
        return Err(Error::Precondition(format!(
            "{} is not Horn",
            r.name().unwrap_or("R")
        )));
    }
    let Some(id) = safely_witness(r, SafeProperty::SafelyComponentwiseIhsbMinus)? else {
        return Err(Error::Precondition(format!(
            "{} is safely componentwise IHSB-",
            r.name().unwrap_or("R")
        )));
    };
    let mut steps = Vec::new();
    // step 1: identification that is not componentwise IHSB-
    let nblocks = id.blocks.iter().max().map_or(0, |b| b + 1);
    let s1 = Stage {
        slots: id.blocks.iter().map(|&b| Slot::Var(b)).collect(),
        ids: (0..nblocks).collect(),
    };
    steps.push(format!("1: identify coordinates {:?}", id.block_lists()));

    // step 2: substitute 1 on the minimum of a non-IHSB- component
    let rel1 = s1.relation(r)?;
    let comp = rel1
        .components()
        .into_iter()
        .find(|c| !check_property(c, BaseProperty::IhsbMinus))
        .ok_or_else(|| Error::Invariant("no component that is not IHSB-".into()))?;
    let min = comp
        .meet()
        .filter(|&t| comp.contains(t))
        .ok_or_else(|| Error::Invariant("component without minimum".into()))?;
    let k1 = rel1.arity();
    let u: VarSet = (0..k1).filter(|&j| min >> (k1 - 1 - j) & 1 == 1).collect();
    let s2 = s1.substitute(&u, true);
    steps.push(format!(
        "2: substitute 1 for {} coordinate(s) of the minimum {}",
        u.len(),
        crate::relation::format_bits(min as u64, k1)
    ));

    let h2 = s2.view(r)?;
    let candidates: Vec<HornClause> = h2
        .clauses()
        .iter()
        .filter(|c| c.is_multi_implication() && !h2.contains_restraint_set(&h2.imp(&c.vars())))
        .cloned()
        .collect();
    for cstar in &candidates {
        if let Some((formula, target, more)) = try_candidate(r, &s2, &h2, cstar)? {
            steps.extend(more);
            steps.push(format!("result: {target:?}"));
            return Ok(Expression {
                formula,
                target,
                steps,
            });
        }
    }
    Err(Error::Invariant(format!(
        "no candidate clause led to M ({} tried)",
        candidates.len()
    )))
}

type Attempt = Option<(Formula, Target, Vec<String>)>;

fn try_candidate(r: &Relation, s2: &Stage, h2: &HornView, cstar: &HornClause) -> Result<Attempt> {
    let mut steps = Vec::new();
    // step 3: substitute 0 outside Imp(Var(c*))
    let keep = h2.imp(&cstar.vars());
    let zero: VarSet = (0..h2.num_vars()).filter(|v| !keep.contains(v)).collect();
    let s3 = s2.substitute(&zero, false);
    steps.push(format!(
        "3: c* = {}; substitute 0 for {}",
        h2.format_clause(cstar),
        s2.describe(h2, &zero)
    ));
    let head_id = s2.ids[cstar.head.expect("implication")];
    let body_ids: Vec<usize> = cstar.body.iter().map(|&b| s2.ids[b]).collect();
    let Some(h3) = s3.view(r).ok() else {
        return Ok(None);
    };
    let local = |s: &Stage, id: usize| s.index_of(id);
    let (Some(x3), Some(body3)) = (
        local(&s3, head_id),
        body_ids
            .iter()
            .map(|&i| local(&s3, i))
            .collect::<Option<Vec<_>>>(),
    ) else {
        return Ok(None);
    };
    if find_clause(&h3, Some(x3), &body3).is_none() {
        return Ok(None);
    }
    for (pos, &y3) in body3.iter().enumerate() {
        if h3.is_implied(y3) {
            continue;
        }
        let y_id = body_ids[pos];
        let z_ids: Vec<usize> = body_ids.iter().copied().filter(|&i| i != y_id).collect();
        let z_id = *z_ids.iter().min().expect("multi-implication");
        // step 4: identify z_1..z_k
        let zs: VarSet = z_ids
            .iter()
            .map(|&i| local(&s3, i).expect("present"))
            .collect();
        let s4 = s3.identify(&zs, local(&s3, z_id).expect("present"));
        let Ok(h4) = s4.view(r) else { continue };
        let idx = |s: &Stage| -> Option<(usize, usize, usize)> {
            Some((local(s, head_id)?, local(s, y_id)?, local(s, z_id)?))
        };
        let Some((x, y, z)) = idx(&s4) else { continue };
        let one = |v: usize| -> VarSet { [v].into_iter().collect() };
        let star = !h4.imp(&one(y)).contains(&x)
            && !h4.imp(&one(z)).contains(&x)
            && !h4.imp(&one(y)).contains(&z)
            && !h4.is_implied(y);
        if !star {
            continue;
        }
        let mut trail = vec![format!(
            "4: y = {}; identify {} into z",
            h3.variables()[y3],
            s3.describe(&h3, &zs)
        )];
        // step 5: substitute 1 for Imp(y) \ {y}
        let mut s5set = h4.imp(&one(y));
        s5set.remove(&y);
        let s5 = s4.substitute(&s5set, true);
        trail.push(format!("5: substitute 1 for {}", s4.describe(&h4, &s5set)));
        let Ok(h5) = s5.view(r) else { continue };
        let Some((_, _, z5)) = idx(&s5) else { continue };
        // step 6: identify Imp(z) \ {z} with z
        let s6set = h5.imp(&one(z5));
        let s6 = s5.identify(&s6set, z5);
        trail.push(format!("6: identify {} with z", s5.describe(&h5, &s6set)));
        // step 7: identify everything else with x
        let Some((x6, y6, z6)) = idx(&s6) else {
            continue;
        };
        let rest: VarSet = (0..s6.ids.len()).filter(|&v| v != y6 && v != z6).collect();
        let s7 = s6.identify(&rest, x6);
        trail.push(format!("7: identify {} variable(s) with x", rest.len() - 1));
        let Some((x7, y7, z7)) = idx(&s7) else {
            continue;
        };
        if s7.ids.len() != 3 {
            continue;
        }
        let order = |j: usize| -> usize {
            if j == x7 {
                0
            } else if j == y7 {
                1
            } else {
                debug_assert_eq!(j, z7);
                2
            }
        };
        let args: Vec<Arg> = s7
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Const(b) => Arg::Const(b),
                Slot::Var(j) => Arg::Var(order(j)),
            })
            .collect();
        if let Some((formula, target)) = assemble(r, &args)? {
            steps.extend(trail);
            return Ok(Some((formula, target, steps)));
        }
    }
    Ok(None)
}

fn assemble(r: &Relation, args: &[Arg]) -> Result<Option<(Formula, Target)>> {
    let name = match r.name() {
        Some(n) if crate::catalog::is_identifier(n) => n.to_string(),
        _ => "R".to_string(),
    };
    let mut lib = Library::new();
    lib.insert(name.clone(), r.clone());
    let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let first = Constraint {
        relation: name.clone(),
        args: args.to_vec(),
    };
    let single = Formula::new(vars.clone(), vec![first.clone()], lib.clone())?;
    let rel = single.constraint_relation(0)?;
    let target = if rel == catalog::m() {
        Target::M
    } else if rel == catalog::k() {
        Target::K
    } else if rel == catalog::l() {
        Target::L
    } else {
        return Ok(None);
    };
    let formula = match target {
        Target::M => single,
        _ => {
            // (x,y,z) -> (z,x,x)
            let second = Constraint {
                relation: name,
                args: args
                    .iter()
                    .map(|a| match a {
                        Arg::Var(0) => Arg::Var(2),
                        Arg::Var(_) => Arg::Var(0),
                        c => *c,
                    })
                    .collect(),
            };
            Formula::new(vars, vec![first, second], lib)?
        }
    };
    let m: Vec<u64> = catalog::m().tuples().map(u64::from).collect();
    if solutions(&formula)? != m {
        return Err(Error::Invariant(format!(
            "expression via {target:?} does not define M"
        )));
    }
    Ok(Some((formula, target)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin, builtin_library};
    use crate::formula::parse_formula;
    use crate::graph::{is_connected, SolutionGraph};

    #[test]
    fn t_formula() {
        let t = build_t();
        assert!(!is_connected(&t).unwrap());
        assert_eq!(t.to_text().lines().last().unwrap(), "M(z,z,v)");
    }

    #[test]
    fn f_formula() {
        let f = build_f();
        let g = SolutionGraph::new(&f).unwrap();
        assert_eq!(g.solutions(), &[0b0000, 0b0110, 0b1001, 0b1100]);
        assert_eq!(g.components().len(), 4);
    }

    #[test]
    fn reduction_gadget_clauses() {
        let psi = parse_formula("P(x1,x2,x3)\nN(x1,x2)", &builtin_library()).unwrap();
        let out = reduce_sat_to_conn(&psi).unwrap();
        let phi = &out.formula;
        assert_eq!(phi.num_vars(), 3 + 1 + 6);
        assert_eq!(phi.constraints().len(), 1 + 9);
        assert_eq!(phi.variables()[3], "q_1");
        assert_eq!(phi.variables()[4], "a_1_x1");
        // constraint relations match the intended clauses
        let rel = |i: usize| phi.constraint_relation(i).unwrap();
        let bits = |ts: &[&str]| Relation::from_bitstrings(ts[0].len(), ts).unwrap();
        // over (q_1, a_1_x1): ¬q ∨ a
        assert_eq!(rel(0), bits(&["00", "01", "11"]));
        // over (x1, a, b): (¬x ∨ ¬a ∨ b) ∧ (¬b ∨ x)
        assert_eq!(rel(1), bits(&["000", "010", "100", "101", "111"]));
        // over (q_1, b): ¬b ∨ q
        assert_eq!(rel(2), bits(&["00", "10", "11"]));
        assert_eq!(rel(9), catalog::nand());
        assert!(!is_connected(phi).unwrap());
    }

    #[test]
    fn reduction_errors() {
        let lib = builtin_library();
        let only_n = parse_formula("N(a,b)", &lib).unwrap();
        assert!(matches!(
            reduce_sat_to_conn(&only_n),
            Err(Error::NoPConstraint)
        ));
        let with_m = parse_formula("P(a,b,c)\nM(a,b,c)", &lib).unwrap();
        assert!(matches!(
            reduce_sat_to_conn(&with_m),
            Err(Error::NotPnFormula(_))
        ));
        let with_c = parse_formula("P(a,b,1)", &lib).unwrap();
        assert!(matches!(
            reduce_sat_to_conn(&with_c),
            Err(Error::NotPnFormula(_))
        ));
    }

    #[test]
    fn reduction_name_collision() {
        let psi = parse_formula("P(q_1,a,b)", &builtin_library()).unwrap();
        let out = reduce_sat_to_conn(&psi).unwrap();
        assert_eq!(out.formula.variables()[3], "q_1'");
    }

    #[test]
    fn lifted_solution_is_locally_minimal() {
        let psi = parse_formula("P(x1,x2,x3)\nP(x3,x4,x4)\nN(x1,x3)", &builtin_library()).unwrap();
        let out = reduce_sat_to_conn(&psi).unwrap();
        let g = SolutionGraph::new(&out.formula).unwrap();
        let lm = g.locally_minimal();
        for s in 0..16u64 {
            if psi.eval_bits(s) {
                let lifted = out.lift_assignment(s);
                assert!(lifted != 0 && lm.contains(&lifted), "{s:04b}");
            }
        }
    }

    #[test]
    fn express_m_from_m_and_phi_conp() {
        let e = express_m(&catalog::m()).unwrap();
        assert_eq!(e.target, Target::M);
        assert_eq!(e.formula.constraints().len(), 1);
        let e = express_m(&builtin("PHI_coNP").unwrap()).unwrap();
        let sols = solutions(&e.formula).unwrap();
        assert_eq!(sols, vec![0b000, 0b001, 0b010, 0b101, 0b111]);
    }

    #[test]
    fn express_m_from_k_and_l() {
        for (r, t) in [(catalog::k(), Target::K), (catalog::l(), Target::L)] {
            let e = express_m(&r).unwrap();
            assert_eq!(e.target, t);
            assert_eq!(e.formula.constraints().len(), 2);
        }
    }

    #[test]
    fn express_m_preconditions() {
        assert!(matches!(
            express_m(&catalog::r_conp()),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            express_m(&catalog::nand()),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            express_m(&catalog::p()),
            Err(Error::Precondition(_))
        ));
    }
}
