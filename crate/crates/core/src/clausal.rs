//! Clausal forms of formulas whose constraint relations lie in one Schaefer
//! class: 2-clauses, Horn clauses, dual Horn clauses or GF(2) equations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::properties::{check_property, BaseProperty};
use crate::relation::Relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchaeferClass {
    Bijunctive,
    Horn,
    DualHorn,
    Affine,
}

impl SchaeferClass {
    pub const ALL: [SchaeferClass; 4] = [
        SchaeferClass::Bijunctive,
        SchaeferClass::Horn,
        SchaeferClass::DualHorn,
        SchaeferClass::Affine,
    ];

    pub fn property(self) -> BaseProperty {
        match self {
            SchaeferClass::Bijunctive => BaseProperty::Bijunctive,
            SchaeferClass::Horn => BaseProperty::Horn,
            SchaeferClass::DualHorn => BaseProperty::DualHorn,
            SchaeferClass::Affine => BaseProperty::Affine,
        }
    }

    fn admits(self, clause_vars: u32, negated: u32) -> bool {
        let positive = clause_vars & !negated;
        match self {
            SchaeferClass::Bijunctive => clause_vars.count_ones() <= 2,
            SchaeferClass::Horn => positive.count_ones() <= 1,
            SchaeferClass::DualHorn => negated.count_ones() <= 1,
            SchaeferClass::Affine => false,
        }
    }
}

impl fmt::Display for SchaeferClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchaeferClass::Bijunctive => "bijunctive",
            SchaeferClass::Horn => "Horn",
            SchaeferClass::DualHorn => "dual Horn",
            SchaeferClass::Affine => "affine",
        };
        f.write_str(s)
    }
}

/// A disjunction of literals; the empty clause is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

impl Clause {
    pub fn new(mut pos: Vec<usize>, mut neg: Vec<usize>) -> Self {
        pos.sort_unstable();
        pos.dedup();
        neg.sort_unstable();
        neg.dedup();
        Clause { pos, neg }
    }

    pub fn eval(&self, value: impl Fn(usize) -> bool) -> bool {
        self.pos.iter().any(|&v| value(v)) || self.neg.iter().any(|&v| !value(v))
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `sum(vars) = rhs` over GF(2).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct XorEquation {
    pub vars: Vec<usize>,
    pub rhs: bool,
}

impl XorEquation {
    pub fn eval(&self, value: impl Fn(usize) -> bool) -> bool {
        self.vars.iter().filter(|&&v| value(v)).count() % 2 == self.rhs as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSet {
    pub num_vars: usize,
    pub class: SchaeferClass,
    pub clauses: Vec<Clause>,
    pub equations: Vec<XorEquation>,
}

impl ClauseSet {
    pub fn new(num_vars: usize, class: SchaeferClass) -> Self {
        ClauseSet {
            num_vars,
            class,
            clauses: Vec::new(),
            equations: Vec::new(),
        }
    }

    pub fn evaluate(&self, a: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval(|v| a[v]))
            && self.equations.iter().all(|e| e.eval(|v| a[v]))
    }

    pub fn eval_bits(&self, a: u64) -> bool {
        let n = self.num_vars;
        let value = |v: usize| a >> (n - 1 - v) & 1 == 1;
        self.clauses.iter().all(|c| c.eval(value)) && self.equations.iter().all(|e| e.eval(value))
    }

    /// Adds the constraint `var = value` in a shape valid for every class.
    pub fn fix(&mut self, var: usize, value: bool) {
        match self.class {
            SchaeferClass::Affine => self.equations.push(XorEquation {
                vars: vec![var],
                rhs: value,
            }),
            _ if value => self.clauses.push(Clause::new(vec![var], vec![])),
            _ => self.clauses.push(Clause::new(vec![], vec![var])),
        }
    }
}

/// Clauses over local coordinates `0..k` (bit `k-1-j` of a tuple is
/// coordinate `j`), as `(clause variable mask, negated mask)` pairs.
fn local_clauses(r: &Relation, class: SchaeferClass) -> Vec<(u32, u32)> {
    let k = r.arity();
    let tuples: Vec<u32> = r.tuples().collect();
    let mut masks: Vec<u32> = (0..(1u32 << k)).collect();
    masks.sort_by_key(|m| m.count_ones());
    let mut kept: Vec<(u32, u32)> = Vec::new();
    for &vars in &masks {
        // negated ⊆ vars, enumerated as submasks
        let mut neg = vars;
        loop {
            if class.admits(vars, neg)
                && !kept
                    .iter()
                    .any(|&(kv, kn)| kv & !vars == 0 && kn == neg & kv)
                && tuples.iter().all(|&t| t & vars != neg)
            {
                kept.push((vars, neg));
            }
            if neg == 0 {
                break;
            }
            neg = (neg - 1) & vars;
        }
    }
    kept
}

fn local_equations(r: &Relation) -> Vec<(u32, bool)> {
    let k = r.arity();
    let mut it = r.tuples();
    let Some(a0) = it.next() else {
        return vec![(0, true)];
    };
    let mut basis: Vec<u32> = Vec::new();
    for t in it {
        reduce_into(&mut basis, t ^ a0);
    }
    let rank = basis.len();
    let mut complement: Vec<u32> = Vec::new();
    let mut reduced: Vec<u32> = Vec::new();
    for w in 1..(1u32 << k) {
        if complement.len() + rank == k {
            break;
        }
        if basis.iter().all(|&b| (b & w).count_ones() % 2 == 0) && reduce_into(&mut reduced, w) {
            complement.push(w);
        }
    }
    complement
        .into_iter()
        .map(|w| (w, (w & a0).count_ones() % 2 == 1))
        .collect()
}

/// Inserts `v` into an XOR basis kept in echelon form by leading bit;
/// returns whether it was independent.
fn reduce_into(basis: &mut Vec<u32>, mut v: u32) -> bool {
    for &b in basis.iter() {
        let lead = 31 - b.leading_zeros();
        if v >> lead & 1 == 1 {
            v ^= b;
        }
    }
    if v == 0 {
        return false;
    }
    let lead = 31 - v.leading_zeros();
    for b in basis.iter_mut() {
        if *b >> lead & 1 == 1 {
            *b ^= v;
        }
    }
    basis.push(v);
    basis.sort_unstable_by(|a, b| b.cmp(a));
    true
}

fn local_to_global(mask: u32, k: usize, vars: &[usize]) -> Vec<usize> {
    (0..k)
        .filter(|&j| mask >> (k - 1 - j) & 1 == 1)
        .map(|j| vars[j])
        .collect()
}

/// An equivalent clause system for `phi` in the shape of `class`: all prime
/// clauses (or a basis of equations) of each constraint relation.
pub fn to_clausal(phi: &Formula, class: SchaeferClass) -> Result<ClauseSet> {
    let mut set = ClauseSet::new(phi.num_vars(), class);
    for i in 0..phi.constraints().len() {
        let vars = phi.constraint_vars(i);
        if vars.is_empty() {
            // constant-only constraint: true, or the empty clause
            if !phi.constraint_holds_bits(i, 0) {
                match class {
                    SchaeferClass::Affine => set.equations.push(XorEquation {
                        vars: vec![],
                        rhs: true,
                    }),
                    _ => set.clauses.push(Clause::new(vec![], vec![])),
                }
            }
            continue;
        }
        let r = phi.constraint_relation(i)?;
        if !check_property(&r, class.property()) {
            return Err(Error::ClassMismatch {
                constraint: i,
                class: class.to_string(),
            });
        }
        let k = r.arity();
        let local = relation_clauses(&r, class);
        debug_assert!(local_equivalent(&r, &local));
        match local {
            LocalForm::Clauses(cs) => {
                for (mask, neg) in cs {
                    set.clauses.push(Clause::new(
                        local_to_global(mask & !neg, k, &vars),
                        local_to_global(neg, k, &vars),
                    ));
                }
            }
            LocalForm::Equations(es) => {
                for (mask, rhs) in es {
                    set.equations.push(XorEquation {
                        vars: local_to_global(mask, k, &vars),
                        rhs,
                    });
                }
            }
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalForm {
    Clauses(Vec<(u32, u32)>),
    Equations(Vec<(u32, bool)>),
}

/// Clausal form of a single relation, which must belong to `class`.
pub fn relation_clauses(r: &Relation, class: SchaeferClass) -> LocalForm {
    match class {
        SchaeferClass::Affine => LocalForm::Equations(local_equations(r)),
        _ => LocalForm::Clauses(local_clauses(r, class)),
    }
}

fn local_equivalent(r: &Relation, form: &LocalForm) -> bool {
    (0..(1u32 << r.arity())).all(|t| {
        let sat = match form {
            LocalForm::Clauses(cs) => cs.iter().all(|&(v, n)| t & v != n),
            LocalForm::Equations(es) => es
                .iter()
                .all(|&(w, rhs)| ((w & t).count_ones() % 2 == 1) == rhs),
        };
        sat == r.contains(t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin_library, m, nand};
    use crate::formula::parse_formula;

    #[test]
    fn m_horn_clauses() {
        let phi = parse_formula("M(x,y,z)", &builtin_library()).unwrap();
        let cs = to_clausal(&phi, SchaeferClass::Horn).unwrap();
        for a in 0..8 {
            assert_eq!(cs.eval_bits(a), phi.eval_bits(a));
        }
        assert!(cs.clauses.contains(&Clause::new(vec![0], vec![1, 2])));
        assert!(cs.clauses.contains(&Clause::new(vec![2], vec![0])));
        assert!(matches!(
            to_clausal(&phi, SchaeferClass::Bijunctive),
            Err(Error::ClassMismatch { constraint: 0, .. })
        ));
    }

    #[test]
    fn xor_equation() {
        let text = "rel X 2 : 01 10\nX(x,y)";
        let phi = parse_formula(text, &builtin_library()).unwrap();
        let cs = to_clausal(&phi, SchaeferClass::Affine).unwrap();
        assert_eq!(
            cs.equations,
            vec![XorEquation {
                vars: vec![0, 1],
                rhs: true
            }]
        );
    }

    #[test]
    fn nand_two_clause() {
        let f = relation_clauses(&nand(), SchaeferClass::Bijunctive);
        assert_eq!(f, LocalForm::Clauses(vec![(0b11, 0b11)]));
    }

    #[test]
    fn empty_relation_gives_empty_clause() {
        let e = Relation::empty(2).unwrap();
        assert_eq!(
            relation_clauses(&e, SchaeferClass::Horn),
            LocalForm::Clauses(vec![(0, 0)])
        );
        assert_eq!(
            relation_clauses(&e, SchaeferClass::Affine),
            LocalForm::Equations(vec![(0, true)])
        );
    }

    #[test]
    fn every_class_member_round_trips() {
        // all relations of arity 3, each checked against every class it belongs to
        for bits in 0u32..256 {
            let r = Relation::from_predicate(3, |t| bits >> t & 1 == 1).unwrap();
            for class in SchaeferClass::ALL {
                if check_property(&r, class.property()) {
                    assert!(
                        local_equivalent(&r, &relation_clauses(&r, class)),
                        "{r} {class}"
                    );
                }
            }
        }
        assert!(local_equivalent(
            &m(),
            &relation_clauses(&m(), SchaeferClass::Horn)
        ));
    }
}
