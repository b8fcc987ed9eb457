//! Horn clause sets: implication closure, self-implicating sets, restraint
//! sets and the simplification normal form used when expressing `M`.

use std::collections::BTreeSet;
use std::fmt;

use crate::clausal::{relation_clauses, LocalForm, SchaeferClass};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::graph::{SolutionGraph, BRUTE_VARS_MAX};
use crate::properties::{check_property, BaseProperty};
use crate::relation::Relation;

pub type VarSet = BTreeSet<usize>;

/// A clause with at most one positive literal.
///
/// `head: Some(x), body: []` is a positive unit, `head: None` a restraint
/// clause (a negative unit when the body has one variable, the empty
/// clause when it has none).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HornClause {
    pub head: Option<usize>,
    pub body: Vec<usize>,
    /// Index of the constraint the clause was extracted from.
    pub origin: Option<usize>,
}

impl HornClause {
    pub fn new(head: Option<usize>, mut body: Vec<usize>) -> Self {
        body.sort_unstable();
        body.dedup();
        HornClause {
            head,
            body,
            origin: None,
        }
    }

    pub fn with_origin(mut self, origin: usize) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn is_positive_unit(&self) -> bool {
        self.head.is_some() && self.body.is_empty()
    }

    pub fn is_restraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn is_implication(&self) -> bool {
        self.head.is_some() && !self.body.is_empty()
    }

    pub fn is_multi_implication(&self) -> bool {
        self.head.is_some() && self.body.len() >= 2
    }

    pub fn is_tautology(&self) -> bool {
        self.head.is_some_and(|h| self.body.contains(&h))
    }

    /// All variables of the clause.
    pub fn vars(&self) -> VarSet {
        self.body.iter().copied().chain(self.head).collect()
    }

    pub fn eval(&self, value: impl Fn(usize) -> bool) -> bool {
        self.head.is_some_and(&value) || self.body.iter().any(|&v| !value(v))
    }

    fn same_literals(&self, other: &HornClause) -> bool {
        self.head == other.head && self.body == other.body
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornView {
    variables: Vec<String>,
    clauses: Vec<HornClause>,
}

impl HornView {
    pub fn new(variables: Vec<String>, clauses: Vec<HornClause>) -> Result<Self> {
        let n = variables.len();
        for c in &clauses {
            if let Some(&v) = c.body.iter().chain(c.head.iter()).find(|&&v| v >= n) {
                return Err(Error::UnknownVariable(format!("#{v}")));
            }
        }
        Ok(HornView { variables, clauses })
    }

    /// Prime Horn clauses of each constraint relation.
    pub fn from_formula(phi: &Formula) -> Result<Self> {
        let mut clauses = Vec::new();
        for (i, c) in phi.constraints().iter().enumerate() {
            let vars = phi.constraint_vars(i);
            if vars.is_empty() {
                if !phi.constraint_holds_bits(i, 0) {
                    clauses.push(HornClause::new(None, vec![]).with_origin(i));
                }
                continue;
            }
            let r = phi.constraint_relation(i)?;
            if !check_property(&r, BaseProperty::Horn) {
                return Err(Error::NotHorn(c.relation.clone()));
            }
            for cl in local_horn_clauses(&r) {
                let head = cl.head.map(|h| vars[h]);
                let body = cl.body.iter().map(|&b| vars[b]).collect();
                clauses.push(HornClause::new(head, body).with_origin(i));
            }
        }
        HornView::new(phi.variables().to_vec(), clauses)
    }

    /// Prime Horn clauses of a Horn relation, over variables `names`.
    pub fn from_relation(r: &Relation, names: Vec<String>) -> Result<Self> {
        if names.len() != r.arity() {
            return Err(Error::ArityMismatch {
                relation: r.name().unwrap_or("R").to_string(),
                expected: r.arity(),
                found: names.len(),
            });
        }
        if !check_property(r, BaseProperty::Horn) {
            return Err(Error::NotHorn(r.name().unwrap_or("R").to_string()));
        }
        HornView::new(names, local_horn_clauses(r))
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn clauses(&self) -> &[HornClause] {
        &self.clauses
    }

    pub fn has_positive_units(&self) -> bool {
        self.clauses.iter().any(HornClause::is_positive_unit)
    }

    pub fn restraint_sets(&self) -> Vec<VarSet> {
        self.clauses
            .iter()
            .filter(|c| c.is_restraint())
            .map(HornClause::vars)
            .collect()
    }

    /// Variable 0 is the most significant bit.
    pub fn eval_bits(&self, a: u64) -> bool {
        let n = self.num_vars();
        self.clauses
            .iter()
            .all(|c| c.eval(|v| a >> (n - 1 - v) & 1 == 1))
    }

    pub fn solutions(&self) -> Result<Vec<u64>> {
        let n = self.num_vars();
        if n > BRUTE_VARS_MAX {
            return Err(Error::TooManyVariables {
                vars: n,
                max: BRUTE_VARS_MAX,
            });
        }
        Ok((0..1u64 << n).filter(|&a| self.eval_bits(a)).collect())
    }

    /// Least fixpoint of unit propagation from `u` and the positive units.
    pub fn imp(&self, u: &VarSet) -> VarSet {
        self.imp_excluding(u, None)
    }

    fn imp_excluding(&self, u: &VarSet, skip: Option<usize>) -> VarSet {
        let mut set = vec![false; self.num_vars()];
        for &v in u {
            set[v] = true;
        }
        loop {
            let mut changed = false;
            for (i, c) in self.clauses.iter().enumerate() {
                if Some(i) == skip {
                    continue;
                }
                if let Some(h) = c.head {
                    if !set[h] && c.body.iter().all(|&b| set[b]) {
                        set[h] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (0..set.len()).filter(|&v| set[v]).collect()
    }

    /// Whether `x` is implied by some set of other variables.
    pub fn is_implied(&self, x: usize) -> bool {
        let others: VarSet = (0..self.num_vars()).filter(|&v| v != x).collect();
        self.imp(&others).contains(&x)
    }

    pub fn is_self_implicating(&self, u: &VarSet) -> bool {
        u.iter().all(|&x| {
            let mut rest = u.clone();
            rest.remove(&x);
            self.imp(&rest).contains(&x)
        })
    }

    pub fn is_maximal_self_implicating(&self, u: &VarSet) -> bool {
        self.is_self_implicating(u) && self.imp(u) == *u
    }

    pub fn contains_restraint_set(&self, u: &VarSet) -> bool {
        self.clauses
            .iter()
            .any(|c| c.is_restraint() && c.body.iter().all(|b| u.contains(b)))
    }

    pub fn ones(&self, a: u64) -> VarSet {
        let n = self.num_vars();
        (0..n).filter(|&v| a >> (n - 1 - v) & 1 == 1).collect()
    }

    pub fn to_bits(&self, u: &VarSet) -> u64 {
        let n = self.num_vars();
        u.iter().fold(0, |a, &v| a | 1 << (n - 1 - v))
    }

    pub fn format_set(&self, u: &VarSet) -> String {
        let names: Vec<&str> = u.iter().map(|&v| self.variables[v].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Parses a set of variable names separated by commas or whitespace.
    pub fn parse_set(&self, text: &str) -> Result<VarSet> {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                self.var_index(s)
                    .ok_or_else(|| Error::UnknownVariable(s.to_string()))
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("var {}\n", self.variables.join(" "));
        for c in &self.clauses {
            out.push_str(&self.format_clause(c));
            out.push('\n');
        }
        out
    }

    pub fn format_clause(&self, c: &HornClause) -> String {
        let name = |v: usize| self.variables[v].as_str();
        match c.head {
            Some(h) if c.body.is_empty() => name(h).to_string(),
            Some(h) => {
                let body: Vec<String> = c.body.iter().map(|&b| format!("-{}", name(b))).collect();
                format!("{} | {}", name(h), body.join(" "))
            }
            None => {
                let body: Vec<&str> = c.body.iter().map(|&b| name(b)).collect();
                format!("- {}", body.join(" ")).trim_end().to_string()
            }
        }
    }
}

impl fmt::Display for HornView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.clauses.iter().map(|c| self.format_clause(c)).collect();
        write!(f, "{}", parts.join(" & "))
    }
}

fn local_horn_clauses(r: &Relation) -> Vec<HornClause> {
    let k = r.arity();
    let LocalForm::Clauses(cs) = relation_clauses(r, SchaeferClass::Horn) else {
        unreachable!("clausal classes give clauses")
    };
    let coords =
        |mask: u32| -> Vec<usize> { (0..k).filter(|&j| mask >> (k - 1 - j) & 1 == 1).collect() };
    cs.into_iter()
        .map(|(vars, neg)| {
            let head = coords(vars & !neg).first().copied();
            HornClause::new(head, coords(neg))
        })
        .collect()
}

/// Parses the clause text format: `x | -y -z` is the implication
/// `x ∨ ¬y ∨ ¬z`, `- y z` (or `-y -z`) the restraint `¬y ∨ ¬z`, a bare `x`
/// a positive unit. An optional `var` line fixes the variable order;
/// otherwise variables are numbered by first appearance.
pub fn parse_horn(text: &str) -> Result<HornView> {
    let mut variables: Vec<String> = Vec::new();
    let mut declared = false;
    let mut raw: Vec<(usize, Option<String>, Vec<String>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = crate::catalog::strip_comment(line).trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno, msg };
        if let Some(rest) = line.strip_prefix("var ").or((line == "var").then_some("")) {
            if declared || !raw.is_empty() {
                return Err(err("var line must come once, before clauses".into()));
            }
            declared = true;
            for v in rest.split_whitespace() {
                if !crate::catalog::is_identifier(v) {
                    return Err(err(format!("bad variable name {v:?}")));
                }
                if variables.iter().any(|w| w == v) {
                    return Err(err(format!("duplicate variable {v}")));
                }
                variables.push(v.to_string());
            }
            continue;
        }
        let (head_part, body_part) = match line.split_once('|') {
            Some((h, b)) => (h.trim(), b.trim()),
            None if line.starts_with('-') => ("", line),
            None => (line, ""),
        };
        let head = if head_part.is_empty() {
            None
        } else {
            let toks: Vec<&str> = head_part.split_whitespace().collect();
            if toks.len() != 1 || toks[0].starts_with('-') {
                return Err(Error::NotHorn(format!("line {lineno}: {line}")));
            }
            Some(toks[0].to_string())
        };
        let mut body = Vec::new();
        let mut toks = body_part.split_whitespace().peekable();
        // a lone leading "-" negates every following variable
        let all_negated = toks.peek() == Some(&"-");
        if all_negated {
            toks.next();
        }
        for t in toks {
            match t.strip_prefix('-') {
                Some(v) if !v.is_empty() => body.push(v.to_string()),
                _ if all_negated && !t.starts_with('-') => body.push(t.to_string()),
                _ => return Err(Error::NotHorn(format!("line {lineno}: {line}"))),
            }
        }
        for v in head.iter().chain(body.iter()) {
            if !crate::catalog::is_identifier(v) {
                return Err(err(format!("bad variable name {v:?}")));
            }
        }
        raw.push((lineno, head, body));
    }
    let index = |v: &str, lineno: usize, variables: &mut Vec<String>| -> Result<usize> {
        if let Some(i) = variables.iter().position(|w| w == v) {
            Ok(i)
        } else if declared {
            Err(Error::Parse {
                line: lineno,
                msg: format!("undeclared variable {v}"),
            })
        } else {
            variables.push(v.to_string());
            Ok(variables.len() - 1)
        }
    };
    let mut clauses = Vec::new();
    for (lineno, head, body) in raw {
        let h = match head {
            Some(h) => Some(index(&h, lineno, &mut variables)?),
            None => None,
        };
        let b = body
            .iter()
            .map(|v| index(v, lineno, &mut variables))
            .collect::<Result<Vec<_>>>()?;
        clauses.push(HornClause::new(h, b));
    }
    HornView::new(variables, clauses)
}

/// Solutions without a smaller neighboring solution.
pub fn locally_minimal_solutions(h: &HornView) -> Result<Vec<u64>> {
    let g = SolutionGraph::from_solutions(h.num_vars(), h.solutions()?);
    Ok(g.locally_minimal())
}

/// Maximal self-implicating sets containing no restraint set, one per
/// component of the solution graph: the 1-sets of the component minima.
/// The empty set stands for the component of the all-zero solution.
pub fn maximal_self_implicating_sets(h: &HornView) -> Result<Vec<VarSet>> {
    if h.has_positive_units() {
        return Err(Error::PositiveUnits);
    }
    let g = SolutionGraph::from_solutions(h.num_vars(), h.solutions()?);
    let mut out = Vec::new();
    for comp in g.components() {
        let meet = comp.iter().fold(u64::MAX, |m, &a| m & a);
        if comp.binary_search(&meet).is_err() {
            return Err(Error::Invariant(
                "component of a Horn formula without minimum".into(),
            ));
        }
        let u = h.ones(meet);
        if !h.is_maximal_self_implicating(&u) || h.contains_restraint_set(&u) {
            return Err(Error::Invariant(format!(
                "component minimum {} is not a restraint-free maximal self-implicating set",
                h.format_set(&u)
            )));
        }
        out.push(u);
    }
    out.sort();
    Ok(out)
}

/// The same sets found by testing every subset against the definitions.
pub fn maximal_self_implicating_sets_search(h: &HornView) -> Result<Vec<VarSet>> {
    let n = h.num_vars();
    if n > BRUTE_VARS_MAX {
        return Err(Error::TooManyVariables {
            vars: n,
            max: BRUTE_VARS_MAX,
        });
    }
    let mut out: Vec<VarSet> = (0..1u64 << n)
        .map(|a| h.ones(a))
        .filter(|u| h.is_maximal_self_implicating(u) && !h.contains_restraint_set(u))
        .collect();
    out.sort();
    Ok(out)
}

/// Which simplification rule fired, for tracing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuRule {
    /// Duplicate literal, tautology or duplicate clause removed.
    B,
    C,
    D,
    E,
}

/// Applies rules (b) to (e) until none applies, scanning clauses by index
/// and literals by variable order. Constants never occur in a clause view;
/// they are eliminated when the clauses are extracted.
pub fn normalize_nu(h: &HornView) -> HornView {
    normalize_nu_traced(h).0
}

pub fn normalize_nu_traced(h: &HornView) -> (HornView, Vec<(NuRule, HornClause)>) {
    let mut cur = h.clone();
    let mut trace = Vec::new();
    // (b): literals are deduplicated on construction
    let mut kept: Vec<HornClause> = Vec::new();
    for c in cur.clauses.drain(..) {
        let c = HornClause::new(c.head, c.body.clone()).with_origin_opt(c.origin);
        if c.is_tautology() || kept.iter().any(|k| k.same_literals(&c)) {
            trace.push((NuRule::B, c));
        } else {
            kept.push(c);
        }
    }
    cur.clauses = kept;
    'outer: loop {
        for i in 0..cur.clauses.len() {
            let c = cur.clauses[i].clone();
            if let Some(head) = c.head.filter(|_| c.is_implication()) {
                let body: VarSet = c.body.iter().copied().collect();
                if cur.imp_excluding(&body, Some(i)).contains(&head) {
                    trace.push((NuRule::C, cur.clauses.remove(i)));
                    continue 'outer;
                }
                if cur.contains_restraint_set(&cur.imp(&c.vars())) {
                    trace.push((NuRule::D, c.clone()));
                    let replaced = HornClause::new(None, c.body.clone()).with_origin_opt(c.origin);
                    if cur.clauses.iter().any(|k| k.same_literals(&replaced)) {
                        cur.clauses.remove(i);
                    } else {
                        cur.clauses[i] = replaced;
                    }
                    continue 'outer;
                }
            }
            if c.body.len() >= 2 {
                for (j, &y) in c.body.iter().enumerate() {
                    let rest: VarSet = c.body.iter().copied().filter(|&b| b != y).collect();
                    if cur.imp_excluding(&rest, Some(i)).contains(&y) {
                        trace.push((NuRule::E, c.clone()));
                        let mut body = c.body.clone();
                        body.remove(j);
                        let shrunk = HornClause::new(c.head, body).with_origin_opt(c.origin);
                        if shrunk.is_tautology()
                            || cur.clauses.iter().any(|k| k.same_literals(&shrunk))
                        {
                            cur.clauses.remove(i);
                        } else {
                            cur.clauses[i] = shrunk;
                        }
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    (cur, trace)
}

impl HornClause {
    fn with_origin_opt(mut self, origin: Option<usize>) -> Self {
        self.origin = origin;
        self
    }
}
