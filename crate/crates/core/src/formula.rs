//! CNF_C(S)-formulas: conjunctions of relation applications whose arguments
//! are variables or the constants 0 and 1, with repetition allowed.
//!
//! Text format:
//!
//! ```text
//! rel IMP 2 : 00 10 11     # optional inline relation definitions
//! var x y z                # optional; fixes the coordinate order
//! IMP(x,y)
//! M(q1,0,a11)
//! ```
//!
//! Without a `var` line the coordinate order is the order of first
//! appearance. Assignments are bit-encoded with variable 0 as the most
//! significant bit.

use std::collections::HashMap;
use std::fmt;

use crate::catalog::{self, is_identifier, strip_comment, Library};
use crate::error::{Error, Result};
use crate::relation::{format_bits, ArgPattern, Relation, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arg {
    Const(bool),
    Var(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub relation: String,
    pub args: Vec<Arg>,
}

#[derive(Debug, Clone)]
struct Compiled {
    base: u32,
    // (variable index, bit position in the relation tuple)
    moves: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct Formula {
    variables: Vec<String>,
    constraints: Vec<Constraint>,
    library: Library,
    compiled: Vec<Compiled>,
}

impl Formula {
    pub fn new(
        variables: Vec<String>,
        constraints: Vec<Constraint>,
        library: Library,
    ) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::EmptyFormula);
        }
        let mut seen = HashMap::new();
        for (i, v) in variables.iter().enumerate() {
            if seen.insert(v.as_str(), i).is_some() {
                return Err(Error::Precondition(format!("duplicate variable `{v}`")));
            }
        }
        let mut compiled = Vec::with_capacity(constraints.len());
        for c in &constraints {
            let rel = library
                .get(&c.relation)
                .ok_or_else(|| Error::UnknownRelation(c.relation.clone()))?;
            if rel.arity() != c.args.len() {
                return Err(Error::ArityMismatch {
                    relation: c.relation.clone(),
                    expected: rel.arity(),
                    found: c.args.len(),
                });
            }
            let k = rel.arity();
            let mut base = 0;
            let mut moves = Vec::new();
            for (slot, arg) in c.args.iter().enumerate() {
                match *arg {
                    Arg::Const(true) => base |= 1 << (k - 1 - slot),
                    Arg::Const(false) => {}
                    Arg::Var(v) if v < variables.len() => moves.push((v, k - 1 - slot)),
                    Arg::Var(v) => return Err(Error::UnknownVariable(format!("#{v}"))),
                }
            }
            compiled.push(Compiled { base, moves });
        }
        Ok(Formula {
            variables,
            constraints,
            library,
            compiled,
        })
    }

    /// Builds a formula from constraints given by name, e.g.
    /// `("M", &["x", "0", "z"])`. Variables are ordered by first appearance.
    pub fn from_named(library: Library, constraints: &[(&str, &[&str])]) -> Result<Self> {
        let mut vars = VarTable::default();
        let cs = constraints
            .iter()
            .map(|(rel, args)| Constraint {
                relation: rel.to_string(),
                args: args.iter().map(|a| vars.arg(a)).collect(),
            })
            .collect();
        Formula::new(vars.names, cs, library)
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

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn library(&self) -> &Library {
        &self.library
    }

    pub fn relation_of(&self, c: &Constraint) -> &Relation {
        &self.library[&c.relation]
    }

    /// Library relations referenced by some constraint, by name.
    pub fn used_relations(&self) -> Vec<&Relation> {
        let mut names: Vec<&str> = self
            .constraints
            .iter()
            .map(|c| c.relation.as_str())
            .collect();
        names.sort_unstable();
        names.dedup();
        names.into_iter().map(|n| &self.library[n]).collect()
    }

    /// Evaluates under a bit-encoded assignment (requires at most 64 variables).
    pub fn eval_bits(&self, a: u64) -> bool {
        let n = self.variables.len();
        self.constraints
            .iter()
            .zip(&self.compiled)
            .all(|(c, comp)| {
                let mut t = comp.base;
                for &(v, pos) in &comp.moves {
                    t |= ((a >> (n - 1 - v) & 1) as u32) << pos;
                }
                self.library[&c.relation].contains(t)
            })
    }

    /// Whether constraint `i` alone holds under the bit-encoded assignment.
    pub fn constraint_holds_bits(&self, i: usize, a: u64) -> bool {
        let n = self.variables.len();
        let comp = &self.compiled[i];
        let mut t = comp.base;
        for &(v, pos) in &comp.moves {
            t |= ((a >> (n - 1 - v) & 1) as u32) << pos;
        }
        self.library[&self.constraints[i].relation].contains(t)
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.variables.len() {
            return Err(Error::AssignmentLength {
                expected: self.variables.len(),
                found: assignment.len(),
            });
        }
        Ok(self.constraints.iter().all(|c| {
            let rel = self.relation_of(c);
            let k = c.args.len();
            let t = c.args.iter().enumerate().fold(0u32, |t, (slot, arg)| {
                let bit = match *arg {
                    Arg::Const(b) => b,
                    Arg::Var(v) => assignment[v],
                };
                t | (bit as u32) << (k - 1 - slot)
            });
            rel.contains(t)
        }))
    }

    /// Distinct variables of constraint `i`, in coordinate order.
    pub fn constraint_vars(&self, i: usize) -> Vec<usize> {
        let mut vs: Vec<usize> = self.constraints[i]
            .args
            .iter()
            .filter_map(|a| match a {
                Arg::Var(v) => Some(*v),
                Arg::Const(_) => None,
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// The relation over `constraint_vars(i)` obtained by substituting the
    /// constraint's constants and identifying its repeated variables.
    pub fn constraint_relation(&self, i: usize) -> Result<Relation> {
        let vars = self.constraint_vars(i);
        if vars.is_empty() {
            return Err(Error::NoVariables(i));
        }
        let c = &self.constraints[i];
        let slots = c
            .args
            .iter()
            .map(|a| match *a {
                Arg::Const(b) => Slot::Const(b),
                Arg::Var(v) => Slot::Var(vars.binary_search(&v).expect("collected above")),
            })
            .collect();
        self.relation_of(c).apply(&ArgPattern::new(slots)?)
    }

    pub fn format_assignment(&self, a: u64) -> String {
        format_bits(a, self.variables.len())
    }

    pub fn parse_assignment(&self, s: &str) -> Result<u64> {
        let n = self.variables.len();
        if s.len() != n || n > 64 {
            return Err(Error::AssignmentLength {
                expected: n,
                found: s.len(),
            });
        }
        s.chars().try_fold(0u64, |acc, c| match c {
            '0' => Ok(acc << 1),
            '1' => Ok(acc << 1 | 1),
            _ => Err(Error::BadTuple {
                tuple: s.to_string(),
                arity: n,
            }),
        })
    }

    /// The same formula with variables reordered: new variable `j` is old
    /// variable `perm[j]`.
    pub fn permute_variables(&self, perm: &[usize]) -> Result<Formula> {
        let mut inverse = vec![0; perm.len()];
        for (j, &old) in perm.iter().enumerate() {
            inverse[old] = j;
        }
        let variables = perm.iter().map(|&o| self.variables[o].clone()).collect();
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint {
                relation: c.relation.clone(),
                args: c
                    .args
                    .iter()
                    .map(|a| match *a {
                        Arg::Var(v) => Arg::Var(inverse[v]),
                        other => other,
                    })
                    .collect(),
            })
            .collect();
        Formula::new(variables, constraints, self.library.clone())
    }

    /// Text form including definitions of all referenced relations.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in self.used_relations() {
            out.push_str(&catalog::format_relation(r));
            out.push('\n');
        }
        out.push_str(&format!("var {}\n", self.variables.join(" ")));
        for c in &self.constraints {
            out.push_str(&self.format_constraint(c));
            out.push('\n');
        }
        out
    }

    pub fn format_constraint(&self, c: &Constraint) -> String {
        let args: Vec<String> = c
            .args
            .iter()
            .map(|a| match a {
                Arg::Const(b) => (*b as u8).to_string(),
                Arg::Var(v) => self.variables[*v].clone(),
            })
            .collect();
        format!("{}({})", c.relation, args.join(","))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .constraints
            .iter()
            .map(|c| self.format_constraint(c))
            .collect();
        write!(f, "{}", parts.join(" & "))
    }
}

#[derive(Default)]
struct VarTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl VarTable {
    fn insert(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    fn arg(&mut self, token: &str) -> Arg {
        match token {
            "0" => Arg::Const(false),
            "1" => Arg::Const(true),
            v => Arg::Var(self.insert(v)),
        }
    }
}

/// Parses a formula; relation names resolve against inline `rel` lines
/// first, then against `library`.
pub fn parse_formula(text: &str, library: &Library) -> Result<Formula> {
    let mut lib = library.clone();
    let mut vars = VarTable::default();
    let mut declared = false;
    let mut constraints = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno, msg };
        if line.starts_with("rel ") {
            let r = catalog::parse_relation_line(line, lineno)?;
            lib.insert(r.name().expect("parsed relations are named").to_string(), r);
        } else if let Some(rest) = line.strip_prefix("var ").or((line == "var").then_some("")) {
            if declared || !vars.names.is_empty() {
                return Err(err("`var` must appear once, before any constraint".into()));
            }
            declared = true;
            for v in rest.split_whitespace() {
                if !is_identifier(v) {
                    return Err(err(format!("invalid variable name `{v}`")));
                }
                if vars.index.contains_key(v) {
                    return Err(err(format!("duplicate variable `{v}`")));
                }
                vars.insert(v);
            }
        } else {
            let (name, rest) = line
                .split_once('(')
                .ok_or_else(|| err(format!("expected `NAME(args)`, found `{line}`")))?;
            let name = name.trim();
            let inner = rest
                .trim_end()
                .strip_suffix(')')
                .ok_or_else(|| err("missing `)`".into()))?;
            if !is_identifier(name) {
                return Err(err(format!("invalid relation name `{name}`")));
            }
            let mut args = Vec::new();
            for tok in inner.split(',').map(str::trim) {
                let arg = match tok {
                    "0" | "1" => vars.arg(tok),
                    v if is_identifier(v) => {
                        if declared && !vars.index.contains_key(v) {
                            return Err(Error::UnknownVariable(v.to_string()));
                        }
                        vars.arg(v)
                    }
                    _ => return Err(err(format!("malformed argument `{tok}`"))),
                };
                args.push(arg);
            }
            let rel = lib
                .get(name)
                .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
            if rel.arity() != args.len() {
                return Err(Error::ArityMismatch {
                    relation: name.to_string(),
                    expected: rel.arity(),
                    found: args.len(),
                });
            }
            constraints.push(Constraint {
                relation: name.to_string(),
                args,
            });
        }
    }
    Formula::new(vars.names, constraints, lib)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_library;

    fn parse(text: &str) -> Result<Formula> {
        parse_formula(text, &builtin_library())
    }

    #[test]
    fn minimal_parse() {
        let f = parse("var x y z\nM(x,y,z)\n").unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.constraints().len(), 1);
    }

    #[test]
    fn constants_and_repeats() {
        let f = parse("M(q1,0,a11)").unwrap();
        assert_eq!(f.constraints()[0].args[1], Arg::Const(false));
        let g = parse("M(x, x, z)").unwrap();
        assert_eq!(g.num_vars(), 2);
        assert_eq!(
            g.constraints()[0].args,
            vec![Arg::Var(0), Arg::Var(0), Arg::Var(1)]
        );
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse("Q(x)").unwrap_err(),
            Error::UnknownRelation("Q".into())
        );
        assert!(matches!(parse("M(x,y)"), Err(Error::ArityMismatch { .. })));
        assert_eq!(parse("# nothing\n").unwrap_err(), Error::EmptyFormula);
        assert!(matches!(parse("M(x,y,z"), Err(Error::Parse { .. })));
        assert!(matches!(parse("M(x,y-,z)"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse("var x y\nM(x,y,z)"),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn var_header_fixes_order() {
        let f = parse("var z y x\nM(x,y,z)").unwrap();
        assert_eq!(f.variables(), ["z", "y", "x"]);
        // x=1,y=0,z=1 is in M; encoded in (z,y,x) order as 101
        assert!(f.eval_bits(0b101));
        assert!(!f.eval_bits(0b001));
    }

    #[test]
    fn inline_relations() {
        let f = parse("rel IMP 2 : 00 10 11\nIMP(x,y)\nIMP(y,x)").unwrap();
        let sols: Vec<u64> = (0..4).filter(|&a| f.eval_bits(a)).collect();
        assert_eq!(sols, vec![0b00, 0b11]);
    }

    #[test]
    fn evaluate_m() {
        let f = parse("M(x,y,z)").unwrap();
        assert!(f.evaluate(&[false, false, false]).unwrap());
        assert!(!f.evaluate(&[true, false, false]).unwrap());
        assert_eq!(
            f.evaluate(&[true]),
            Err(Error::AssignmentLength {
                expected: 3,
                found: 1
            })
        );
        for a in 0..8 {
            let bits: Vec<bool> = (0..3).map(|i| a >> (2 - i) & 1 == 1).collect();
            assert_eq!(f.eval_bits(a), f.evaluate(&bits).unwrap());
        }
    }

    #[test]
    fn constraint_relations() {
        let f = parse("M(x,x,z)\nM(0,y,z)\nM(a,b,c)").unwrap();
        let imp = Relation::from_bitstrings(2, &["00", "01", "11"]).unwrap();
        assert_eq!(f.constraint_relation(0).unwrap(), imp);
        assert_eq!(f.constraint_relation(1).unwrap(), catalog::nand());
        assert_eq!(f.constraint_relation(2).unwrap(), catalog::m());
        let g = parse("M(0,0,1)\nM(x,y,z)").unwrap();
        assert_eq!(g.constraint_relation(0), Err(Error::NoVariables(0)));
    }

    #[test]
    fn text_round_trip() {
        let f = parse("rel IMP 2 : 00 10 11\nIMP(x,y)\nM(y,0,z)").unwrap();
        let g = parse(&f.to_text()).unwrap();
        assert_eq!(g.variables(), f.variables());
        assert_eq!(g.constraints(), f.constraints());
    }
}
