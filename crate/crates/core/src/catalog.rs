//! Built-in relations and the relation text format.
//!
//! ```text
//! # comment
//! rel M 3 : 000 001 010 101 111
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::relation::{parse_tuple, Relation};

pub type Library = BTreeMap<String, Relation>;

fn table(name: &str, arity: usize, tuples: &[&str]) -> Relation {
    Relation::from_bitstrings(arity, tuples)
        .expect("static catalog entry")
        .with_name(name)
}

fn cube_minus(name: &str, arity: usize, missing: &[&str]) -> Relation {
    let missing: Vec<u32> = missing
        .iter()
        .map(|s| parse_tuple(s, arity).expect("static"))
        .collect();
    Relation::from_predicate(arity, |t| !missing.contains(&t))
        .expect("static catalog entry")
        .with_name(name)
}

pub fn or() -> Relation {
    table("OR", 2, &["01", "10", "11"])
}

pub fn nand() -> Relation {
    table("NAND", 2, &["00", "01", "10"])
}

/// `x | y | z`
pub fn p() -> Relation {
    cube_minus("P", 3, &["000"])
}

/// `!x | !y`
pub fn n() -> Relation {
    table("N", 2, &["00", "01", "10"])
}

/// `(x | !y | !z) & (!x | z)`
pub fn m() -> Relation {
    table("M", 3, &["000", "001", "010", "101", "111"])
}

/// `x | !y | !z`
pub fn k() -> Relation {
    cube_minus("K", 3, &["011"])
}

/// `(x | !y | !z) & (!x | !y | z)`
pub fn l() -> Relation {
    cube_minus("L", 3, &["011", "110"])
}

pub fn r_conp() -> Relation {
    table("R_coNP", 4, &["0000", "0100", "1100", "0011", "1011"])
}

pub fn r_pspa() -> Relation {
    table("R_PSPA", 4, &["0001", "0010", "1100", "1110", "1101"])
}

pub fn r_nae() -> Relation {
    cube_minus("R_NAE", 3, &["000", "111"])
}

pub fn r_naz() -> Relation {
    cube_minus("R_NAZ", 3, &["000"])
}

/// `(x & y) | (!x & !y & (!z | !w))` over `(x, y, z, w)`.
pub fn phi_conp() -> Relation {
    table(
        "PHI_coNP",
        4,
        &["0000", "0001", "0010", "1100", "1101", "1110", "1111"],
    )
}

/// `((x | !y) & !z) | (!x & y & z)`, safely componentwise bijunctive but
/// not bijunctive.
pub fn r_nonsep() -> Relation {
    table("R_NONSEP", 3, &["000", "100", "110", "011"])
}

pub fn builtin_library() -> Library {
    [
        or(),
        nand(),
        p(),
        n(),
        m(),
        k(),
        l(),
        r_conp(),
        r_pspa(),
        r_nae(),
        r_naz(),
        phi_conp(),
        r_nonsep(),
    ]
    .into_iter()
    .map(|r| (r.name().expect("named").to_string(), r))
    .collect()
}

pub fn builtin(name: &str) -> Option<Relation> {
    builtin_library().remove(name)
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parses a single `rel NAME ARITY : t1 t2 ...` line (without comment).
pub fn parse_relation_line(line: &str, lineno: usize) -> Result<Relation> {
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let (head, tail) = line
        .split_once(':')
        .ok_or_else(|| err("expected `:` after the relation header".into()))?;
    let head: Vec<&str> = head.split_whitespace().collect();
    match head.as_slice() {
        ["rel", name, arity] => {
            if !is_identifier(name) {
                return Err(err(format!("invalid relation name `{name}`")));
            }
            let arity: usize = arity
                .parse()
                .map_err(|_| err(format!("invalid arity `{arity}`")))?;
            let tuples = tail
                .split_whitespace()
                .map(|t| parse_tuple(t, arity))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| err(e.to_string()))?;
            Ok(Relation::from_tuples(arity, tuples)
                .map_err(|e| err(e.to_string()))?
                .with_name(*name))
        }
        _ => Err(err("expected `rel NAME ARITY : tuples...`".into())),
    }
}

/// Parses a relation file. Lines that are blank or comments are skipped.
pub fn parse_relations(text: &str) -> Result<Vec<Relation>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = strip_comment(raw);
            (!line.is_empty()).then(|| parse_relation_line(line, i + 1))
        })
        .collect()
}

pub fn format_relation(r: &Relation) -> String {
    let mut s = format!("rel {} {} :", r.name().unwrap_or("R"), r.arity());
    for t in r.tuples() {
        s.push(' ');
        s.push_str(&r.format_tuple(t));
    }
    s
}
