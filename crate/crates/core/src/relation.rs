//! Explicit Boolean relations.
//!
//! A relation of arity `n` is a membership table over the `2^n` tuples.
//! Tuples are encoded as integers with coordinate 0 as the most significant
//! bit, so the tuple `011` of a ternary relation has index 3.

use std::fmt;

use crate::error::{Error, Result};

/// Largest arity a [`Relation`] may have.
pub const ARITY_MAX: usize = 16;

/// Largest arity for which identification-closed ("safely") checks enumerate
/// all set partitions of the coordinates.
pub const SAFE_CHECK_ARITY_MAX: usize = 10;

#[derive(Clone)]
pub struct Relation {
    arity: usize,
    bits: Vec<u64>,
    name: Option<String>,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.bits == other.bits
    }
}

impl Eq for Relation {}

impl Relation {
    /// The empty relation of the given arity.
    pub fn empty(arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        if arity > ARITY_MAX {
            return Err(Error::ArityTooLarge {
                arity,
                max: ARITY_MAX,
            });
        }
        let words = (1usize << arity).div_ceil(64);
        Ok(Relation {
            arity,
            bits: vec![0; words],
            name: None,
        })
    }

    /// `{0,1}^arity`.
    pub fn full(arity: usize) -> Result<Self> {
        Self::from_tuples(arity, 0..(1u32 << arity))
    }

    pub fn from_tuples<I: IntoIterator<Item = u32>>(arity: usize, tuples: I) -> Result<Self> {
        let mut rel = Self::empty(arity)?;
        for t in tuples {
            if (t as u64) >> arity != 0 {
                return Err(Error::BadTuple {
                    tuple: t.to_string(),
                    arity,
                });
            }
            rel.insert(t);
        }
        Ok(rel)
    }

    pub fn from_bitstrings(arity: usize, tuples: &[&str]) -> Result<Self> {
        let parsed = tuples
            .iter()
            .map(|s| parse_tuple(s, arity))
            .collect::<Result<Vec<_>>>()?;
        Self::from_tuples(arity, parsed)
    }

    /// Builds the relation of all tuples accepted by `pred`.
    pub fn from_predicate(arity: usize, pred: impl Fn(u32) -> bool) -> Result<Self> {
        let mut rel = Self::empty(arity)?;
        for t in 0..(1u32 << arity) {
            if pred(t) {
                rel.insert(t);
            }
        }
        Ok(rel)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn contains(&self, tuple: u32) -> bool {
        let t = tuple as usize;
        t >> self.arity == 0 && self.bits[t / 64] >> (t % 64) & 1 == 1
    }

    fn insert(&mut self, tuple: u32) {
        let t = tuple as usize;
        self.bits[t / 64] |= 1 << (t % 64);
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Member tuples in ascending order.
    pub fn tuples(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some((i * 64) as u32 + b)
            })
        })
    }

    /// Bit of coordinate `coord` (0-based, most significant first) in `tuple`.
    pub fn coord(&self, tuple: u32, coord: usize) -> bool {
        tuple >> (self.arity - 1 - coord) & 1 == 1
    }

    pub fn format_tuple(&self, tuple: u32) -> String {
        format_bits(tuple as u64, self.arity)
    }

    /// Applies an argument pattern: the result contains `a` iff evaluating
    /// every slot of `pattern` under `a` yields a member of `self`.
    ///
    /// This covers substitution of constants, identification of variables and
    /// permutations.
    pub fn apply(&self, pattern: &ArgPattern) -> Result<Relation> {
        if pattern.slots.len() != self.arity {
            return Err(Error::PatternLength {
                expected: self.arity,
                found: pattern.slots.len(),
            });
        }
        let m = pattern.output_arity();
        if m == 0 {
            return Err(Error::ZeroArity);
        }
        let n = self.arity;
        let mut base = 0u32;
        let mut moves = Vec::new();
        for (i, slot) in pattern.slots.iter().enumerate() {
            match *slot {
                Slot::Const(true) => base |= 1 << (n - 1 - i),
                Slot::Const(false) => {}
                Slot::Var(j) => moves.push((m - 1 - j, n - 1 - i)),
            }
        }
        Relation::from_predicate(m, |a| {
            let mut t = base;
            for &(from, to) in &moves {
                t |= (a >> from & 1) << to;
            }
            self.contains(t)
        })
    }

    /// Connected components of the solution graph of this relation, each as
    /// a sub-relation of the same arity, ordered by least member.
    pub fn components(&self) -> Vec<Relation> {
        let mut seen = Relation::empty(self.arity).expect("arity already validated");
        let mut out = Vec::new();
        for start in self.tuples() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = Relation::empty(self.arity).expect("arity already validated");
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(t) = stack.pop() {
                comp.insert(t);
                for b in 0..self.arity {
                    let u = t ^ (1 << b);
                    if self.contains(u) && !seen.contains(u) {
                        seen.insert(u);
                        stack.push(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Coordinate-wise conjunction of all members, if the relation is non-empty.
    pub fn meet(&self) -> Option<u32> {
        self.tuples().reduce(|a, b| a & b)
    }

    /// All relations obtained by identification of variables, one per set
    /// partition of the coordinates (identity partition first).
    pub fn identifications(&self) -> Result<Vec<Identification>> {
        Ok(self.identification_iter()?.collect())
    }

    pub fn identification_iter(&self) -> Result<impl Iterator<Item = Identification> + '_> {
        if self.arity > SAFE_CHECK_ARITY_MAX {
            return Err(Error::ArityTooLarge {
                arity: self.arity,
                max: SAFE_CHECK_ARITY_MAX,
            });
        }
        Ok(SetPartitions::new(self.arity).map(move |blocks| {
            let relation = self
                .apply(&ArgPattern::from_partition(&blocks))
                .expect("partition patterns match the arity");
            Identification { blocks, relation }
        }))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            write!(f, "{name}")?;
        }
        write!(f, "{self}")
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.format_tuple(t))?;
        }
        write!(f, "}}")
    }
}

pub fn format_bits(value: u64, width: usize) -> String {
    (0..width)
        .map(|i| {
            if value >> (width - 1 - i) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

pub fn parse_tuple(s: &str, arity: usize) -> Result<u32> {
    let bad = || Error::BadTuple {
        tuple: s.to_string(),
        arity,
    };
    if s.len() != arity || arity > ARITY_MAX {
        return Err(bad());
    }
    s.chars().try_fold(0u32, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        _ => Err(bad()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Const(bool),
    Var(usize),
}

/// One argument slot per coordinate of the source relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgPattern {
    slots: Vec<Slot>,
}

impl ArgPattern {
    /// Every output variable `0..m` must occur in some slot.
    pub fn new(slots: Vec<Slot>) -> Result<Self> {
        let m = output_arity(&slots);
        let mut used = vec![false; m];
        for s in &slots {
            if let Slot::Var(j) = s {
                used[*j] = true;
            }
        }
        if let Some(j) = used.iter().position(|u| !u) {
            return Err(Error::DanglingOutput(j));
        }
        Ok(ArgPattern { slots })
    }

    pub fn identity(n: usize) -> Self {
        ArgPattern {
            slots: (0..n).map(Slot::Var).collect(),
        }
    }

    /// Pattern for a restricted growth string: coordinate `i` becomes output
    /// variable `blocks[i]`.
    pub fn from_partition(blocks: &[usize]) -> Self {
        ArgPattern {
            slots: blocks.iter().map(|&b| Slot::Var(b)).collect(),
        }
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn output_arity(&self) -> usize {
        output_arity(&self.slots)
    }

    /// Each output variable occurs at most once.
    pub fn is_substitution(&self) -> bool {
        let mut seen = vec![false; self.output_arity()];
        for s in &self.slots {
            if let Slot::Var(j) = s {
                if std::mem::replace(&mut seen[*j], true) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_identification(&self) -> bool {
        self.slots.iter().all(|s| matches!(s, Slot::Var(_)))
    }
}

impl fmt::Display for ArgPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                Slot::Const(b) => write!(f, "{}", *b as u8)?,
                Slot::Var(j) => write!(f, "x{}", j + 1)?,
            }
        }
        write!(f, ")")
    }
}

fn output_arity(slots: &[Slot]) -> usize {
    slots
        .iter()
        .filter_map(|s| match s {
            Slot::Var(j) => Some(j + 1),
            Slot::Const(_) => None,
        })
        .max()
        .unwrap_or(0)
}

/// A relation obtained by identification of variables, with the partition
/// (as a restricted growth string) that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identification {
    pub blocks: Vec<usize>,
    pub relation: Relation,
}

impl Identification {
    /// Blocks as 1-based coordinate lists, e.g. `{1}{2}{3,4}`.
    pub fn block_lists(&self) -> Vec<Vec<usize>> {
        let k = self.blocks.iter().max().map_or(0, |m| m + 1);
        let mut lists = vec![Vec::new(); k];
        for (i, &b) in self.blocks.iter().enumerate() {
            lists[b].push(i + 1);
        }
        lists
    }
}

/// Set partitions of `{0..n}` as restricted growth strings, in reverse
/// lexicographic order: the identity partition (all blocks singletons) comes
/// first, the single block last. Blocks are numbered by their least element.
pub struct SetPartitions {
    current: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        SetPartitions {
            current: (0..n).collect(),
            done: false,
        }
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let n = self.current.len();
        match (1..n).rev().find(|&i| self.current[i] > 0) {
            Some(i) => {
                self.current[i] -= 1;
                let max = self.current[..=i].iter().copied().max().unwrap_or(0);
                for (k, slot) in self.current[i + 1..].iter_mut().enumerate() {
                    *slot = max + 1 + k;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(arity: usize, ts: &[&str]) -> Relation {
        Relation::from_bitstrings(arity, ts).unwrap()
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=6).map(|n| SetPartitions::new(n).count()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52, 203]);
        let all: Vec<Vec<usize>> = SetPartitions::new(3).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1, 2],
                vec![0, 1, 1],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![0, 0, 0]
            ]
        );
    }

    #[test]
    fn identify_first_two() {
        let r = rel(3, &["001", "110", "111"]);
        let p = ArgPattern::new(vec![Slot::Var(0), Slot::Var(0), Slot::Var(1)]).unwrap();
        assert_eq!(r.apply(&p).unwrap(), rel(2, &["01", "10", "11"]));
    }

    #[test]
    fn substitute_constants() {
        let r = rel(4, &["0001", "0010", "1100", "1110", "1101"]);
        let p = ArgPattern::new(vec![
            Slot::Const(true),
            Slot::Const(true),
            Slot::Var(0),
            Slot::Var(1),
        ])
        .unwrap();
        assert!(p.is_substitution());
        assert_eq!(r.apply(&p).unwrap(), rel(2, &["00", "01", "10"]));
    }

    #[test]
    fn identity_pattern_is_noop() {
        let r = rel(3, &["000", "011", "101"]);
        assert_eq!(r.apply(&ArgPattern::identity(3)).unwrap(), r);
    }

    #[test]
    fn pattern_errors() {
        let r = rel(2, &["01"]);
        assert!(matches!(
            r.apply(&ArgPattern::identity(3)),
            Err(Error::PatternLength { .. })
        ));
        let all_const = ArgPattern::new(vec![Slot::Const(false), Slot::Const(true)]).unwrap();
        assert_eq!(r.apply(&all_const), Err(Error::ZeroArity));
        assert_eq!(
            ArgPattern::new(vec![Slot::Var(1), Slot::Var(1)]),
            Err(Error::DanglingOutput(0))
        );
    }

    #[test]
    fn components_of_rconp() {
        let r = rel(4, &["0000", "0100", "1100", "0011", "1011"]);
        let comps = r.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], rel(4, &["0000", "0100", "1100"]));
        assert_eq!(comps[1], rel(4, &["0011", "1011"]));
        assert_eq!(Relation::full(2).unwrap().components().len(), 1);
        assert!(Relation::empty(3).unwrap().components().is_empty());
    }

    #[test]
    fn four_isolated_points() {
        let r = rel(4, &["0000", "1100", "0110", "1001"]);
        assert_eq!(r.components().len(), 4);
    }

    #[test]
    fn identification_of_last_two() {
        let r = rel(4, &["0000", "0100", "1100", "0011", "1011"]);
        let ids = r.identifications().unwrap();
        assert_eq!(ids.len(), 15);
        let target = rel(3, &["000", "010", "110", "001", "101"]);
        let hit = ids.iter().find(|i| i.blocks == vec![0, 1, 2, 2]).unwrap();
        assert_eq!(hit.relation, target);
        assert_eq!(hit.block_lists(), vec![vec![1], vec![2], vec![3, 4]]);
    }

    #[test]
    fn identification_bound() {
        let r = Relation::full(11).unwrap();
        assert!(matches!(
            r.identifications(),
            Err(Error::ArityTooLarge { .. })
        ));
    }

    #[test]
    fn tuple_parsing() {
        assert_eq!(parse_tuple("011", 3).unwrap(), 3);
        assert!(parse_tuple("01", 3).is_err());
        assert!(parse_tuple("0a1", 3).is_err());
        assert_eq!(format_bits(5, 4), "0101");
        assert!(Relation::empty(17).is_err());
    }
}
