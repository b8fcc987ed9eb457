//! Brute-force oracle over the solution graph `G(phi)`: the subgraph of the
//! hypercube induced by the satisfying assignments, with edges between
//! assignments at Hamming distance one.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Arg, Formula};
use crate::relation::format_bits;

/// Largest number of variables enumerated by the oracle.
pub const BRUTE_VARS_MAX: usize = 24;

pub fn hamming(a: u64, b: u64) -> u32 {
    (a ^ b).count_ones()
}

/// All satisfying assignments in ascending order.
///
/// Variables are assigned most significant first and every constraint is
/// checked as soon as its last variable is set.
pub fn solutions(phi: &Formula) -> Result<Vec<u64>> {
    let n = phi.num_vars();
    if n > BRUTE_VARS_MAX {
        return Err(Error::TooManyVariables {
            vars: n,
            max: BRUTE_VARS_MAX,
        });
    }
    // constraints grouped by the position after which they are decided
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (i, c) in phi.constraints().iter().enumerate() {
        let last = c
            .args
            .iter()
            .filter_map(|a| match a {
                Arg::Var(v) => Some(v + 1),
                Arg::Const(_) => None,
            })
            .max()
            .unwrap_or(0);
        due[last].push(i);
    }
    let mut out = Vec::new();
    if !due[0].iter().all(|&i| phi.constraint_holds_bits(i, 0)) {
        return Ok(out);
    }
    if n == 0 {
        out.push(0);
        return Ok(out);
    }
    // explicit DFS over (depth, partial assignment); 0-branch explored first
    let mut stack: Vec<(usize, u64)> = vec![(0, 0)];
    while let Some((depth, a)) = stack.pop() {
        if depth == n {
            out.push(a);
            continue;
        }
        let bit = 1u64 << (n - 1 - depth);
        for value in [a | bit, a] {
            if due[depth + 1]
                .iter()
                .all(|&i| phi.constraint_holds_bits(i, value))
            {
                stack.push((depth + 1, value));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SolutionGraph {
    num_vars: usize,
    solutions: Vec<u64>,
}

impl SolutionGraph {
    pub fn new(phi: &Formula) -> Result<Self> {
        Ok(SolutionGraph {
            num_vars: phi.num_vars(),
            solutions: solutions(phi)?,
        })
    }

    /// Graph induced by an explicit set of vertices of the `num_vars`-cube.
    pub fn from_solutions(num_vars: usize, mut solutions: Vec<u64>) -> Self {
        solutions.sort_unstable();
        solutions.dedup();
        SolutionGraph {
            num_vars,
            solutions,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn solutions(&self) -> &[u64] {
        &self.solutions
    }

    fn index(&self, a: u64) -> Option<usize> {
        self.solutions.binary_search(&a).ok()
    }

    pub fn is_solution(&self, a: u64) -> bool {
        self.index(a).is_some()
    }

    pub fn neighbors(&self, a: u64) -> impl Iterator<Item = u64> + '_ {
        (0..self.num_vars)
            .rev()
            .map(move |b| a ^ (1 << b))
            .filter(move |&u| self.is_solution(u))
    }

    /// Connected components, each sorted, ordered by least element.
    pub fn components(&self) -> Vec<Vec<u64>> {
        let mut seen = vec![false; self.solutions.len()];
        let mut out = Vec::new();
        for (i, &start) in self.solutions.iter().enumerate() {
            if seen[i] {
                continue;
            }
            seen[i] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(a) = stack.pop() {
                for u in self.neighbors(a) {
                    let j = self.index(u).expect("neighbor is a solution");
                    if !seen[j] {
                        seen[j] = true;
                        comp.push(u);
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Connected when there is at most one component; no solutions counts
    /// as connected.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Breadth-first distances from `source`, indexed like `solutions()`.
    pub fn distances_from(&self, source: u64) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.solutions.len()];
        let Some(s) = self.index(source) else {
            return dist;
        };
        dist[s] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(a) = queue.pop_front() {
            let d = dist[self.index(a).expect("queued solutions")].expect("visited");
            for u in self.neighbors(a) {
                let j = self.index(u).expect("neighbor is a solution");
                if dist[j].is_none() {
                    dist[j] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: u64, b: u64) -> Option<u32> {
        let j = self.index(b)?;
        self.distances_from(a)[j]
    }

    /// A shortest path from `s` to `t` (both endpoints included).
    pub fn shortest_path(&self, s: u64, t: u64) -> Result<Option<Vec<u64>>> {
        for x in [s, t] {
            if !self.is_solution(x) {
                return Err(Error::NotASolution(format_bits(x, self.num_vars)));
            }
        }
        let mut parent: Vec<Option<u64>> = vec![None; self.solutions.len()];
        let si = self.index(s).expect("checked");
        parent[si] = Some(s);
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            if a == t {
                let mut path = vec![t];
                let mut cur = t;
                while cur != s {
                    cur = parent[self.index(cur).expect("on path")].expect("visited");
                    path.push(cur);
                }
                path.reverse();
                return Ok(Some(path));
            }
            for u in self.neighbors(a) {
                let j = self.index(u).expect("neighbor is a solution");
                if parent[j].is_none() {
                    parent[j] = Some(a);
                    queue.push_back(u);
                }
            }
        }
        Ok(None)
    }

    /// Maximum over components of the largest shortest-path distance; 0 when
    /// there are at most one solution.
    pub fn diameter(&self) -> u32 {
        self.solutions
            .iter()
            .map(|&a| {
                self.distances_from(a)
                    .into_iter()
                    .flatten()
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Solutions without a neighboring solution below them in the
    /// coordinate-wise order.
    pub fn locally_minimal(&self) -> Vec<u64> {
        self.solutions
            .iter()
            .copied()
            .filter(|&a| self.neighbors(a).all(|u| u > a))
            .collect()
    }

    pub fn report(&self) -> SolutionGraphReport {
        let n = self.num_vars;
        let fmt = |a: u64| format_bits(a, n);
        let components = self.components();
        let local: Vec<u64> = self.locally_minimal();
        SolutionGraphReport {
            num_vars: n,
            n_solutions: self.solutions.len(),
            diameter: self.diameter(),
            minimum: components
                .iter()
                .map(|c| {
                    let meet = c.iter().fold(u64::MAX, |m, &a| m & a);
                    c.binary_search(&meet).ok().map(|_| fmt(meet))
                })
                .collect(),
            locally_minimal: components
                .iter()
                .map(|c| {
                    c.iter()
                        .filter(|a| local.binary_search(a).is_ok())
                        .map(|&a| fmt(a))
                        .collect()
                })
                .collect(),
            components: components
                .iter()
                .map(|c| c.iter().map(|&a| fmt(a)).collect())
                .collect(),
        }
    }

    /// Undirected DOT graph with vertices labeled by bitstrings.
    pub fn to_dot(&self) -> String {
        let n = self.num_vars;
        let mut out = String::from("graph G {\n");
        for &a in &self.solutions {
            out.push_str(&format!("  \"{}\";\n", format_bits(a, n)));
        }
        for &a in &self.solutions {
            for b in (0..n).rev() {
                let u = a | 1 << b;
                if u != a && self.is_solution(u) {
                    out.push_str(&format!(
                        "  \"{}\" -- \"{}\";\n",
                        format_bits(a, n),
                        format_bits(u, n)
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionGraphReport {
    pub num_vars: usize,
    pub n_solutions: usize,
    pub components: Vec<Vec<String>>,
    pub diameter: u32,
    /// Coordinate-wise minimum of each component, when it is a member.
    pub minimum: Vec<Option<String>>,
    pub locally_minimal: Vec<Vec<String>>,
}

pub fn is_connected(phi: &Formula) -> Result<bool> {
    Ok(SolutionGraph::new(phi)?.is_connected())
}

pub fn st_connected(phi: &Formula, s: u64, t: u64) -> Result<Option<Vec<u64>>> {
    SolutionGraph::new(phi)?.shortest_path(s, t)
}

pub fn diameter(phi: &Formula) -> Result<u32> {
    Ok(SolutionGraph::new(phi)?.diameter())
}

pub fn export_dot(phi: &Formula) -> Result<String> {
    Ok(SolutionGraph::new(phi)?.to_dot())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_library;
    use crate::formula::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text, &builtin_library()).unwrap()
    }

    fn b(s: &str) -> u64 {
        u64::from_str_radix(s, 2).unwrap()
    }

    #[test]
    fn m_solutions() {
        let sols = solutions(&f("M(x,y,z)")).unwrap();
        assert_eq!(sols, vec![b("000"), b("001"), b("010"), b("101"), b("111")]);
    }

    #[test]
    fn k_expresses_m() {
        let g = f("K(x,y,z)\nK(z,x,x)");
        assert_eq!(solutions(&g).unwrap(), solutions(&f("M(x,y,z)")).unwrap());
    }

    #[test]
    fn pruned_enumeration_matches_exhaustive() {
        let g = f("M(a,b,c)\nM(c,c,d)\nN(a,d)\nP(b,e,0)\nK(e,1,a)");
        let expected: Vec<u64> = (0..32).filter(|&a| g.eval_bits(a)).collect();
        assert_eq!(solutions(&g).unwrap(), expected);
    }

    #[test]
    fn unsatisfiable_is_connected() {
        let g = f("N(x,x)\nM(1,0,x)");
        assert!(solutions(&g).unwrap().is_empty());
        assert!(is_connected(&g).unwrap());
        assert_eq!(diameter(&g).unwrap(), 0);
        assert_eq!(export_dot(&g).unwrap(), "graph G {\n}\n");
    }

    #[test]
    fn t_formula_disconnected() {
        let t = f("M(u,v,w)\nM(x,y,z)\nM(w,w,y)\nM(z,z,v)");
        assert!(!is_connected(&t).unwrap());
    }

    #[test]
    fn single_solution_connected() {
        let g = f("M(1,1,x)");
        assert_eq!(solutions(&g).unwrap(), vec![1]);
        assert!(is_connected(&g).unwrap());
    }

    #[test]
    fn st_paths() {
        let g = f("M(x,y,z)");
        let p = st_connected(&g, b("010"), b("010")).unwrap().unwrap();
        assert_eq!(p, vec![b("010")]);
        let p = st_connected(&g, b("010"), b("111")).unwrap().unwrap();
        // 010 only touches 000, so the path runs the whole of G(M)
        assert_eq!(p, vec![b("010"), b("000"), b("001"), b("101"), b("111")]);
        assert!(matches!(
            st_connected(&g, b("100"), b("000")),
            Err(Error::NotASolution(_))
        ));
        let rem = f("R_NONSEP(x,y,z)\nR_NONSEP(y,x,w)");
        assert_eq!(st_connected(&rem, b("0000"), b("1100")).unwrap(), None);
    }

    #[test]
    fn diameters() {
        let path = SolutionGraph::from_solutions(3, vec![b("000"), b("001"), b("011")]);
        assert_eq!(path.diameter(), 2);
        assert_eq!(diameter(&f("M(x,y,z)")).unwrap(), 4);
        let g = SolutionGraph::new(&f("M(x,y,z)")).unwrap();
        assert_eq!(g.distance(b("010"), b("111")), Some(4));
        assert_eq!(hamming(b("010"), b("111")), 2);
    }

    #[test]
    fn dot_output() {
        let dot = export_dot(&f("M(x,y,z)")).unwrap();
        assert_eq!(dot.matches(';').count() - dot.matches("--").count(), 5);
        assert_eq!(dot.matches("--").count(), 4);
        let rem = export_dot(&f("R_NONSEP(x,y,z)\nR_NONSEP(y,x,w)")).unwrap();
        assert_eq!(rem.matches("--").count(), 0);
        assert_eq!(rem.matches(';').count(), 4);
    }

    #[test]
    fn report_fields() {
        let r = SolutionGraph::new(&f("R_coNP(a,b,c,d)")).unwrap().report();
        assert_eq!(r.n_solutions, 5);
        assert_eq!(r.components.len(), 2);
        assert_eq!(r.components[1], vec!["0011", "1011"]);
        assert_eq!(
            r.minimum,
            vec![Some("0000".to_string()), Some("0011".to_string())]
        );
        assert_eq!(r.locally_minimal, vec![vec!["0000"], vec!["0011"]]);
        assert_eq!(r.diameter, 2);
    }
}
