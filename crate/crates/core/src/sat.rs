//! Polynomial satisfiability for clause systems of a single Schaefer class.

use crate::clausal::{Clause, ClauseSet, SchaeferClass};
use crate::error::{Error, Result};

fn shape_ok(class: SchaeferClass, c: &Clause) -> bool {
    match class {
        SchaeferClass::Bijunctive => c.len() <= 2,
        SchaeferClass::Horn => c.pos.len() <= 1,
        SchaeferClass::DualHorn => c.neg.len() <= 1,
        SchaeferClass::Affine => false,
    }
}

/// A satisfying assignment of `cs`, if one exists.
///
/// Bijunctive systems use strongly connected components of the implication
/// graph, Horn and dual Horn systems unit propagation from all-zero
/// (all-one), affine systems Gaussian elimination over GF(2).
pub fn sat_schaefer(cs: &ClauseSet) -> Result<Option<Vec<bool>>> {
    let mismatch = |i: usize| Error::ClassMismatch {
        constraint: i,
        class: cs.class.to_string(),
    };
    if let Some(i) = cs.clauses.iter().position(|c| !shape_ok(cs.class, c)) {
        return Err(mismatch(i));
    }
    if cs.class != SchaeferClass::Affine && !cs.equations.is_empty() {
        return Err(mismatch(0));
    }
    let n = cs.num_vars;
    Ok(match cs.class {
        SchaeferClass::Bijunctive => two_sat(n, &cs.clauses),
        SchaeferClass::Horn => horn_sat(n, &cs.clauses),
        SchaeferClass::DualHorn => {
            let flipped: Vec<Clause> = cs
                .clauses
                .iter()
                .map(|c| Clause::new(c.neg.clone(), c.pos.clone()))
                .collect();
            horn_sat(n, &flipped).map(|a| a.into_iter().map(|b| !b).collect())
        }
        SchaeferClass::Affine => {
            gf2_solve(n, cs.equations.iter().map(|e| (e.vars.as_slice(), e.rhs)))
        }
    })
}

/// Minimal model by unit propagation.
fn horn_sat(n: usize, clauses: &[Clause]) -> Option<Vec<bool>> {
    let mut a = vec![false; n];
    // watch lists: clauses indexed by their negative variables
    let mut missing: Vec<usize> = clauses.iter().map(|c| c.neg.len()).collect();
    let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in clauses.iter().enumerate() {
        for &v in &c.neg {
            by_var[v].push(i);
        }
    }
    let mut queue: Vec<usize> = Vec::new();
    for (i, c) in clauses.iter().enumerate() {
        if missing[i] == 0 {
            match c.pos.first() {
                None => return None,
                Some(&h) if !a[h] => {
                    a[h] = true;
                    queue.push(h);
                }
                Some(_) => {}
            }
        }
    }
    while let Some(v) = queue.pop() {
        for &i in &by_var[v] {
            missing[i] -= 1;
            if missing[i] == 0 {
                match clauses[i].pos.first() {
                    None => return None,
                    Some(&h) if !a[h] => {
                        a[h] = true;
                        queue.push(h);
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Some(a)
}

/// Tarjan's algorithm on the implication graph; literal `2v` is `v`,
/// `2v+1` is its negation.
fn two_sat(n: usize, clauses: &[Clause]) -> Option<Vec<bool>> {
    let lit = |v: usize, positive: bool| 2 * v + usize::from(!positive);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    for c in clauses {
        let lits: Vec<usize> = c
            .pos
            .iter()
            .map(|&v| lit(v, true))
            .chain(c.neg.iter().map(|&v| lit(v, false)))
            .collect();
        match lits[..] {
            [] => return None,
            [a] => adj[a ^ 1].push(a),
            [a, b] => {
                adj[a ^ 1].push(b);
                adj[b ^ 1].push(a);
            }
            _ => unreachable!("shape checked"),
        }
    }
    let comp = tarjan(&adj);
    let mut out = Vec::with_capacity(n);
    for v in 0..n {
        let (p, q) = (comp[2 * v], comp[2 * v + 1]);
        if p == q {
            return None;
        }
        // components are numbered in reverse topological order
        out.push(p < q);
    }
    Some(out)
}

fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // frames of (node, next edge position)
        let mut frames = vec![(root, 0usize)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = frames.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("scc stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// Solves a system of XOR equations; free variables are set to 0.
pub fn gf2_solve<'a>(
    n: usize,
    equations: impl IntoIterator<Item = (&'a [usize], bool)>,
) -> Option<Vec<bool>> {
    let words = n / 64 + 1;
    let rhs_bit = n;
    let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new();
    let get = |row: &[u64], i: usize| row[i / 64] >> (i % 64) & 1 == 1;
    for (vars, rhs) in equations {
        let mut row = vec![0u64; words];
        for &v in vars {
            row[v / 64] ^= 1 << (v % 64);
        }
        if rhs {
            row[rhs_bit / 64] ^= 1 << (rhs_bit % 64);
        }
        for (p, prow) in &pivots {
            if get(&row, *p) {
                for (a, b) in row.iter_mut().zip(prow) {
                    *a ^= b;
                }
            }
        }
        match (0..n).find(|&i| get(&row, i)) {
            None if get(&row, rhs_bit) => return None,
            None => {}
            Some(p) => {
                for (_, prow) in pivots.iter_mut() {
                    if get(prow, p) {
                        for (a, b) in prow.iter_mut().zip(&row) {
                            *a ^= b;
                        }
                    }
                }
                pivots.push((p, row));
            }
        }
    }
    // fully reduced: each pivot row mentions only its pivot among pivots
    let mut a = vec![false; n];
    for (p, row) in &pivots {
        a[*p] = get(row, rhs_bit);
    }
    Some(a)
}
