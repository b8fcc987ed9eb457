//! Random relations, formulas and Horn clause sets for testing and the
//! `random` command.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::catalog::Library;
use crate::clausal::SchaeferClass;
use crate::error::Result;
use crate::formula::{Arg, Constraint, Formula};
use crate::horn::{HornClause, HornView};
use crate::properties::{is_safely, ClosureOp, SafeProperty};
use crate::relation::Relation;

/// Smallest relation containing `seeds` and closed under `op`.
pub fn closure(arity: usize, seeds: &[u32], op: ClosureOp) -> Result<Relation> {
    let mut members: Vec<u32> = seeds.to_vec();
    members.sort_unstable();
    members.dedup();
    let mut present = vec![false; 1 << arity];
    for &t in &members {
        present[t as usize] = true;
    }
    loop {
        let mut fresh = Vec::new();
        for &x in &members {
            for &y in &members {
                let zs: &[u32] = if op.arity() == 2 {
                    &members[..1]
                } else {
                    &members
                };
                for &z in zs {
                    let t = op.apply(x, y, z);
                    if !present[t as usize] {
                        present[t as usize] = true;
                        fresh.push(t);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        members.extend(fresh);
    }
    Relation::from_tuples(arity, members)
}

/// Uniformly random nonempty relation where each tuple is kept with
/// probability `density`.
pub fn random_relation<R: Rng>(rng: &mut R, arity: usize, density: f64) -> Result<Relation> {
    loop {
        let tuples: Vec<u32> = (0..1u32 << arity)
            .filter(|_| rng.gen_bool(density))
            .collect();
        if !tuples.is_empty() {
            return Relation::from_tuples(arity, tuples);
        }
    }
}

fn random_seeds<R: Rng>(rng: &mut R, arity: usize, max_seeds: usize) -> Vec<u32> {
    let count = rng.gen_range(1..=max_seeds);
    (0..count)
        .map(|_| rng.gen_range(0..1u32 << arity))
        .collect()
}

/// Closure of a few random tuples under `op`.
pub fn random_closed<R: Rng>(rng: &mut R, arity: usize, op: ClosureOp) -> Result<Relation> {
    let seeds = random_seeds(rng, arity, 3);
    closure(arity, &seeds, op)
}

/// A random relation of the given class whose arity is in `1..=max_arity`.
///
/// Horn and dual Horn relations are also safely componentwise IHSB-
/// (IHSB+), so any set drawn from one class is CPSS.
pub fn random_cpss_relation<R: Rng>(
    rng: &mut R,
    class: SchaeferClass,
    max_arity: usize,
) -> Result<Relation> {
    let arity = rng.gen_range(1..=max_arity);
    match class {
        SchaeferClass::Bijunctive => random_closed(rng, arity, ClosureOp::Maj),
        SchaeferClass::Affine => random_closed(rng, arity, ClosureOp::Xor3),
        SchaeferClass::Horn => random_cpss_horn(rng, arity, false),
        SchaeferClass::DualHorn => random_cpss_horn(rng, arity, true),
    }
}

// Half the time an IHSB closure, otherwise a Horn closure filtered by the
// safety condition (falling back to the IHSB closure).
fn random_cpss_horn<R: Rng>(rng: &mut R, arity: usize, dual: bool) -> Result<Relation> {
    let (ihsb, horn, safe) = if dual {
        (
            ClosureOp::XOrAnd,
            ClosureOp::Or,
            SafeProperty::SafelyComponentwiseIhsbPlus,
        )
    } else {
        (
            ClosureOp::XAndOr,
            ClosureOp::And,
            SafeProperty::SafelyComponentwiseIhsbMinus,
        )
    };
    if rng.gen_bool(0.5) {
        for _ in 0..8 {
            let r = random_closed(rng, arity, horn)?;
            if is_safely(&r, safe)? {
                return Ok(r);
            }
        }
    }
    random_closed(rng, arity, ihsb)
}

/// `count` relations of one class, named `R0, R1, ...`.
pub fn random_cpss_pool<R: Rng>(
    rng: &mut R,
    class: SchaeferClass,
    count: usize,
    max_arity: usize,
) -> Result<Vec<Relation>> {
    (0..count)
        .map(|i| Ok(random_cpss_relation(rng, class, max_arity)?.with_name(format!("R{i}"))))
        .collect()
}

/// Random relations of arity `1..=max_arity` that are safely componentwise
/// bijunctive: bijunctive closures mixed with filtered arbitrary relations.
pub fn random_safely_cw_bijunctive<R: Rng>(rng: &mut R, max_arity: usize) -> Result<Relation> {
    loop {
        let arity = rng.gen_range(1..=max_arity);
        let r = if rng.gen_bool(0.3) {
            random_closed(rng, arity, ClosureOp::Maj)?
        } else {
            let density = rng.gen_range(0.2..0.6);
            random_relation(rng, arity, density)?
        };
        if is_safely(&r, SafeProperty::SafelyComponentwiseBijunctive)? {
            return Ok(r);
        }
    }
}

/// Random Horn relation of the given arity that is not safely componentwise
/// IHSB-, by rejection sampling over AND-closures.
pub fn random_horn_not_safely_ihsb<R: Rng>(rng: &mut R, arity: usize) -> Result<Relation> {
    loop {
        let seeds = random_seeds(rng, arity, 5);
        let r = closure(arity, &seeds, ClosureOp::And)?;
        if !is_safely(&r, SafeProperty::SafelyComponentwiseIhsbMinus)? {
            return Ok(r);
        }
    }
}

/// A random formula over `pool` with `num_vars` variables `x0, x1, ...`
/// and `num_constraints` constraints. Each argument is a constant with
/// probability `const_prob`.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    pool: &[Relation],
    num_vars: usize,
    num_constraints: usize,
    const_prob: f64,
) -> Result<Formula> {
    let library: Library = pool
        .iter()
        .map(|r| (r.name().unwrap_or("R").to_string(), r.clone()))
        .collect();
    let names: Vec<&String> = library.keys().collect();
    let constraints = (0..num_constraints)
        .map(|_| {
            let name = names.choose(rng).expect("nonempty pool");
            let arity = library[name.as_str()].arity();
            let args = (0..arity)
                .map(|_| {
                    if rng.gen_bool(const_prob) {
                        Arg::Const(rng.gen())
                    } else {
                        Arg::Var(rng.gen_range(0..num_vars))
                    }
                })
                .collect();
            Constraint {
                relation: name.to_string(),
                args,
            }
        })
        .collect();
    let variables = (0..num_vars).map(|i| format!("x{i}")).collect();
    Formula::new(variables, constraints, library)
}

/// Random Horn clause set without positive unit clauses: implications and
/// restraint clauses with bodies of 1 to 3 variables, mostly single
/// implications.
pub fn random_horn_view<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    num_clauses: usize,
) -> Result<HornView> {
    let clauses = (0..num_clauses)
        .map(|_| {
            let len = match rng.gen_range(0..10) {
                0..=5 => 1,
                6..=8 => 2,
                _ => 3,
            };
            let body: Vec<usize> = (0..len).map(|_| rng.gen_range(0..num_vars)).collect();
            let head = if rng.gen_bool(0.85) {
                Some(rng.gen_range(0..num_vars))
            } else {
                None
            };
            HornClause::new(head, body)
        })
        .collect();
    HornView::new((0..num_vars).map(|i| format!("x{i}")).collect(), clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_set, SetClass};
    use crate::properties::is_closed;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn closure_is_closed_and_minimal() {
        let r = closure(3, &[0b110, 0b011], ClosureOp::And).unwrap();
        assert_eq!(
            r,
            Relation::from_bitstrings(3, &["010", "011", "110"]).unwrap()
        );
        let r = closure(3, &[0b001, 0b010, 0b100], ClosureOp::Maj).unwrap();
        assert!(r.contains(0));
        assert!(is_closed(&r, ClosureOp::Maj));
    }

    #[test]
    fn pools_are_cpss() {
        let mut rng = StdRng::seed_from_u64(7);
        for class in SchaeferClass::ALL {
            for _ in 0..20 {
                let pool = random_cpss_pool(&mut rng, class, 3, 4).unwrap();
                let c = classify_set(&pool).unwrap();
                assert_eq!(c.set_class, SetClass::Cpss, "{class}");
                assert!(c.cpss_classes.contains(&class));
            }
        }
    }

    #[test]
    fn horn_view_has_no_positive_units() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..50 {
            let h = random_horn_view(&mut rng, 6, 8).unwrap();
            assert!(!h.has_positive_units());
        }
    }
}
