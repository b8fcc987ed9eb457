//! Property tests over the public API.

use proptest::prelude::*;
use proptest::sample::subsequence;
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::classify::{classify_set, profile};
use crate::clausal::SchaeferClass;
use crate::cpss::{conn_by_projections, project_onto, Backend};
use crate::formula::Formula;
use crate::generate::{random_cpss_pool, random_formula, random_horn_view};
use crate::graph::{hamming, SolutionGraph};
use crate::horn::VarSet;
use crate::properties::{check_property, is_safely, SafeProperty};
use crate::relation::{ArgPattern, Relation, Slot};

fn relation(max_arity: usize) -> impl Strategy<Value = Relation> {
    (1..=max_arity).prop_flat_map(|k| {
        proptest::collection::vec(any::<bool>(), 1 << k).prop_map(move |keep| {
            let tuples = (0..1u32 << k).filter(|&t| keep[t as usize]);
            Relation::from_tuples(k, tuples).unwrap()
        })
    })
}

fn relation_set() -> impl Strategy<Value = Vec<Relation>> {
    proptest::collection::vec(relation(4), 1..=3).prop_map(|rs| {
        rs.into_iter()
            .enumerate()
            .map(|(i, r)| r.with_name(format!("R{i}")))
            .collect()
    })
}

fn small_formula() -> impl Strategy<Value = Formula> {
    (relation_set(), 2..=8usize, 1..=5usize, any::<u64>()).prop_map(|(pool, n, m, seed)| {
        random_formula(&mut StdRng::seed_from_u64(seed), &pool, n, m, 0.1).unwrap()
    })
}

fn cpss_formula() -> impl Strategy<Value = Formula> {
    (0..4usize, 2..=9usize, 1..=6usize, any::<u64>()).prop_map(|(c, n, m, seed)| {
        let mut rng = StdRng::seed_from_u64(seed);
        let pool = random_cpss_pool(&mut rng, SchaeferClass::ALL[c], 2, 4).unwrap();
        random_formula(&mut rng, &pool, n, m, 0.1).unwrap()
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn unnamed(r: &Relation) -> crate::classify::RelationProfile {
    let mut p = profile(r);
    p.name = None;
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn profile_invariant_under_coordinate_permutation(
        (r, perm) in relation(5).prop_flat_map(|r| {
            let k = r.arity();
            (Just(r), permutation(k))
        })
    ) {
        let pattern = ArgPattern::new(perm.iter().map(|&j| Slot::Var(j)).collect()).unwrap();
        let q = r.apply(&pattern).unwrap();
        prop_assert_eq!(q.len(), r.len());
        prop_assert_eq!(unnamed(&q), unnamed(&r));
    }

    #[test]
    fn graph_invariant_under_variable_permutation(
        (phi, perm) in small_formula().prop_flat_map(|phi| {
            let n = phi.num_vars();
            (Just(phi), permutation(n))
        })
    ) {
        let g = SolutionGraph::new(&phi).unwrap();
        let h = SolutionGraph::new(&phi.permute_variables(&perm).unwrap()).unwrap();
        prop_assert_eq!(g.solutions().len(), h.solutions().len());
        prop_assert_eq!(g.components().len(), h.components().len());
        prop_assert_eq!(g.is_connected(), h.is_connected());
        prop_assert_eq!(g.diameter(), h.diameter());
    }

    #[test]
    fn distance_at_least_hamming(phi in small_formula()) {
        let g = SolutionGraph::new(&phi).unwrap();
        let sols = g.solutions().to_vec();
        for &a in sols.iter().take(16) {
            for (j, d) in g.distances_from(a).into_iter().enumerate() {
                if let Some(d) = d {
                    prop_assert!(d >= hamming(a, sols[j]));
                }
            }
        }
    }

    #[test]
    fn imp_is_monotone_and_idempotent(
        n in 1..=8usize,
        m in 1..=12usize,
        seed in any::<u64>(),
        masks in (any::<u8>(), any::<u8>()),
    ) {
        let h = random_horn_view(&mut StdRng::seed_from_u64(seed), n, m).unwrap();
        let set = |mask: u8| -> VarSet { (0..n).filter(|&i| mask >> i & 1 == 1).collect() };
        let u = set(masks.0 & masks.1);
        let v = set(masks.0);
        let iu = h.imp(&u);
        prop_assert!(u.is_subset(&iu));
        prop_assert_eq!(h.imp(&iu), iu.clone());
        prop_assert!(iu.is_subset(&h.imp(&v)));
    }

    #[test]
    fn set_class_chain(set in relation_set()) {
        let c = classify_set(&set).unwrap();
        prop_assert!(!c.cpss || c.schaefer);
        prop_assert!(!c.schaefer || c.safely_tight);
        prop_assert!(!c.safely_tight || c.tight);
        prop_assert_eq!(c.predictions, crate::classify::predict(c.set_class));
    }

    #[test]
    fn schaefer_implies_safely_tight_conditions(r in relation(5)) {
        let p = profile(&r);
        let safe = |s| is_safely(&r, s).unwrap();
        if p.horn {
            prop_assert!(safe(SafeProperty::SafelyOrFree));
        }
        if p.dual_horn {
            prop_assert!(safe(SafeProperty::SafelyNandFree));
        }
        if p.bijunctive {
            prop_assert!(safe(SafeProperty::SafelyComponentwiseBijunctive));
        }
        if p.affine {
            prop_assert!(safe(SafeProperty::SafelyOrFree));
            prop_assert!(safe(SafeProperty::SafelyNandFree));
            prop_assert!(safe(SafeProperty::SafelyComponentwiseBijunctive));
        }
        if p.ihsb_minus {
            prop_assert!(p.horn);
        }
        if p.ihsb_plus {
            prop_assert!(p.dual_horn);
        }
    }

    #[test]
    fn identification_preserves_schaefer_classes(r in relation(4)) {
        for class in SchaeferClass::ALL {
            let prop = class.property();
            if !check_property(&r, prop) {
                continue;
            }
            for id in r.identifications().unwrap() {
                prop_assert!(check_property(&id.relation, prop));
            }
        }
    }

    #[test]
    fn disconnected_projection_implies_disconnected(phi in small_formula()) {
        let r = conn_by_projections(&phi, Backend::BruteForce).unwrap();
        if !r.connected {
            prop_assert!(!SolutionGraph::new(&phi).unwrap().is_connected());
        }
    }

    #[test]
    fn projection_contains_projected_solutions(
        (phi, vars) in cpss_formula().prop_flat_map(|phi| {
            let n = phi.num_vars();
            (Just(phi), subsequence((0..n).collect::<Vec<_>>(), 1..=n.min(4)))
        })
    ) {
        let c = classify_set(
            &phi.used_relations().into_iter().cloned().collect::<Vec<_>>()
        ).unwrap();
        let class = c.cpss_classes[0];
        let p = project_onto(&phi, &vars, Backend::Schaefer(class)).unwrap();
        let n = phi.num_vars();
        let g = SolutionGraph::new(&phi).unwrap();
        for &a in g.solutions() {
            let t = vars.iter().fold(0u32, |t, &v| t << 1 | (a >> (n - 1 - v) & 1) as u32);
            prop_assert!(p.contains(t));
        }
        prop_assert_eq!(p, project_onto(&phi, &vars, Backend::BruteForce).unwrap());
    }
}
