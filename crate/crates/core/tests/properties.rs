mod common;

use common::*;
use dynnet::abstraction::{abstract_by_substitution, abstract_by_transformation, immersion, Partition};
use dynnet::graph::{
    check_generalized_invariance, check_immersion_invariance, derived_conditions, select_nodes, InvarianceQuery,
};
use dynnet::identifiability::{pattern_mul, pattern_of, StructurePattern};
use dynnet::network::{check_abstraction, check_equivalence, noise_spectrum_at, FrequencyGrid, SelectionMatrix};
use dynnet::random::{
    random_graph, random_hollow, random_model, random_partition, random_structured_model,
    random_valid_transformation, rng,
};
use dynnet::ratfun::{Polynomial, RationalFunction, TransferMatrix};
use dynnet::transform::apply_transformation;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn ratfun() -> impl Strategy<Value = RationalFunction> {
    (prop::collection::vec(-5i64..=5, 1..=4), prop::collection::vec(-5i64..=5, 0..=3)).prop_map(|(num, tail)| {
        let mut den = vec![1i64];
        den.extend(tail);
        RationalFunction::new(Polynomial::from_i64s(&num), Polynomial::from_i64s(&den)).unwrap()
    })
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn additive_inverse(a in ratfun()) {
        prop_assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn field_axioms(a in ratfun(), b in ratfun(), c in ratfun()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn canonical_form(a in ratfun(), b in ratfun()) {
        let f = &a * &b;
        prop_assert!(Polynomial::gcd(f.num(), f.den()).is_constant());
        prop_assert!(f.den().trailing().is_some_and(|t| *t == one()));
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn inverse_and_evaluation_commute(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_hollow(&mut r, 3, 0.7, 2);
        let m = g.identity_minus().unwrap();
        let inv = m.inverse().unwrap();
        prop_assert!(m.mul(&inv).unwrap().is_identity());
        let z = Complex64::from_polar(1.0, r.gen_range(0.1..3.0));
        let a = inv.eval_at(z).unwrap();
        let b = m.eval_at(z).unwrap().try_inverse().unwrap();
        prop_assert!((a - b).camax() < 1e-9);
    }

    #[test]
    fn numeric_rank_matches_exact_rank(seed in any::<u64>()) {
        let mut r = rng(seed);
        // rank-deficient by construction half of the time
        let a = random_hollow(&mut r, 3, 0.8, 1);
        let m = if r.gen_bool(0.5) {
            TransferMatrix::from_fn(3, 3, |i, j| if i == 2 { a.get(0, j) + a.get(1, j) } else { a.get(i, j).clone() })
        } else {
            a
        };
        let exact = generic_rank_exact(&m, &mut r);
        prop_assert_eq!(m.rank_at(FrequencyGrid::random(8, seed).points()).unwrap(), exact);
    }

    #[test]
    fn spectrum_is_hermitian(seed in any::<u64>()) {
        let m = random_model(&mut rng(seed), 4, 2);
        let phi = noise_spectrum_at(&m, 0.7).unwrap();
        prop_assert!((&phi - phi.adjoint()).camax() < 1e-9);
    }

    #[test]
    fn transformation_preserves_responses(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_model(&mut r, 4, 1);
        let p = random_valid_transformation(&mut r, &m, 1).unwrap();
        let t = apply_transformation(&m, &p).unwrap();
        prop_assert!(t.g().is_hollow());
        prop_assert!(check_equivalence(&m, &t, &FrequencyGrid::uniform(16), 1e-9).unwrap());
    }

    #[test]
    fn immersion_matches_node_by_node_elimination(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=5);
        let m = random_model(&mut r, n, 2);
        let keep: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.6)).collect();
        prop_assume!(!keep.is_empty());
        let a = immersion(&m, &keep).unwrap();
        let (g, rr) = kron_immersion(m.g(), m.r(), &keep);
        prop_assert_eq!(a.abstracted.g(), &g);
        prop_assert_eq!(a.abstracted.r(), &rr);
    }

    #[test]
    fn both_abstraction_routes_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=5);
        let m = random_model(&mut r, n, 2);
        let p = random_partition(&mut r, &m);
        let a = abstract_by_transformation(&m, &p).unwrap();
        let b = abstract_by_substitution(&m, &p).unwrap();
        prop_assert_eq!(&a.abstracted, &b.abstracted);
        prop_assert!(a.g4.is_hollow());
        let c = SelectionMatrix::new(p.kept(), n).unwrap();
        prop_assert!(check_abstraction(&m, &a.abstracted, &c, &FrequencyGrid::uniform(16), 1e-9).unwrap());
    }

    #[test]
    fn immersion_check_is_the_generalized_check_without_indirect_nodes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=6);
        let g = random_graph(&mut r, n, 0.4);
        let i = r.gen_range(0..n);
        let j = (i + r.gen_range(1..n)) % n;
        let keep: Vec<usize> = (0..n).filter(|&k| k == i || k == j || r.gen_bool(0.5)).collect();
        let p = Partition::immersion(n, &keep).unwrap();
        let qy = InvarianceQuery::new(i, j, p).unwrap();
        prop_assert_eq!(check_immersion_invariance(&g, i, j, &keep), check_generalized_invariance(&g, &qy));
    }

    #[test]
    fn invariance_implies_structural_conditions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=6);
        let g = random_graph(&mut r, n, 0.35);
        let i = r.gen_range(0..n);
        let j = (i + r.gen_range(1..n)) % n;
        let mut classes: Vec<usize> = (0..n).map(|_| r.gen_range(0..4)).collect();
        classes[i] = 0;
        classes[j] = 0;
        let pick = |c| (0..n).filter(|&k| classes[k] == c).collect::<Vec<_>>();
        let Ok(p) = Partition::new(n, &pick(0), &pick(1), &pick(2), &pick(3)) else { return Ok(()) };
        let qy = InvarianceQuery::new(i, j, p).unwrap();
        if check_generalized_invariance(&g, &qy) {
            prop_assert_eq!(derived_conditions(&g, &qy), [true; 6]);
        }
    }

    #[test]
    fn selection_matches_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=5);
        let g = random_graph(&mut r, n, 0.4);
        let i = r.gen_range(0..n);
        let j = (i + r.gen_range(1..n)) % n;
        let measurable: Vec<usize> = (0..n).filter(|&k| k == i || k == j || r.gen_bool(0.7)).collect();
        let expected = brute_force_minimal_sets(&g, i, j, &measurable);
        let found = select_nodes(&g, i, j, &measurable, usize::MAX).unwrap_or_default();
        let sets: std::collections::BTreeSet<_> =
            found.iter().map(|p| p.kept().into_iter().collect::<std::collections::BTreeSet<_>>()).collect();
        prop_assert_eq!(sets, expected);
        for w in found.windows(2) {
            prop_assert!(w[0].kept().len() <= w[1].kept().len());
        }
    }

    #[test]
    fn pattern_product_is_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sizes = [r.gen_range(1..=2), r.gen_range(1..=2), r.gen_range(1..=2)];
        let n: usize = sizes.iter().sum();
        let mut blocks = Vec::new();
        let mut start = 0;
        for s in sizes {
            blocks.push((start..start + s).collect::<Vec<_>>());
            start += s;
        }
        let refs: Vec<&[usize]> = blocks.iter().map(Vec::as_slice).collect();
        let sparse = |r: &mut rand_chacha::ChaCha8Rng| {
            let diag_only = r.gen_bool(0.5);
            TransferMatrix::from_fn(n, n, |a, b| {
                let same_block = refs.iter().any(|blk| blk.contains(&a) && blk.contains(&b));
                let allowed = if diag_only { a == b || !same_block } else { true };
                if allowed && r.gen_bool(0.4) {
                    RationalFunction::constant(q(r.gen_range(1..=9), r.gen_range(1..=5)))
                } else {
                    RationalFunction::zero()
                }
            })
        };
        let (a, b) = (sparse(&mut r), sparse(&mut r));
        let pa = pattern_of(&a, &refs, &refs);
        let pb = pattern_of(&b, &refs, &refs);
        let concrete = pattern_of(&a.mul(&b).unwrap(), &refs, &refs);
        let predicted: StructurePattern = pattern_mul(&pa, &pb).unwrap();
        prop_assert!(concrete.conforms_to(&predicted), "{} vs {}", concrete, predicted);
    }

    #[test]
    fn flow_count_matches_generic_rank(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=6);
        let g = random_graph(&mut r, n, 0.35);
        let m = random_structured_model(&mut r, &g);
        let mut classes: Vec<usize> = (0..n).map(|_| r.gen_range(0..4)).collect();
        classes[0] = 1;
        let pick = |c| (0..n).filter(|&k| classes[k] == c).collect::<Vec<_>>();
        let Ok(p) = Partition::new(n, &pick(0), &pick(1), &pick(2), &pick(3)) else { return Ok(()) };
        let paths = dynnet::graph::vertex_disjoint_paths(&g, p.v_set(), p.l_set(), p.z_tilde());
        let map = dynnet::abstraction::indirect_observation_map(m.g(), &p).unwrap();
        prop_assert_eq!(paths, generic_rank_exact(&map, &mut r));
    }
}
