//! Node abstraction onto a kept set `S̃ ∪ L`, computed both as a product of
//! four transformations and by direct substitution.

mod engine;
mod partition;

pub use engine::{
    abstract_by_substitution, abstract_by_transformation, build_p1, build_p2, build_p3, build_p4,
    check_indirect_observations, check_indirect_observations_seeded, immersion, indirect_observation_map,
    AbstractionReport, AbstractionResult, RANK_CHECK_POINTS,
};
pub use partition::{NodeClass, Partition, PartitionLabels};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::network::{check_abstraction, FrequencyGrid, NetworkModel, SelectionMatrix};
    use crate::ratfun::{RationalFunction, TransferMatrix};
    use crate::transform::transformed_modules;
    use num_rational::BigRational;

    fn d(c: i64, den: i64) -> RationalFunction {
        RationalFunction::delay(BigRational::new(c.into(), den.into()), 1)
    }

    /// Four nodes with modules 2→1, 3→1, 4→1, 4→2 and 1→4.
    fn four_node() -> (NetworkModel, [RationalFunction; 5]) {
        let (g12, g13, g14, g24, g41) = (d(1, 2), d(1, 3), d(1, 5), d(2, 7), d(3, 11));
        let mut g = TransferMatrix::zeros(4, 4);
        g.set(0, 1, g12.clone());
        g.set(0, 2, g13.clone());
        g.set(0, 3, g14.clone());
        g.set(1, 3, g24.clone());
        g.set(3, 0, g41.clone());
        (NetworkModel::with_identity_inputs(g).unwrap(), [g12, g13, g14, g24, g41])
    }

    #[test]
    fn immersion_of_node_four() {
        let (m, [g12, g13, g14, g24, g41]) = four_node();
        let res = immersion(&m, &[0, 1, 2]).unwrap();
        let s = (&RationalFunction::one() - &(&g14 * &g41)).inv().unwrap();
        let a = &res.abstracted;
        assert_eq!(a.g().get(0, 1), &(&s * &g12));
        assert_eq!(a.g().get(0, 2), &(&s * &g13));
        assert_eq!(a.g().get(1, 0), &(&g24 * &g41));
        assert_eq!(a.r().row(0), &[s.clone(), RationalFunction::zero(), RationalFunction::zero(), &s * &g14]);
        assert!(!res.report.possibly_non_proper);
        let sub = abstract_by_substitution(&m, &res.partition).unwrap();
        assert_eq!(sub, res);
    }

    #[test]
    fn indirect_input_through_node_two() {
        let (m, [g12, g13, g14, g24, _]) = four_node();
        let p = Partition::new(4, &[0, 2], &[1], &[3], &[]).unwrap();
        let res = abstract_by_transformation(&m, &p).unwrap();
        let a = &res.abstracted;
        assert_eq!(a.labels().nodes, vec!["w1", "w3", "w2"]);
        let g24_inv = g24.inv().unwrap();
        assert_eq!(a.g().get(0, 2), &(&g12 + &(&g14 * &g24_inv)));
        assert_eq!(a.g().get(0, 1), &g13);
        assert_eq!(a.r().get(0, 1), &-(&g14 * &g24_inv));
        assert!(res.report.possibly_non_proper);
        // Equal delays cancel in G14/G24, so nothing is actually non-proper here.
        assert!(res.report.non_proper_entries.is_empty());
        // P2 carries the inverse module on the (V, L) block, up to the sign convention.
        let g1 = m.g().clone();
        let p2 = build_p2(&g1, &p).unwrap();
        assert_eq!(p2.matrix().get(3, 1), &-&g24_inv);
        assert_eq!(abstract_by_substitution(&m, &p).unwrap(), res);
        let c = SelectionMatrix::new(p.kept(), 4).unwrap();
        assert!(check_abstraction(&m, a, &c, &FrequencyGrid::default(), 1e-9).unwrap());
    }

    #[test]
    fn removed_columns_vanish() {
        let (m, _) = four_node();
        let p = Partition::new(4, &[0, 2], &[1], &[3], &[]).unwrap();
        let res = abstract_by_transformation(&m, &p).unwrap();
        assert_eq!(transformed_modules(m.g(), res.p_abs.matrix()).unwrap(), res.g4);
        for i in 0..4 {
            assert!(res.g4.get(i, 3).is_zero());
            assert!(res.g4.get(i, i).is_zero());
        }
    }

    #[test]
    fn keep_all_is_identity() {
        let (m, _) = four_node();
        let res = immersion(&m, &[0, 1, 2, 3]).unwrap();
        assert_eq!(res.abstracted, m);
        assert!(res.p_abs.matrix().is_identity());
    }

    #[test]
    fn chain_substitution() {
        let g12 = d(2, 3);
        let mut g = TransferMatrix::zeros(2, 2);
        g.set(0, 1, g12.clone());
        let m = NetworkModel::with_identity_inputs(g).unwrap();
        let p = Partition::immersion(2, &[0]).unwrap();
        let res = abstract_by_substitution(&m, &p).unwrap();
        assert!(res.abstracted.g().is_zero());
        assert_eq!(res.abstracted.r().row(0), &[RationalFunction::one(), g12]);
    }

    #[test]
    fn sequential_immersion_composes() {
        let (m, _) = four_node();
        let once = immersion(&m, &[0, 1]).unwrap().abstracted;
        let first = immersion(&m, &[0, 1, 2]).unwrap().abstracted;
        let twice = immersion(&first, &[0, 1]).unwrap().abstracted;
        assert_eq!(once.g(), twice.g());
        assert_eq!(once.r(), twice.r());
    }

    #[test]
    fn unit_self_loop_is_reported() {
        // w1 = w2 + ..., w2 = w1 + ...: eliminating nothing but forcing a unit loop
        // through immersion of node 2 yields G³₁₁ = 1.
        let one = RationalFunction::one();
        let mut g = TransferMatrix::zeros(3, 3);
        g.set(0, 1, one.clone());
        g.set(1, 0, one);
        g.set(2, 0, d(1, 2));
        let m = NetworkModel::with_identity_inputs(g).unwrap();
        let p = Partition::immersion(3, &[0, 2]).unwrap();
        assert_eq!(abstract_by_transformation(&m, &p), Err(Error::SelfLoopSingular { node: 0 }));
        assert_eq!(abstract_by_substitution(&m, &p), Err(Error::SelfLoopSingular { node: 0 }));
    }

    #[test]
    fn rank_deficiency_is_rejected() {
        // V node with no path into L.
        let mut g = TransferMatrix::zeros(3, 3);
        g.set(0, 2, d(1, 2));
        let m = NetworkModel::with_identity_inputs(g).unwrap();
        let p = Partition::new(3, &[0], &[1], &[2], &[]).unwrap();
        assert!(!check_indirect_observations(&m, &p).unwrap());
        assert_eq!(abstract_by_transformation(&m, &p), Err(Error::RankDeficient));
    }
}
