//! Structural invariants under randomized inputs.

use proptest::collection::vec;
use proptest::prelude::*;

use ocsp_core::coarsen::{csp_value, lift_partition_to_ordering, CoarsePredicate, Partition};
use ocsp_core::dist::{identifier, permute_tuple};
use ocsp_core::instance::OcspInstance;
use ocsp_core::json;
use ocsp_core::perm::{factorial, ord, Permutation};
use ocsp_core::predicate::OrderingPredicate;

/// Distinct-entry tuples of the given arity over a small value range.
fn distinct_tuple(k: usize) -> impl Strategy<Value = Vec<i64>> {
    vec(-50i64..50, k).prop_filter("entries must be distinct", |t| {
        let mut s = t.clone();
        s.sort_unstable();
        s.dedup();
        s.len() == t.len()
    })
}

fn permutation(k: usize) -> impl Strategy<Value = Permutation> {
    (0..factorial(k).unwrap()).prop_map(move |r| Permutation::unrank(k, r).unwrap())
}

proptest! {
    #[test]
    fn ord_of_permuted_tuple_composes((a, pi) in (2usize..=5)
        .prop_flat_map(|k| (distinct_tuple(k), permutation(k))))
    {
        let permuted = permute_tuple(&a, &pi).unwrap();
        let lhs = ord(&permuted).unwrap();
        let rhs = pi.compose(&ord(&a).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rank_round_trips(pi in (1usize..=7).prop_flat_map(permutation)) {
        let k = pi.arity();
        prop_assert_eq!(Permutation::unrank(k, pi.rank()).unwrap(), pi);
    }

    #[test]
    fn compose_associates((a, b, c) in (2usize..=5)
        .prop_flat_map(|k| (permutation(k), permutation(k), permutation(k))))
    {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn lift_respects_block_order(labels in vec(0usize..4, 1..10)) {
        let b = Partition::new(4, labels).unwrap();
        let sigma = lift_partition_to_ordering(&b);
        for i in 0..b.n() {
            for j in 0..b.n() {
                if b.label(i) < b.label(j) {
                    prop_assert!(sigma.apply(i) < sigma.apply(j));
                }
                if b.label(i) == b.label(j) && i < j {
                    prop_assert!(sigma.apply(i) < sigma.apply(j));
                }
            }
        }
    }

    #[test]
    fn coarsening_monotone_per_assignment(
        (n, edges, labels) in (3usize..=6).prop_flat_map(|n| (
            Just(n),
            vec((0..n, 0..n), 1..6).prop_map(move |pairs| pairs
                .into_iter()
                .map(|(u, v)| if u == v { (u, (v + 1) % n) } else { (u, v) })
                .collect::<Vec<_>>()),
            vec(0usize..3, n),
        ))
    ) {
        let inst = OcspInstance::new(
            n,
            OrderingPredicate::mas(),
            edges.iter().map(|&(u, v)| vec![u, v]).collect(),
        )
        .unwrap();
        let b = Partition::new(3, labels).unwrap();
        let f = CoarsePredicate::coarsen(&OrderingPredicate::mas(), 3).unwrap();
        let coarse = csp_value(&inst, &f, &b).unwrap();
        let fine = inst.value(&lift_partition_to_ordering(&b)).unwrap();
        prop_assert!(fine >= coarse);
    }

    #[test]
    fn identifier_agrees_with_scan(
        (q, labels, pi) in (2usize..=6).prop_flat_map(|q| (
            Just(q),
            vec(0..q, 2),
            permutation(2),
        ))
    ) {
        let b = Partition::new(q, labels.clone()).unwrap();
        let got = identifier(&b, &[0, 1], &pi).unwrap();
        let mut expected = None;
        for ell in 0..q {
            let run: Vec<usize> = (0..2).map(|i| (ell + i) % q).collect();
            if permute_tuple(&run, &pi).unwrap() == labels {
                expected = Some(ell);
            }
        }
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn instance_json_round_trips(
        (n, edges) in (2usize..=8).prop_flat_map(|n| (
            Just(n),
            vec((0..n, 0..n), 0..8).prop_map(move |pairs| pairs
                .into_iter()
                .map(|(u, v)| if u == v { (u, (v + 1) % n) } else { (u, v) })
                .collect::<Vec<_>>()),
        ))
    ) {
        let inst = OcspInstance::new(
            n,
            OrderingPredicate::mas(),
            edges.iter().map(|&(u, v)| vec![u, v]).collect(),
        )
        .unwrap();
        let text = json::instance_to_json(&inst);
        prop_assert_eq!(json::parse_instance_json(&text).unwrap(), inst);
    }

    #[test]
    fn parse_permutation_never_panics(s in "\\PC{0,40}") {
        let _ = s.parse::<Permutation>();
    }

    #[test]
    fn parse_instance_never_panics(s in "\\PC{0,200}") {
        let _ = json::parse_instance_json(&s);
    }
}
