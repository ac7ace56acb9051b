use preduals_core::sparse::{
    additively_sparse_check, disjoint_family, hausdorff_condition_check, SparseParams, SparseSet,
};
use proptest::prelude::*;

fn sets() -> Vec<SparseSet> {
    vec![
        SparseSet::powers(2).unwrap(),
        SparseSet::powers(3).unwrap(),
        SparseSet::factorials(),
        SparseSet::explicit(vec![-40, 7, 300, 5000, -90000]),
    ]
}

proptest! {
    #[test]
    fn enumeration_is_sorted_and_bounded(si in 0usize..4, bound in 0u64..(1 << 40)) {
        let v = sets()[si].enumerate(bound);
        prop_assert!(v.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(v.iter().all(|x| x.unsigned_abs() <= bound));
    }

    #[test]
    fn family_pieces_partition_the_set(si in 0usize..3, k in 1usize..5, bound in 1u64..(1 << 30)) {
        let set = &sets()[si];
        let fam = disjoint_family(set, k).unwrap();
        prop_assert!(fam.overlap(bound).is_none());
        let mut all: Vec<i64> = fam.sets.iter().flat_map(|s| s.enumerate(bound)).collect();
        all.sort_unstable();
        prop_assert_eq!(all, set.enumerate(bound));
    }

    #[test]
    fn parse_display_round_trip(si in 0usize..4, r in 0u64..3) {
        let s = sets()[si].with_residue(r, 3).unwrap();
        prop_assert_eq!(SparseSet::parse(&s.to_string()).unwrap(), s);
    }
}

#[test]
fn thresholds_stable_under_larger_bounds() {
    let set = SparseSet::powers(2).unwrap();
    let small = additively_sparse_check(&set, &SparseParams::new(30, 3, 3, 1 << 12)).unwrap();
    let large = additively_sparse_check(&set, &SparseParams::new(30, 3, 3, 1 << 20)).unwrap();
    assert!(small.certified() && large.certified());
    assert_eq!(small.threshold, large.threshold);
}

#[test]
fn single_family_condition_is_weaker_than_sparseness() {
    for set in [SparseSet::powers(2).unwrap(), SparseSet::factorials()] {
        let bound = 1 << 14;
        let sparse = additively_sparse_check(&set, &SparseParams::new(12, 3, 3, bound)).unwrap();
        let fam = disjoint_family(&set, 1).unwrap();
        let h = hausdorff_condition_check(&fam, 12, 3, bound, None).unwrap();
        assert!(h.threshold <= sparse.threshold, "{set}");
    }
}

#[test]
fn factorial_split_is_certified() {
    let fam = disjoint_family(&SparseSet::factorials(), 2).unwrap();
    let h = hausdorff_condition_check(&fam, 20, 4, 3_628_800, None).unwrap();
    assert!(h.certified(), "{h:?}");
}
