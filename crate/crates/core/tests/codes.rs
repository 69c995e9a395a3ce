use poset_ramsey::constructions::{
    code_witness, find_prime, is_prime, modp_code, olson_subset_sum, olson_threshold_met, CodeHypotheses, SubsetSumTable,
};
use poset_ramsey::lattice::{layer, SetWord};
use poset_ramsey::verifier::{check_code_statement, check_min_distance, dp_count};
use proptest::prelude::*;

/// Every `t`-subset of the nonzero residues mod `p`, as index masks.
fn for_each_subset(p: u64, t: u32, mut f: impl FnMut(&[u64])) {
    let width = (p - 1) as u32;
    for mask in 0u64..(1u64 << width) {
        if mask.count_ones() == t {
            let values: Vec<u64> = (0..width).filter(|i| mask >> i & 1 == 1).map(|i| u64::from(i) + 1).collect();
            f(&values);
        }
    }
}

#[test]
fn threshold_sets_reach_every_residue() {
    for p in (3..=23u64).filter(|&p| is_prime(p)) {
        // For p = 3 and 5 no set of nonzero residues is large enough.
        let Some(t) = (1..p as u32).find(|&t| olson_threshold_met(t as usize, p)) else { continue };
        for_each_subset(p, t, |values| {
            let table = SubsetSumTable::new(values, p);
            for r in 0..p {
                let idx = table.witness(r).unwrap_or_else(|| panic!("{values:?} misses {r} mod {p}"));
                let sum: u64 = idx.iter().map(|&i| values[i]).sum();
                assert_eq!(sum % p, r);
            }
        });
    }
}

#[test]
fn below_threshold_can_miss() {
    // {1, 2} mod 7 reaches only 0..=3.
    assert!(!olson_threshold_met(2, 7));
    assert!(olson_subset_sum(&[1, 2], 7, 5).is_err());
    assert_eq!(olson_subset_sum(&[1, 2], 7, 3).unwrap(), vec![1, 2]);
}

#[test]
fn primes_in_range() {
    for ground in 4..200u32 {
        let p = find_prime(ground).unwrap();
        assert!(is_prime(p) && p >= u64::from(ground) && p < 2 * u64::from(ground));
        assert!((u64::from(ground)..p).all(|q| !is_prime(q)));
    }
}

#[test]
fn statement_agrees_with_witnesses() {
    for ground in 6..=14u32 {
        let p = find_prime(ground).unwrap();
        for m in 1..=2 {
            for k in 1..ground - m {
                let report = check_code_statement(ground, m, k, p, p).unwrap();
                let code = modp_code(ground, k, p, p).unwrap();
                assert_eq!(report.hypotheses, CodeHypotheses::new(ground, m, k));
                for big_y in layer(ground, m).unwrap() {
                    for y in big_y.elems() {
                        let count = dp_count(SetWord::full(ground).difference(big_y), k, p, (p - y as u64 % p) % p);
                        assert!(report.min_count <= count);
                        if let Ok(c) = code_witness(ground, m, k, &code, big_y, y) {
                            assert!(count >= 1);
                            assert!(c.len() == k && c.intersection(big_y).is_empty() && c.with(y).sum() % p == 0);
                        }
                    }
                }
                if report.hypotheses.hold() {
                    assert!(report.ok(), "N={ground} m={m} k={k}: {:?}", report.failure);
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn codes_keep_distance(ground in 4u32..=12, k in 0u32..12, d in 0u64..64) {
        prop_assume!(k < ground);
        let p = find_prime(ground).unwrap();
        let fam = modp_code(ground, k, d % p + 1, p).unwrap();
        prop_assert!(check_min_distance(&fam, 4, u128::MAX).unwrap().is_none());
    }
}
