//! Deliberately naive reference implementations, used to cross-check the
//! optimized searches and counters of `poset_ramsey`.

use poset_ramsey::lattice::SetWord;
use poset_ramsey::oracle::CopyKind;

/// Whether some injection of the subsets of `[m]` into `family` is a copy
/// of `Q_m` of the given kind. Tries every injection, checking each one
/// completely before moving on.
pub fn naive_has_copy(family: &[SetWord], m: u32, kind: CopyKind) -> bool {
    let size = 1usize << m;
    if family.len() < size {
        return false;
    }
    let mut image = vec![0usize; size];
    let mut used = vec![false; family.len()];
    fn rec(
        pos: usize,
        image: &mut [usize],
        used: &mut [bool],
        family: &[SetWord],
        kind: CopyKind,
    ) -> bool {
        if pos == image.len() {
            return is_copy(image, family, kind);
        }
        for idx in 0..family.len() {
            if used[idx] {
                continue;
            }
            used[idx] = true;
            image[pos] = idx;
            if rec(pos + 1, image, used, family, kind) {
                return true;
            }
            used[idx] = false;
        }
        false
    }
    rec(0, &mut image, &mut used, family, kind)
}

fn is_copy(image: &[usize], family: &[SetWord], kind: CopyKind) -> bool {
    for (a, &ia) in image.iter().enumerate() {
        for (b, &ib) in image.iter().enumerate() {
            let domain = (a & !b) == 0;
            let target = family[ia].is_subset(family[ib]);
            let ok = match kind {
                CopyKind::Weak => !domain || target,
                CopyKind::Induced => domain == target,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Counts `k`-subsets of `ground` with element sum `r` mod `p` by listing
/// every subset of `ground`.
pub fn brute_count(ground: SetWord, k: u32, p: u64, r: u64) -> u128 {
    let elems = ground.to_vec();
    let mut count = 0u128;
    for mask in 0u64..(1u64 << elems.len()) {
        if mask.count_ones() != k {
            continue;
        }
        let sum: u64 = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| u64::from(e))
            .sum();
        if sum % p == r % p {
            count += 1;
        }
    }
    count
}

/// `n!` as an exact integer when it fits, for small cross-checks.
pub fn factorial_u128(n: u32) -> Option<u128> {
    (1..=u128::from(n)).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// `binom(n, k)` by the multiplicative formula.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(e: &[u32]) -> SetWord {
        SetWord::from_elems(e.iter().copied()).unwrap()
    }

    #[test]
    fn naive_examples() {
        let fam = [SetWord::EMPTY, set(&[1]), set(&[2]), set(&[1, 2, 3])];
        assert!(naive_has_copy(&fam, 2, CopyKind::Induced));
        let chain = [SetWord::EMPTY, set(&[1]), set(&[1, 2]), set(&[1, 2, 3])];
        assert!(naive_has_copy(&chain, 2, CopyKind::Weak));
        assert!(!naive_has_copy(&chain, 2, CopyKind::Induced));
        assert!(naive_has_copy(&[set(&[4])], 0, CopyKind::Induced));
        assert!(!naive_has_copy(&[], 0, CopyKind::Weak));
    }

    #[test]
    fn brute_examples() {
        assert_eq!(brute_count(set(&[1, 2, 3, 4]), 2, 5, 3), 1);
        assert_eq!(brute_count(SetWord::EMPTY, 0, 3, 0), 1);
        assert_eq!(factorial_u128(12), Some(479_001_600));
        assert_eq!(binomial_u128(18, 9), 48_620);
    }
}
