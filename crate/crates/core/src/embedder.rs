//! The recursive embedding of `Q_n` into the red sets of a coloring of
//! `Q_{n+k}`, guided by a permutation of the `k` extra elements.
//!
//! For each `A` of `[n]` (by size, colex within a size) the procedure
//! records `phi(A)`, a red superset of `A` or `FAIL`; `alpha(A)`, the number
//! of extra elements used; and `f(A)`, a chain of blue sets met on the way.
//! A failed run leaves a blue chain of length `k + 1` from which the
//! permutation can be read back, and distinct permutations give distinct
//! end-point pairs unless the blue sets contain an induced `Q_2`.

use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{all_permutations, graded, Chain, Coloring, LatticeError, Permutation, SetWord};
use crate::seed::task_rng;

/// Largest `n` for a single run (tables have `2^n` rows).
pub const MAX_BASE: u32 = 24;
/// Largest `k` for a single run.
pub const MAX_WIDTH: u32 = 20;
/// Largest `k` for an exhaustive permutation sweep.
pub const MAX_SWEEP_WIDTH: u32 = 8;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("chain does not have the failure-chain shape: {0}")]
    Shape(String),
    #[error("sweep guard: {0}")]
    Guard(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Values attached to one `A` of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbedEntry {
    /// `None` is `FAIL`.
    pub phi: Option<SetWord>,
    pub alpha: u32,
    pub f: Chain,
}

/// `phi`, `alpha` and `f` for one permutation; row `A.bits()` describes `A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RecordWire", into = "RecordWire")]
pub struct EmbedRecord {
    pub n: u32,
    pub k: u32,
    pub pi: Permutation,
    pub entries: Vec<EmbedEntry>,
}

#[derive(Serialize, Deserialize)]
struct EntryWire {
    a: SetWord,
    phi: Option<SetWord>,
    alpha: u32,
    f: Vec<SetWord>,
}

#[derive(Serialize, Deserialize)]
struct RecordWire {
    n: u32,
    k: u32,
    pi: Vec<u32>,
    entries: Vec<EntryWire>,
}

impl TryFrom<RecordWire> for EmbedRecord {
    type Error = EmbedError;

    fn try_from(w: RecordWire) -> Result<Self, EmbedError> {
        if w.n > MAX_BASE {
            return Err(EmbedError::Dimension(format!("n = {} exceeds {MAX_BASE}", w.n)));
        }
        let pi = Permutation::new(w.n, w.k, w.pi)?;
        let rows = 1usize << w.n;
        let mut entries: Vec<Option<EmbedEntry>> = vec![None; rows];
        for e in w.entries {
            if !e.a.fits(w.n) {
                return Err(EmbedError::Dimension(format!("row {} outside [{}]", e.a, w.n)));
            }
            let slot = &mut entries[e.a.bits() as usize];
            if slot.is_some() {
                return Err(EmbedError::Dimension(format!("row {} repeated", e.a)));
            }
            *slot = Some(EmbedEntry { phi: e.phi, alpha: e.alpha, f: Chain::new(e.f)? });
        }
        let entries = entries
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| EmbedError::Dimension(format!("row {} missing", SetWord::from_bits(i as u64)))))
            .collect::<Result<_, _>>()?;
        Ok(EmbedRecord { n: w.n, k: w.k, pi, entries })
    }
}

impl From<EmbedRecord> for RecordWire {
    fn from(r: EmbedRecord) -> Self {
        let entries = graded(r.n)
            .map(|a| {
                let e = &r.entries[a.bits() as usize];
                EntryWire { a, phi: e.phi, alpha: e.alpha, f: e.f.sets().to_vec() }
            })
            .collect();
        RecordWire { n: r.n, k: r.k, pi: r.pi.image().to_vec(), entries }
    }
}

impl EmbedRecord {
    pub fn entry(&self, a: SetWord) -> &EmbedEntry {
        &self.entries[a.bits() as usize]
    }

    pub fn phi(&self, a: SetWord) -> Option<SetWord> {
        self.entry(a).phi
    }

    pub fn alpha(&self, a: SetWord) -> u32 {
        self.entry(a).alpha
    }

    pub fn f(&self, a: SetWord) -> &Chain {
        &self.entry(a).f
    }

    /// No `FAIL` anywhere: `phi` is an order embedding into the red sets.
    pub fn is_success(&self) -> bool {
        self.entries.iter().all(|e| e.phi.is_some())
    }

    /// The first failed `A` in processing order.
    pub fn first_failure(&self) -> Option<SetWord> {
        graded(self.n).find(|&a| self.phi(a).is_none())
    }

    /// `f` of the first failed set: a blue chain of length `k + 1`.
    pub fn failure_chain(&self) -> Option<&Chain> {
        self.first_failure().map(|a| self.f(a))
    }
}

/// Runs the recursion for one permutation.
///
/// Ties are broken colex-first: a failing `A` copies `f` of its colex-first
/// failing proper subset, and otherwise the prefix of `f(A)` comes from the
/// colex-first proper subset attaining the largest `alpha`.
pub fn embed_with_permutation(c: &Coloring, n: u32, k: u32, pi: &Permutation) -> Result<EmbedRecord, EmbedError> {
    if n > MAX_BASE || k > MAX_WIDTH {
        return Err(EmbedError::Dimension(format!(
            "need n <= {MAX_BASE} and k <= {MAX_WIDTH}, got n = {n}, k = {k}"
        )));
    }
    if c.n() != n + k {
        return Err(EmbedError::Dimension(format!("coloring has N = {}, expected n + k = {}", c.n(), n + k)));
    }
    if pi.base() != n || pi.width() != k {
        return Err(EmbedError::Dimension(format!(
            "permutation acts on [{}, {}], expected [{}, {}]",
            pi.base() + 1,
            pi.base() + pi.width(),
            n + 1,
            n + k
        )));
    }
    let prefixes: Vec<SetWord> = (0..=k).map(|i| pi.prefix_set(i)).collect();
    let rows = 1usize << n;
    let mut alpha = vec![0u32; rows];
    // Colex-first subset of A (A included) with the same alpha as A.
    let mut first_attaining = vec![0u64; rows];
    let mut entries: Vec<Option<EmbedEntry>> = vec![None; rows];
    for a in graded(n) {
        let idx = a.bits() as usize;
        let mut beta = 0u32;
        let mut source: Option<u64> = None;
        for e in a.elems() {
            let pred = a.without(e).bits() as usize;
            let (pa, pf) = (alpha[pred], first_attaining[pred]);
            if pa > beta || source.is_none() {
                beta = pa;
                source = Some(pf);
            } else if pa == beta {
                source = source.map(|s| s.min(pf));
            }
        }
        let entry = if beta == k + 1 {
            let b = source.expect("failed proper subset exists");
            first_attaining[idx] = b;
            let f = entries[b as usize].as_ref().expect("processed").f.clone();
            EmbedEntry { phi: None, alpha: k + 1, f }
        } else {
            let hit = (beta..=k).find(|&i| c.is_red(a.union(prefixes[i as usize])));
            let al = hit.unwrap_or(k + 1);
            let mut sets: Vec<SetWord> = match source {
                Some(b) => entries[b as usize].as_ref().expect("processed").f.sets()[..beta as usize].to_vec(),
                None => Vec::new(),
            };
            sets.extend((beta..al).map(|i| a.union(prefixes[i as usize])));
            first_attaining[idx] = if al == beta { source.unwrap_or(a.bits()) } else { a.bits() };
            EmbedEntry { phi: hit.map(|i| a.union(prefixes[i as usize])), alpha: al, f: Chain::new(sets)? }
        };
        alpha[idx] = entry.alpha;
        entries[idx] = Some(entry);
    }
    Ok(EmbedRecord {
        n,
        k,
        pi: pi.clone(),
        entries: entries.into_iter().map(|e| e.expect("every row processed")).collect(),
    })
}

/// Reads `pi(n+1), ..., pi(n+len-1)` off a chain of the failure shape.
pub fn recover_permutation(chain: &Chain, n: u32) -> Result<Vec<u32>, EmbedError> {
    let base = SetWord::full(n);
    let sets = chain.sets();
    let mut out = Vec::with_capacity(sets.len().saturating_sub(1));
    for (i, &s) in sets.iter().enumerate() {
        let extra = s.difference(base);
        if extra.len() as usize != i {
            return Err(EmbedError::Shape(format!(
                "set {i} has {} elements outside [{n}], expected {i}",
                extra.len()
            )));
        }
        if i > 0 {
            let prev = sets[i - 1].difference(base);
            if !prev.is_subset(extra) {
                return Err(EmbedError::Shape(format!("extra elements of set {i} do not extend set {}", i - 1)));
            }
            out.push(extra.difference(prev).min_elem().expect("one new element"));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    All,
    Sample { count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureChain {
    pub pi: Vec<u32>,
    pub chain: Chain,
    pub recovered: bool,
}

/// Two permutations with equal `(f_0, f_k)`; `q2` lists bottom, the two
/// incomparable middle sets and top of the induced `Q_2` this exhibits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub first: Vec<u32>,
    pub second: Vec<u32>,
    pub q2: [SetWord; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub n: u32,
    pub k: u32,
    pub permutations: u64,
    pub success: Option<EmbedRecord>,
    pub failures: Vec<FailureChain>,
    pub all_recovered: bool,
    pub collisions: Vec<Collision>,
    pub injective: bool,
}

enum Run {
    Success(EmbedRecord),
    Failure(FailureChain),
}

fn run_one(c: &Coloring, n: u32, k: u32, pi: &Permutation) -> Result<Run, EmbedError> {
    let rec = embed_with_permutation(c, n, k, pi)?;
    match rec.failure_chain() {
        None => Ok(Run::Success(rec)),
        Some(chain) => {
            let recovered = recover_permutation(chain, n).map(|p| p == pi.image()).unwrap_or(false);
            Ok(Run::Failure(FailureChain { pi: pi.image().to_vec(), chain: chain.clone(), recovered }))
        }
    }
}

/// Shuffles `{n+1, ..., n+k}` with the task's own stream.
fn sampled_permutation(n: u32, k: u32, seed: u64, task: u64) -> Permutation {
    use rand::seq::SliceRandom;
    let mut image: Vec<u32> = (n + 1..=n + k).collect();
    image.shuffle(&mut task_rng(seed, task));
    Permutation::new(n, k, image).expect("shuffle of a valid image")
}

/// Runs the embedding for every permutation (or a seeded sample) and checks
/// permutation recovery and injectivity of `pi -> (f_0, f_k)` over failures.
/// Results are merged in permutation-rank (or sample) order.
pub fn sweep_permutations(c: &Coloring, n: u32, k: u32, mode: &SweepMode) -> Result<SweepReport, EmbedError> {
    let perms: Vec<Permutation> = match mode {
        SweepMode::All => {
            if k > MAX_SWEEP_WIDTH {
                return Err(EmbedError::Guard(format!("all k! permutations need k <= {MAX_SWEEP_WIDTH}, got {k}")));
            }
            all_permutations(n, k).collect()
        }
        SweepMode::Sample { count, seed } => (0..*count).map(|t| sampled_permutation(n, k, *seed, t)).collect(),
    };
    let runs: Vec<Run> = perms
        .par_iter()
        .map(|pi| run_one(c, n, k, pi))
        .collect::<Result<_, _>>()?;
    let mut success = None;
    let mut failures = Vec::new();
    for run in runs {
        match run {
            Run::Success(rec) => {
                if success.is_none() {
                    success = Some(rec);
                }
            }
            Run::Failure(f) => failures.push(f),
        }
    }
    let mut seen: HashMap<(SetWord, SetWord), usize> = HashMap::new();
    let mut collisions = Vec::new();
    for (i, f) in failures.iter().enumerate() {
        let key = (f.chain.first().expect("nonempty"), f.chain.last().expect("nonempty"));
        match seen.get(&key) {
            Some(&j) if failures[j].pi != f.pi => {
                let other = &failures[j];
                let split = other.pi.iter().zip(&f.pi).position(|(a, b)| a != b).expect("distinct permutations");
                let q2 = [key.0, other.chain.sets()[split + 1], f.chain.sets()[split + 1], key.1];
                collisions.push(Collision { first: other.pi.clone(), second: f.pi.clone(), q2 });
            }
            Some(_) => {}
            None => {
                seen.insert(key, i);
            }
        }
    }
    Ok(SweepReport {
        n,
        k,
        permutations: perms.len() as u64,
        all_recovered: failures.iter().all(|f| f.recovered),
        injective: collisions.is_empty(),
        success,
        failures,
        collisions,
    })
}

/// Outcome of `k! > 2^(2(n+k))` for `k = floor(c n / log2 n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u64,
    pub c: f64,
    pub k: u64,
    pub log2_factorial_k: f64,
    /// `2(n + k)`.
    pub rhs_exponent: u64,
    /// `k! > 2^(2(n+k))`, so the injectivity count is violated.
    pub contradiction: bool,
    /// The decision came from exact big-integer arithmetic.
    pub exact: bool,
    /// `k (log2 k - log2 e)`, the Stirling-type lower bound on `log2 k!`.
    pub stirling_lower: f64,
    /// `k (log2 k - log2 e) < 2(n + k)`.
    pub stirling_inequality: bool,
    /// `0.8797 k log2 k <= k (log2 k - log2 e)`, reported without assertion.
    pub sketch_constant_holds: bool,
}

/// Absolute gap below which log-domain comparisons fall back to exact ones.
const LOG_MARGIN: f64 = 1e-6;

fn exact_factorial_exceeds(k: u64, exponent: u64) -> bool {
    let fact = (2..=k).fold(BigUint::from(1u32), |acc, i| acc * i);
    fact > BigUint::from(1u32) << exponent
}

/// Decides `k! > 2^exponent` given a running `log2 k!`.
fn factorial_exceeds(k: u64, log2_fact: f64, exponent: u64) -> (bool, bool) {
    let gap = log2_fact - exponent as f64;
    if gap.abs() > LOG_MARGIN * (1.0 + exponent as f64) {
        (gap > 0.0, false)
    } else {
        (exact_factorial_exceeds(k, exponent), true)
    }
}

fn log2_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).log2()).sum()
}

pub fn counting_bound(n: u64, c: f64) -> Result<BoundReport, EmbedError> {
    if n < 2 {
        return Err(EmbedError::Dimension(format!("need n >= 2, got {n}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(EmbedError::Dimension(format!("need c > 0, got {c}")));
    }
    let k = (c * n as f64 / (n as f64).log2()).floor() as u64;
    let lf = log2_factorial(k);
    let rhs_exponent = 2 * (n + k);
    let (contradiction, exact) = factorial_exceeds(k, lf, rhs_exponent);
    let kf = k as f64;
    let stirling_lower = if k == 0 { 0.0 } else { kf * (kf.log2() - std::f64::consts::LOG2_E) };
    Ok(BoundReport {
        n,
        c,
        k,
        log2_factorial_k: lf,
        rhs_exponent,
        contradiction,
        exact,
        stirling_lower,
        stirling_inequality: stirling_lower < rhs_exponent as f64,
        sketch_constant_holds: k > 0 && 0.8797 * kf * kf.log2() <= stirling_lower,
    })
}

/// Least `k` with `k! > 2^(2(n+k))`.
pub fn minimal_k(n: u64) -> Result<u64, EmbedError> {
    if n < 2 {
        return Err(EmbedError::Dimension(format!("need n >= 2, got {n}")));
    }
    let mut lf = 0.0f64;
    let mut k = 0u64;
    loop {
        if k >= 2 {
            lf += (k as f64).log2();
        }
        if factorial_exceeds(k, lf, 2 * (n + k)).0 {
            return Ok(k);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Color;

    fn set(e: &[u32]) -> SetWord {
        SetWord::from_elems(e.iter().copied()).unwrap()
    }

    #[test]
    fn all_red_is_identity() {
        let c = Coloring::uniform(3, Color::Red);
        let rec = embed_with_permutation(&c, 2, 1, &Permutation::identity(2, 1)).unwrap();
        for a in graded(2) {
            assert_eq!(rec.phi(a), Some(a));
            assert_eq!(rec.alpha(a), 0);
            assert!(rec.f(a).is_empty());
        }
        assert!(rec.is_success());
    }

    #[test]
    fn all_blue_fails_at_once() {
        let c = Coloring::uniform(2, Color::Blue);
        let rec = embed_with_permutation(&c, 1, 1, &Permutation::identity(1, 1)).unwrap();
        assert_eq!(rec.phi(SetWord::EMPTY), None);
        assert_eq!(rec.alpha(SetWord::EMPTY), 2);
        assert_eq!(rec.f(SetWord::EMPTY).sets(), &[SetWord::EMPTY, set(&[2])]);
        assert_eq!(rec.phi(set(&[1])), None);
        assert_eq!(rec.f(set(&[1])), rec.f(SetWord::EMPTY));
    }

    #[test]
    fn only_empty_set_blue() {
        let c = Coloring::structured(3, [0], vec![], None).unwrap();
        let rec = embed_with_permutation(&c, 2, 1, &Permutation::identity(2, 1)).unwrap();
        assert_eq!(rec.phi(SetWord::EMPTY), Some(set(&[3])));
        assert_eq!(rec.f(SetWord::EMPTY).sets(), &[SetWord::EMPTY]);
        assert_eq!(rec.phi(set(&[1])), Some(set(&[1, 3])));
        assert_eq!(rec.phi(set(&[2])), Some(set(&[2, 3])));
        assert_eq!(rec.phi(set(&[1, 2])), Some(set(&[1, 2, 3])));
        assert!(graded(2).all(|a| rec.alpha(a) == 1 && rec.f(a).sets() == [SetWord::EMPTY]));
    }

    #[test]
    fn dimension_checks() {
        let c = Coloring::uniform(3, Color::Red);
        assert!(embed_with_permutation(&c, 2, 2, &Permutation::identity(2, 2)).is_err());
        assert!(embed_with_permutation(&c, 2, 1, &Permutation::identity(1, 2)).is_err());
    }

    #[test]
    fn recover_examples() {
        let ch = |v: &[&[u32]]| Chain::new(v.iter().map(|e| set(e)).collect()).unwrap();
        assert_eq!(recover_permutation(&ch(&[&[], &[3], &[3, 4]]), 2).unwrap(), vec![3, 4]);
        assert_eq!(recover_permutation(&ch(&[&[], &[4], &[3, 4]]), 2).unwrap(), vec![4, 3]);
        assert_eq!(recover_permutation(&ch(&[&[1], &[1, 5], &[1, 4, 5]]), 3).unwrap(), vec![5, 4]);
        assert!(recover_permutation(&ch(&[&[3], &[3, 4]]), 2).is_err());
        assert!(recover_permutation(&ch(&[&[], &[3, 4]]), 2).is_err());
    }

    #[test]
    fn sweep_all_red_succeeds() {
        let c = Coloring::uniform(4, Color::Red);
        let r = sweep_permutations(&c, 2, 2, &SweepMode::All).unwrap();
        assert!(r.success.is_some());
        assert!(r.failures.is_empty());
        let s = sweep_permutations(&c, 2, 2, &SweepMode::Sample { count: 3, seed: 1 }).unwrap();
        assert_eq!(s.permutations, 3);
        assert!(s.success.is_some());
    }

    #[test]
    fn sweep_all_blue() {
        let c = Coloring::uniform(2, Color::Blue);
        let r = sweep_permutations(&c, 1, 1, &SweepMode::All).unwrap();
        assert_eq!(r.permutations, 1);
        assert!(r.success.is_none());
        assert!(r.all_recovered && r.injective);
        let c4 = Coloring::uniform(4, Color::Blue);
        let r4 = sweep_permutations(&c4, 2, 2, &SweepMode::All).unwrap();
        assert_eq!(r4.failures.len(), 2);
        assert_ne!(r4.failures[0].chain, r4.failures[1].chain);
        // Both chains run from the empty set to {3,4}: an induced Q_2 in blue.
        assert!(r4.all_recovered && !r4.injective);
        assert_eq!(r4.collisions[0].q2, [SetWord::EMPTY, set(&[3]), set(&[4]), set(&[3, 4])]);
    }

    #[test]
    fn sweep_guard() {
        let c = Coloring::uniform(11, Color::Red);
        assert!(matches!(sweep_permutations(&c, 2, 9, &SweepMode::All), Err(EmbedError::Guard(_))));
    }

    #[test]
    fn collision_exhibits_induced_q2() {
        // Blue contains an induced Q_2 on the extra elements, so collisions are allowed.
        let c = Coloring::uniform(4, Color::Blue);
        let r = sweep_permutations(&c, 2, 2, &SweepMode::All).unwrap();
        for col in &r.collisions {
            let [lo, a, b, hi] = col.q2;
            assert!(lo.is_proper_subset(a) && lo.is_proper_subset(b));
            assert!(a.is_proper_subset(hi) && b.is_proper_subset(hi));
            assert!(!a.comparable(b));
        }
    }

    #[test]
    fn bound_examples() {
        let r = counting_bound(2, 6.14).unwrap();
        assert_eq!(r.k, 12);
        assert_eq!(r.rhs_exponent, 28);
        assert!(r.contradiction);
        assert!(exact_factorial_exceeds(12, 28));
        assert!(!exact_factorial_exceeds(11, 26));
        assert_eq!(counting_bound(4, 6.14).unwrap().k, 12);
        assert!(minimal_k(2).unwrap() <= 12);
        assert!(counting_bound(1, 6.14).is_err());
    }

    #[test]
    fn minimal_k_matches_exact_scan() {
        for n in 2..40u64 {
            let k = minimal_k(n).unwrap();
            assert!(exact_factorial_exceeds(k, 2 * (n + k)));
            assert!(!exact_factorial_exceeds(k - 1, 2 * (n + k - 1)));
        }
    }

    #[test]
    fn record_json_roundtrip() {
        let c = Coloring::structured(4, [0, 2], vec![], None).unwrap();
        let rec = embed_with_permutation(&c, 2, 2, &Permutation::new(2, 2, vec![4, 3]).unwrap()).unwrap();
        let text = crate::lattice::to_json(&rec);
        let back: EmbedRecord = crate::lattice::from_json(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
        assert_eq!(back, rec);
    }
}
