//! Independent certification of the constructions and of embedding records.
//!
//! Everything here is recomputed from set predicates and colors alone; no
//! construction or embedding internals are consulted.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::CodeHypotheses;
use crate::embedder::EmbedRecord;
use crate::lattice::{graded, layer, Coloring, LatticeError, SetWord, StructuredColoring, WeightedFamily};
use crate::oracle::CopyKind;
use crate::seed::task_rng;

/// Largest implicit layer the distance check enumerates by default.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1 << 22;
/// Largest `n` for which [`verify_embedding`] checks comparabilities pairwise.
pub const MAX_PAIRWISE_BASE: u32 = 12;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown construction shape: {0}")]
    UnknownShape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// First pair (colex order) of distinct members closer than `bound`.
pub fn check_min_distance(
    fam: &WeightedFamily,
    bound: u32,
    limit: u128,
) -> Result<Option<(SetWord, SetWord)>, VerifyError> {
    let members = fam.to_members(limit)?;
    for (i, &a) in members.iter().enumerate() {
        if let Some(&b) = members[i + 1..].iter().find(|&&b| a.sym_diff_size(b) < bound) {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

/// Counts of `s`-subsets of `ground` by element sum mod `p`, for `s <= size_cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpTable {
    pub ground: SetWord,
    pub size_cap: u32,
    pub modulus: u64,
    counts: Vec<Vec<u128>>,
}

impl DpTable {
    pub fn new(ground: SetWord, size_cap: u32, modulus: u64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        let p = modulus as usize;
        let mut counts = vec![vec![0u128; p]; size_cap as usize + 1];
        counts[0][0] = 1;
        for e in ground.elems() {
            let step = (u64::from(e) % modulus) as usize;
            for s in (1..=size_cap as usize).rev() {
                let (lower, upper) = counts.split_at_mut(s);
                let (prev, cur) = (&lower[s - 1], &mut upper[0]);
                for r in 0..p {
                    cur[(r + step) % p] += prev[r];
                }
            }
        }
        DpTable { ground, size_cap, modulus, counts }
    }

    pub fn count(&self, size: u32, residue: u64) -> u128 {
        if size > self.size_cap {
            return 0;
        }
        self.counts[size as usize][(residue % self.modulus) as usize]
    }
}

/// Number of `k`-subsets of `ground` whose element sum is `r` mod `p`.
pub fn dp_count(ground: SetWord, k: u32, p: u64, r: u64) -> u128 {
    DpTable::new(ground, k, p).count(k, r)
}

/// Result of checking that every `m`-set `Y` and `y` in `Y` admit a
/// `k`-set `C` avoiding `Y` with `sum(C) + y = d (mod p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeStatementReport {
    pub ground: u32,
    pub m: u32,
    pub k: u32,
    pub p: u64,
    pub d: u64,
    pub pairs_checked: u64,
    pub min_count: u128,
    /// First `(Y, y)` without a witness, `Y` in colex order.
    pub failure: Option<(SetWord, u32)>,
    pub hypotheses: CodeHypotheses,
    /// The parameters lie outside the hypotheses; the outcome is informative only.
    pub exploratory: bool,
}

impl CodeStatementReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn check_code_statement(ground: u32, m: u32, k: u32, p: u64, d: u64) -> Result<CodeStatementReport, VerifyError> {
    if p == 0 {
        return Err(VerifyError::Domain("modulus must be positive".into()));
    }
    if m == 0 || m >= ground || ground <= 3 {
        return Err(VerifyError::Domain(format!("need N > 3 and 1 <= m < N, got N = {ground}, m = {m}")));
    }
    let full = SetWord::full(ground);
    let ys: Vec<SetWord> = layer(ground, m)?.collect();
    let per_y: Vec<Vec<u128>> = ys
        .par_iter()
        .map(|&big_y| {
            let table = DpTable::new(full.difference(big_y), k, p);
            big_y
                .elems()
                .map(|y| table.count(k, (i128::from(d) - i128::from(y)).rem_euclid(i128::from(p)) as u64))
                .collect()
        })
        .collect();
    let mut failure = None;
    let mut min_count = u128::MAX;
    for (big_y, counts) in ys.iter().zip(&per_y) {
        for (y, &cnt) in big_y.elems().zip(counts) {
            min_count = min_count.min(cnt);
            if cnt == 0 && failure.is_none() {
                failure = Some((*big_y, y));
            }
        }
    }
    let hypotheses = CodeHypotheses::new(ground, m, k);
    Ok(CodeStatementReport {
        ground,
        m,
        k,
        p,
        d,
        pairs_checked: ys.len() as u64 * u64::from(m),
        min_count,
        failure,
        exploratory: !hypotheses.hold(),
        hypotheses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// An `(m-1)`-set with fewer than 2 supersets in the family.
    TooFewSupersets,
    /// An `(m+1)`-set with at least `m` subsets in the family.
    TooManySubsets,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub kind: ConditionKind,
    pub set: SetWord,
    pub count: u32,
}

/// Family members under explicit enumeration, counted per neighboring set.
fn neighbor_counts(members: &[SetWord], ground: u32) -> (HashMap<SetWord, u32>, HashMap<SetWord, u32>) {
    let mut below: HashMap<SetWord, u32> = HashMap::new();
    let mut above: HashMap<SetWord, u32> = HashMap::new();
    for &f in members {
        for e in f.elems() {
            *below.entry(f.without(e)).or_default() += 1;
        }
        for e in (1..=ground).filter(|&e| !f.contains(e)) {
            *above.entry(f.with(e)).or_default() += 1;
        }
    }
    (below, above)
}

/// All violations of "every `(m-1)`-set has at least 2 supersets" and
/// "every `(m+1)`-set has at most `m - 1` subsets" for a weight-`m` family;
/// the first kind first, each in lexicographic order.
pub fn check_conditions(fam: &WeightedFamily) -> Result<Vec<ConditionViolation>, VerifyError> {
    let (ground, m) = (fam.ground_n(), fam.weight());
    if m == 0 || m >= ground {
        return Err(VerifyError::Domain(format!("need 1 <= m < N, got m = {m}, N = {ground}")));
    }
    let members = fam.to_members(DEFAULT_ENUMERATION_LIMIT)?;
    let (below, above) = neighbor_counts(&members, ground);
    let mut low: Vec<ConditionViolation> = layer(ground, m - 1)?
        .filter_map(|s| {
            let count = below.get(&s).copied().unwrap_or(0);
            (count < 2).then_some(ConditionViolation { kind: ConditionKind::TooFewSupersets, set: s, count })
        })
        .collect();
    let mut high: Vec<ConditionViolation> = above
        .iter()
        .filter(|&(_, &c)| c >= m)
        .map(|(&t, &count)| ConditionViolation { kind: ConditionKind::TooManySubsets, set: t, count })
        .collect();
    low.sort_by_key(|v| v.set.lex_key());
    high.sort_by_key(|v| v.set.lex_key());
    low.extend(high);
    Ok(low)
}

/// The construction a structured coloring was recognized as.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// Layers `k`, `k + 3` and extra sets of size `k + 1`.
    PairCode { k: u32 },
    /// Layers `k`, `k+3, ..., k+m+1` and a mod-`p` rule of weight `k + 1`.
    ModPCode { k: u32, m: u32, p: u64 },
    /// Layers `0..=m-2`, `m + 1` and extra sets of size `m`.
    Probabilistic { m: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralViolation {
    pub reason: String,
    pub sets: Vec<SetWord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlueFreeReport {
    pub shape: Shape,
    pub m: u32,
    pub kind: CopyKind,
    /// Sizes forced on the images of `Q_m`, one per rank.
    pub profile: Vec<u32>,
    pub argument: String,
    pub violation: Option<StructuralViolation>,
}

impl BlueFreeReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

fn structured(c: &Coloring) -> Result<&StructuredColoring, VerifyError> {
    c.as_structured()
        .ok_or_else(|| VerifyError::UnknownShape("dense colorings carry no construction shape".into()))
}

/// Recognizes the three blue-set shapes produced by the constructions.
pub fn recognize_shape(c: &Coloring) -> Result<Shape, VerifyError> {
    let st = structured(c)?;
    let layers: Vec<u32> = st.blue_layers.iter().copied().collect();
    let extra_weight = st.blue_extra.first().map(|s| s.len());
    if st.blue_extra.iter().any(|s| Some(s.len()) != extra_weight) {
        return Err(VerifyError::UnknownShape("extra blue sets of mixed sizes".into()));
    }
    if let Some(rule) = st.blue_modp {
        let k = layers.first().copied().ok_or_else(|| VerifyError::UnknownShape("rule without layers".into()))?;
        let m = layers.last().copied().unwrap_or(k).saturating_sub(k + 1);
        let expected: Vec<u32> = std::iter::once(k).chain(k + 3..=k + m + 1).collect();
        if st.blue_extra.is_empty() && rule.weight == k + 1 && m >= 2 && layers == expected {
            return Ok(Shape::ModPCode { k, m, p: rule.p });
        }
        return Err(VerifyError::UnknownShape(format!("rule of weight {} over blue layers {layers:?}", rule.weight)));
    }
    if let [k, top] = layers[..] {
        if top == k + 3 && extra_weight.is_none_or(|w| w == k + 1) {
            return Ok(Shape::PairCode { k });
        }
    }
    if let Some(m) = extra_weight {
        let expected: Vec<u32> = (0..m.saturating_sub(1)).chain(std::iter::once(m + 1)).collect();
        if m >= 2 && layers == expected {
            return Ok(Shape::Probabilistic { m });
        }
    }
    Err(VerifyError::UnknownShape(format!("blue layers {layers:?} with extra sets of size {extra_weight:?}")))
}

/// Certifies that the blue sets of a recognized construction contain no
/// copy of `Q_m` of the given kind.
///
/// Every maximal chain of `Q_m` has `m + 1` sets with strictly increasing
/// sizes, so when the blue sets occupy exactly `m + 1` sizes, each rank of
/// `Q_m` is forced onto one size (the profile). The remaining step depends
/// on the shape: two blue sets of size `k + 1` above a common `k`-set are at
/// distance 2 (pair code, mod-`p` code), and the `m` coatoms of a copy would
/// be `m` family members below one `(m+1)`-set (random family). This argument
/// excludes weak copies, hence induced ones too.
pub fn certify_blue_free(c: &Coloring, m: u32, kind: CopyKind) -> Result<BlueFreeReport, VerifyError> {
    let shape = recognize_shape(c)?;
    let st = structured(c)?;
    let ground = c.n();
    let built_for = match shape {
        Shape::PairCode { .. } => 2,
        Shape::ModPCode { m, .. } | Shape::Probabilistic { m } => m,
    };
    if m != built_for {
        if m > built_for {
            let levels = st.blue_layers.len() + usize::from(!st.blue_extra.is_empty() || st.blue_modp.is_some());
            return Ok(BlueFreeReport {
                shape,
                m,
                kind,
                profile: Vec::new(),
                argument: format!("blue sets occupy {levels} sizes, fewer than the {} ranks of Q_{m}", m + 1),
                violation: None,
            });
        }
        return Err(VerifyError::UnknownShape(format!(
            "construction is built against Q_{built_for}, not Q_{m}"
        )));
    }
    let report = |profile: Vec<u32>, argument: String, violation| BlueFreeReport {
        shape: shape.clone(),
        m,
        kind,
        profile,
        argument,
        violation,
    };
    match shape {
        Shape::PairCode { k } => {
            let fam = WeightedFamily::explicit(ground, k + 1, st.blue_extra.clone())?;
            let violation = check_min_distance(&fam, 4, u128::MAX)?.map(|(a, b)| StructuralViolation {
                reason: "two extra sets at distance 2 share a blue lower neighbor".into(),
                sets: vec![a.intersection(b), a, b],
            });
            Ok(report(
                vec![k, k + 1, k + 1, k + 3],
                "middle images lie in the extra sets above a common k-set; extras are pairwise at distance >= 4"
                    .into(),
                violation,
            ))
        }
        Shape::ModPCode { k, m, p } => {
            let mut profile = vec![k, k + 1];
            profile.extend(k + 3..=k + m + 1);
            let fam = WeightedFamily::modp(ground, k + 1, p, st.blue_modp.expect("rule present").d)?;
            let (argument, violation) = if p >= u64::from(ground) {
                (
                    format!("a swap changes the element sum by 1..{} < p = {p}, so code sets are at distance >= 4", ground - 1),
                    None,
                )
            } else {
                let v = check_min_distance(&fam, 4, DEFAULT_ENUMERATION_LIMIT)?.map(|(a, b)| StructuralViolation {
                    reason: "two code sets at distance 2 share a blue lower neighbor".into(),
                    sets: vec![a.intersection(b), a, b],
                });
                ("code sets checked pairwise at distance >= 4".into(), v)
            };
            Ok(report(profile, argument, violation))
        }
        Shape::Probabilistic { m } => {
            let mut profile: Vec<u32> = (0..m - 1).collect();
            profile.extend([m, m + 1]);
            let fam = WeightedFamily::explicit(ground, m, st.blue_extra.clone())?;
            let members = fam.to_members(0)?;
            let (_, above) = neighbor_counts(&members, ground);
            let violation = above
                .iter()
                .filter(|&(_, &count)| count >= m)
                .min_by_key(|(t, _)| t.lex_key())
                .map(|(&t, _)| StructuralViolation {
                    reason: format!("an (m+1)-set with at least {m} family members below it"),
                    sets: std::iter::once(t).chain(members.iter().copied().filter(|f| f.is_subset(t))).collect(),
                });
            Ok(report(
                profile,
                "the coatoms of a copy are m family members below its (m+1)-set top".into(),
                violation,
            ))
        }
    }
}

/// For the random-family coloring of `Q_{n+m}`: every `(m-1)`-set has at
/// most `n - 1` red supersets of size `m`. Returns the first offending set
/// (colex order) with its red count.
pub fn certify_red_singleton_bound(c: &Coloring, n: u32, m: u32) -> Result<Option<(SetWord, u32)>, VerifyError> {
    if c.n() != n + m {
        return Err(VerifyError::Dimension(format!("coloring has N = {}, expected n + m = {}", c.n(), n + m)));
    }
    match recognize_shape(c)? {
        Shape::Probabilistic { m: shape_m } if shape_m == m => {}
        other => {
            return Err(VerifyError::UnknownShape(format!("expected the random-family shape with m = {m}, got {other:?}")))
        }
    }
    for s in layer(n + m, m - 1)? {
        let red = (1..=n + m).filter(|&e| !s.contains(e) && c.is_red(s.with(e))).count() as u32;
        if red > n - 1 {
            return Ok(Some((s, red)));
        }
    }
    Ok(None)
}

/// Both sides of the local-lemma inequality for the two event classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LllReport {
    pub n: u32,
    pub m: u32,
    pub p_incl: f64,
    pub x_y: f64,
    pub x_z: f64,
    pub p_as: f64,
    pub p_bt: f64,
    pub rhs_as: f64,
    pub rhs_bt: f64,
    /// Natural logarithms of the four values above.
    pub ln_p_as: f64,
    pub ln_p_bt: f64,
    pub ln_rhs_as: f64,
    pub ln_rhs_bt: f64,
    pub satisfied_as: bool,
    pub satisfied_bt: bool,
    /// Both comparisons are clear of rounding error.
    pub decisive: bool,
    /// Lower-neighbor events of each superset event: `(n+1)n/2`.
    pub as_depends_on_bt: u64,
    /// Other superset events sharing a variable: `(m-1)(n+1)`.
    pub as_depends_on_as: u64,
    /// `(m+1)m/2`.
    pub bt_depends_on_as: u64,
    /// `(n-1)(m+1)`.
    pub bt_depends_on_bt: u64,
}

fn ln_sum(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Evaluates the local-lemma inequality in log space, with the paper's
/// weights `x_y`, `x_z` and dependency counts.
pub fn lll_inequality_report(n: u32, m: u32, p_incl: f64) -> Result<LllReport, VerifyError> {
    if m < 2 || n < 2 {
        return Err(VerifyError::Domain(format!("need m >= 2 and n >= 2, got m = {m}, n = {n}")));
    }
    if !(p_incl > 0.0 && p_incl < 1.0) {
        return Err(VerifyError::Domain(format!("inclusion probability {p_incl} outside (0, 1)")));
    }
    let (nf, mf) = (f64::from(n), f64::from(m));
    let (x_y, x_z) = crate::constructions::lll_weights(n, m);
    let (lp, lq) = (p_incl.ln(), (-p_incl).ln_1p());
    // P(A_S) = (n+1)(1-p)^n p + (1-p)^(n+1)
    let ln_p_as = ln_sum((nf + 1.0).ln() + nf * lq + lp, (nf + 1.0) * lq);
    // P(B_T) = (m+1)p^m(1-p) + p^(m+1)
    let ln_p_bt = ln_sum((mf + 1.0).ln() + mf * lp + lq, (mf + 1.0) * lp);
    let as_depends_on_bt = u64::from(n + 1) * u64::from(n) / 2;
    let as_depends_on_as = u64::from(m - 1) * u64::from(n + 1);
    let bt_depends_on_as = u64::from(m + 1) * u64::from(m) / 2;
    let bt_depends_on_bt = u64::from(n - 1) * u64::from(m + 1);
    let (ly, lz) = ((-x_y).ln_1p(), (-x_z).ln_1p());
    let ln_rhs_as = x_y.ln() + as_depends_on_bt as f64 * lz + as_depends_on_as as f64 * ly;
    let ln_rhs_bt = x_z.ln() + bt_depends_on_as as f64 * ly + bt_depends_on_bt as f64 * lz;
    const TOL: f64 = 1e-9;
    let decisive = (ln_rhs_as - ln_p_as).abs() > TOL * (1.0 + ln_p_as.abs())
        && (ln_rhs_bt - ln_p_bt).abs() > TOL * (1.0 + ln_p_bt.abs());
    Ok(LllReport {
        n,
        m,
        p_incl,
        x_y,
        x_z,
        p_as: ln_p_as.exp(),
        p_bt: ln_p_bt.exp(),
        rhs_as: ln_rhs_as.exp(),
        rhs_bt: ln_rhs_bt.exp(),
        ln_p_as,
        ln_p_bt,
        ln_rhs_as,
        ln_rhs_bt,
        satisfied_as: ln_p_as <= ln_rhs_as,
        satisfied_bt: ln_p_bt <= ln_rhs_bt,
        decisive,
        as_depends_on_bt,
        as_depends_on_as,
        bt_depends_on_as,
        bt_depends_on_bt,
    })
}

/// Sample frequency of one event class with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Monte-Carlo frequencies of "at most 1 of the `n + 1` supersets chosen"
/// and "at least `m` of the `m + 1` subsets chosen".
pub fn monte_carlo_event_probabilities(n: u32, m: u32, p_incl: f64, trials: u64, seed: u64) -> (Estimate, Estimate) {
    let estimate = |task: u64, draws: u32, hit: &dyn Fn(u32) -> bool| {
        let mut rng = task_rng(seed, task);
        let hits = (0..trials)
            .filter(|_| hit((0..draws).filter(|_| rng.gen_bool(p_incl)).count() as u32))
            .count() as f64;
        let mean = hits / trials as f64;
        Estimate { mean, std_error: (mean * (1.0 - mean) / trials as f64).sqrt() }
    };
    (estimate(0, n + 1, &|c| c <= 1), estimate(1, m + 1, &|c| c >= m))
}

/// The first property of an embedding record that fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum EmbeddingViolation {
    /// `B < A` and `phi(B) < phi(A)` disagree.
    P1 { a: SetWord, b: SetWord },
    /// `B` below `A` with `alpha(B) > alpha(A)`.
    P2 { a: SetWord, b: SetWord },
    /// `alpha` and `phi` do not match.
    P3 { a: SetWord },
    /// `f(A)` is not a blue chain of length `alpha(A)` along the permutation.
    P4 { a: SetWord },
    /// `f(A)` does not end inside `phi(A)`.
    P5 { a: SetWord },
    /// `phi(A)` is blue.
    BlueImage { a: SetWord },
}

/// Re-checks the record against the coloring using only colors and inclusion.
pub fn verify_embedding(rec: &EmbedRecord, c: &Coloring) -> Result<Option<EmbeddingViolation>, VerifyError> {
    let (n, k) = (rec.n, rec.k);
    if c.n() != n + k || rec.pi.base() != n || rec.pi.width() != k {
        return Err(VerifyError::Dimension(format!(
            "record for n = {n}, k = {k} against a coloring of Q_{}",
            c.n()
        )));
    }
    if rec.entries.len() != 1usize << n {
        return Err(VerifyError::Dimension(format!("record has {} rows, expected 2^{n}", rec.entries.len())));
    }
    let base = SetWord::full(n);
    for a in graded(n) {
        let (phi, alpha, f) = (rec.phi(a), rec.alpha(a), rec.f(a).sets());
        // P3
        let p3 = match phi {
            None => alpha == k + 1,
            Some(img) => alpha <= k && img == a.union(rec.pi.prefix_set(alpha)) && img.intersection(base) == a,
        };
        if !p3 {
            return Ok(Some(EmbeddingViolation::P3 { a }));
        }
        if let Some(img) = phi {
            if c.is_blue(img) {
                return Ok(Some(EmbeddingViolation::BlueImage { a }));
            }
        }
        // P4
        let p4 = f.len() == alpha as usize
            && f.iter().enumerate().all(|(i, &s)| c.is_blue(s) && s.difference(base) == rec.pi.prefix_set(i as u32))
            && f.windows(2).all(|w| w[0].is_proper_subset(w[1]));
        if !p4 {
            return Ok(Some(EmbeddingViolation::P4 { a }));
        }
        // P5
        if (1..=k).contains(&alpha) && !f[alpha as usize - 1].is_subset(phi.expect("alpha <= k")) {
            return Ok(Some(EmbeddingViolation::P5 { a }));
        }
        // P2 along covers; monotonicity then follows by transitivity.
        for e in a.elems() {
            let b = a.without(e);
            if rec.alpha(b) > alpha {
                return Ok(Some(EmbeddingViolation::P2 { a, b }));
            }
        }
    }
    if n <= MAX_PAIRWISE_BASE {
        let rows: Vec<(SetWord, SetWord)> = graded(n).filter_map(|a| rec.phi(a).map(|img| (a, img))).collect();
        for &(a, pa) in &rows {
            for &(b, pb) in &rows {
                if b.is_proper_subset(a) != pb.is_proper_subset(pa) {
                    return Ok(Some(EmbeddingViolation::P1 { a, b }));
                }
            }
        }
    } else {
        // Beyond the pairwise limit: P3 gives phi(A) = A + prefix(alpha(A)),
        // and with P2 the order is preserved along covers.
        for a in graded(n) {
            for e in a.elems() {
                let b = a.without(e);
                if let (Some(pa), Some(pb)) = (rec.phi(a), rec.phi(b)) {
                    if !pb.is_proper_subset(pa) {
                        return Ok(Some(EmbeddingViolation::P1 { a, b }));
                    }
                }
            }
        }
    }
    Ok(None)
}
