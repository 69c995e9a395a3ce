//! Lower-bound colorings: layered colorings, the greedy pair code, the
//! mod-`p` constant-weight code with subset-sum witnesses, the random
//! family realized by event resampling, and the `m = 2` refuter.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{binomial, layer, Coloring, LatticeError, ModPRule, SetWord, WeightedFamily};
use crate::seed::task_rng;
use crate::verifier::check_conditions;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("greedy pair code stuck at pair ({y}, {z})")]
    GreedyStuck { y: u32, z: u32 },
    #[error("no subset sums to {target} mod {p}")]
    NoSolution { target: u64, p: u64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("resampling stopped after {resamples} resamples with {violations} violated events")]
    ResampleBudgetExceeded {
        resamples: u64,
        violations: usize,
        best_effort: Box<WeightedFamily>,
    },
    #[error("singleton {0} has fewer than 2 supersets in the family")]
    PreconditionFailed(SetWord),
    #[error("family fails the superset/subset conditions: {0} violated events")]
    ConditionsFailed(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn invalid(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::InvalidParameter(msg.into())
}

/// Smallest integer `r` with `r * r >= x`.
pub fn ceil_sqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r < x {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= x {
        r -= 1;
    }
    r
}

/// Layered coloring of `Q_{m+n-1}`: `m` blue layers (default the top `m`),
/// all others red.
pub fn layered_coloring(m: u32, n: u32, blue_layers: Option<Vec<u32>>) -> Result<Coloring, ConstructionError> {
    if m == 0 || n == 0 {
        return Err(invalid("m and n must be >= 1"));
    }
    let ground = m + n - 1;
    let layers: BTreeSet<u32> = match blue_layers {
        Some(list) => {
            let set: BTreeSet<u32> = list.iter().copied().collect();
            if set.len() != list.len() {
                return Err(invalid("blue layer indices repeat"));
            }
            if let Some(&bad) = set.iter().find(|&&s| s > ground) {
                return Err(invalid(format!("blue layer {bad} outside [0, {ground}]")));
            }
            if set.len() != m as usize {
                return Err(invalid(format!("need exactly {m} blue layers, got {}", set.len())));
            }
            set
        }
        None => (n..=ground).collect(),
    };
    Ok(Coloring::structured(ground, layers, Vec::new(), None)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairAssignment {
    pub y: u32,
    pub z: u32,
    pub set: SetWord,
}

/// Sets `C_{y,z}` of size `k + 1` over `[n+2]` with `y` in and `z` out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCode {
    pub n: u32,
    pub k: u32,
    /// In lexicographic order of `(y, z)`.
    pub assignments: Vec<PairAssignment>,
}

impl PairCode {
    pub fn sets(&self) -> Vec<SetWord> {
        self.assignments.iter().map(|a| a.set).collect()
    }

    pub fn family(&self) -> WeightedFamily {
        WeightedFamily::explicit(self.n + 2, self.k + 1, self.sets()).expect("pair code sets have weight k+1")
    }
}

/// Counting argument that the greedy choice never gets stuck.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairFeasibility {
    pub n: u32,
    pub k: u32,
    /// `binom(n, k)`: candidates with `y` in and `z` out.
    pub candidates: u128,
    /// `((n+2)(n+1) - 1)(1 + k(n-k))`: most candidates ever blocked.
    pub blocked_bound: u128,
    pub holds: bool,
}

pub fn pair_feasibility(n: u32) -> PairFeasibility {
    let k = n / 2;
    let candidates = binomial(n, k);
    let pairs = u128::from(n + 2) * u128::from(n + 1) - 1;
    let blocked_bound = pairs * (1 + u128::from(k) * u128::from(n - k));
    PairFeasibility { n, k, candidates, blocked_bound, holds: candidates > blocked_bound }
}

/// First-fit choice of `C_{y,z}` over ordered pairs in lexicographic order,
/// candidates in colex order, keeping pairwise symmetric differences >= 4.
pub fn greedy_pair_code(n: u32) -> Result<PairCode, ConstructionError> {
    let ground = n + 2;
    if ground > 30 {
        return Err(invalid(format!("n = {n} too large for the greedy pair code")));
    }
    let k = n / 2;
    let candidates: Vec<SetWord> = layer(ground, k + 1)?.collect();
    let mut blocked: HashSet<SetWord> = HashSet::new();
    let mut assignments = Vec::with_capacity((ground * (ground - 1)) as usize);
    for y in 1..=ground {
        for z in (1..=ground).filter(|&z| z != y) {
            let chosen = candidates
                .iter()
                .copied()
                .find(|&c| c.contains(y) && !c.contains(z) && !blocked.contains(&c))
                .ok_or(ConstructionError::GreedyStuck { y, z })?;
            blocked.insert(chosen);
            for out in chosen.elems() {
                for inn in (1..=ground).filter(|&e| !chosen.contains(e)) {
                    blocked.insert(chosen.without(out).with(inn));
                }
            }
            assignments.push(PairAssignment { y, z, set: chosen });
        }
    }
    Ok(PairCode { n, k, assignments })
}

/// Blue: layers `k` and `k + 3` of `Q_{n+2}` plus the pair code.
pub fn induced_q2_coloring_from(code: &PairCode) -> Result<Coloring, ConstructionError> {
    Ok(Coloring::structured(code.n + 2, [code.k, code.k + 3], code.sets(), None)?)
}

pub fn induced_q2_coloring(n: u32) -> Result<Coloring, ConstructionError> {
    induced_q2_coloring_from(&greedy_pair_code(n)?)
}

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime `p` with `N <= p < 2(N - 1)`.
pub fn find_prime(ground: u32) -> Result<u64, ConstructionError> {
    if ground <= 3 {
        return Err(invalid(format!("need N > 3, got {ground}")));
    }
    let lo = u64::from(ground);
    (lo..2 * (lo - 1))
        .find(|&p| is_prime(p))
        .ok_or_else(|| invalid(format!("no prime in [{lo}, {})", 2 * (lo - 1))))
}

/// `{S in binom([N], k+1) : sum(S) = d (mod p)}` as an implicit family.
pub fn modp_code(ground: u32, k: u32, d: u64, p: u64) -> Result<WeightedFamily, ConstructionError> {
    let lo = u64::from(ground);
    if !(lo <= p && p < 2 * lo.saturating_sub(1)) {
        return Err(invalid(format!("need {ground} <= p < {}, got p = {p}", 2 * lo.saturating_sub(1))));
    }
    if !is_prime(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    if !(1..=p).contains(&d) {
        return Err(invalid(format!("residue d = {d} outside [1, {p}]")));
    }
    if k + 1 > ground {
        return Err(invalid(format!("weight k + 1 = {} exceeds N = {ground}", k + 1)));
    }
    Ok(WeightedFamily::modp(ground, k + 1, p, d)?)
}

/// Minimum-size subset-sum witnesses modulo `p` for a fixed list.
///
/// `best[j][r]` is the fewest elements among the first `j` summing to `r`;
/// witnesses are read back from the table.
pub struct SubsetSumTable {
    values: Vec<u64>,
    p: u64,
    best: Vec<Vec<u32>>,
}

const UNREACHABLE: u32 = u32::MAX;

impl SubsetSumTable {
    pub fn new(values: &[u64], p: u64) -> Self {
        assert!(p > 0, "modulus must be positive");
        let width = p as usize;
        let mut best = vec![vec![UNREACHABLE; width]; values.len() + 1];
        best[0][0] = 0;
        for (j, &v) in values.iter().enumerate() {
            let step = (v % p) as usize;
            for r in 0..width {
                let skip = best[j][r];
                let prev = best[j][(r + width - step) % width];
                let take = if prev == UNREACHABLE { UNREACHABLE } else { prev + 1 };
                best[j + 1][r] = skip.min(take);
            }
        }
        SubsetSumTable { values: values.to_vec(), p, best }
    }

    pub fn reachable(&self, target: u64) -> bool {
        self.best[self.values.len()][(target % self.p) as usize] != UNREACHABLE
    }

    /// Indices (increasing) of a minimum-size subset summing to `target`.
    pub fn witness(&self, target: u64) -> Option<Vec<usize>> {
        let width = self.p as usize;
        let mut r = (target % self.p) as usize;
        if self.best[self.values.len()][r] == UNREACHABLE {
            return None;
        }
        let mut picked = Vec::new();
        for j in (1..=self.values.len()).rev() {
            if self.best[j][r] == self.best[j - 1][r] {
                continue;
            }
            picked.push(j - 1);
            r = (r + width - (self.values[j - 1] % self.p) as usize) % width;
        }
        debug_assert_eq!(r, 0);
        picked.reverse();
        Some(picked)
    }
}

/// `|A| >= sqrt(4p - 3)`.
pub fn olson_threshold_met(len: usize, p: u64) -> bool {
    (len as u64) * (len as u64) + 3 >= 4 * p
}

/// A subset of `values` with sum congruent to `target` mod `p`.
pub fn olson_subset_sum(values: &[u64], p: u64, target: u64) -> Result<Vec<u64>, ConstructionError> {
    if p == 0 {
        return Err(invalid("modulus must be positive"));
    }
    SubsetSumTable::new(values, p)
        .witness(target)
        .map(|idx| idx.into_iter().map(|i| values[i]).collect())
        .ok_or(ConstructionError::NoSolution { target: target % p, p })
}

/// Hypotheses of the code-witness construction for `N = n + m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeHypotheses {
    /// `8N - 15`.
    pub radicand: u64,
    /// `ceil(sqrt(8N - 15))`.
    pub l: u64,
    pub k_lower: bool,
    pub k_upper: bool,
}

impl CodeHypotheses {
    pub fn new(ground: u32, m: u32, k: u32) -> Self {
        let radicand = 8 * u64::from(ground) - 15;
        let n = i64::from(ground) - i64::from(m);
        let k64 = u64::from(k);
        let slack = n - i64::from(k);
        CodeHypotheses {
            radicand,
            l: ceil_sqrt(radicand),
            k_lower: k64 * k64 >= radicand,
            k_upper: slack >= 0 && (slack as u64) * (slack as u64) >= radicand,
        }
    }

    pub fn hold(&self) -> bool {
        self.k_lower && self.k_upper
    }
}

/// A `k`-set `C` avoiding `Y` with `C + {y}` in the code, built from the
/// `l` smallest and `l` largest elements outside `Y` and a subset-sum fix-up.
pub fn code_witness(
    ground: u32,
    m: u32,
    k: u32,
    code: &WeightedFamily,
    big_y: SetWord,
    y: u32,
) -> Result<SetWord, ConstructionError> {
    if ground <= 3 || m >= ground {
        return Err(invalid(format!("need N > 3 and m < N, got N = {ground}, m = {m}")));
    }
    let rule = code
        .modp_rule()
        .ok_or_else(|| invalid("code witnesses need an implicit mod-p code"))?;
    if code.ground_n() != ground || rule.weight != k + 1 {
        return Err(invalid(format!(
            "code has ground {} and weight {}, expected {ground} and {}",
            code.ground_n(),
            rule.weight,
            k + 1
        )));
    }
    if big_y.len() != m || !big_y.fits(ground) || !big_y.contains(y) {
        return Err(invalid(format!("Y = {big_y} must be an {m}-subset of [{ground}] containing {y}")));
    }
    let hyp = CodeHypotheses::new(ground, m, k);
    if !hyp.hold() {
        return Err(ConstructionError::Hypothesis(format!(
            "need sqrt({0}) <= k <= n - sqrt({0}), got k = {k}, n = {1}",
            hyp.radicand,
            ground - m
        )));
    }
    let l = hyp.l as usize;
    let rest: Vec<u32> = (1..=ground).filter(|&e| !big_y.contains(e)).collect();
    let n = rest.len();
    if n < 2 * l || (k as usize) < l {
        return Err(ConstructionError::Hypothesis(format!("need n >= 2l and k >= l with l = {l}")));
    }
    let p = rule.p;
    let small = &rest[..l];
    let large: Vec<u32> = (0..l).map(|i| rest[n - 1 - i]).collect();
    let middle = &rest[l..n - l];
    let extra = &middle[..k as usize - l];
    let base_sum: u64 = small.iter().chain(extra).map(|&e| u64::from(e)).sum();
    let diffs: Vec<u64> = small.iter().zip(&large).map(|(&a, &b)| u64::from(b - a)).collect();
    let target = (i128::from(rule.d) - i128::from(y) - i128::from(base_sum)).rem_euclid(i128::from(p)) as u64;
    let picks = SubsetSumTable::new(&diffs, p)
        .witness(target)
        .ok_or(ConstructionError::NoSolution { target, p })?;
    let mut chosen = SetWord::EMPTY;
    for &e in extra {
        chosen = chosen.with(e);
    }
    for i in 0..l {
        chosen = chosen.with(if picks.contains(&i) { large[i] } else { small[i] });
    }
    if chosen.len() != k || !chosen.intersection(big_y).is_empty() || !code.contains(chosen.with(y)) {
        return Err(ConstructionError::NoSolution { target, p });
    }
    Ok(chosen)
}

/// Optional overrides for [`weak_construction`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakParams {
    pub k: Option<u32>,
    pub d: Option<u64>,
    pub p: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakHypotheses {
    /// Valid inclusive range for `k`, if nonempty.
    pub k_range: Option<(u32, u32)>,
    pub k_in_range: bool,
    /// `n >= sqrt(32m + 260) + 18`.
    pub n_threshold: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakConstruction {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub p: u64,
    pub d: u64,
    pub blue_layers: Vec<u32>,
    pub hypotheses: WeakHypotheses,
    pub coloring: Coloring,
}

/// `[ceil(sqrt(8N-15)), n - 1 - ceil(sqrt(8N-15))]`, if nonempty.
pub fn weak_k_range(n: u32, m: u32) -> Option<(u32, u32)> {
    let lo = ceil_sqrt(8 * u64::from(n + m) - 15) as u32;
    let hi = i64::from(n) - 1 - i64::from(lo);
    (hi >= i64::from(lo)).then_some((lo, hi as u32))
}

/// Blue: layers `k, k+3, ..., k+m+1` of `Q_{n+m}` plus the mod-`p` code of
/// weight `k + 1`. Hypotheses are reported, not enforced, when `k` is given.
pub fn weak_construction(n: u32, m: u32, params: WeakParams) -> Result<WeakConstruction, ConstructionError> {
    if m < 2 || n < 2 {
        return Err(invalid("need m >= 2 and n >= 2"));
    }
    let ground = n + m;
    let k_range = weak_k_range(n, m);
    let k = match (params.k, k_range) {
        (Some(k), _) => k,
        (None, Some((lo, _))) => lo,
        (None, None) => {
            let lo = ceil_sqrt(8 * u64::from(ground) - 15);
            return Err(ConstructionError::Hypothesis(format!(
                "no integer k with sqrt(8(n+m)-15) <= k <= n-1-sqrt(8(n+m)-15): lower bound {lo}, upper bound {}",
                i64::from(n) - 1 - lo as i64
            )));
        }
    };
    if k + m + 1 > ground {
        return Err(invalid(format!("layer k + m + 1 = {} exceeds N = {ground}", k + m + 1)));
    }
    let p = match params.p {
        Some(p) => p,
        None => find_prime(ground)?,
    };
    let d = params.d.unwrap_or(p);
    modp_code(ground, k, d, p)?;
    let blue_layers: Vec<u32> = std::iter::once(k).chain(k + 3..=k + m + 1).collect();
    let coloring = Coloring::structured(
        ground,
        blue_layers.iter().copied(),
        Vec::new(),
        Some(ModPRule { weight: k + 1, p, d }),
    )?;
    let threshold = i64::from(n) - 18;
    let hypotheses = WeakHypotheses {
        k_range,
        k_in_range: k_range.is_some_and(|(lo, hi)| (lo..=hi).contains(&k)),
        n_threshold: threshold >= 0 && (threshold * threshold) as u64 >= 32 * u64::from(m) + 260,
    };
    Ok(WeakConstruction { n, m, k, p, d, blue_layers, hypotheses, coloring })
}

/// Parameters of the resampling construction of the random family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LllConfig {
    pub n: u32,
    pub m: u32,
    pub p_inclusion: f64,
    pub seed: u64,
    pub max_resamples: u64,
    pub x_y: f64,
    pub x_z: f64,
}

/// `(4(m+1)(n^2-1)e)^(-1/m)`.
pub fn paper_probability(n: u32, m: u32) -> f64 {
    let (n, m) = (f64::from(n), f64::from(m));
    (4.0 * (m + 1.0) * (n * n - 1.0) * std::f64::consts::E).powf(-1.0 / m)
}

/// Local-lemma weights `(1/(4(m-1)(n+1)), 1/(4(n-1)(n+1)))`.
pub fn lll_weights(n: u32, m: u32) -> (f64, f64) {
    let (n, m) = (f64::from(n), f64::from(m));
    (1.0 / (4.0 * (m - 1.0) * (n + 1.0)), 1.0 / (4.0 * (n - 1.0) * (n + 1.0)))
}

/// Inclusion probability used at desk scale: `min(1/2, 1.5/(n+1))`, about
/// one and a half expected supersets per `(m-1)`-set.
pub fn tuned_probability(n: u32) -> f64 {
    (1.5 / f64::from(n + 1)).min(0.5)
}

pub const DEFAULT_MAX_RESAMPLES: u64 = 1_000_000;

impl LllConfig {
    pub fn with_probability(n: u32, m: u32, p_inclusion: f64, seed: u64) -> Self {
        let (x_y, x_z) = lll_weights(n, m);
        LllConfig { n, m, p_inclusion, seed, max_resamples: DEFAULT_MAX_RESAMPLES, x_y, x_z }
    }

    pub fn paper(n: u32, m: u32, seed: u64) -> Self {
        LllConfig::with_probability(n, m, paper_probability(n, m), seed)
    }

    pub fn tuned(n: u32, m: u32, seed: u64) -> Self {
        LllConfig::with_probability(n, m, tuned_probability(n), seed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LllOutcome {
    pub family: WeightedFamily,
    pub resamples: u64,
    pub initial_violations: usize,
}

/// Colex rank tables for sets of sizes `w - 1`, `w`, `w + 1`.
struct Ranker {
    binom: Vec<Vec<u64>>,
}

impl Ranker {
    fn new(ground: u32) -> Self {
        let g = ground as usize + 1;
        let mut binom = vec![vec![0u64; g + 1]; g + 1];
        for a in 0..=g {
            for b in 0..=g {
                binom[a][b] = binomial(a as u32, b as u32) as u64;
            }
        }
        Ranker { binom }
    }

    fn rank(&self, s: SetWord) -> usize {
        s.elems()
            .enumerate()
            .map(|(i, e)| self.binom[(e - 1) as usize][i + 1])
            .sum::<u64>() as usize
    }
}

struct Resampler {
    ground: u32,
    m: u32,
    p: f64,
    ranker: Ranker,
    member: Vec<bool>,
    supersets: Vec<u32>,
    subsets: Vec<u32>,
    violated_low: BTreeSet<u64>,
    violated_high: BTreeSet<u64>,
}

impl Resampler {
    fn set_member(&mut self, f: SetWord, on: bool) {
        let idx = self.ranker.rank(f);
        if self.member[idx] == on {
            return;
        }
        self.member[idx] = on;
        for e in f.elems() {
            let s = f.without(e);
            let r = self.ranker.rank(s);
            if on {
                self.supersets[r] += 1;
                if self.supersets[r] == 2 {
                    self.violated_low.remove(&s.lex_key());
                }
            } else {
                self.supersets[r] -= 1;
                if self.supersets[r] == 1 {
                    self.violated_low.insert(s.lex_key());
                }
            }
        }
        for e in (1..=self.ground).filter(|&e| !f.contains(e)) {
            let t = f.with(e);
            let r = self.ranker.rank(t);
            if on {
                self.subsets[r] += 1;
                if self.subsets[r] == self.m {
                    self.violated_high.insert(t.lex_key());
                }
            } else {
                self.subsets[r] -= 1;
                if self.subsets[r] == self.m - 1 {
                    self.violated_high.remove(&t.lex_key());
                }
            }
        }
    }

    fn violations(&self) -> usize {
        self.violated_low.len() + self.violated_high.len()
    }

    fn family(&self) -> WeightedFamily {
        let members = layer(self.ground, self.m)
            .expect("valid layer")
            .filter(|&f| self.member[self.ranker.rank(f)])
            .collect();
        WeightedFamily::explicit(self.ground, self.m, members).expect("members have weight m")
    }
}

fn from_lex_key(key: u64) -> SetWord {
    SetWord::from_bits((!key).reverse_bits())
}

/// Random `m`-uniform family over `[n+m]` in which every `(m-1)`-set has at
/// least 2 supersets and every `(m+1)`-set at most `m - 1` subsets.
///
/// Each `m`-set is kept independently with probability `p_inclusion`
/// (colex order, one draw each). Then, while some event is violated, the
/// lexicographically first violated "too few supersets of S" event is
/// resampled, or failing that the first "too many subsets of T" event; a
/// resample redraws exactly the `n + 1` supersets of `S` or the `m + 1`
/// subsets of `T` in increasing order. All draws come from
/// `task_rng(seed, 0)`.
pub fn lll_family(cfg: &LllConfig) -> Result<LllOutcome, ConstructionError> {
    let (n, m) = (cfg.n, cfg.m);
    if m < 3 || m > n {
        return Err(invalid(format!("need 3 <= m <= n, got m = {m}, n = {n}")));
    }
    if !(cfg.p_inclusion > 0.0 && cfg.p_inclusion < 1.0) {
        return Err(invalid(format!("inclusion probability {} outside (0, 1)", cfg.p_inclusion)));
    }
    let ground = n + m;
    if binomial(ground, m + 1) > 50_000_000 {
        return Err(invalid(format!("binom({ground}, {}) too large to track", m + 1)));
    }
    let mut rng = task_rng(cfg.seed, 0);
    let mut st = Resampler {
        ground,
        m,
        p: cfg.p_inclusion,
        ranker: Ranker::new(ground),
        member: vec![false; binomial(ground, m) as usize],
        supersets: vec![0; binomial(ground, m - 1) as usize],
        subsets: vec![0; binomial(ground, m + 1) as usize],
        violated_low: layer(ground, m - 1)?.map(SetWord::lex_key).collect(),
        violated_high: BTreeSet::new(),
    };
    for f in layer(ground, m)? {
        if rng.gen_bool(st.p) {
            st.set_member(f, true);
        }
    }
    let initial_violations = st.violations();
    let mut resamples = 0u64;
    loop {
        let vars: Vec<SetWord> = if let Some(&key) = st.violated_low.iter().next() {
            let s = from_lex_key(key);
            (1..=ground).filter(|&e| !s.contains(e)).map(|e| s.with(e)).collect()
        } else if let Some(&key) = st.violated_high.iter().next() {
            let t = from_lex_key(key);
            t.elems().map(|e| t.without(e)).collect()
        } else {
            break;
        };
        if resamples == cfg.max_resamples {
            return Err(ConstructionError::ResampleBudgetExceeded {
                resamples,
                violations: st.violations(),
                best_effort: Box::new(st.family()),
            });
        }
        for f in vars {
            let on = rng.gen_bool(st.p);
            st.set_member(f, on);
        }
        resamples += 1;
    }
    Ok(LllOutcome { family: st.family(), resamples, initial_violations })
}

/// Blue: layers `0..=m-2`, the family (layer `m`) and layer `m + 1`.
pub fn probabilistic_coloring(n: u32, m: u32, fam: &WeightedFamily) -> Result<Coloring, ConstructionError> {
    if m < 2 {
        return Err(invalid("need m >= 2"));
    }
    if fam.ground_n() != n + m || fam.weight() != m {
        return Err(invalid(format!(
            "family has ground {} and weight {}, expected {} and {m}",
            fam.ground_n(),
            fam.weight(),
            n + m
        )));
    }
    let members = fam.to_members(0).map_err(|_| invalid("family must be explicit"))?;
    let violations = check_conditions(fam).map_err(|e| invalid(e.to_string()))?;
    if !violations.is_empty() {
        return Err(ConstructionError::ConditionsFailed(violations.len()));
    }
    let layers: Vec<u32> = (0..m - 1).chain(std::iter::once(m + 1)).collect();
    Ok(Coloring::structured(n + m, layers, members, None)?)
}

/// The `m = 2` obstruction: two supersets `A, B` of a singleton `S` lie
/// inside `T = A + B`, a 3-set with at least 2 family members below it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct M2Refutation {
    pub s: SetWord,
    pub a: SetWord,
    pub b: SetWord,
    pub t: SetWord,
    pub subsets_in_family: u32,
}

pub fn refute_m2(fam: &WeightedFamily) -> Result<M2Refutation, ConstructionError> {
    if fam.weight() != 2 {
        return Err(invalid(format!("family weight must be 2, got {}", fam.weight())));
    }
    let ground = fam.ground_n();
    let members = fam.to_members(1 << 20)?;
    let mut first = None;
    for e in 1..=ground {
        let s = SetWord::singleton(e);
        let sup: Vec<SetWord> = members.iter().copied().filter(|f| s.is_subset(*f)).take(2).collect();
        if sup.len() < 2 {
            return Err(ConstructionError::PreconditionFailed(s));
        }
        if first.is_none() {
            first = Some((s, sup[0], sup[1]));
        }
    }
    let (s, a, b) = first.ok_or_else(|| invalid("empty ground set"))?;
    let t = a.union(b);
    let subsets_in_family = members.iter().filter(|f| f.is_subset(t)).count() as u32;
    Ok(M2Refutation { s, a, b, t, subsets_in_family })
}
