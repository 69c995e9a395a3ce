//! Subsets of `[N]` as machine words, layers, chains, permutations and
//! blue/red colorings of the Boolean lattice `Q_N`.
//!
//! Elements are 1-based: element `i` lives in bit `i - 1`. Every ordering
//! that is not otherwise pinned down is colex, which for sets of a common
//! ground coincides with the integer order of their words.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported ground set.
pub const MAX_GROUND: u32 = 64;
/// Largest ground set a dense (one bit per set) coloring may use.
pub const MAX_DENSE_GROUND: u32 = 28;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("element {elem} outside ground set [1, {n}]")]
    ElementOutOfRange { elem: u32, n: u32 },
    #[error("ground size {0} exceeds the supported maximum of {MAX_GROUND}")]
    GroundTooLarge(u32),
    #[error("dense colorings need N <= {MAX_DENSE_GROUND}, got {0}")]
    DenseTooLarge(u32),
    #[error("layer {s} out of range for ground size {n}")]
    LayerOutOfRange { n: u32, s: u32 },
    #[error("set elements must be strictly increasing: {0:?}")]
    UnsortedSet(Vec<u32>),
    #[error("chain not strictly increasing at position {0}")]
    NotIncreasing(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("set {0} listed both as a blue layer member and as an extra")]
    DoubleListed(SetWord),
    #[error("malformed dense bit vector: {0}")]
    InvalidHex(String),
    #[error("family invariant violated: {0}")]
    InvalidFamily(String),
    #[error("coloring invariant violated: {0}")]
    InvalidColoring(String),
    #[error("family of {size} sets exceeds enumeration limit {limit}")]
    TooLarge { size: u128, limit: u128 },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A subset of `[N]`, `N <= 64`, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SetWord(u64);

impl SetWord {
    pub const EMPTY: SetWord = SetWord(0);

    pub const fn from_bits(bits: u64) -> Self {
        SetWord(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Builds a set from 1-based elements. Duplicates are merged.
    pub fn from_elems<I: IntoIterator<Item = u32>>(elems: I) -> Result<Self, LatticeError> {
        let mut bits = 0u64;
        for e in elems {
            if e == 0 || e > MAX_GROUND {
                return Err(LatticeError::ElementOutOfRange { elem: e, n: MAX_GROUND });
            }
            bits |= 1u64 << (e - 1);
        }
        Ok(SetWord(bits))
    }

    /// `[n]` itself.
    pub fn full(n: u32) -> Self {
        debug_assert!(n <= MAX_GROUND);
        if n >= 64 {
            SetWord(u64::MAX)
        } else {
            SetWord((1u64 << n) - 1)
        }
    }

    pub fn singleton(e: u32) -> Self {
        debug_assert!((1..=MAX_GROUND).contains(&e));
        SetWord(1u64 << (e - 1))
    }

    /// `{lo, lo + 1, ..., hi}`; empty when `lo > hi`.
    pub fn interval(lo: u32, hi: u32) -> Self {
        if lo > hi {
            return SetWord::EMPTY;
        }
        SetWord(SetWord::full(hi).0 & !SetWord::full(lo - 1).0)
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: u32) -> bool {
        (1..=MAX_GROUND).contains(&e) && self.0 >> (e - 1) & 1 == 1
    }

    pub fn with(self, e: u32) -> Self {
        SetWord(self.0 | SetWord::singleton(e).0)
    }

    pub fn without(self, e: u32) -> Self {
        SetWord(self.0 & !SetWord::singleton(e).0)
    }

    pub fn union(self, other: Self) -> Self {
        SetWord(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SetWord(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SetWord(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Self) -> bool {
        self != other && self.is_subset(other)
    }

    /// Comparable in either direction.
    pub fn comparable(self, other: Self) -> bool {
        self.is_subset(other) || other.is_subset(self)
    }

    pub fn sym_diff_size(self, other: Self) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    /// True when no element exceeds `n`.
    pub fn fits(self, n: u32) -> bool {
        self.is_subset(SetWord::full(n))
    }

    /// Smallest element, if any.
    pub fn min_elem(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    /// Largest element, if any.
    pub fn max_elem(self) -> Option<u32> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros())
    }

    /// Elements in increasing order.
    pub fn elems(self) -> Elems {
        Elems(self.0)
    }

    pub fn to_vec(self) -> Vec<u32> {
        self.elems().collect()
    }

    /// Sum of the (1-based) elements.
    pub fn sum(self) -> u64 {
        self.elems().map(u64::from).sum()
    }

    /// Key whose integer order is the lexicographic order of sorted element
    /// tuples, for sets of a common size.
    pub fn lex_key(self) -> u64 {
        !self.0.reverse_bits()
    }
}

impl fmt::Debug for SetWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SetWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elems().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for SetWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elems())
    }
}

impl<'de> Deserialize<'de> for SetWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let elems = Vec::<u32>::deserialize(deserializer)?;
        if elems.windows(2).any(|w| w[0] >= w[1]) {
            return Err(serde::de::Error::custom(LatticeError::UnsortedSet(elems)));
        }
        SetWord::from_elems(elems).map_err(serde::de::Error::custom)
    }
}

/// Iterator over the elements of a [`SetWord`].
#[derive(Clone)]
pub struct Elems(u64);

impl Iterator for Elems {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() + 1;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Elems {}

pub fn is_subset(a: SetWord, b: SetWord) -> bool {
    a.is_subset(b)
}

pub fn sym_diff_size(a: SetWord, b: SetWord) -> u32 {
    a.sym_diff_size(b)
}

/// `binom(n, k)` as an exact 128-bit integer (exact for all `n <= 64`).
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// All `s`-subsets of `[n]` in colex order.
pub fn layer(n: u32, s: u32) -> Result<Layer, LatticeError> {
    if n > MAX_GROUND {
        return Err(LatticeError::GroundTooLarge(n));
    }
    if s > n {
        return Err(LatticeError::LayerOutOfRange { n, s });
    }
    Ok(Layer::new(n, s))
}

/// Colex iterator over a fixed-size layer (Gosper's hack).
#[derive(Clone, Debug)]
pub struct Layer {
    next: Option<u128>,
    limit: u128,
}

impl Layer {
    fn new(n: u32, s: u32) -> Self {
        let first = if s == 0 { 0 } else { (1u128 << s) - 1 };
        Layer { next: Some(first), limit: 1u128 << n }
    }
}

impl Iterator for Layer {
    type Item = SetWord;

    fn next(&mut self) -> Option<SetWord> {
        let cur = self.next?;
        if cur >= self.limit && cur != 0 {
            self.next = None;
            return None;
        }
        self.next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            let ones = ((cur ^ ripple) >> 2) / low;
            let nxt = ripple | ones;
            (nxt < self.limit).then_some(nxt)
        };
        Some(SetWord(cur as u64))
    }
}

/// Every subset of `[n]` ordered by size, colex within a size.
pub fn graded(n: u32) -> impl Iterator<Item = SetWord> {
    (0..=n).flat_map(move |s| Layer::new(n, s))
}

/// All subsets of `s`, in increasing integer (colex) order.
pub fn subsets_of(s: SetWord) -> impl Iterator<Item = SetWord> {
    let mask = s.0;
    let mut cur = Some(0u64);
    std::iter::from_fn(move || {
        let c = cur?;
        cur = if c == mask { None } else { Some((c.wrapping_sub(mask)) & mask) };
        Some(SetWord(c))
    })
}

/// Strictly increasing sequence of sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "ChainWire")]
pub struct Chain {
    sets: Vec<SetWord>,
}

#[derive(Deserialize)]
struct ChainWire {
    sets: Vec<SetWord>,
}

impl TryFrom<ChainWire> for Chain {
    type Error = LatticeError;

    fn try_from(w: ChainWire) -> Result<Self, LatticeError> {
        Chain::new(w.sets)
    }
}

impl Chain {
    pub fn new(sets: Vec<SetWord>) -> Result<Self, LatticeError> {
        if let Some(i) = sets.windows(2).position(|w| !w[0].is_proper_subset(w[1])) {
            return Err(LatticeError::NotIncreasing(i + 1));
        }
        Ok(Chain { sets })
    }

    pub fn empty() -> Self {
        Chain { sets: Vec::new() }
    }

    pub fn sets(&self) -> &[SetWord] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn first(&self) -> Option<SetWord> {
        self.sets.first().copied()
    }

    pub fn last(&self) -> Option<SetWord> {
        self.sets.last().copied()
    }

    pub fn into_sets(self) -> Vec<SetWord> {
        self.sets
    }
}

/// A permutation `pi` of `{n+1, ..., n+k}`; `image[i-1] = pi(n+i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PermutationWire")]
pub struct Permutation {
    n: u32,
    k: u32,
    image: Vec<u32>,
}

#[derive(Deserialize)]
struct PermutationWire {
    n: u32,
    k: u32,
    image: Vec<u32>,
}

impl TryFrom<PermutationWire> for Permutation {
    type Error = LatticeError;

    fn try_from(w: PermutationWire) -> Result<Self, LatticeError> {
        Permutation::new(w.n, w.k, w.image)
    }
}

impl Permutation {
    pub fn new(n: u32, k: u32, image: Vec<u32>) -> Result<Self, LatticeError> {
        if n + k > MAX_GROUND {
            return Err(LatticeError::GroundTooLarge(n + k));
        }
        if image.len() != k as usize {
            return Err(LatticeError::InvalidPermutation(format!(
                "expected {k} values, got {}",
                image.len()
            )));
        }
        let mut seen = 0u64;
        for &v in &image {
            if v <= n || v > n + k {
                return Err(LatticeError::InvalidPermutation(format!(
                    "value {v} outside [{}, {}]",
                    n + 1,
                    n + k
                )));
            }
            if seen >> (v - 1) & 1 == 1 {
                return Err(LatticeError::InvalidPermutation(format!("value {v} repeated")));
            }
            seen |= 1 << (v - 1);
        }
        Ok(Permutation { n, k, image })
    }

    pub fn identity(n: u32, k: u32) -> Self {
        Permutation { n, k, image: (n + 1..=n + k).collect() }
    }

    pub fn base(&self) -> u32 {
        self.n
    }

    pub fn width(&self) -> u32 {
        self.k
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }

    /// `pi(n + i)` for `1 <= i <= k`.
    pub fn at(&self, i: u32) -> u32 {
        self.image[(i - 1) as usize]
    }

    /// `{pi(n+1), ..., pi(n+i)}`.
    pub fn prefix_set(&self, i: u32) -> SetWord {
        self.image[..i as usize]
            .iter()
            .fold(SetWord::EMPTY, |acc, &v| acc.with(v))
    }

    /// Rank in lexicographic order of the image sequence.
    pub fn rank(&self) -> u64 {
        let mut rank = 0u64;
        let mut used = 0u64;
        for (i, &v) in self.image.iter().enumerate() {
            let idx = v - self.n - 1;
            let smaller_unused = (0..idx).filter(|j| used >> j & 1 == 0).count() as u64;
            rank = rank * (self.k as u64 - i as u64) + smaller_unused;
            used |= 1 << idx;
        }
        rank
    }

    /// Inverse of [`Permutation::rank`].
    pub fn from_rank(n: u32, k: u32, mut rank: u64) -> Self {
        let mut radix = vec![0u64; k as usize];
        for i in (0..k as usize).rev() {
            let base = (k as usize - i) as u64;
            radix[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<u32> = (n + 1..=n + k).collect();
        let image = radix.into_iter().map(|r| pool.remove(r as usize)).collect();
        Permutation { n, k, image }
    }
}

/// Lexicographic enumeration of all permutations of `{n+1, ..., n+k}`.
pub fn all_permutations(n: u32, k: u32) -> impl Iterator<Item = Permutation> {
    let total: u64 = (1..=u64::from(k)).product();
    (0..total).map(move |r| Permutation::from_rank(n, k, r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Red,
}

/// Membership rule `|S| = weight` and `sum(S) = d (mod p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModPRule {
    pub weight: u32,
    pub p: u64,
    pub d: u64,
}

impl ModPRule {
    pub fn contains(&self, s: SetWord) -> bool {
        s.len() == self.weight && s.sum() % self.p == self.d % self.p
    }
}

/// A family of sets of one common size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyWire", into = "FamilyWire")]
pub struct WeightedFamily {
    ground_n: u32,
    weight: u32,
    members: FamilyMembers,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyMembers {
    /// Sorted (colex), duplicate-free.
    Explicit(Vec<SetWord>),
    /// Every `weight`-subset whose element sum is `d` mod `p`.
    ModP { p: u64, d: u64 },
}

#[derive(Serialize, Deserialize)]
struct FamilyWire {
    n: u32,
    weight: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    members: Option<Vec<SetWord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modp: Option<ModPWire>,
}

#[derive(Serialize, Deserialize)]
struct ModPWire {
    p: u64,
    d: u64,
}

impl TryFrom<FamilyWire> for WeightedFamily {
    type Error = LatticeError;

    fn try_from(w: FamilyWire) -> Result<Self, LatticeError> {
        match (w.members, w.modp) {
            (Some(m), None) => WeightedFamily::explicit(w.n, w.weight, m),
            (None, Some(r)) => WeightedFamily::modp(w.n, w.weight, r.p, r.d),
            _ => Err(LatticeError::InvalidFamily(
                "exactly one of `members` and `modp` must be given".into(),
            )),
        }
    }
}

impl From<WeightedFamily> for FamilyWire {
    fn from(f: WeightedFamily) -> Self {
        let (members, modp) = match f.members {
            FamilyMembers::Explicit(m) => (Some(m), None),
            FamilyMembers::ModP { p, d } => (None, Some(ModPWire { p, d })),
        };
        FamilyWire { n: f.ground_n, weight: f.weight, members, modp }
    }
}

impl WeightedFamily {
    /// Members are sorted and deduplicated; each must have size `weight`.
    pub fn explicit(ground_n: u32, weight: u32, mut members: Vec<SetWord>) -> Result<Self, LatticeError> {
        if ground_n > MAX_GROUND {
            return Err(LatticeError::GroundTooLarge(ground_n));
        }
        if weight > ground_n {
            return Err(LatticeError::LayerOutOfRange { n: ground_n, s: weight });
        }
        for &s in &members {
            if !s.fits(ground_n) {
                return Err(LatticeError::InvalidFamily(format!("{s} not inside [{ground_n}]")));
            }
            if s.len() != weight {
                return Err(LatticeError::InvalidFamily(format!("{s} does not have size {weight}")));
            }
        }
        members.sort_unstable();
        members.dedup();
        Ok(WeightedFamily { ground_n, weight, members: FamilyMembers::Explicit(members) })
    }

    pub fn modp(ground_n: u32, weight: u32, p: u64, d: u64) -> Result<Self, LatticeError> {
        if ground_n > MAX_GROUND {
            return Err(LatticeError::GroundTooLarge(ground_n));
        }
        if weight > ground_n {
            return Err(LatticeError::LayerOutOfRange { n: ground_n, s: weight });
        }
        if p == 0 {
            return Err(LatticeError::InvalidFamily("modulus must be positive".into()));
        }
        Ok(WeightedFamily { ground_n, weight, members: FamilyMembers::ModP { p, d } })
    }

    pub fn ground_n(&self) -> u32 {
        self.ground_n
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn members(&self) -> &FamilyMembers {
        &self.members
    }

    pub fn modp_rule(&self) -> Option<ModPRule> {
        match self.members {
            FamilyMembers::ModP { p, d } => Some(ModPRule { weight: self.weight, p, d }),
            FamilyMembers::Explicit(_) => None,
        }
    }

    pub fn contains(&self, s: SetWord) -> bool {
        match &self.members {
            FamilyMembers::Explicit(m) => m.binary_search(&s).is_ok(),
            FamilyMembers::ModP { p, d } => {
                s.fits(self.ground_n) && ModPRule { weight: self.weight, p: *p, d: *d }.contains(s)
            }
        }
    }

    /// Materializes the member list, enumerating the layer for implicit
    /// families as long as it has at most `limit` sets.
    pub fn to_members(&self, limit: u128) -> Result<Vec<SetWord>, LatticeError> {
        match &self.members {
            FamilyMembers::Explicit(m) => Ok(m.clone()),
            FamilyMembers::ModP { .. } => {
                let size = binomial(self.ground_n, self.weight);
                if size > limit {
                    return Err(LatticeError::TooLarge { size, limit });
                }
                Ok(Layer::new(self.ground_n, self.weight).filter(|&s| self.contains(s)).collect())
            }
        }
    }
}

/// A total blue/red assignment on `Q_N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ColoringWire", into = "ColoringWire")]
pub struct Coloring {
    n: u32,
    repr: ColoringRepr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringRepr {
    /// Bit `s` of word `s / 64` is set iff the set with word `s` is blue.
    Dense(Vec<u64>),
    Structured(StructuredColoring),
}

/// Blue layers plus explicit (and optionally rule-defined) extra blue sets;
/// everything else is red.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredColoring {
    pub blue_layers: BTreeSet<u32>,
    /// Sorted, duplicate-free.
    pub blue_extra: Vec<SetWord>,
    pub blue_modp: Option<ModPRule>,
}

impl StructuredColoring {
    fn is_blue(&self, s: SetWord) -> bool {
        self.blue_layers.contains(&s.len())
            || self.blue_extra.binary_search(&s).is_ok()
            || self.blue_modp.is_some_and(|r| r.contains(s))
    }
}

#[derive(Serialize, Deserialize)]
struct ColoringWire {
    n: u32,
    repr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blue_hex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blue_layers: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blue_extra: Option<Vec<SetWord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blue_modp: Option<ModPRule>,
}

impl TryFrom<ColoringWire> for Coloring {
    type Error = LatticeError;

    fn try_from(w: ColoringWire) -> Result<Self, LatticeError> {
        match w.repr.as_str() {
            "dense" => {
                let hex_str = w
                    .blue_hex
                    .ok_or_else(|| LatticeError::InvalidColoring("dense coloring without blue_hex".into()))?;
                Coloring::dense_from_hex(w.n, &hex_str)
            }
            "structured" => Coloring::structured(
                w.n,
                w.blue_layers.unwrap_or_default(),
                w.blue_extra.unwrap_or_default(),
                w.blue_modp,
            ),
            other => Err(LatticeError::InvalidColoring(format!("unknown repr `{other}`"))),
        }
    }
}

impl From<Coloring> for ColoringWire {
    fn from(c: Coloring) -> Self {
        match &c.repr {
            ColoringRepr::Dense(_) => ColoringWire {
                n: c.n,
                repr: "dense".into(),
                blue_hex: Some(c.dense_hex().expect("dense repr")),
                blue_layers: None,
                blue_extra: None,
                blue_modp: None,
            },
            ColoringRepr::Structured(s) => ColoringWire {
                n: c.n,
                repr: "structured".into(),
                blue_hex: None,
                blue_layers: Some(s.blue_layers.iter().copied().collect()),
                blue_extra: Some(s.blue_extra.clone()),
                blue_modp: s.blue_modp,
            },
        }
    }
}

fn dense_words(n: u32) -> usize {
    ((1u64 << n) as usize).div_ceil(64)
}

fn dense_bytes(n: u32) -> usize {
    ((1u64 << n) as usize).div_ceil(8)
}

impl Coloring {
    /// Dense coloring from a predicate evaluated on every set.
    pub fn dense_from_fn<F: FnMut(SetWord) -> Color>(n: u32, mut color: F) -> Result<Self, LatticeError> {
        if n > MAX_DENSE_GROUND {
            return Err(LatticeError::DenseTooLarge(n));
        }
        let mut words = vec![0u64; dense_words(n)];
        for s in 0..(1u64 << n) {
            if color(SetWord(s)) == Color::Blue {
                words[(s / 64) as usize] |= 1 << (s % 64);
            }
        }
        Ok(Coloring { n, repr: ColoringRepr::Dense(words) })
    }

    /// Dense coloring of `Q_n` whose bit `s` is bit `s` of `index`
    /// (`n <= 6`): the integer enumeration order of colorings.
    pub fn dense_from_index(n: u32, index: u64) -> Result<Self, LatticeError> {
        if n > 6 {
            return Err(LatticeError::InvalidColoring(format!(
                "coloring index only addresses N <= 6, got {n}"
            )));
        }
        let mask = if n == 6 { u64::MAX } else { (1u64 << (1u64 << n)) - 1 };
        Ok(Coloring { n, repr: ColoringRepr::Dense(vec![index & mask]) })
    }

    pub fn dense_from_hex(n: u32, hex_str: &str) -> Result<Self, LatticeError> {
        if n > MAX_DENSE_GROUND {
            return Err(LatticeError::DenseTooLarge(n));
        }
        if hex_str.chars().any(|c| c.is_ascii_uppercase()) {
            return Err(LatticeError::InvalidHex("hex must be lowercase".into()));
        }
        let bytes = hex::decode(hex_str).map_err(|e| LatticeError::InvalidHex(e.to_string()))?;
        if bytes.len() != dense_bytes(n) {
            return Err(LatticeError::InvalidHex(format!(
                "expected {} bytes for N={n}, got {}",
                dense_bytes(n),
                bytes.len()
            )));
        }
        let total = 1u64 << n;
        let mut words = vec![0u64; dense_words(n)];
        for (i, &b) in bytes.iter().enumerate() {
            for j in 0..8 {
                if b >> j & 1 == 1 {
                    let s = (i * 8 + j) as u64;
                    if s >= total {
                        return Err(LatticeError::InvalidHex(format!("bit {s} beyond 2^{n}")));
                    }
                    words[(s / 64) as usize] |= 1 << (s % 64);
                }
            }
        }
        Ok(Coloring { n, repr: ColoringRepr::Dense(words) })
    }

    pub fn structured(
        n: u32,
        blue_layers: impl IntoIterator<Item = u32>,
        blue_extra: Vec<SetWord>,
        blue_modp: Option<ModPRule>,
    ) -> Result<Self, LatticeError> {
        if n > MAX_GROUND {
            return Err(LatticeError::GroundTooLarge(n));
        }
        let blue_layers: BTreeSet<u32> = blue_layers.into_iter().collect();
        if let Some(&s) = blue_layers.iter().find(|&&s| s > n) {
            return Err(LatticeError::LayerOutOfRange { n, s });
        }
        let mut extra = blue_extra;
        extra.sort_unstable();
        extra.dedup();
        for &s in &extra {
            if !s.fits(n) {
                return Err(LatticeError::InvalidColoring(format!("{s} not inside [{n}]")));
            }
            if blue_layers.contains(&s.len()) || blue_modp.is_some_and(|r| r.contains(s)) {
                return Err(LatticeError::DoubleListed(s));
            }
        }
        if let Some(r) = blue_modp {
            if r.p == 0 {
                return Err(LatticeError::InvalidColoring("modulus must be positive".into()));
            }
            if blue_layers.contains(&r.weight) {
                return Err(LatticeError::InvalidColoring(format!(
                    "rule weight {} is already a blue layer",
                    r.weight
                )));
            }
            if r.weight > n {
                return Err(LatticeError::LayerOutOfRange { n, s: r.weight });
            }
        }
        Ok(Coloring {
            n,
            repr: ColoringRepr::Structured(StructuredColoring { blue_layers, blue_extra: extra, blue_modp }),
        })
    }

    /// Every set the same color.
    pub fn uniform(n: u32, color: Color) -> Self {
        let layers: Vec<u32> = match color {
            Color::Blue => (0..=n).collect(),
            Color::Red => Vec::new(),
        };
        Coloring::structured(n, layers, Vec::new(), None).expect("uniform coloring is valid")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn repr(&self) -> &ColoringRepr {
        &self.repr
    }

    pub fn as_structured(&self) -> Option<&StructuredColoring> {
        match &self.repr {
            ColoringRepr::Structured(s) => Some(s),
            ColoringRepr::Dense(_) => None,
        }
    }

    pub fn color_of(&self, s: SetWord) -> Color {
        if self.is_blue(s) {
            Color::Blue
        } else {
            Color::Red
        }
    }

    pub fn is_blue(&self, s: SetWord) -> bool {
        debug_assert!(s.fits(self.n));
        match &self.repr {
            ColoringRepr::Dense(words) => words[(s.0 / 64) as usize] >> (s.0 % 64) & 1 == 1,
            ColoringRepr::Structured(st) => st.is_blue(s),
        }
    }

    pub fn is_red(&self, s: SetWord) -> bool {
        !self.is_blue(s)
    }

    /// Equivalent dense coloring (`n <= 28`).
    pub fn to_dense(&self) -> Result<Coloring, LatticeError> {
        Coloring::dense_from_fn(self.n, |s| self.color_of(s))
    }

    /// Little-endian hex of the dense bit vector, for dense colorings.
    pub fn dense_hex(&self) -> Option<String> {
        match &self.repr {
            ColoringRepr::Dense(words) => {
                let mut bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
                bytes.truncate(dense_bytes(self.n));
                Some(hex::encode(bytes))
            }
            ColoringRepr::Structured(_) => None,
        }
    }

    /// Number of sets of the given color, computed without enumeration for
    /// structured colorings without a rule component.
    pub fn count_upper_bound(&self, color: Color) -> u128 {
        let total = 1u128 << self.n;
        match (&self.repr, color) {
            (ColoringRepr::Structured(st), Color::Blue) => {
                let layer_total: u128 = st.blue_layers.iter().map(|&s| binomial(self.n, s)).sum();
                let rule = st.blue_modp.map_or(0, |r| binomial(self.n, r.weight));
                layer_total + st.blue_extra.len() as u128 + rule
            }
            (ColoringRepr::Structured(st), Color::Red) => {
                let layer_total: u128 = st.blue_layers.iter().map(|&s| binomial(self.n, s)).sum();
                total - layer_total - st.blue_extra.len() as u128
            }
            _ => total,
        }
    }

    /// All sets of one color in graded-colex order, as long as at most
    /// `limit` sets need to be inspected.
    pub fn family(&self, color: Color, limit: u128) -> Result<Vec<SetWord>, LatticeError> {
        let size = self.count_upper_bound(color);
        if size > limit {
            return Err(LatticeError::TooLarge { size, limit });
        }
        let want_blue = color == Color::Blue;
        Ok(match (&self.repr, color) {
            (ColoringRepr::Structured(st), Color::Blue) if st.blue_modp.is_none() => {
                let mut out: Vec<SetWord> = Vec::with_capacity(size as usize);
                for s in 0..=self.n {
                    if st.blue_layers.contains(&s) {
                        out.extend(Layer::new(self.n, s));
                    } else {
                        out.extend(st.blue_extra.iter().copied().filter(|e| e.len() == s));
                    }
                }
                out
            }
            _ => graded(self.n).filter(|&s| self.is_blue(s) == want_blue).collect(),
        })
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable value")
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, LatticeError> {
    Ok(serde_json::from_str(text)?)
}
