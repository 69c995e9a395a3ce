//! Brute-force subposet search: weak and induced copies of `Q_m`, chains,
//! monochromatic copies in colorings and exhaustive tiny Ramsey numbers.
//!
//! These searches are complete. A search that runs out of budget reports
//! [`OracleError::Exhausted`] instead of claiming that nothing exists.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::layered_coloring;
use crate::lattice::{graded, Chain, Color, Coloring, LatticeError, SetWord};

/// Default number of partial assignments a single search may visit.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
/// Largest family the searcher accepts.
pub const MAX_FAMILY: usize = 1 << 15;
/// Largest target dimension.
pub const MAX_DIM: u32 = 8;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("search budget of {budget} nodes exhausted")]
    Exhausted { budget: u64 },
    #[error("scan budget exceeded: {0}")]
    ScanBudget(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopyKind {
    Induced,
    Weak,
}

impl std::str::FromStr for CopyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "induced" => Ok(CopyKind::Induced),
            "weak" => Ok(CopyKind::Weak),
            other => Err(format!("unknown copy kind `{other}` (expected induced|weak)")),
        }
    }
}

/// A copy of `Q_dim`: `map[A.bits()]` is the image of the subset `A` of `[dim]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyWitness {
    pub kind: CopyKind,
    pub dim: u32,
    pub map: Vec<SetWord>,
}

impl CopyWitness {
    pub fn image(&self, a: SetWord) -> SetWord {
        self.map[a.bits() as usize]
    }

    /// Re-checks injectivity and the order conditions with `is_subset` alone.
    pub fn is_valid(&self) -> bool {
        if self.map.len() != 1usize << self.dim {
            return false;
        }
        for (i, &x) in self.map.iter().enumerate() {
            for (j, &y) in self.map.iter().enumerate() {
                if i == j {
                    continue;
                }
                if x == y {
                    return false;
                }
                let (a, b) = (SetWord::from_bits(i as u64), SetWord::from_bits(j as u64));
                let domain = a.is_subset(b);
                let image = x.is_subset(y);
                match self.kind {
                    CopyKind::Weak if domain && !image => return false,
                    CopyKind::Induced if domain != image => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Every induced copy is also a weak copy.
    pub fn as_weak(&self) -> CopyWitness {
        CopyWitness { kind: CopyKind::Weak, ..self.clone() }
    }
}

struct Searcher {
    kind: CopyKind,
    targets: Vec<SetWord>,
    /// Family elements admissible for each rank of the target lattice.
    pools: Vec<Vec<SetWord>>,
    assigned: Vec<SetWord>,
    /// Image per target word, valid only for already assigned targets.
    image: Vec<SetWord>,
    visited: u64,
    budget: u64,
}

impl Searcher {
    fn run(&mut self, idx: usize) -> Result<bool, OracleError> {
        if idx == self.targets.len() {
            return Ok(true);
        }
        let t = self.targets[idx];
        let lower = t
            .elems()
            .fold(SetWord::EMPTY, |acc, e| acc.union(self.image[t.without(e).bits() as usize]));
        let rank = t.len() as usize;
        for ci in 0..self.pools[rank].len() {
            let x = self.pools[rank][ci];
            if !lower.is_subset(x) || self.assigned.contains(&x) {
                continue;
            }
            if self.kind == CopyKind::Induced && !self.induced_ok(idx, t, x) {
                continue;
            }
            self.visited += 1;
            if self.visited > self.budget {
                return Err(OracleError::Exhausted { budget: self.budget });
            }
            self.assigned.push(x);
            self.image[t.bits() as usize] = x;
            if self.run(idx + 1)? {
                return Ok(true);
            }
            self.assigned.pop();
        }
        Ok(false)
    }

    fn induced_ok(&self, idx: usize, t: SetWord, x: SetWord) -> bool {
        self.targets[..idx].iter().zip(&self.assigned).all(|(&b, &img)| {
            // Earlier targets are never proper supersets of `t`.
            !x.is_subset(img) && (b.is_subset(t) || !img.is_subset(x))
        })
    }
}

/// Longest chain (number of sets) ending at / starting from each element.
fn heights(family: &[SetWord]) -> (Vec<u32>, Vec<u32>, Vec<u64>, Vec<u64>) {
    let len = family.len();
    let mut down = vec![1u32; len];
    let mut below = vec![0u64; len];
    let mut above = vec![0u64; len];
    for i in 0..len {
        for j in 0..len {
            if i != j && family[j].is_proper_subset(family[i]) {
                below[i] += 1;
                above[j] += 1;
            }
        }
    }
    // `family` is graded, so proper subsets come first.
    for i in 0..len {
        for j in 0..i {
            if family[j].is_proper_subset(family[i]) {
                down[i] = down[i].max(down[j] + 1);
            }
        }
    }
    let mut up = vec![1u32; len];
    for i in (0..len).rev() {
        for j in i + 1..len {
            if family[i].is_proper_subset(family[j]) {
                up[i] = up[i].max(up[j] + 1);
            }
        }
    }
    (down, up, below, above)
}

fn graded_family(family: &[SetWord]) -> Vec<SetWord> {
    let mut fam = family.to_vec();
    fam.sort_unstable_by_key(|s| (s.len(), s.bits()));
    fam.dedup();
    fam
}

pub fn find_copy(family: &[SetWord], m: u32, kind: CopyKind) -> Result<Option<CopyWitness>, OracleError> {
    find_copy_with_budget(family, m, kind, DEFAULT_NODE_BUDGET)
}

/// Complete backtracking search for a copy of `Q_m` inside `family`.
///
/// Targets are assigned rank by rank. A family element may host a rank-`r`
/// target only if it has at least `2^r - 1` family members strictly below
/// it, `2^(m-r) - 1` strictly above it, and chains of the right lengths
/// through it; when the family height is `m + 1` this pins every rank to a
/// single level.
pub fn find_copy_with_budget(
    family: &[SetWord],
    m: u32,
    kind: CopyKind,
    budget: u64,
) -> Result<Option<CopyWitness>, OracleError> {
    if m > MAX_DIM {
        return Err(OracleError::InvalidArgument(format!("dimension {m} exceeds {MAX_DIM}")));
    }
    let fam = graded_family(family);
    if fam.len() > MAX_FAMILY {
        return Err(OracleError::InvalidArgument(format!(
            "family of {} sets exceeds {MAX_FAMILY}",
            fam.len()
        )));
    }
    if fam.len() < 1 << m {
        return Ok(None);
    }
    let (down, up, below, above) = heights(&fam);
    let pools: Vec<Vec<SetWord>> = (0..=m)
        .map(|r| {
            fam.iter()
                .enumerate()
                .filter(|&(i, _)| {
                    down[i] > r
                        && up[i] > m - r
                        && below[i] + 1 >= 1u64 << r
                        && above[i] + 1 >= 1u64 << (m - r)
                })
                .map(|(_, &s)| s)
                .collect()
        })
        .collect();
    if pools.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let targets: Vec<SetWord> = graded(m).collect();
    let mut searcher = Searcher {
        kind,
        image: vec![SetWord::EMPTY; targets.len()],
        targets,
        pools,
        assigned: Vec::with_capacity(1 << m),
        visited: 0,
        budget,
    };
    if searcher.run(0)? {
        Ok(Some(CopyWitness { kind, dim: m, map: searcher.image }))
    } else {
        Ok(None)
    }
}

/// A chain of exactly `length` sets from `family`, via longest paths in the
/// containment order.
pub fn find_chain(family: &[SetWord], length: usize) -> Result<Option<Chain>, OracleError> {
    if length == 0 {
        return Err(OracleError::InvalidArgument("chain length must be >= 1".into()));
    }
    let fam = graded_family(family);
    let mut best = vec![1usize; fam.len()];
    let mut parent = vec![usize::MAX; fam.len()];
    for i in 0..fam.len() {
        for j in 0..i {
            if fam[j].is_proper_subset(fam[i]) && best[j] + 1 > best[i] {
                best[i] = best[j] + 1;
                parent[i] = j;
            }
        }
        if best[i] >= length {
            let mut sets = Vec::with_capacity(length);
            let mut cur = i;
            while sets.len() < length {
                sets.push(fam[cur]);
                cur = parent[cur];
            }
            sets.reverse();
            return Ok(Some(Chain::new(sets)?));
        }
    }
    Ok(None)
}

/// Height of a family: the number of sets in its longest chain.
pub fn height(family: &[SetWord]) -> usize {
    let fam = graded_family(family);
    let mut best = vec![1usize; fam.len()];
    for i in 0..fam.len() {
        for j in 0..i {
            if fam[j].is_proper_subset(fam[i]) {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "witness", rename_all = "snake_case")]
pub enum RamseyOutcome {
    BlueWitness(CopyWitness),
    RedWitness(CopyWitness),
    Neither,
}

/// Largest monochromatic family [`coloring_is_ramsey`] materializes.
pub const RAMSEY_FAMILY_LIMIT: u128 = 1 << 15;

/// Looks for a blue copy of `Q_m`, then a red copy of `Q_n`.
pub fn coloring_is_ramsey(
    c: &Coloring,
    m: u32,
    n: u32,
    kind: CopyKind,
    budget: u64,
) -> Result<RamseyOutcome, OracleError> {
    let blue = c.family(Color::Blue, RAMSEY_FAMILY_LIMIT)?;
    if let Some(w) = find_copy_with_budget(&blue, m, kind, budget)? {
        return Ok(RamseyOutcome::BlueWitness(w));
    }
    let red = c.family(Color::Red, RAMSEY_FAMILY_LIMIT)?;
    if let Some(w) = find_copy_with_budget(&red, n, kind, budget)? {
        return Ok(RamseyOutcome::RedWitness(w));
    }
    Ok(RamseyOutcome::Neither)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RamseyOptions {
    /// Upper limit on colorings scanned per ground size.
    pub max_colorings: u64,
    pub node_budget: u64,
}

impl Default for RamseyOptions {
    fn default() -> Self {
        RamseyOptions { max_colorings: 1 << 16, node_budget: DEFAULT_NODE_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub ground: u32,
    pub colorings: u64,
    /// Index of the first coloring with neither monochromatic copy.
    pub first_good_coloring: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseyScan {
    pub m: u32,
    pub n: u32,
    pub kind: CopyKind,
    pub max_ground: u32,
    /// `None` means unknown within `max_ground` and the scan budget.
    pub value: Option<u32>,
    pub levels: Vec<LevelReport>,
    /// `m + n` when the layered coloring of `Q_{m+n-1}` was checked to have
    /// no monochromatic copy.
    pub layered_lower_bound: Option<u32>,
    pub note: Option<String>,
}

/// Hard cap on the ground size of exhaustive scans.
pub const MAX_SCAN_GROUND: u32 = 5;

/// Smallest `N <= max_ground` for which every coloring of `Q_N` has a blue
/// `Q_m` or a red `Q_n`.
///
/// Colorings of `Q_N` are scanned in the integer order of their dense bit
/// vectors with parallel early exit; the first good coloring found is the
/// smallest-index one, independent of thread count.
pub fn exhaustive_ramsey_number(
    m: u32,
    n: u32,
    kind: CopyKind,
    max_ground: u32,
    opts: &RamseyOptions,
) -> Result<RamseyScan, OracleError> {
    if m == 0 || n == 0 {
        return Err(OracleError::InvalidArgument("m and n must be >= 1".into()));
    }
    if max_ground > MAX_SCAN_GROUND {
        return Err(OracleError::InvalidArgument(format!(
            "max ground {max_ground} exceeds {MAX_SCAN_GROUND}"
        )));
    }
    let layered_lower_bound = if m + n - 1 <= max_ground.max(4) {
        let layered = layered_coloring(m, n, None)
            .map_err(|e| OracleError::InvalidArgument(e.to_string()))?;
        match coloring_is_ramsey(&layered, m, n, kind, opts.node_budget)? {
            RamseyOutcome::Neither => Some(m + n),
            _ => None,
        }
    } else {
        None
    };
    let mut scan = RamseyScan {
        m,
        n,
        kind,
        max_ground,
        value: None,
        levels: Vec::new(),
        layered_lower_bound,
        note: None,
    };
    for ground in 0..=max_ground {
        let colorings: u64 = 1u64 << (1u32 << ground);
        if colorings > opts.max_colorings {
            scan.note = Some(format!(
                "Q_{ground} has {colorings} colorings, above the scan budget of {}",
                opts.max_colorings
            ));
            return Ok(scan);
        }
        let failure = AtomicU64::new(u64::MAX);
        let first_good = (0..colorings).into_par_iter().find_first(|&idx| {
            let c = Coloring::dense_from_index(ground, idx).expect("ground <= 5");
            match coloring_is_ramsey(&c, m, n, kind, opts.node_budget) {
                Ok(RamseyOutcome::Neither) => true,
                Ok(_) => false,
                Err(_) => {
                    failure.fetch_min(idx, Ordering::Relaxed);
                    false
                }
            }
        });
        if failure.load(Ordering::Relaxed) != u64::MAX {
            return Err(OracleError::Exhausted { budget: opts.node_budget });
        }
        scan.levels.push(LevelReport { ground, colorings, first_good_coloring: first_good });
        if first_good.is_none() {
            scan.value = Some(ground);
            return Ok(scan);
        }
    }
    scan.note = Some(format!("threshold exceeds max ground {max_ground}"));
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(e: &[u32]) -> SetWord {
        SetWord::from_elems(e.iter().copied()).unwrap()
    }

    fn q(n: u32) -> Vec<SetWord> {
        graded(n).collect()
    }

    #[test]
    fn full_q2_contains_induced_q2() {
        let w = find_copy(&q(2), 2, CopyKind::Induced).unwrap().unwrap();
        assert!(w.is_valid());
        for s in graded(2) {
            assert_eq!(w.image(s), s);
        }
    }

    #[test]
    fn antichain_has_no_q1() {
        let fam: Vec<SetWord> = crate::lattice::layer(4, 2).unwrap().collect();
        assert!(find_copy(&fam, 1, CopyKind::Induced).unwrap().is_none());
        assert!(find_copy(&fam, 1, CopyKind::Weak).unwrap().is_none());
    }

    #[test]
    fn q2_with_raised_top() {
        let fam = vec![SetWord::EMPTY, set(&[1]), set(&[2]), set(&[1, 2, 3])];
        let w = find_copy(&fam, 2, CopyKind::Induced).unwrap().unwrap();
        assert!(w.is_valid());
        assert_eq!(w.image(set(&[1, 2])), set(&[1, 2, 3]));
    }

    #[test]
    fn weak_but_not_induced() {
        // {1} and {1,2} are comparable, so only a weak copy exists.
        let fam = vec![SetWord::EMPTY, set(&[1]), set(&[1, 2]), set(&[1, 2, 3])];
        assert!(find_copy(&fam, 2, CopyKind::Induced).unwrap().is_none());
        let w = find_copy(&fam, 2, CopyKind::Weak).unwrap().unwrap();
        assert!(w.is_valid());
        assert!(!CopyWitness { kind: CopyKind::Induced, ..w }.is_valid());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let fam: Vec<SetWord> = q(5);
        let err = find_copy_with_budget(&fam, 5, CopyKind::Induced, 3).unwrap_err();
        assert!(matches!(err, OracleError::Exhausted { budget: 3 }));
    }

    #[test]
    fn chain_examples() {
        let fam = vec![SetWord::EMPTY, set(&[1]), set(&[1, 2])];
        let c = find_chain(&fam, 3).unwrap().unwrap();
        assert_eq!(c.sets(), &fam[..]);
        let anti: Vec<SetWord> = crate::lattice::layer(4, 2).unwrap().collect();
        assert!(find_chain(&anti, 2).unwrap().is_none());
        let full = find_chain(&q(3), 4).unwrap().unwrap();
        assert_eq!(full.len(), 4);
        assert_eq!(full.first(), Some(SetWord::EMPTY));
        assert_eq!(full.last(), Some(SetWord::full(3)));
        assert!(find_chain(&q(3), 5).unwrap().is_none());
        assert!(find_chain(&fam, 0).is_err());
    }

    #[test]
    fn ramsey_examples() {
        let layered = Coloring::structured(2, [0], vec![], None).unwrap();
        assert_eq!(coloring_is_ramsey(&layered, 1, 2, CopyKind::Weak, 1000).unwrap(), RamseyOutcome::Neither);
        let blue = Coloring::uniform(2, Color::Blue);
        assert!(matches!(
            coloring_is_ramsey(&blue, 2, 1, CopyKind::Induced, 1000).unwrap(),
            RamseyOutcome::BlueWitness(_)
        ));
        let red = Coloring::uniform(3, Color::Red);
        match coloring_is_ramsey(&red, 1, 3, CopyKind::Induced, 1000).unwrap() {
            RamseyOutcome::RedWitness(w) => {
                assert!(w.is_valid());
                assert!(graded(3).all(|s| w.image(s) == s));
            }
            other => panic!("expected red witness, got {other:?}"),
        }
    }

    #[test]
    fn tiny_ramsey_numbers() {
        let opts = RamseyOptions::default();
        let r = exhaustive_ramsey_number(1, 1, CopyKind::Induced, 4, &opts).unwrap();
        assert_eq!(r.value, Some(2));
        assert_eq!(r.layered_lower_bound, Some(2));
        let w = exhaustive_ramsey_number(1, 1, CopyKind::Weak, 4, &opts).unwrap();
        assert_eq!(w.value, Some(2));
        let unknown = exhaustive_ramsey_number(3, 3, CopyKind::Weak, 4, &opts).unwrap();
        assert_eq!(unknown.value, None);
        assert!(exhaustive_ramsey_number(1, 1, CopyKind::Weak, 6, &opts).is_err());
    }

    #[test]
    fn exhaustive_lower_bound_holds() {
        let opts = RamseyOptions::default();
        for (m, n) in [(1, 1), (1, 2), (2, 1), (1, 3)] {
            for kind in [CopyKind::Induced, CopyKind::Weak] {
                let r = exhaustive_ramsey_number(m, n, kind, 4, &opts).unwrap();
                let v = r.value.expect("threshold within Q_4");
                assert!(v >= m + n, "{m},{n},{kind:?} -> {v}");
            }
        }
    }

    #[test]
    fn height_of_families() {
        assert_eq!(height(&q(3)), 4);
        assert_eq!(height(&[]), 0);
        assert_eq!(height(&[set(&[1]), set(&[2])]), 1);
    }
}
