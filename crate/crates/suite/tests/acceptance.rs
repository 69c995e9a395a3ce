//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::time::{Duration, Instant};

use poset_ramsey::constructions::{self, LllConfig};
use poset_ramsey::embedder::{self, SweepMode};
use poset_ramsey::lattice::{all_permutations, graded, layer, Color, Coloring, SetWord, WeightedFamily};
use poset_ramsey::oracle::{self, CopyKind, RamseyOptions, RamseyOutcome};
use poset_ramsey::seed::task_rng;
use poset_ramsey::verifier;
use poset_ramsey_suite::{binomial_u128, brute_count, factorial_u128, naive_has_copy};
use rand::seq::SliceRandom;
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

/// (n, k) pairs, 200 random dense colorings each, every permutation.
fn embedder_contract() -> Verdict {
    let start = Instant::now();
    let mut records = 0u64;
    let mut failures = 0u64;
    for (case, &(n, k)) in [(1u32, 1u32), (2, 1), (2, 2), (3, 2), (3, 3)].iter().enumerate() {
        for i in 0..200u64 {
            let mut rng = task_rng(1, case as u64 * 1000 + i);
            let c = Coloring::dense_from_fn(n + k, |_| if rng.gen_bool(0.5) { Color::Blue } else { Color::Red })
                .expect("dense");
            for pi in all_permutations(n, k) {
                let rec = embedder::embed_with_permutation(&c, n, k, &pi).expect("embed");
                records += 1;
                if let Some(v) = verifier::verify_embedding(&rec, &c).expect("verify") {
                    return verdict(false, format!("n={n} k={k} coloring {i} pi {:?}: {v:?}", pi.image()));
                }
                if let Some(chain) = rec.failure_chain() {
                    failures += 1;
                    if chain.len() != k as usize + 1 {
                        return verdict(false, format!("failure chain of length {} for k={k}", chain.len()));
                    }
                    match embedder::recover_permutation(chain, n) {
                        Ok(p) if p == pi.image() => {}
                        other => return verdict(false, format!("recovered {other:?} for pi {:?}", pi.image())),
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    verdict(
        within(t, 60),
        format!("{records} records verified, {failures} failure chains recovered, {:.2?} (limit 60 s)", t),
    )
}

/// A maximal chain of `Q_N` through the given element order.
fn maximal_chain(order: &[u32]) -> Vec<SetWord> {
    let mut sets = vec![SetWord::EMPTY];
    let mut cur = SetWord::EMPTY;
    for &e in order {
        cur = cur.with(e);
        sets.push(cur);
    }
    sets
}

fn injectivity() -> Verdict {
    let mut runs = Vec::new();
    for (case, &(n, k)) in [(1u32, 1u32), (2, 2), (2, 3), (3, 3), (2, 4), (3, 4), (2, 5), (2, 6)].iter().enumerate() {
        let ground = n + k;
        let identity: Vec<u32> = (1..=ground).collect();
        let mut shuffled = identity.clone();
        shuffled.shuffle(&mut task_rng(2, case as u64));
        let mut reversed = identity.clone();
        reversed.reverse();
        for order in [identity, shuffled, reversed] {
            let blue = maximal_chain(&order);
            if oracle::find_copy(&blue, 2, CopyKind::Induced).expect("search").is_some() {
                return verdict(false, "a maximal chain contains an induced Q_2");
            }
            let c = Coloring::structured(ground, [], blue, None).expect("coloring");
            let r = embedder::sweep_permutations(&c, n, k, &SweepMode::All).expect("sweep");
            if !r.collisions.is_empty() {
                return verdict(false, format!("n={n} k={k} order {order:?}: {} collisions", r.collisions.len()));
            }
            if r.success.is_none() && r.failures.len() as u64 != r.permutations {
                return verdict(false, "inconsistent sweep report");
            }
            runs.push(format!("({n},{k}):{}", if r.success.is_some() { "embedded" } else { "all-fail" }));
        }
    }
    verdict(true, format!("zero collisions over {} sweeps [{}]", runs.len(), runs.join(" ")))
}

fn counting_bound() -> Verdict {
    let start = Instant::now();
    let r = embedder::counting_bound(2, 6.14).expect("bound");
    let exact = factorial_u128(12) == Some(479_001_600) && 479_001_600u128 > 1u128 << 28;
    let mut ok = r.k == 12 && r.rhs_exponent == 28 && r.contradiction && exact;
    let mut detail = format!("n=2: k={} 12!={} > 2^28={} -> {}", r.k, 479_001_600u64, 1u64 << 28, r.contradiction);
    for n in [10_000u64, 100_000, 1_000_000] {
        let k = embedder::minimal_k(n).expect("minimal k");
        let ratio = k as f64 * (n as f64).log2() / n as f64;
        ok &= ratio <= 2.2;
        detail.push_str(&format!("; n={n}: minimal k={k}, k*log2(n)/n={ratio:.4} (need <= 2.2)"));
    }
    let t = start.elapsed();
    ok &= within(t, 10);
    detail.push_str(&format!("; {:.2?} (limit 10 s)", t));
    verdict(ok, detail)
}

fn pair_code() -> Verdict {
    let start = Instant::now();
    let code = match constructions::greedy_pair_code(18) {
        Ok(c) => c,
        Err(e) => return verdict(false, e.to_string()),
    };
    let f = constructions::pair_feasibility(18);
    let candidates = binomial_u128(18, 9);
    let blocked = (20 * 19 - 1) * (1 + 9 * 9);
    let feasible = f.candidates == candidates && f.blocked_bound == blocked && candidates > blocked && f.holds;
    let pairs_ok = code.assignments.len() == 380
        && code
            .assignments
            .iter()
            .all(|a| a.set.len() == 10 && a.set.contains(a.y) && !a.set.contains(a.z));
    let distance = verifier::check_min_distance(&code.family(), 4, u128::MAX).expect("distance");
    let c = constructions::induced_q2_coloring_from(&code).expect("coloring");
    let blue_free = verifier::certify_blue_free(&c, 2, CopyKind::Induced).expect("certify");
    let t = start.elapsed();
    verdict(
        feasible && pairs_ok && distance.is_none() && blue_free.ok() && within(t, 30),
        format!(
            "{} pairs, binom(18,9)={candidates} > 379*82={blocked}, min distance >= 4: {}, blue-free: {} (profile {:?}), {:.2?} (limit 30 s)",
            code.assignments.len(),
            distance.is_none(),
            blue_free.ok(),
            blue_free.profile,
            t
        ),
    )
}

fn modp_code() -> Verdict {
    let start = Instant::now();
    let stmt = verifier::check_code_statement(36, 2, 17, 37, 37).expect("statement");
    if !stmt.ok() || stmt.pairs_checked != 630 * 2 || stmt.min_count < 1 {
        return verdict(false, format!("code statement: {stmt:?}"));
    }
    let code = constructions::modp_code(36, 17, 37, 37).expect("code");
    let mut rng = task_rng(5, 0);
    let ys: Vec<SetWord> = layer(36, 2).expect("layer").collect();
    for _ in 0..100 {
        let big_y = ys[rng.gen_range(0..ys.len())];
        let elems = big_y.to_vec();
        let y = elems[rng.gen_range(0..elems.len())];
        let c = match constructions::code_witness(36, 2, 17, &code, big_y, y) {
            Ok(c) => c,
            Err(e) => return verdict(false, format!("witness for Y={big_y}, y={y}: {e}")),
        };
        let sum: u64 = c.with(y).to_vec().iter().map(|&e| u64::from(e)).sum();
        if c.len() != 17 || !c.intersection(big_y).is_empty() || sum % 37 != 0 {
            return verdict(false, format!("witness {c} fails re-verification for Y={big_y}, y={y}"));
        }
    }
    let mut sweeps = 0u64;
    for ground in 4u32..=14 {
        for p in (u64::from(ground)..=2 * u64::from(ground - 1)).filter(|&p| constructions::is_prime(p)) {
            for d in 1..=p {
                for k in 0..ground {
                    let fam = constructions::modp_code(ground, k, d, p).expect("code");
                    if let Some(pair) = verifier::check_min_distance(&fam, 4, u128::MAX).expect("distance") {
                        return verdict(false, format!("N={ground} p={p} d={d} k={k}: close pair {pair:?}"));
                    }
                    sweeps += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    verdict(
        within(t, 60),
        format!(
            "statement ok on {} (Y, y) pairs (min count {}), 100 witnesses re-verified, {sweeps} mod-p codes with N <= 14 at distance >= 4, {:.2?} (limit 60 s)",
            stmt.pairs_checked, stmt.min_count, t
        ),
    )
}

fn random_family() -> Verdict {
    let mut detail = Vec::new();
    for &(n, m) in &[(40u32, 3u32), (60, 3), (40, 4)] {
        let start = Instant::now();
        let cfg = LllConfig::tuned(n, m, 1);
        let out = match constructions::lll_family(&cfg) {
            Ok(o) => o,
            Err(e) => return verdict(false, format!("(n={n}, m={m}): {e}")),
        };
        let violations = verifier::check_conditions(&out.family).expect("conditions");
        if !violations.is_empty() {
            return verdict(false, format!("(n={n}, m={m}): {} violated events", violations.len()));
        }
        let c = constructions::probabilistic_coloring(n, m, &out.family).expect("coloring");
        let blue = verifier::certify_blue_free(&c, m, CopyKind::Weak).expect("certify");
        let red = verifier::certify_red_singleton_bound(&c, n, m).expect("red bound");
        if !blue.ok() || red.is_some() {
            return verdict(false, format!("(n={n}, m={m}): blue {:?}, red {red:?}", blue.violation));
        }
        detail.push(format!(
            "(n={n},m={m}) p={:.4} (asymptotic p={:.4}) resamples={} {:.2?}",
            cfg.p_inclusion,
            constructions::paper_probability(n, m),
            out.resamples,
            start.elapsed()
        ));
    }
    let mut worst = 0.0f64;
    for &(n, m) in &[(3u32, 3u32), (5, 3), (8, 3), (6, 4), (8, 5), (8, 8)] {
        for (i, &p) in [constructions::paper_probability(n, m), 0.2, 0.5].iter().enumerate() {
            let r = verifier::lll_inequality_report(n, m, p).expect("report");
            let q = 1.0 - p;
            let (nf, mf) = (f64::from(n), f64::from(m));
            let p_as = (nf + 1.0) * q.powf(nf) * p + q.powf(nf + 1.0);
            let p_bt = (mf + 1.0) * p.powf(mf) * q + p.powf(mf + 1.0);
            if (r.p_as - p_as).abs() > 1e-12 * p_as.max(1e-300) || (r.p_bt - p_bt).abs() > 1e-12 * p_bt.max(1e-300) {
                return verdict(false, format!("closed form mismatch at n={n} m={m} p={p}"));
            }
            let (a, b) = verifier::monte_carlo_event_probabilities(n, m, p, 100_000, 60 + i as u64);
            for (est, exact) in [(a, p_as), (b, p_bt)] {
                let sigma = (exact * (1.0 - exact) / 100_000.0).sqrt();
                let z = if sigma > 0.0 { (est.mean - exact).abs() / sigma } else { 0.0 };
                worst = worst.max(z);
                if z > 3.0 {
                    return verdict(false, format!("Monte Carlo off by {z:.2} sigma at n={n} m={m} p={p}"));
                }
            }
        }
    }
    detail.push(format!("closed forms exact, Monte Carlo worst deviation {worst:.2} sigma (limit 3)"));
    verdict(true, detail.join("; "))
}

fn tiny_ramsey() -> Verdict {
    let start = Instant::now();
    let opts = RamseyOptions::default();
    let r11 = oracle::exhaustive_ramsey_number(1, 1, CopyKind::Induced, 4, &opts).expect("scan");
    if r11.value != Some(2) {
        return verdict(false, format!("R(Q_1,Q_1) = {:?}", r11.value));
    }
    let mut layered = 0;
    for m in 1..=4u32 {
        for n in 1..=(5 - m) {
            let c = constructions::layered_coloring(m, n, None).expect("layered");
            for kind in [CopyKind::Induced, CopyKind::Weak] {
                match oracle::coloring_is_ramsey(&c, m, n, kind, oracle::DEFAULT_NODE_BUDGET) {
                    Ok(RamseyOutcome::Neither) => layered += 1,
                    other => return verdict(false, format!("layered m={m} n={n} {kind:?}: {other:?}")),
                }
            }
        }
    }
    let mut values = Vec::new();
    for &(m, n) in &[(1u32, 2u32), (2, 1), (1, 3), (2, 2)] {
        for kind in [CopyKind::Induced, CopyKind::Weak] {
            let scan = oracle::exhaustive_ramsey_number(m, n, kind, 4, &opts).expect("scan");
            if scan.value.is_some_and(|v| v < m + n) {
                return verdict(false, format!("R({m},{n}) {kind:?} = {:?} below m + n", scan.value));
            }
            values.push(format!("R{}({m},{n})={}", if kind == CopyKind::Weak { "w" } else { "" }, scan.value.map_or("?".into(), |v| v.to_string())));
        }
    }
    let t = start.elapsed();
    verdict(
        within(t, 120),
        format!("R(Q_1,Q_1)=2; {layered} layered colorings with neither copy; {}; {:.2?} (limit 120 s)", values.join(" "), t),
    )
}

fn m2_refutation() -> Verdict {
    for i in 0..100u64 {
        let n = 5 + (i % 6) as u32;
        let ground = n + 2;
        let mut rng = task_rng(8, i);
        let mut members = Vec::new();
        for e in 1..=ground {
            let mut others: Vec<u32> = (1..=ground).filter(|&x| x != e).collect();
            others.shuffle(&mut rng);
            members.push(SetWord::singleton(e).with(others[0]));
            members.push(SetWord::singleton(e).with(others[1]));
        }
        for _ in 0..rng.gen_range(0..ground) {
            let a = rng.gen_range(1..=ground);
            let b = rng.gen_range(1..=ground);
            if a != b {
                members.push(SetWord::singleton(a).with(b));
            }
        }
        let fam = WeightedFamily::explicit(ground, 2, members).expect("family");
        let w = match constructions::refute_m2(&fam) {
            Ok(w) => w,
            Err(e) => return verdict(false, format!("family {i}: {e}")),
        };
        let below_t = graded(ground).filter(|&s| s.len() == 2 && s.is_subset(w.t) && fam.contains(s)).count();
        let valid = w.s.len() == 1
            && w.a != w.b
            && fam.contains(w.a)
            && fam.contains(w.b)
            && w.s.is_subset(w.a)
            && w.s.is_subset(w.b)
            && w.t == w.a.union(w.b)
            && w.t.len() == 3
            && below_t >= 2
            && below_t == w.subsets_in_family as usize;
        if !valid {
            return verdict(false, format!("family {i}: invalid witness {w:?}"));
        }
    }
    verdict(true, "100 families over n in 5..=10, every witness T holds >= 2 members")
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = task_rng(9, 0);
    for draw in 0..1000 {
        let size = rng.gen_range(0..=16usize);
        let mut universe: Vec<u32> = (1..=64).collect();
        universe.shuffle(&mut rng);
        let ground = SetWord::from_elems(universe[..size].iter().copied()).expect("ground");
        let k = rng.gen_range(0..=size as u32);
        let p = rng.gen_range(1..=40u64);
        let r = rng.gen_range(0..p);
        let (fast, slow) = (verifier::dp_count(ground, k, p, r), brute_count(ground, k, p, r));
        if fast != slow {
            return verdict(false, format!("draw {draw}: dp {fast} vs brute {slow} for {ground}, k={k}, p={p}, r={r}"));
        }
    }
    let q4: Vec<SetWord> = graded(4).collect();
    let mut searches = 0u64;
    for mask in 0u32..(1 << 16) {
        let family: Vec<SetWord> = q4.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &s)| s).collect();
        for m in 0..=2 {
            for kind in [CopyKind::Induced, CopyKind::Weak] {
                let fast = oracle::find_copy(&family, m, kind).expect("search");
                if let Some(w) = &fast {
                    if !w.is_valid() {
                        return verdict(false, format!("invalid witness for family mask {mask:#06x}"));
                    }
                }
                if fast.is_some() != naive_has_copy(&family, m, kind) {
                    return verdict(false, format!("family mask {mask:#06x}, m={m}, {kind:?}: disagreement"));
                }
                searches += 1;
            }
        }
    }
    verdict(
        true,
        format!("1000 dp/brute draws agree; {searches} searches over all families in Q_4 agree; {:.2?}", start.elapsed()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("embedder contract", embedder_contract),
        ("injectivity of failure end points", injectivity),
        ("counting bound", counting_bound),
        ("greedy pair code at n = 18", pair_code),
        ("mod-p code at N = 36", modp_code),
        ("random family by resampling", random_family),
        ("exhaustive tiny Ramsey numbers", tiny_ramsey),
        ("m = 2 refutation", m2_refutation),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("[{}] criterion {}: {name} -- {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
