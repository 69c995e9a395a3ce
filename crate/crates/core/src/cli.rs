//! The `rll` command line: constructions, verification, embedding runs,
//! tiny Ramsey scans, the counting bound and code utilities, each run
//! summarized as a JSON certificate.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::constructions::{self, LllConfig, WeakParams};
use crate::embedder::{self, SweepMode};
use crate::lattice::{self, Coloring, Permutation, SetWord, WeightedFamily};
use crate::oracle::{self, CopyKind, OracleError, RamseyOptions, RamseyOutcome};
use crate::verifier::{self, Shape};

pub const EXIT_OK: i32 = 0;
pub const EXIT_WITNESS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rll", version, about = "Blue/red colorings of Boolean lattices with certificates")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "RLL_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a coloring and write it as JSON.
    Construct(ConstructArgs),
    /// Check structural properties of a coloring or of code parameters.
    Verify(VerifyArgs),
    /// Run the recursive embedding for one, all or sampled permutations.
    Embed(EmbedArgs),
    /// Exhaustive poset Ramsey number for tiny parameters.
    Ramsey(RamseyArgs),
    /// The factorial counting bound `k! > 2^(2(n+k))`.
    Bound(BoundArgs),
    /// Mod-p code utilities.
    Code(CodeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Layered,
    Pairs,
    Modp,
    Lll,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Induced,
    Weak,
}

impl From<Kind> for CopyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Induced => CopyKind::Induced,
            Kind::Weak => CopyKind::Weak,
        }
    }
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    pub construction: Construction,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: Option<u32>,
    /// Blue layer indices for `layered`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub blue_layers: Option<Vec<u32>>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inclusion probability for `lll` (default: the desk-scale tuned value).
    #[arg(long)]
    pub p_incl: Option<f64>,
    /// Use the asymptotic inclusion probability for `lll`.
    #[arg(long, conflicts_with = "p_incl")]
    pub paper_p: bool,
    #[arg(long, default_value_t = constructions::DEFAULT_MAX_RESAMPLES)]
    pub max_resamples: u64,
    /// Coloring output path.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    /// Certificate output path (default: stdout).
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub coloring: Option<PathBuf>,
    /// Certify no blue copy of `Q_m`.
    #[arg(long)]
    pub blue_free: Option<u32>,
    #[arg(long, value_enum, default_value_t = Kind::Weak)]
    pub kind: Kind,
    /// Check the superset/subset conditions of the extra blue family.
    #[arg(long)]
    pub conditions: bool,
    /// Minimum symmetric difference of the extra blue family.
    #[arg(long)]
    pub distance: Option<u32>,
    /// Every `(m-1)`-set has at most `n - 1` red supersets: `n,m`.
    #[arg(long, value_delimiter = ',')]
    pub red_singleton: Option<Vec<u32>>,
    /// Covering statement of the code: `N,m,k,p,d`.
    #[arg(long, value_delimiter = ',')]
    pub code_statement: Option<Vec<u64>>,
    /// Brute-force search for a blue `Q_m` or red `Q_n`: `m,n`.
    #[arg(long, value_delimiter = ',')]
    pub ramsey: Option<Vec<u32>>,
    #[arg(long, default_value_t = oracle::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[arg(long)]
    pub coloring: PathBuf,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    /// Images `pi(n+1), ..., pi(n+k)`, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["all", "sample"])]
    pub pi: Option<Vec<u32>>,
    #[arg(long, conflicts_with = "sample")]
    pub all: bool,
    /// Number of sampled permutations.
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RamseyArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Kind::Induced)]
    pub kind: Kind,
    #[arg(long = "max-N", alias = "max-n", default_value_t = 4)]
    pub max_n: u32,
    #[arg(long, default_value_t = 1 << 16)]
    pub max_colorings: u64,
    #[arg(long, default_value_t = oracle::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 6.14)]
    pub c: f64,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CodeArgs {
    #[command(subcommand)]
    pub action: CodeAction,
}

#[derive(Subcommand, Debug)]
pub enum CodeAction {
    /// Smallest prime in `[N, 2(N-1))`.
    Prime {
        #[arg(long = "N", alias = "ground")]
        ground: u32,
    },
    /// A subset of the values with the given sum mod p.
    SubsetSum {
        #[arg(long, value_delimiter = ',')]
        values: Vec<u64>,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        target: u64,
    },
    /// A `k`-set `C` avoiding `Y` with `C + {y}` in the code.
    Witness {
        #[arg(long = "N", alias = "ground")]
        ground: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: Option<u64>,
        /// The set `Y`, comma separated.
        #[arg(long = "Y", alias = "big-y", value_delimiter = ',')]
        big_y: Vec<u32>,
        #[arg(long)]
        y: u32,
    },
}

/// Summary of one run. Identical invocations on identical inputs produce
/// identical certificates apart from `wall_clock_ms`.
#[derive(Debug, Serialize)]
pub struct Certificate {
    pub command: Vec<String>,
    pub tool: &'static str,
    pub version: &'static str,
    pub seeds: Vec<u64>,
    pub inputs: Vec<InputDigest>,
    pub outcome: Outcome,
    pub payload: Value,
    pub wall_clock_ms: u128,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Witness,
    Unknown,
    Exhausted,
}

impl Outcome {
    fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok | Outcome::Unknown => EXIT_OK,
            Outcome::Witness => EXIT_WITNESS,
            Outcome::Exhausted => EXIT_EXHAUSTED,
        }
    }
}

/// A failure that maps onto an exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, message: msg.to_string() }
}

fn from_oracle(e: OracleError) -> Failure {
    match e {
        OracleError::Exhausted { .. } => Failure { code: EXIT_EXHAUSTED, message: e.to_string() },
        other => usage(other),
    }
}

struct Run {
    seeds: Vec<u64>,
    inputs: Vec<InputDigest>,
    outcome: Outcome,
    payload: Value,
}

impl Run {
    fn new(outcome: Outcome, payload: Value) -> Self {
        Run { seeds: Vec::new(), inputs: Vec::new(), outcome, payload }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn read_input(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    inputs.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
    String::from_utf8(bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_coloring(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<Coloring, Failure> {
    let text = read_input(path, inputs)?;
    lattice::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn construct(a: &ConstructArgs) -> Result<Run, Failure> {
    let need_m = || a.m.ok_or_else(|| usage("--m is required for this construction"));
    let mut seeds = Vec::new();
    let (coloring, details) = match a.construction {
        Construction::Layered => {
            let m = need_m()?;
            let c = constructions::layered_coloring(m, a.n, a.blue_layers.clone()).map_err(usage)?;
            (c, json!({ "construction": "layered", "m": m, "n": a.n }))
        }
        Construction::Pairs => {
            let feasibility = constructions::pair_feasibility(a.n);
            let code = constructions::greedy_pair_code(a.n).map_err(|e| match e {
                constructions::ConstructionError::GreedyStuck { .. } => Failure { code: EXIT_WITNESS, message: e.to_string() },
                other => usage(other),
            })?;
            let c = constructions::induced_q2_coloring_from(&code).map_err(usage)?;
            (
                c,
                json!({ "construction": "pairs", "n": a.n, "k": code.k, "feasibility": feasibility, "assignments": code.assignments.len() }),
            )
        }
        Construction::Modp => {
            let m = need_m()?;
            let w = constructions::weak_construction(a.n, m, WeakParams { k: a.k, d: a.d, p: a.p }).map_err(usage)?;
            let details = json!({
                "construction": "modp", "n": w.n, "m": w.m, "k": w.k, "p": w.p, "d": w.d,
                "blue_layers": w.blue_layers, "hypotheses": w.hypotheses,
            });
            (w.coloring, details)
        }
        Construction::Lll => {
            let m = need_m()?;
            let mut cfg = if a.paper_p {
                LllConfig::paper(a.n, m, a.seed)
            } else {
                let p = a.p_incl.unwrap_or_else(|| constructions::tuned_probability(a.n));
                LllConfig::with_probability(a.n, m, p, a.seed)
            };
            cfg.max_resamples = a.max_resamples;
            seeds.push(a.seed);
            match constructions::lll_family(&cfg) {
                Ok(out) => {
                    let c = constructions::probabilistic_coloring(a.n, m, &out.family).map_err(usage)?;
                    let details = json!({
                        "construction": "lll", "config": cfg, "resamples": out.resamples,
                        "initial_violations": out.initial_violations,
                        "paper_probability": constructions::paper_probability(a.n, m),
                    });
                    (c, details)
                }
                Err(constructions::ConstructionError::ResampleBudgetExceeded { resamples, violations, best_effort }) => {
                    let mut run = Run::new(
                        Outcome::Exhausted,
                        json!({ "config": cfg, "resamples": resamples, "violations": violations, "best_effort": *best_effort }),
                    );
                    run.seeds = seeds;
                    return Ok(run);
                }
                Err(e) => return Err(usage(e)),
            }
        }
    };
    let text = lattice::to_json(&coloring);
    if let Some(path) = &a.output {
        write_output(path, &text)?;
    }
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    let mut payload = json!({ "details": details, "coloring_sha256": digest });
    if a.output.is_none() {
        payload["coloring"] = to_value(&coloring);
    }
    let mut run = Run::new(Outcome::Ok, payload);
    run.seeds = seeds;
    Ok(run)
}

/// The extra blue family of a structured coloring, with its weight taken
/// from the recognized construction when there is one.
fn extra_family(c: &Coloring) -> Result<WeightedFamily, Failure> {
    let st = c.as_structured().ok_or_else(|| usage("family checks need a structured coloring"))?;
    if let Some(rule) = st.blue_modp {
        return WeightedFamily::modp(c.n(), rule.weight, rule.p, rule.d).map_err(usage);
    }
    let weight = match verifier::recognize_shape(c) {
        Ok(Shape::PairCode { k }) => k + 1,
        Ok(Shape::Probabilistic { m }) => m,
        _ => st.blue_extra.first().map(|s| s.len()).ok_or_else(|| usage("coloring has no extra blue sets"))?,
    };
    WeightedFamily::explicit(c.n(), weight, st.blue_extra.clone()).map_err(usage)
}

fn verify(a: &VerifyArgs) -> Result<Run, Failure> {
    let mut inputs = Vec::new();
    let coloring = a.coloring.as_deref().map(|p| load_coloring(p, &mut inputs)).transpose()?;
    let need = || coloring.as_ref().ok_or_else(|| usage("--coloring is required for this check"));
    for (flag, values, len) in [
        ("--red-singleton", a.red_singleton.as_ref().map(Vec::len), 2),
        ("--code-statement", a.code_statement.as_ref().map(Vec::len), 5),
        ("--ramsey", a.ramsey.as_ref().map(Vec::len), 2),
    ] {
        if values.is_some_and(|v| v != len) {
            return Err(usage(format!("{flag} takes {len} comma-separated values")));
        }
    }
    let mut checks = serde_json::Map::new();
    let mut outcome = Outcome::Ok;
    let mut note = |name: &str, ok: bool, value: Value, outcome: &mut Outcome| {
        if !ok {
            *outcome = Outcome::Witness;
        }
        checks.insert(name.into(), json!({ "ok": ok, "result": value }));
    };
    if let Some(m) = a.blue_free {
        let r = verifier::certify_blue_free(need()?, m, a.kind.into()).map_err(usage)?;
        note("blue_free", r.ok(), to_value(&r), &mut outcome);
    }
    if a.conditions {
        let fam = extra_family(need()?)?;
        let v = verifier::check_conditions(&fam).map_err(usage)?;
        note("conditions", v.is_empty(), to_value(&v), &mut outcome);
    }
    if let Some(bound) = a.distance {
        let fam = extra_family(need()?)?;
        let w = verifier::check_min_distance(&fam, bound, verifier::DEFAULT_ENUMERATION_LIMIT).map_err(usage)?;
        note("distance", w.is_none(), to_value(&w), &mut outcome);
    }
    if let Some(v) = &a.red_singleton {
        let w = verifier::certify_red_singleton_bound(need()?, v[0], v[1]).map_err(usage)?;
        note("red_singleton", w.is_none(), to_value(&w), &mut outcome);
    }
    if let Some(v) = &a.code_statement {
        let narrow = |x: u64| u32::try_from(x).map_err(|_| usage(format!("{x} out of range")));
        let r = verifier::check_code_statement(narrow(v[0])?, narrow(v[1])?, narrow(v[2])?, v[3], v[4]).map_err(usage)?;
        note("code_statement", r.ok(), to_value(&r), &mut outcome);
    }
    if let Some(v) = &a.ramsey {
        match oracle::coloring_is_ramsey(need()?, v[0], v[1], a.kind.into(), a.budget) {
            Ok(r) => {
                let neither = r == RamseyOutcome::Neither;
                note("ramsey", neither, to_value(&r), &mut outcome);
            }
            Err(OracleError::Exhausted { budget }) => {
                checks.insert("ramsey".into(), json!({ "ok": null, "exhausted_budget": budget }));
                if outcome == Outcome::Ok {
                    outcome = Outcome::Exhausted;
                }
            }
            Err(e) => return Err(usage(e)),
        }
    }
    if checks.is_empty() {
        return Err(usage("no check requested"));
    }
    let mut run = Run::new(outcome, Value::Object(checks));
    run.inputs = inputs;
    Ok(run)
}

fn embed(a: &EmbedArgs) -> Result<Run, Failure> {
    let mut inputs = Vec::new();
    let c = load_coloring(&a.coloring, &mut inputs)?;
    let mut seeds = Vec::new();
    let (outcome, payload) = if let Some(image) = &a.pi {
        let pi = Permutation::new(a.n, a.k, image.clone()).map_err(usage)?;
        let rec = embedder::embed_with_permutation(&c, a.n, a.k, &pi).map_err(usage)?;
        let recovered = rec.failure_chain().map(|ch| embedder::recover_permutation(ch, a.n).ok());
        let payload = json!({ "success": rec.is_success(), "recovered": recovered, "record": rec });
        (Outcome::Ok, payload)
    } else {
        let mode = match (a.all, a.sample) {
            (true, _) => SweepMode::All,
            (false, Some(count)) => {
                seeds.push(a.seed);
                SweepMode::Sample { count, seed: a.seed }
            }
            (false, None) => return Err(usage("one of --pi, --all, --sample is required")),
        };
        let r = embedder::sweep_permutations(&c, a.n, a.k, &mode).map_err(usage)?;
        let outcome = if r.injective && r.all_recovered { Outcome::Ok } else { Outcome::Witness };
        (outcome, to_value(&r))
    };
    Ok(Run { seeds, inputs, outcome, payload })
}

fn ramsey(a: &RamseyArgs) -> Result<Run, Failure> {
    let opts = RamseyOptions { max_colorings: a.max_colorings, node_budget: a.budget };
    let scan = oracle::exhaustive_ramsey_number(a.m, a.n, a.kind.into(), a.max_n, &opts).map_err(from_oracle)?;
    let outcome = if scan.value.is_some() { Outcome::Ok } else { Outcome::Unknown };
    Ok(Run::new(outcome, to_value(&scan)))
}

fn bound(a: &BoundArgs) -> Result<Run, Failure> {
    let r = embedder::counting_bound(a.n, a.c).map_err(usage)?;
    let k_min = embedder::minimal_k(a.n).map_err(usage)?;
    let payload = json!({ "report": r, "minimal_k": k_min });
    Ok(Run::new(if r.contradiction { Outcome::Ok } else { Outcome::Witness }, payload))
}

fn code(a: &CodeArgs) -> Result<Run, Failure> {
    match &a.action {
        CodeAction::Prime { ground } => {
            let p = constructions::find_prime(*ground).map_err(usage)?;
            Ok(Run::new(Outcome::Ok, json!({ "N": ground, "p": p })))
        }
        CodeAction::SubsetSum { values, p, target } => match constructions::olson_subset_sum(values, *p, *target) {
            Ok(subset) => Ok(Run::new(
                Outcome::Ok,
                json!({ "subset": subset, "threshold_met": constructions::olson_threshold_met(values.len(), *p) }),
            )),
            Err(e @ constructions::ConstructionError::NoSolution { .. }) => {
                Ok(Run::new(Outcome::Witness, json!({ "error": e.to_string() })))
            }
            Err(e) => Err(usage(e)),
        },
        CodeAction::Witness { ground, m, k, p, d, big_y, y } => {
            let p = match p {
                Some(p) => *p,
                None => constructions::find_prime(*ground).map_err(usage)?,
            };
            let d = d.unwrap_or(p);
            let code = constructions::modp_code(*ground, *k, d, p).map_err(usage)?;
            let big_y = SetWord::from_elems(big_y.iter().copied()).map_err(usage)?;
            let c = constructions::code_witness(*ground, *m, *k, &code, big_y, *y).map_err(usage)?;
            Ok(Run::new(Outcome::Ok, json!({ "p": p, "d": d, "Y": big_y, "y": y, "C": c })))
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(Run, Option<PathBuf>), Failure> {
    Ok(match &cli.command {
        Command::Construct(a) => (construct(a)?, a.certificate.clone()),
        Command::Verify(a) => (verify(a)?, a.output.clone()),
        Command::Embed(a) => (embed(a)?, a.output.clone()),
        Command::Ramsey(a) => (ramsey(a)?, a.output.clone()),
        Command::Bound(a) => (bound(a)?, a.output.clone()),
        Command::Code(a) => (code(a)?, None),
    })
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // A pool that is already initialized keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let start = Instant::now();
    let (run, cert_path) = match dispatch(&cli) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("rll: {}", f.message);
            return f.code;
        }
    };
    let cert = Certificate {
        command: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
        tool: "rll",
        version: env!("CARGO_PKG_VERSION"),
        seeds: run.seeds,
        inputs: run.inputs,
        outcome: run.outcome,
        payload: run.payload,
        wall_clock_ms: start.elapsed().as_millis(),
    };
    let text = serde_json::to_string_pretty(&cert).expect("serializable");
    match cert_path {
        Some(path) => {
            if let Err(f) = write_output(&path, &text) {
                eprintln!("rll: {}", f.message);
                return f.code;
            }
        }
        None => println!("{text}"),
    }
    cert.outcome.exit_code()
}
