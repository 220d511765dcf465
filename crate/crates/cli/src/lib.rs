//! `framekit` command-line frontend.
//!
//! Every invocation prints exactly one JSON [`RunReport`] on stdout and
//! exits with 0 (pass), 1 (assertion failure) or 2 (input error);
//! diagnostics go to stderr.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use framekit::frame::{optimal_bounds, FrameSystem};
use framekit::models::{verify_example, EXAMPLE_IDS};
use framekit::numerics::{numerical_rank, penrose_residuals, pinv, Operator, Tolerance};
use framekit::operator_theory::{djordjevic_hyponormal, douglas_check, hyponormality, relative_hyponormality};
use framekit::random::trial_seed;
use framekit::signal::TruncatedSequenceSpace;
use framekit::suites::{run_trial, suite, TrialOutcome, SUITES};
use framekit::theta::{check_k_frame, check_k_frame_on, check_theta_frame, check_theta_frame_on, theta_tight_check};
use framekit::wavepacket::{
    generate_system, partition_combination, theorem_4_1_check, theorem_4_2_check, FiniteSumSpec, PartitionCombination,
    WavePacketParams,
};
use framekit::{Error, C64};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Maximum Penrose residual accepted by `pinv`, relative to the operand norms.
const PENROSE_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "framekit", version, about = "Operator-controlled frame analysis on finite-dimensional models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalOpts {
    /// Eigenvalue floor for positivity verdicts (default 1e-9)
    #[arg(long, global = true)]
    pub tol_psd: Option<f64>,
    /// Relative singular-value cutoff (default 1e-10)
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    /// Relative slack for inequality and equality verdicts (default 1e-8)
    #[arg(long, global = true)]
    pub tol_verdict: Option<f64>,
    /// Master seed for randomized runs
    #[arg(long, global = true, env = "FRAMEKIT_SEED")]
    pub seed: Option<u64>,
    /// Number of randomized trials (default 100)
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Write the command's artifact (system, pseudoinverse, combination) or
    /// else the report to this file
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SubspaceOpts {
    /// Restrict to the span of the orthonormal columns of this operator JSON
    #[arg(long, conflicts_with = "margin")]
    pub subspace: Option<PathBuf>,
    /// Restrict to vectors supported away from the last MARGIN coordinates
    #[arg(long)]
    pub margin: Option<usize>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Generate a wave packet system from parameters JSON
    Gen { params: PathBuf },
    /// Classical optimal frame bounds of a system
    CheckFrame { system: PathBuf },
    /// Operator-controlled frame check for a system and Θ
    CheckTheta {
        system: PathBuf,
        theta: PathBuf,
        #[command(flatten)]
        sub: SubspaceOpts,
    },
    /// K-frame bounds of a system
    CheckK {
        system: PathBuf,
        k: PathBuf,
        #[command(flatten)]
        sub: SubspaceOpts,
    },
    /// Hyponormality of T, or relative hyponormality of (T, T2)
    CheckHypo {
        operator: PathBuf,
        /// Second operator T2 of a relatively hyponormal pair
        #[arg(long)]
        relative: Option<PathBuf>,
        #[command(flatten)]
        sub: SubspaceOpts,
    },
    /// Range inclusion, majorization and factorization of T1 by T2
    Douglas { t1: PathBuf, t2: PathBuf },
    /// Moore–Penrose pseudoinverse with its Penrose residuals
    Pinv { operator: PathBuf },
    /// Partition or finite-sum combination check
    CheckComb { spec: PathBuf },
    /// Run a pinned worked example ("all" runs every one)
    VerifyExample { id: String },
    /// Run a randomized invariant suite
    PropRun {
        suite: String,
        /// Run only this trial index (replays a reported failure)
        #[arg(long)]
        trial: Option<u64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen { .. } => "gen",
            Command::CheckFrame { .. } => "check-frame",
            Command::CheckTheta { .. } => "check-theta",
            Command::CheckK { .. } => "check-k",
            Command::CheckHypo { .. } => "check-hypo",
            Command::Douglas { .. } => "douglas",
            Command::Pinv { .. } => "pinv",
            Command::CheckComb { .. } => "check-comb",
            Command::VerifyExample { .. } => "verify-example",
            Command::PropRun { .. } => "prop-run",
        }
    }

    /// Arguments that are not file paths; file contents enter the digest instead.
    fn scalar_args(&self) -> Value {
        match self {
            Command::CheckTheta { sub, .. } | Command::CheckK { sub, .. } | Command::CheckHypo { sub, .. } => {
                json!({ "margin": sub.margin, "subspace": sub.subspace.is_some() })
            }
            Command::VerifyExample { id } => json!({ "id": id }),
            Command::PropRun { suite, trial } => json!({ "suite": suite, "trial": trial }),
            _ => json!({}),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the command, its scalar arguments, the tolerances, seed
    /// and trial count, and the contents of every input file.
    pub inputs_digest: String,
    pub verdicts: Value,
    pub seed: u64,
    pub duration_ms: u64,
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unparsable or invalid input: exit 2.
    Input(String),
    /// A computation failed while checking: exit 1.
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence | Error::NotHermitian { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Inputs read so far, folded into the digest.
struct Ctx {
    hasher: Sha256,
}

impl Ctx {
    fn read_json<T: DeserializeOwned>(&mut self, path: &Path) -> CliResult<T> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn subspace(&mut self, sub: &SubspaceOpts, n: usize) -> CliResult<Option<Operator>> {
        match (&sub.subspace, sub.margin) {
            (Some(p), _) => Ok(Some(self.read_json(p)?)),
            (None, Some(m)) => Ok(Some(TruncatedSequenceSpace::new(n, m)?.margin_basis())),
            (None, None) => Ok(None),
        }
    }
}

/// A command's verdicts, whether they pass, and an optional artifact for `--out`.
struct Outcome {
    verdicts: Value,
    passed: bool,
    artifact: Option<Value>,
}

impl Outcome {
    fn new(passed: bool, verdicts: Value) -> Self {
        Outcome { verdicts, passed, artifact: None }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn tolerance(g: &GlobalOpts) -> std::result::Result<Tolerance, Error> {
    let d = Tolerance::default();
    Tolerance::new(
        g.tol_psd.unwrap_or(d.psd_floor),
        g.tol_rank.unwrap_or(d.rank_rel),
        g.tol_verdict.unwrap_or(d.verdict_rel),
    )
}

/// Execute a parsed command line; returns the report and the exit code.
pub fn execute(cli: &Cli) -> (RunReport, i32) {
    let start = Instant::now();
    let seed = cli.global.seed.unwrap_or(0);
    let trials = cli.global.trials.unwrap_or(100);
    let mut ctx = Ctx { hasher: Sha256::new() };
    let result = tolerance(&cli.global).map_err(CliError::from).and_then(|tol| {
        let header = json!({
            "command": cli.command.name(),
            "args": cli.command.scalar_args(),
            "tolerance": tol,
            "seed": seed,
            "trials": trials,
        });
        ctx.hasher.update(header.to_string().as_bytes());
        dispatch(&cli.command, &mut ctx, &tol, seed, trials)
    });
    let mut wrote_artifact = false;
    let (verdicts, mut code) = match result {
        Ok(outcome) => {
            let code = if outcome.passed { EXIT_PASS } else { EXIT_FAIL };
            let mut verdicts = outcome.verdicts;
            verdicts["passed"] = json!(outcome.passed);
            match (&cli.global.out, outcome.artifact) {
                (Some(path), Some(artifact)) => match write_json(path, &artifact) {
                    Ok(()) => {
                        wrote_artifact = true;
                        (verdicts, code)
                    }
                    Err(e) => (error_verdicts(&e), EXIT_INPUT),
                },
                _ => (verdicts, code),
            }
        }
        Err(CliError::Input(msg)) => (error_verdicts(&msg), EXIT_INPUT),
        Err(CliError::Failure(msg)) => (error_verdicts(&msg), EXIT_FAIL),
    };
    let digest = ctx.hasher.finalize();
    let mut report = RunReport {
        command: cli.command.name().to_string(),
        inputs_digest: digest.iter().map(|b| format!("{b:02x}")).collect(),
        verdicts,
        seed,
        duration_ms: start.elapsed().as_millis() as u64,
    };
    // Commands without an artifact save a copy of the report instead.
    if let (Some(path), false) = (&cli.global.out, wrote_artifact) {
        if let Err(e) = write_json(path, &to_value(&report)) {
            eprintln!("{e}");
            report.verdicts = error_verdicts(&e);
            code = EXIT_INPUT;
        }
    }
    (report, code)
}

/// Report for a command line that did not parse.
pub fn usage_error_report(msg: &str) -> RunReport {
    RunReport {
        command: "usage".into(),
        inputs_digest: Sha256::digest(msg.as_bytes()).iter().map(|b| format!("{b:02x}")).collect(),
        verdicts: error_verdicts(msg),
        seed: 0,
        duration_ms: 0,
    }
}

fn error_verdicts(msg: &str) -> Value {
    json!({ "passed": false, "error": msg })
}

pub fn write_json(path: &Path, v: &Value) -> std::result::Result<(), String> {
    let text = serde_json::to_string_pretty(v).expect("values serialize");
    std::fs::write(path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn dispatch(cmd: &Command, ctx: &mut Ctx, tol: &Tolerance, seed: u64, trials: u64) -> CliResult<Outcome> {
    match cmd {
        Command::Gen { params } => cmd_gen(ctx, params),
        Command::CheckFrame { system } => {
            let f: FrameSystem = ctx.read_json(system)?;
            let b = optimal_bounds(&f, tol)?;
            Ok(Outcome::new(b.is_frame, json!({ "dim": f.dim(), "len": f.len(), "bounds": to_value(&b) })))
        }
        Command::CheckTheta { system, theta, sub } => {
            let f: FrameSystem = ctx.read_json(system)?;
            let t: Operator = ctx.read_json(theta)?;
            let p = ctx.subspace(sub, f.dim())?;
            let r = match &p {
                Some(p) => check_theta_frame_on(&f, &t, p, tol)?,
                None => check_theta_frame(&f, &t, tol)?,
            };
            let mut v = json!({ "report": to_value(&r), "restricted": p.is_some() });
            if p.is_none() {
                let tight = theta_tight_check(&f, &t, tol)?;
                v["theta_tight"] = json!({
                    "is_theta_tight": tight.is_theta_tight,
                    "alpha0": tight.alpha0,
                    "theta_is_identity": tight.theta_is_identity,
                });
            }
            Ok(Outcome::new(r.passes(), v))
        }
        Command::CheckK { system, k, sub } => {
            let f: FrameSystem = ctx.read_json(system)?;
            let kop: Operator = ctx.read_json(k)?;
            let r = match ctx.subspace(sub, f.dim())? {
                Some(p) => check_k_frame_on(&f, &kop, &p, tol)?,
                None => check_k_frame(&f, &kop, tol)?,
            };
            Ok(Outcome::new(r.degenerate || r.a_opt > tol.psd_floor, json!({ "report": to_value(&r) })))
        }
        Command::CheckHypo { operator, relative, sub } => {
            let t: Operator = ctx.read_json(operator)?;
            let p = ctx.subspace(sub, t.rows())?;
            let h = hyponormality(&t, tol, p.as_ref())?;
            let d = djordjevic_hyponormal(&t, tol)?;
            let mut v = json!({ "hyponormality": to_value(&h), "djordjevic": to_value(&d) });
            let passed = match relative {
                Some(path) => {
                    let t2: Operator = ctx.read_json(path)?;
                    let r = relative_hyponormality(&t, &t2, tol)?;
                    v["relative"] = to_value(&r);
                    r.holds
                }
                None => h.verdict(),
            };
            Ok(Outcome::new(passed, v))
        }
        Command::Douglas { t1, t2 } => {
            let a: Operator = ctx.read_json(t1)?;
            let b: Operator = ctx.read_json(t2)?;
            let r = douglas_check(&a, &b, tol)?;
            Ok(Outcome::new(r.consistent, json!({ "holds": r.holds(), "report": to_value(&r) })))
        }
        Command::Pinv { operator } => {
            let a: Operator = ctx.read_json(operator)?;
            let x = pinv(&a, tol)?;
            let res = penrose_residuals(&a, &x)?;
            let passed = res.max() <= PENROSE_TOL;
            let mut out = Outcome::new(
                passed,
                json!({
                    "rank": numerical_rank(&a, tol)?,
                    "penrose_residuals": to_value(&res),
                    "penrose_tolerance": PENROSE_TOL,
                    "pinv": to_value(&x),
                }),
            );
            out.artifact = Some(to_value(&x));
            Ok(out)
        }
        Command::CheckComb { spec } => cmd_check_comb(ctx, spec, tol),
        Command::VerifyExample { id } => cmd_verify_example(id, tol),
        Command::PropRun { suite: name, trial } => cmd_prop_run(name, *trial, seed, trials, tol),
    }
}

fn cmd_gen(ctx: &mut Ctx, path: &Path) -> CliResult<Outcome> {
    let params: WavePacketParams = ctx.read_json(path)?;
    let warnings = params.warnings();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let f = generate_system(&params)?;
    let system = to_value(&f);
    let mut out =
        Outcome::new(true, json!({ "dim": f.dim(), "len": f.len(), "warnings": warnings, "system": system.clone() }));
    out.artifact = Some(system);
    Ok(out)
}

#[derive(Deserialize)]
struct ComplexJson {
    re: f64,
    #[serde(default)]
    im: f64,
}

/// Input of `check-comb`.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CombSpec {
    /// `Φ_r = Σ_{i ∈ cell r} α_i f_i` against the system `f`.
    Partition {
        system: FrameSystem,
        theta: Operator,
        /// Cells of flat indices.
        #[serde(default)]
        cells: Option<Vec<Vec<usize>>>,
        /// Cells of `(j, k, m)` labels, for labelled systems.
        #[serde(default)]
        label_cells: Option<Vec<Vec<[i64; 3]>>>,
        /// One coefficient per system vector; all ones when omitted.
        #[serde(default)]
        coefficients: Option<Vec<ComplexJson>>,
    },
    /// `Σ_s α_s D T E ψ_s` over the labels of `params`.
    FiniteSum { params: WavePacketParams, spec: FiniteSumSpec, theta: Operator },
}

fn cmd_check_comb(ctx: &mut Ctx, path: &Path, tol: &Tolerance) -> CliResult<Outcome> {
    match ctx.read_json::<CombSpec>(path)? {
        CombSpec::Partition { system, theta, cells, label_cells, coefficients } => {
            let coefficients: Vec<C64> = match coefficients {
                Some(c) => c.into_iter().map(|z| C64::new(z.re, z.im)).collect(),
                None => vec![C64::new(1.0, 0.0); system.len()],
            };
            let pc = match (cells, label_cells) {
                (Some(c), None) => PartitionCombination::new(c, coefficients),
                (None, Some(l)) => PartitionCombination::from_labels(&system, &l, coefficients)?,
                _ => return Err(CliError::Input("give exactly one of \"cells\" and \"label_cells\"".into())),
            };
            let phi = partition_combination(&system, &pc)?;
            let r = theorem_4_1_check(&phi, &system, &theta, Some(&pc.coefficient_map(system.len())), tol)?;
            let mut out = Outcome::new(r.agrees, json!({ "kind": "partition", "theorem_4_1": to_value(&r) }));
            out.artifact = Some(to_value(&phi));
            Ok(out)
        }
        CombSpec::FiniteSum { params, spec, theta } => {
            let r = theorem_4_2_check(&spec, &params, &theta, tol)?;
            let fp = framekit::wavepacket::finite_sum_system(&spec, &params)?;
            let mut out = Outcome::new(r.agrees, json!({ "kind": "finite_sum", "theorem_4_2": to_value(&r) }));
            out.artifact = Some(to_value(&fp));
            Ok(out)
        }
    }
}

fn cmd_verify_example(id: &str, tol: &Tolerance) -> CliResult<Outcome> {
    let ids: Vec<&str> = if id == "all" { EXAMPLE_IDS.to_vec() } else { vec![id] };
    let mut outcomes = Vec::with_capacity(ids.len());
    let mut passed = true;
    for id in ids {
        let o = match verify_example(id, tol) {
            Err(Error::UnknownExample(_)) => {
                return Err(CliError::Input(format!("unknown example {id:?}; known: {}, all", EXAMPLE_IDS.join(", "))))
            }
            other => other?,
        };
        if let Some(c) = o.first_failure() {
            eprintln!("example {id}: check {:?} failed: value {} expected {}", c.name, c.value, c.expected);
        }
        passed &= o.passed();
        outcomes.push(to_value(&o));
    }
    Ok(Outcome::new(passed, json!({ "examples": outcomes })))
}

#[derive(Serialize)]
struct TrialFailure {
    trial: u64,
    trial_seed: u64,
    case: String,
    detail: String,
    replay: String,
}

fn cmd_prop_run(name: &str, only: Option<u64>, seed: u64, trials: u64, tol: &Tolerance) -> CliResult<Outcome> {
    let f = suite(name).ok_or_else(|| {
        let known: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
        CliError::Input(format!("unknown suite {name:?}; known: {}", known.join(", ")))
    })?;
    let indices: Vec<u64> = match only {
        Some(t) => vec![t],
        None => (0..trials).collect(),
    };
    let results = run_parallel(&indices, |t| run_trial(f, seed, t, tol));
    let mut failures = Vec::new();
    let mut cases: std::collections::BTreeMap<String, u64> = Default::default();
    for (&t, r) in indices.iter().zip(results) {
        let o = r.unwrap_or_else(|e| TrialOutcome { passed: false, case: "error".into(), detail: e.to_string() });
        *cases.entry(o.case.clone()).or_default() += 1;
        if !o.passed {
            eprintln!("{name} trial {t} failed ({}): {}", o.case, o.detail);
            failures.push(TrialFailure {
                trial: t,
                trial_seed: trial_seed(seed, t),
                replay: format!("framekit prop-run {name} --seed {seed} --trial {t}"),
                case: o.case,
                detail: o.detail,
            });
        }
    }
    Ok(Outcome::new(
        failures.is_empty(),
        json!({
            "suite": name,
            "trials": indices.len(),
            "failed": failures.len(),
            "cases": cases,
            "failures": failures,
        }),
    ))
}

/// Evaluate `f` over `items` on all available cores, preserving order.
/// Each trial owns its random stream, so results do not depend on scheduling.
fn run_parallel<T: Send>(items: &[u64], f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> =
            items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(|&t| f(t)).collect::<Vec<T>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("trial worker panicked")).collect()
    })
}
