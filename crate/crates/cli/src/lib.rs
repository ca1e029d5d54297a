//! `robust-pcsp`: solve, round, sweep, check polymorphisms, find separation
//! weights, and generate or verify the integrality gap instance.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when a solve does not
//! converge or a verification fails. Output files are written only after the
//! whole command succeeded or produced its final report.

pub mod config;
pub mod csv;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use basic_sdp::{
    build_relaxation, parse_solution, serialize_solution, solve_sdp, verify_solution, Method, SolveOptions,
};
use clap::{Args, Parser, Subcommand};
use pcsp_core::{generate, Instance, Template};
use polymorphism::{check_template, make_named_operation, Family};
use rounding::{estimate_loss, RoundSpec, Scheme};
use separation::{
    certify_separable, find_argmax_separating_matrix, find_majority_weights, parse_certificates,
    serialize_certificates, CertificateEntry, CertificateRecord, Certification, SeparabilityCertificate, WeightMatrix,
};

use config::{pick, ExperimentConfig};
use csv::{ReportRow, TRIALS_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    /// The command ran but its result did not pass.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Failed(_) => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "robust-pcsp", version, about = "Robust PCSP toolkit: Basic SDP, rounding and integrality gaps")]
pub struct Cli {
    /// JSON file with default values for any flag; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Basic SDP of an instance and write the solution.
    Solve(SolveArgs),
    /// Round a solution and estimate the loss over many trials.
    Round(RoundArgs),
    /// Planted instances over an epsilon grid: solve, round, one CSV row each.
    Sweep(SweepArgs),
    /// Check a named operation against every pair of a template.
    CheckPolymorphism(PolyArgs),
    /// Separation weights for one tuple, or a full separability certificate.
    FindWeights(WeightArgs),
    /// Sample the 1-in-3 vs NAE gap instance and its SDP witness.
    GapGen(GapArgs),
    /// Rebuild a gap instance and check its witness file.
    VerifyWitness(VerifyArgs),
}

#[derive(Debug, Default, Args)]
pub struct SolverFlags {
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// lowrank | admm
    #[arg(long)]
    pub method: Option<String>,
    /// Residual at which the low-rank method repairs its point.
    #[arg(long)]
    pub handover: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct InstanceFlags {
    /// Instance JSON.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// 2-SAT in DIMACS CNF, as an alternative to --instance.
    #[arg(long)]
    pub dimacs: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InstanceFlags,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Solution JSON (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct RoundArgs {
    #[command(flatten)]
    pub input: InstanceFlags,
    /// Solution JSON; solved on the fly when absent.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// cmm | separable | independent | correlated
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Certificate JSON for the separable scheme; computed when absent.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Per-trial CSV (trial, weak_value, seed).
    #[arg(long)]
    pub trials_csv: Option<PathBuf>,
    /// Report CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Default, Args)]
pub struct SweepArgs {
    /// two-sat | unique-games
    #[arg(long)]
    pub problem: Option<String>,
    /// Comma-separated epsilons.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Alphabet size for unique games.
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Default, Args)]
pub struct PolyArgs {
    /// Template name (see `zoo::NAMES`).
    #[arg(long)]
    pub template: Option<String>,
    /// Take the template from an instance file instead.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// maj | at | parity | plurality
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub arity: Option<usize>,
    /// Check the folded, idempotent closure.
    #[arg(long)]
    pub fold: bool,
}

#[derive(Debug, Default, Args)]
pub struct WeightArgs {
    #[arg(long)]
    pub template: Option<String>,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub pair: Option<usize>,
    /// Target tuple outside the weak relation, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub b: Option<Vec<usize>>,
    /// majority | argmax
    #[arg(long)]
    pub kind: Option<String>,
    /// Certify separability of the whole template.
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Instance JSON; the witness goes to `<out>.witness.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

/// Parse arguments, run, print errors, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let command = match cli.command {
        Some(c) => c,
        None => match cfg.subcommand.as_deref() {
            Some("solve") => Command::Solve(Default::default()),
            Some("round") => Command::Round(Default::default()),
            Some("sweep") => Command::Sweep(Default::default()),
            Some("check-polymorphism") => Command::CheckPolymorphism(Default::default()),
            Some("find-weights") => Command::FindWeights(Default::default()),
            Some("gap-gen") => Command::GapGen(Default::default()),
            Some("verify-witness") => Command::VerifyWitness(Default::default()),
            Some(other) => return Err(usage(format!("unknown subcommand {other:?} in config"))),
            None => return Err(usage("no subcommand given (flag or config \"subcommand\")")),
        },
    };
    match command {
        Command::Solve(a) => solve(&a, &cfg),
        Command::Round(a) => round(&a, &cfg),
        Command::Sweep(a) => sweep(&a, &cfg),
        Command::CheckPolymorphism(a) => check_polymorphism(&a, &cfg),
        Command::FindWeights(a) => find_weights(&a, &cfg),
        Command::GapGen(a) => gap_gen(&a, &cfg),
        Command::VerifyWitness(a) => verify_witness(&a, &cfg),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn load_instance(flags: &InstanceFlags, cfg: &ExperimentConfig) -> Result<(Template, Instance)> {
    if let Some(p) = pick(&flags.instance, &cfg.instance) {
        return pcsp_core::io::parse_instance(&read(&p)?).map_err(|e| usage(format!("{}: {e}", p.display())));
    }
    if let Some(p) = pick(&flags.dimacs, &cfg.dimacs) {
        let text = String::from_utf8(read(&p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        return pcsp_core::dimacs::parse_dimacs_2sat(&text).map_err(|e| usage(format!("{}: {e}", p.display())));
    }
    Err(usage("--instance or --dimacs is required"))
}

fn probability(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(usage(format!("{name} must lie in (0, 1), got {x}")))
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("{name} must be positive, got {x}")))
    }
}

fn solver_options(f: &SolverFlags, cfg: &ExperimentConfig, default_handover: Option<f64>) -> Result<SolveOptions> {
    let d = SolveOptions::default();
    let tol = positive("tol", pick(&f.tol, &cfg.tol).unwrap_or(d.tol))?;
    let method = match pick(&f.method, &cfg.method).as_deref() {
        None | Some("lowrank") => Method::LowRank,
        Some("admm") => Method::Admm,
        Some(m) => return Err(usage(format!("unknown method {m:?} (lowrank | admm)"))),
    };
    let handover = pick(&f.handover, &cfg.handover).or(default_handover).unwrap_or(tol);
    Ok(SolveOptions {
        tol,
        max_iter: pick(&f.max_iter, &cfg.max_iter).unwrap_or(d.max_iter),
        seed: pick(&f.seed, &cfg.seed).unwrap_or(d.seed),
        method,
        handover: positive("handover", handover)?,
    })
}

fn solve(a: &SolveArgs, cfg: &ExperimentConfig) -> Result<()> {
    let (t, inst) = load_instance(&a.input, cfg)?;
    let opts = solver_options(&a.solver, cfg, None)?;
    let p = build_relaxation(&t, &inst).map_err(usage)?;
    let sol = solve_sdp(&p, &opts).map_err(|e| CliError::Failed(e.to_string()))?;
    let check = verify_solution(&t, &inst, &sol, opts.tol).map_err(|e| CliError::Failed(e.to_string()))?;
    emit(pick(&a.out, &cfg.out).as_deref(), &serialize_solution(&sol))?;
    eprintln!(
        "value {} converged {} iterations {} moment residual {} min eigenvalue {}",
        csv::g9(sol.value),
        sol.converged,
        sol.iterations,
        csv::g9(check.max_moment_residual),
        csv::g9(check.min_eigenvalue)
    );
    if !sol.converged || !check.passed {
        return Err(CliError::Failed(format!("solve did not converge to tol {}", opts.tol)));
    }
    Ok(())
}

fn parse_scheme(s: Option<String>, default: Scheme) -> Result<Scheme> {
    s.map_or(Ok(default), |s| s.parse::<Scheme>().map_err(usage))
}

fn certificate_for(t: &Template, path: Option<PathBuf>) -> Result<SeparabilityCertificate> {
    if let Some(p) = path {
        let recs = parse_certificates(&read(&p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        let entries = recs
            .into_iter()
            .map(|r| CertificateEntry { pair: r.pair, matrix: WeightMatrix { w: r.w, b: r.b } })
            .collect::<Vec<_>>();
        for e in &entries {
            let pair = t.pair(e.pair).map_err(usage)?;
            e.matrix.verify(pair).map_err(|m| usage(format!("{}: certificate fails: {m}", p.display())))?;
        }
        return Ok(SeparabilityCertificate { entries, alpha: 1.0 / t.domain.size_a as f64 });
    }
    match certify_separable(t).map_err(usage)? {
        Certification::Separable(c) => Ok(c),
        Certification::Inseparable { pair, b } => {
            Err(usage(format!("template is not argmax-separable: pair {pair}, tuple {b:?}")))
        }
    }
}

fn round(a: &RoundArgs, cfg: &ExperimentConfig) -> Result<()> {
    let (t, inst) = load_instance(&a.input, cfg)?;
    let scheme = parse_scheme(pick(&a.scheme, &cfg.scheme), Scheme::Cmm)?;
    let epsilon =
        probability("epsilon", pick(&a.epsilon, &cfg.epsilon).ok_or_else(|| usage("--epsilon is required"))?)?;
    let opts = solver_options(&a.solver, cfg, None)?;
    let spec = RoundSpec { scheme, epsilon, seed: opts.seed, trials: pick(&a.trials, &cfg.trials).unwrap_or(200) };
    let cert = match scheme {
        Scheme::Separable => Some(certificate_for(&t, pick(&a.certificate, &cfg.certificate))?),
        _ => None,
    };
    let sol = match pick(&a.solution, &cfg.solution) {
        Some(p) => parse_solution(&read(&p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => solve_sdp(&build_relaxation(&t, &inst).map_err(usage)?, &opts)
            .map_err(|e| CliError::Failed(e.to_string()))?,
    };
    let check = verify_solution(&t, &inst, &sol, opts.tol).map_err(usage)?;
    let converged = sol.converged && check.passed;
    let est = estimate_loss(&t, &inst, &sol, &spec, cert.as_ref()).map_err(usage)?;
    let row = ReportRow {
        epsilon,
        completeness: check.value,
        mean_loss: est.mean,
        stderr: est.std_error,
        seed: spec.seed,
        converged,
        tol: opts.tol,
        handover: opts.handover,
    };
    if let Some(p) = pick(&a.trials_csv, &cfg.trials_csv) {
        let mut s = String::from(TRIALS_HEADER);
        s.push('\n');
        for r in &est.records {
            s.push_str(&format!("{},{},{}\n", r.trial, csv::g9(r.weak_value), spec.seed));
        }
        write(&p, s.as_bytes())?;
    }
    emit(pick(&a.out, &cfg.out).as_deref(), csv::report(&[row]).as_bytes())?;
    if !converged {
        return Err(CliError::Failed(format!("solution fails verification at tol {}", opts.tol)));
    }
    Ok(())
}

/// Default residual for sweeps at which the low-rank solver repairs its
/// point; costs about this much completeness.
pub const SWEEP_HANDOVER: f64 = 1e-4;

fn sweep(a: &SweepArgs, cfg: &ExperimentConfig) -> Result<()> {
    let problem = pick(&a.problem, &cfg.problem).unwrap_or_else(|| "two-sat".into());
    let grid = pick(&a.grid, &cfg.grid).unwrap_or_else(|| vec![0.0025, 0.01, 0.04]);
    if grid.is_empty() {
        return Err(usage("empty epsilon grid"));
    }
    for &e in &grid {
        probability("grid value", e)?;
    }
    let opts = solver_options(&a.solver, cfg, Some(SWEEP_HANDOVER))?;
    let trials = pick(&a.trials, &cfg.trials).unwrap_or(200);
    let (scheme, n, m) = match problem.as_str() {
        "two-sat" => (Scheme::Cmm, 200, 1000),
        "unique-games" => (Scheme::Separable, 150, 900),
        other => return Err(usage(format!("unknown problem {other:?} (two-sat | unique-games)"))),
    };
    let scheme = parse_scheme(pick(&a.scheme, &cfg.scheme), scheme)?;
    let n = pick(&a.n, &cfg.n).unwrap_or(n);
    let m = pick(&a.m, &cfg.m).unwrap_or(m);
    let q = pick(&a.q, &cfg.q).unwrap_or(3);
    if n < 2 || m == 0 || !(2..=pcsp_core::MAX_DOMAIN).contains(&q) {
        return Err(usage("need n >= 2, m >= 1 and 2 <= q <= 8"));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &epsilon in &grid {
        let planted = match problem.as_str() {
            "two-sat" => generate::planted_two_sat(n, m, epsilon, opts.seed),
            _ => generate::planted_unique_games(q, n, m, epsilon, opts.seed),
        };
        let (t, inst) = (&planted.template, &planted.instance);
        let cert = match scheme {
            Scheme::Separable => Some(certificate_for(t, None)?),
            _ => None,
        };
        let sol = solve_sdp(&build_relaxation(t, inst).map_err(usage)?, &opts)
            .map_err(|e| CliError::Failed(e.to_string()))?;
        let check = verify_solution(t, inst, &sol, opts.tol).map_err(usage)?;
        let spec = RoundSpec { scheme, epsilon, seed: opts.seed, trials };
        let est = estimate_loss(t, inst, &sol, &spec, cert.as_ref()).map_err(usage)?;
        rows.push(ReportRow {
            epsilon,
            completeness: check.value,
            mean_loss: est.mean,
            stderr: est.std_error,
            seed: opts.seed,
            converged: sol.converged && check.passed,
            tol: opts.tol,
            handover: opts.handover,
        });
    }
    emit(pick(&a.out, &cfg.out).as_deref(), csv::report(&rows).as_bytes())?;
    if rows.iter().any(|r| !r.converged) {
        return Err(CliError::Failed("at least one solve did not converge".into()));
    }
    Ok(())
}

fn template_from(name: Option<String>, instance: Option<PathBuf>) -> Result<Template> {
    match (name, instance) {
        (Some(n), _) => pcsp_core::zoo::by_name(&n)
            .ok_or_else(|| usage(format!("unknown template {n:?}; known: {}", pcsp_core::zoo::NAMES.join(", ")))),
        (None, Some(p)) => pcsp_core::io::parse_instance(&read(&p)?)
            .map(|(t, _)| t)
            .map_err(|e| usage(format!("{}: {e}", p.display()))),
        (None, None) => Err(usage("--template or --instance is required")),
    }
}

fn json_line(v: serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_vec(&v).expect("json serializes");
    s.push(b'\n');
    s
}

fn check_polymorphism(a: &PolyArgs, cfg: &ExperimentConfig) -> Result<()> {
    let mut t = template_from(pick(&a.template, &cfg.template), pick(&a.instance, &cfg.instance))?;
    if a.fold || cfg.fold == Some(true) {
        t = pcsp_core::expand_folded_idempotent(&t).map_err(usage)?;
    }
    let family: Family =
        pick(&a.family, &cfg.family).ok_or_else(|| usage("--family is required"))?.parse().map_err(usage)?;
    let arity = pick(&a.arity, &cfg.arity).ok_or_else(|| usage("--arity is required"))?;
    let op = make_named_operation(family, arity, t.domain.size_a, None).map_err(usage)?;
    let verdict = check_template(&op, &t).map_err(usage)?;
    let failure = verdict.first_failure().map(|(pair, signs, w)| {
        let cx = w.counterexample.as_ref().expect("failed check carries a counterexample");
        serde_json::json!({ "pair": pair, "signs": signs, "columns": cx.columns, "output": cx.output })
    });
    let out = serde_json::json!({ "holds": verdict.holds(), "checks": verdict.checks.len(), "failure": failure });
    emit(None, &json_line(out))
}

fn find_weights(a: &WeightArgs, cfg: &ExperimentConfig) -> Result<()> {
    let t = template_from(pick(&a.template, &cfg.template), pick(&a.instance, &cfg.instance))?;
    let out = pick(&a.out, &cfg.out);
    if a.all || cfg.all == Some(true) {
        return match certify_separable(&t).map_err(usage)? {
            Certification::Separable(c) => {
                let recs: Vec<CertificateRecord> = c.entries.iter().map(CertificateRecord::from).collect();
                emit(out.as_deref(), &serialize_certificates(&recs))
            }
            Certification::Inseparable { pair, b } => {
                emit(None, &json_line(serde_json::json!({ "separable": false, "pair": pair, "b": b })))
            }
        };
    }
    let pair_index = pick(&a.pair, &cfg.pair).unwrap_or(0);
    let pair = t.pair(pair_index).map_err(usage)?;
    let b = pick(&a.b, &cfg.b).ok_or_else(|| usage("--b or --all is required"))?;
    let kind = pick(&a.kind, &cfg.kind).unwrap_or_else(|| if t.is_boolean() { "majority" } else { "argmax" }.into());
    let rec = match kind.as_str() {
        "majority" => {
            find_majority_weights(pair, &b).map_err(usage)?.map(|v| CertificateRecord::from_vector(pair_index, &v))
        }
        "argmax" => find_argmax_separating_matrix(pair, &b)
            .map_err(usage)?
            .map(|m| CertificateRecord::from(&CertificateEntry { pair: pair_index, matrix: m })),
        other => return Err(usage(format!("unknown kind {other:?} (majority | argmax)"))),
    };
    match rec {
        Some(r) => emit(out.as_deref(), &serialize_certificates(&[r])),
        None => emit(None, &json_line(serde_json::json!({ "feasible": false, "pair": pair_index, "b": b }))),
    }
}

fn gap_params(a: &GapArgs, cfg: &ExperimentConfig) -> Result<gap_at::GapParams> {
    let d = gap_at::GapParams::desk(0);
    let p = gap_at::GapParams {
        epsilon: pick(&a.epsilon, &cfg.epsilon).unwrap_or(d.epsilon),
        dim: pick(&a.dim, &cfg.dim).unwrap_or(d.dim),
        samples: pick(&a.samples, &cfg.samples).unwrap_or(d.samples),
        seed: pick(&a.seed, &cfg.seed).unwrap_or(d.seed),
    };
    p.validate().map_err(usage)?;
    Ok(p)
}

fn witness_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".witness.json");
    PathBuf::from(s)
}

fn summary(r: &gap_at::WitnessReport) -> String {
    let opt = |x: Option<f64>| x.map_or("none".into(), csv::g9);
    format!(
        "samples {} discarded {} ({}; asymptotic bound {} needs d >= {}) failures {} min value {} min entry {} max residual {}",
        r.samples,
        r.discarded,
        csv::g9(r.discard_fraction),
        csv::g9(r.discard_bound),
        csv::g9(r.required_dim),
        r.failures.len(),
        opt(r.min_value),
        opt(r.min_entry),
        csv::g9(r.max_moment_residual)
    )
}

fn gap_gen(a: &GapArgs, cfg: &ExperimentConfig) -> Result<()> {
    let params = gap_params(a, cfg)?;
    let out = pick(&a.out, &cfg.out).ok_or_else(|| usage("--out is required"))?;
    let inst = gap_at::sample_gap_instance(&params).map_err(usage)?;
    let witness = gap_at::build_sdp_witness(&inst, params.epsilon);
    let sidecar = gap_at::Sidecar::new(&inst, &witness);
    write(&out, &pcsp_core::io::serialize_instance(&inst.template, &inst.instance))?;
    write(&witness_path(&out), &sidecar.to_json())?;
    eprintln!("{}", summary(&witness.report));
    if !witness.report.valid() {
        return Err(CliError::Failed(format!(
            "{} kept constraints have an invalid witness",
            witness.report.failures.len()
        )));
    }
    Ok(())
}

/// Entries of `D''` must match the rebuilt witness to this much.
pub const WITNESS_MATCH_TOL: f64 = 1e-12;

fn verify_witness(a: &VerifyArgs, cfg: &ExperimentConfig) -> Result<()> {
    let inst_path = pick(&a.instance, &cfg.instance).ok_or_else(|| usage("--instance is required"))?;
    let wit_path = pick(&a.witness, &cfg.witness).unwrap_or_else(|| witness_path(&inst_path));
    let (t, inst) = pcsp_core::io::parse_instance(&read(&inst_path)?)
        .map_err(|e| usage(format!("{}: {e}", inst_path.display())))?;
    let sidecar =
        gap_at::parse_sidecar(&read(&wit_path)?).map_err(|e| usage(format!("{}: {e}", wit_path.display())))?;
    let gap = gap_at::sample_gap_instance(&sidecar.params).map_err(usage)?;
    if gap.template != t || gap.instance != inst {
        return Err(CliError::Failed("instance file does not match the witness parameters".into()));
    }
    let rebuilt = gap_at::build_sdp_witness(&gap, sidecar.epsilon);
    let mut problems = Vec::new();
    for (i, ((c, s), w)) in gap.constraints.iter().zip(&sidecar.constraints).zip(&rebuilt.constraints).enumerate() {
        if s.class != c.class.to_string() || s.discard != c.discard.map(|d| d.to_string()) {
            problems.push(format!("constraint {i}: class or discard tag differs"));
        } else if s.d2.iter().zip(&w.mixed).any(|(x, y)| (x - y).abs() > WITNESS_MATCH_TOL)
            || (s.value - w.value).abs() > WITNESS_MATCH_TOL
        {
            problems.push(format!("constraint {i}: D2 differs from the rebuilt witness"));
        }
    }
    for &i in &rebuilt.report.failures {
        problems.push(format!("constraint {i}: witness invalid"));
    }
    eprintln!("{}", summary(&rebuilt.report));
    if let Some(first) = problems.first() {
        return Err(CliError::Failed(format!("{} problems, first: {first}", problems.len())));
    }
    println!("witness verified: {} kept constraints valid", sidecar.params.samples - rebuilt.report.discarded);
    Ok(())
}
