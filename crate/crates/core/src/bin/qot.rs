//! `qot`: transport costs, divergences and seeded property sweeps.
//!
//! Exit codes: 0 pass, 1 property violation, 2 input or validation error,
//! 3 solver failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qot_core::harness::{
    exit, exit_code_for, run_and_emit, CostFamily, ExperimentConfig, ExperimentKind, OutputFormat, SCHEMA_VERSION,
};
use qot_core::io::JsonInstance;
use qot_core::kms::{cost, CostReport};
use qot_core::optimizer::{build_sdp, certify, solve, CertificateReport, SolverStatus};
use qot_core::quantum::{
    derive_seed, kraus_to_choi, marginal_pair, random_state, replacer_channel, DensityMatrix, KrausChannel,
    ObservableTuple,
};
use qot_core::{QotError, Result};

#[derive(Parser)]
#[command(name = "qot", version, about = "Quantum optimal transport toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transport cost of a channel between two states.
    Cost(CostArgs),
    /// Cost versus its integral representation over seeded instances.
    IntegralCheck(Common),
    /// Wasserstein divergence of two states with a certificate.
    Optimize(OptimizeArgs),
    /// Triangle inequality over seeded state triples.
    TriangleSweep(Common),
    /// Subadditivity of the cost over seeded channel chains.
    SubaddSweep(Common),
    /// Divergence of seeded states from themselves.
    Selfdist(Common),
    /// Write a seeded marginal-consistent instance as JSON files.
    Gen(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dim: Option<usize>,
    /// Output dimension of sampled channels.
    #[arg(long)]
    dim_out: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Cost tuple length.
    #[arg(long)]
    d: Option<usize>,
    /// pauli, random, or a path to an observables file.
    #[arg(long)]
    costs: Option<String>,
    /// Rank of sampled states.
    #[arg(long)]
    rank: Option<usize>,
    /// Kraus count of sampled channels.
    #[arg(long)]
    num_kraus: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Property tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Quadrature truncation `T`.
    #[arg(long = "quad-T")]
    quad_t: Option<f64>,
    #[arg(long)]
    quad_panels: Option<usize>,
    /// Primal and dual residual tolerance of the SDP solver.
    #[arg(long)]
    solver_tol: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct CostArgs {
    #[command(flatten)]
    common: Common,
    /// Target state file.
    #[arg(long)]
    rho: Option<PathBuf>,
    /// Source state file.
    #[arg(long)]
    sigma: Option<PathBuf>,
    /// Channel file, `identity`, or `replacer`.
    #[arg(long)]
    channel: Option<String>,
    /// Observables on the source side; the `--costs` tuple when omitted.
    #[arg(long)]
    ys: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    rho: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<PathBuf>,
    /// Also write the optimal Choi matrix here.
    #[arg(long)]
    choi_out: Option<PathBuf>,
}

impl Common {
    fn config(&self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        cfg.experiment = kind;
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        set!(dim, samples, d, jobs);
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.dim_out.is_some() {
            cfg.dim_out = self.dim_out;
        }
        if self.rank.is_some() {
            cfg.rank = self.rank;
        }
        if self.num_kraus.is_some() {
            cfg.num_kraus = self.num_kraus;
        }
        if self.tol.is_some() {
            cfg.tol = self.tol;
        }
        if let Some(c) = &self.costs {
            cfg.costs = CostFamily::parse(c);
        }
        if cfg.costs != CostFamily::Pauli && self.d.is_none() && self.config.is_none() {
            cfg.d = 2;
        }
        if let Some(p) = &self.out {
            cfg.out = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.format = match f {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            };
        }
        if let Some(t) = self.quad_t {
            cfg.quadrature.truncation = t;
        }
        if let Some(p) = self.quad_panels {
            cfg.quadrature.panels = p;
        }
        if let Some(t) = self.solver_tol {
            if !(t > 0.0) {
                return Err(QotError::InvalidParameters(format!("solver tolerance must be positive, got {t}")));
            }
            cfg.solver.tol_primal = t;
            cfg.solver.tol_dual = t;
        }
        Ok(cfg)
    }
}

fn json_only(cfg: &ExperimentConfig, command: &str) -> Result<()> {
    if cfg.format == OutputFormat::Csv {
        return Err(QotError::InvalidParameters(format!("{command} writes JSON only")));
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// States from files, or a seeded marginal instance.
fn load_states(
    cfg: &ExperimentConfig,
    rho: Option<&Path>,
    sigma: Option<&Path>,
) -> Result<(DensityMatrix, DensityMatrix, Option<KrausChannel>)> {
    match (rho, sigma) {
        (Some(r), Some(s)) => Ok((DensityMatrix::read(r)?, DensityMatrix::read(s)?, None)),
        (None, None) => {
            let seed = cfg
                .seed
                .ok_or_else(|| QotError::InvalidParameters("pass --rho and --sigma files, or --seed".into()))?;
            let inst = marginal_pair(cfg.dim, cfg.dim_out(), cfg.num_kraus(), cfg.rank_in(cfg.dim_out()), seed)?;
            Ok((inst.rho, inst.sigma, Some(inst.channel)))
        }
        _ => Err(QotError::InvalidParameters("--rho and --sigma go together".into())),
    }
}

#[derive(Serialize)]
struct CostOutput {
    schema_version: u32,
    #[serde(flatten)]
    report: CostReport,
}

fn cmd_cost(args: &CostArgs) -> Result<i32> {
    let cfg = args.common.config(ExperimentKind::IntegralCheck)?;
    json_only(&cfg, "cost")?;
    let (rho, sigma, seeded) = load_states(&cfg, args.rho.as_deref(), args.sigma.as_deref())?;
    let ch = match args.channel.as_deref() {
        Some("identity") => KrausChannel::identity(sigma.dim()),
        Some("replacer") => replacer_channel(&rho, sigma.dim())?,
        Some(path) => KrausChannel::read(Path::new(path))?,
        None => seeded.ok_or_else(|| QotError::InvalidParameters("--channel is required with state files".into()))?,
    };
    let sample_seed = cfg.seed.unwrap_or(0);
    let xs = cfg.cost_tuple(rho.dim(), sample_seed, 0)?;
    let ys = match &args.ys {
        Some(p) => ObservableTuple::read(p)?,
        None if sigma.dim() == rho.dim() => xs.clone(),
        None => cfg.cost_tuple(sigma.dim(), sample_seed, 1)?,
    };
    let report = cost(&ch, &rho, &sigma, &xs, &ys)?;
    emit_json(&CostOutput { schema_version: SCHEMA_VERSION, report }, cfg.out.as_deref())?;
    Ok(exit::PASS)
}

#[derive(Serialize)]
struct OptimizeOutput {
    schema_version: u32,
    optimal_cost: f64,
    divergence: f64,
    status: SolverStatus,
    iterations: usize,
    primal_residual: f64,
    dual_residual: f64,
    duality_gap: f64,
    certificate: CertificateReport,
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<i32> {
    let mut cfg = args.common.config(ExperimentKind::Selfdist)?;
    json_only(&cfg, "optimize")?;
    let (rho, sigma) = match (&args.rho, &args.sigma) {
        (Some(r), Some(s)) => (DensityMatrix::read(r)?, DensityMatrix::read(s)?),
        (None, None) => {
            let seed = cfg
                .seed
                .ok_or_else(|| QotError::InvalidParameters("pass --rho and --sigma files, or --seed".into()))?;
            let rank = cfg.rank_in(cfg.dim);
            (random_state(cfg.dim, rank, derive_seed(seed, 0))?, random_state(cfg.dim, rank, derive_seed(seed, 1))?)
        }
        _ => return Err(QotError::InvalidParameters("--rho and --sigma go together".into())),
    };
    cfg.dim = rho.dim();
    let xs = cfg.cost_tuple(rho.dim(), cfg.seed.unwrap_or(0), 0)?;
    let problem = build_sdp(&rho, &sigma, &xs, &xs)?;
    let sol = solve(&problem, &cfg.solver)?;
    let certificate = certify(&sol, &problem);
    if let Some(p) = &args.choi_out {
        sol.choi.write(p)?;
    }
    let code = if sol.status != SolverStatus::Optimal {
        exit::SOLVER
    } else if !certificate.passed {
        exit::VIOLATION
    } else {
        exit::PASS
    };
    let out = OptimizeOutput {
        schema_version: SCHEMA_VERSION,
        optimal_cost: sol.optimal_cost,
        divergence: sol.divergence,
        status: sol.status,
        iterations: sol.iterations,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        duality_gap: sol.duality_gap,
        certificate,
    };
    emit_json(&out, cfg.out.as_deref())?;
    Ok(code)
}

fn cmd_sweep(common: &Common, kind: ExperimentKind) -> Result<i32> {
    let cfg = common.config(kind)?;
    let summary = run_and_emit(&cfg)?;
    eprintln!("{}", summary.line());
    Ok(summary.exit_code())
}

/// Writes `rho.json`, `sigma.json`, `channel.json`, `choi.json` and
/// `costs.json` (plus `costs_out.json` when the dimensions differ).
fn cmd_gen(common: &Common) -> Result<i32> {
    let cfg = common.config(ExperimentKind::IntegralCheck)?;
    json_only(&cfg, "gen")?;
    let seed = cfg.validate()?;
    let dir = cfg.out.clone().ok_or_else(|| QotError::InvalidParameters("gen needs --out DIR".into()))?;
    std::fs::create_dir_all(&dir)?;
    let inst = marginal_pair(cfg.dim, cfg.dim_out(), cfg.num_kraus(), cfg.rank_in(cfg.dim_out()), seed)?;
    inst.rho.write(&dir.join("rho.json"))?;
    inst.sigma.write(&dir.join("sigma.json"))?;
    inst.channel.write(&dir.join("channel.json"))?;
    kraus_to_choi(&inst.channel).write(&dir.join("choi.json"))?;
    cfg.cost_tuple(cfg.dim, seed, 0)?.write(&dir.join("costs.json"))?;
    if cfg.dim_out() != cfg.dim {
        cfg.cost_tuple(cfg.dim_out(), seed, 1)?.write(&dir.join("costs_out.json"))?;
    }
    eprintln!("wrote instance files to {}", dir.display());
    Ok(exit::PASS)
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Cost(a) => cmd_cost(a),
        Command::IntegralCheck(c) => cmd_sweep(c, ExperimentKind::IntegralCheck),
        Command::Optimize(a) => cmd_optimize(a),
        Command::TriangleSweep(c) => cmd_sweep(c, ExperimentKind::TriangleSweep),
        Command::SubaddSweep(c) => cmd_sweep(c, ExperimentKind::SubaddSweep),
        Command::Selfdist(c) => cmd_sweep(c, ExperimentKind::Selfdist),
        Command::Gen(c) => cmd_gen(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    ExitCode::from(code as u8)
}
