//! Seeded experiment sweeps behind the `qot` command line.
//!
//! Sample `i` of a sweep with master seed `s` draws all of its randomness from
//! `derive_seed(s, i)`, so records do not depend on the number of worker
//! threads or on scheduling. Records come back in sample order.

mod config;
mod sweeps;

pub use config::{
    CostFamily, ExperimentConfig, ExperimentKind, OutputFormat, QuadratureParams, MAX_DIM, SCHEMA_VERSION,
};
pub use sweeps::{
    integral_sample, selfdist_sample, subadd_sample, triangle_sample, IntegralRecord, Outcome, SampleRecord,
    SelfdistRecord, SubaddRecord, TriangleRecord,
};

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const SOLVER: i32 = 3;
}

/// Exit code for an error raised before or outside a sweep.
pub fn exit_code_for(e: &QotError) -> i32 {
    if e.is_solver_failure() {
        exit::SOLVER
    } else {
        exit::INPUT
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub experiment: String,
    pub samples: usize,
    pub passed: usize,
    pub violations: usize,
    pub warnings: usize,
    pub solver_errors: usize,
    pub errors: usize,
    /// Largest key value (gap, violation, divergence); smallest for slacks.
    pub worst: Option<f64>,
    pub tolerance: f64,
}

impl Summary {
    /// Solver failures take precedence over property violations, which take
    /// precedence over sample errors.
    pub fn exit_code(&self) -> i32 {
        if self.solver_errors > 0 {
            exit::SOLVER
        } else if self.violations > 0 {
            exit::VIOLATION
        } else if self.errors > 0 {
            exit::INPUT
        } else {
            exit::PASS
        }
    }

    pub fn line(&self) -> String {
        let worst = self.worst.map_or_else(|| "n/a".to_string(), |w| format!("{w:.3e}"));
        format!(
            "{}: {} samples, {} passed, {} violations, {} warnings, {} solver errors, {} errors; worst {} (tol {:.1e})",
            self.experiment,
            self.samples,
            self.passed,
            self.violations,
            self.warnings,
            self.solver_errors,
            self.errors,
            worst,
            self.tolerance
        )
    }
}

fn summarise<R: SampleRecord>(cfg: &ExperimentConfig, records: &[R]) -> Summary {
    let count = |o: Outcome| records.iter().filter(|r| r.outcome() == o).count();
    let lower_is_worse = cfg.experiment == ExperimentKind::SubaddSweep;
    let worst = records
        .iter()
        .filter(|r| matches!(r.outcome(), Outcome::Pass | Outcome::Violation))
        .map(|r| r.key_value())
        .fold(None, |acc: Option<f64>, v| match acc {
            None => Some(v),
            Some(a) if lower_is_worse => Some(a.min(v)),
            Some(a) => Some(a.max(v)),
        });
    Summary {
        schema_version: SCHEMA_VERSION,
        experiment: cfg.experiment.name().to_string(),
        samples: records.len(),
        passed: count(Outcome::Pass),
        violations: count(Outcome::Violation),
        warnings: count(Outcome::Warning),
        solver_errors: count(Outcome::SolverError),
        errors: count(Outcome::Error),
        worst,
        tolerance: cfg.tolerance(),
    }
}

/// Result document of one sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport<R> {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub summary: Summary,
    pub records: Vec<R>,
}

impl<R: SampleRecord> SweepReport<R> {
    /// Zeroes the wall-clock fields.
    pub fn without_timing(mut self) -> Self {
        self.records.iter_mut().for_each(SampleRecord::clear_timing);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are plain data")
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(w);
        for r in &self.records {
            writer.serialize(r).map_err(|e| QotError::Parse(format!("CSV output: {e}")))?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Writes the report in the configured format to `out` or stdout.
    pub fn emit(&self) -> Result<()> {
        let mut buf = Vec::new();
        match self.config.format {
            OutputFormat::Json => {
                buf.extend_from_slice(self.to_json().as_bytes());
                buf.push(b'\n');
            }
            OutputFormat::Csv => self.write_csv(&mut buf)?,
        }
        match &self.config.out {
            Some(path) => std::fs::write(path, buf)?,
            None => std::io::stdout().write_all(&buf)?,
        }
        Ok(())
    }
}

fn run_parallel<R, F>(cfg: &ExperimentConfig, sample: F) -> Result<Vec<R>>
where
    R: SampleRecord,
    F: Fn(usize) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| QotError::InvalidParameters(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..cfg.samples).into_par_iter().map(&sample).collect()))
}

fn sweep<R, F>(cfg: &ExperimentConfig, sample: F) -> Result<SweepReport<R>>
where
    R: SampleRecord,
    F: Fn(usize) -> R + Sync + Send,
{
    let records = run_parallel(cfg, sample)?;
    Ok(SweepReport { schema_version: SCHEMA_VERSION, config: cfg.clone(), summary: summarise(cfg, &records), records })
}

pub fn run_integral_check(cfg: &ExperimentConfig) -> Result<SweepReport<IntegralRecord>> {
    let master = cfg.validate()?;
    let rule = cfg.quadrature.rule()?;
    sweep(cfg, |i| integral_sample(cfg, &rule, master, i))
}

pub fn run_subadd_sweep(cfg: &ExperimentConfig) -> Result<SweepReport<SubaddRecord>> {
    let master = cfg.validate()?;
    sweep(cfg, |i| subadd_sample(cfg, master, i))
}

pub fn run_triangle_sweep(cfg: &ExperimentConfig) -> Result<SweepReport<TriangleRecord>> {
    let master = cfg.validate()?;
    sweep(cfg, |i| triangle_sample(cfg, master, i))
}

pub fn run_selfdist(cfg: &ExperimentConfig) -> Result<SweepReport<SelfdistRecord>> {
    let master = cfg.validate()?;
    sweep(cfg, |i| selfdist_sample(cfg, master, i))
}

/// Runs the configured experiment, emits its report and returns the summary.
pub fn run_and_emit(cfg: &ExperimentConfig) -> Result<Summary> {
    fn finish<R: SampleRecord>(r: SweepReport<R>) -> Result<Summary> {
        r.emit()?;
        Ok(r.summary)
    }
    match cfg.experiment {
        ExperimentKind::IntegralCheck => finish(run_integral_check(cfg)?),
        ExperimentKind::SubaddSweep => finish(run_subadd_sweep(cfg)?),
        ExperimentKind::TriangleSweep => finish(run_triangle_sweep(cfg)?),
        ExperimentKind::Selfdist => finish(run_selfdist(cfg)?),
    }
}
