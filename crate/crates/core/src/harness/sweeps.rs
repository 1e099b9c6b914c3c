//! One seeded sample per record. Every sample is a pure function of
//! `(config, master seed, index)`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{QotError, Result};
use crate::integral::{verify_integral_rep, verify_subadditivity, QuadratureRule};
use crate::optimizer::{divergence, SdpSolution, SolverStatus};
use crate::quantum::{derive_seed, marginal_pair, random_channel, random_state};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    /// The checked property failed beyond tolerance.
    Violation,
    /// A solve ended without status Optimal; excluded from pass/fail.
    Warning,
    /// The solver failed numerically.
    SolverError,
    /// The sample could not be built or evaluated.
    Error,
}

impl Outcome {
    fn from_error(e: &QotError) -> Self {
        if e.is_solver_failure() {
            Self::SolverError
        } else {
            Self::Error
        }
    }
}

/// Common view of the per-experiment records.
pub trait SampleRecord: Serialize + Send {
    fn outcome(&self) -> Outcome;
    /// The quantity compared against the tolerance.
    fn key_value(&self) -> f64;
    fn clear_timing(&mut self);
}

macro_rules! impl_record {
    ($t:ty, $key:ident) => {
        impl SampleRecord for $t {
            fn outcome(&self) -> Outcome {
                self.outcome
            }
            fn key_value(&self) -> f64 {
                self.$key
            }
            fn clear_timing(&mut self) {
                self.duration_us = 0;
            }
        }
    };
}

fn elapsed_us(start: Instant) -> u64 {
    start.elapsed().as_micros() as u64
}

/// `cost` versus its quadrature; passes when `gap <= tol (1 + cost)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralRecord {
    pub schema_version: u32,
    pub sample: usize,
    pub seed: u64,
    pub dim_in: usize,
    pub dim_out: usize,
    pub d: usize,
    pub rho_rank: usize,
    pub sigma_rank: usize,
    pub cost: f64,
    pub quadrature: f64,
    pub gap: f64,
    pub threshold: f64,
    pub outcome: Outcome,
    pub error: Option<String>,
    pub duration_us: u64,
}
impl_record!(IntegralRecord, gap);

pub fn integral_sample(cfg: &ExperimentConfig, rule: &QuadratureRule, master: u64, index: usize) -> IntegralRecord {
    let start = Instant::now();
    let seed = derive_seed(master, index as u64);
    let (n, m) = (cfg.dim, cfg.dim_out());
    let mut rec = IntegralRecord {
        schema_version: SCHEMA_VERSION,
        sample: index,
        seed,
        dim_in: n,
        dim_out: m,
        d: cfg.d,
        rho_rank: 0,
        sigma_rank: 0,
        cost: f64::NAN,
        quadrature: f64::NAN,
        gap: f64::NAN,
        threshold: f64::NAN,
        outcome: Outcome::Error,
        error: None,
        duration_us: 0,
    };
    let run = || -> Result<_> {
        let inst = marginal_pair(n, m, cfg.num_kraus(), cfg.rank_in(m), seed)?;
        let xs = cfg.cost_tuple(n, seed, 0)?;
        let ys = cfg.cost_tuple(m, seed, 1)?;
        let check = verify_integral_rep(&inst.channel, &inst.rho, &inst.sigma, &xs, &ys, rule)?;
        Ok((inst, check))
    };
    match run() {
        Ok((inst, check)) => {
            rec.rho_rank = inst.rho.rank();
            rec.sigma_rank = inst.sigma.rank();
            rec.cost = check.lhs;
            rec.quadrature = check.rhs;
            rec.gap = check.gap;
            rec.threshold = cfg.tolerance() * (1.0 + check.lhs.abs());
            rec.outcome = if check.gap <= rec.threshold { Outcome::Pass } else { Outcome::Violation };
        }
        Err(e) => {
            rec.outcome = Outcome::from_error(&e);
            rec.error = Some(e.to_string());
        }
    }
    rec.duration_us = elapsed_us(start);
    rec
}

/// Chain `rho3 -> rho2 -> rho1`; passes when `slack >= -tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubaddRecord {
    pub schema_version: u32,
    pub sample: usize,
    pub seed: u64,
    pub dim: usize,
    pub d: usize,
    pub c12: f64,
    pub c23: f64,
    pub c13: f64,
    pub slack: f64,
    pub outcome: Outcome,
    pub error: Option<String>,
    pub duration_us: u64,
}
impl_record!(SubaddRecord, slack);

pub fn subadd_sample(cfg: &ExperimentConfig, master: u64, index: usize) -> SubaddRecord {
    let start = Instant::now();
    let seed = derive_seed(master, index as u64);
    let n = cfg.dim;
    let mut rec = SubaddRecord {
        schema_version: SCHEMA_VERSION,
        sample: index,
        seed,
        dim: n,
        d: cfg.d,
        c12: f64::NAN,
        c23: f64::NAN,
        c13: f64::NAN,
        slack: f64::NAN,
        outcome: Outcome::Error,
        error: None,
        duration_us: 0,
    };
    let run = || -> Result<_> {
        let rho3 = random_state(n, cfg.rank_in(n), derive_seed(seed, 0))?;
        let ch23 = random_channel(n, n, cfg.num_kraus(), derive_seed(seed, 1))?;
        let ch12 = random_channel(n, n, cfg.num_kraus(), derive_seed(seed, 2))?;
        let rho2 = ch23.push_forward(&rho3)?;
        let rho1 = ch12.push_forward(&rho2)?;
        let xs1 = cfg.cost_tuple(n, seed, 0)?;
        let xs2 = cfg.cost_tuple(n, seed, 1)?;
        let xs3 = cfg.cost_tuple(n, seed, 2)?;
        verify_subadditivity(&ch12, &ch23, &rho1, &rho2, &rho3, &xs1, &xs2, &xs3)
    };
    match run() {
        Ok(r) => {
            rec.c12 = r.c12;
            rec.c23 = r.c23;
            rec.c13 = r.c13;
            rec.slack = r.slack;
            rec.outcome = if r.slack >= -cfg.tolerance() { Outcome::Pass } else { Outcome::Violation };
        }
        Err(e) => {
            rec.outcome = Outcome::from_error(&e);
            rec.error = Some(e.to_string());
        }
    }
    rec.duration_us = elapsed_us(start);
    rec
}

/// Three solves on a seeded triple; passes when `w13 - w12 - w23 <= tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleRecord {
    pub schema_version: u32,
    pub sample: usize,
    pub seed: u64,
    pub dim: usize,
    pub d: usize,
    pub w12: f64,
    pub w23: f64,
    pub w13: f64,
    pub violation: f64,
    pub all_optimal: bool,
    pub iterations: usize,
    pub outcome: Outcome,
    pub error: Option<String>,
    pub duration_us: u64,
}
impl_record!(TriangleRecord, violation);

pub fn triangle_sample(cfg: &ExperimentConfig, master: u64, index: usize) -> TriangleRecord {
    let start = Instant::now();
    let seed = derive_seed(master, index as u64);
    let n = cfg.dim;
    let mut rec = TriangleRecord {
        schema_version: SCHEMA_VERSION,
        sample: index,
        seed,
        dim: n,
        d: cfg.d,
        w12: f64::NAN,
        w23: f64::NAN,
        w13: f64::NAN,
        violation: f64::NAN,
        all_optimal: false,
        iterations: 0,
        outcome: Outcome::Error,
        error: None,
        duration_us: 0,
    };
    let run = || -> Result<[SdpSolution; 3]> {
        let states =
            (0..3).map(|k| random_state(n, cfg.rank_in(n), derive_seed(seed, k))).collect::<Result<Vec<_>>>()?;
        let xs = cfg.cost_tuple(n, seed, 0)?;
        let w = |a: usize, b: usize| divergence(&states[a], &states[b], &xs, &cfg.solver);
        Ok([w(0, 1)?, w(1, 2)?, w(0, 2)?])
    };
    match run() {
        Ok([s12, s23, s13]) => {
            rec.w12 = s12.divergence;
            rec.w23 = s23.divergence;
            rec.w13 = s13.divergence;
            rec.violation = rec.w13 - rec.w12 - rec.w23;
            rec.iterations = s12.iterations + s23.iterations + s13.iterations;
            rec.all_optimal = [&s12, &s23, &s13].iter().all(|s| s.status == SolverStatus::Optimal);
            rec.outcome = if !rec.all_optimal {
                Outcome::Warning
            } else if rec.violation <= cfg.tolerance() {
                Outcome::Pass
            } else {
                Outcome::Violation
            };
        }
        Err(e) => {
            rec.outcome = Outcome::from_error(&e);
            rec.error = Some(e.to_string());
        }
    }
    rec.duration_us = elapsed_us(start);
    rec
}

/// `W(rho, rho)`; passes when the divergence is at most `tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfdistRecord {
    pub schema_version: u32,
    pub sample: usize,
    pub seed: u64,
    pub dim: usize,
    pub d: usize,
    pub rank: usize,
    pub optimal_cost: f64,
    pub divergence: f64,
    pub status: Option<SolverStatus>,
    pub iterations: usize,
    pub outcome: Outcome,
    pub error: Option<String>,
    pub duration_us: u64,
}
impl_record!(SelfdistRecord, divergence);

pub fn selfdist_sample(cfg: &ExperimentConfig, master: u64, index: usize) -> SelfdistRecord {
    let start = Instant::now();
    let seed = derive_seed(master, index as u64);
    let n = cfg.dim;
    let mut rec = SelfdistRecord {
        schema_version: SCHEMA_VERSION,
        sample: index,
        seed,
        dim: n,
        d: cfg.d,
        rank: cfg.rank_in(n),
        optimal_cost: f64::NAN,
        divergence: f64::NAN,
        status: None,
        iterations: 0,
        outcome: Outcome::Error,
        error: None,
        duration_us: 0,
    };
    let run = || -> Result<SdpSolution> {
        let rho = random_state(n, cfg.rank_in(n), derive_seed(seed, 0))?;
        let xs = cfg.cost_tuple(n, seed, 0)?;
        divergence(&rho, &rho, &xs, &cfg.solver)
    };
    match run() {
        Ok(sol) => {
            rec.optimal_cost = sol.optimal_cost;
            rec.divergence = sol.divergence;
            rec.status = Some(sol.status);
            rec.iterations = sol.iterations;
            rec.outcome = if sol.status != SolverStatus::Optimal {
                Outcome::Warning
            } else if sol.divergence <= cfg.tolerance() {
                Outcome::Pass
            } else {
                Outcome::Violation
            };
        }
        Err(e) => {
            rec.outcome = Outcome::from_error(&e);
            rec.error = Some(e.to_string());
        }
    }
    rec.duration_us = elapsed_us(start);
    rec
}
