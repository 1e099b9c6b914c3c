use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};
use crate::integral::{build_quadrature, QuadratureRule, DEFAULT_ORDER, DEFAULT_PANELS, DEFAULT_TRUNCATION};
use crate::io::JsonInstance;
use crate::optimizer::SolverParams;
use crate::quantum::{derive_seed, random_observable, ObservableTuple};

/// Bumped whenever a record or summary column changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Largest supported dimension per tensor factor.
pub const MAX_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    IntegralCheck,
    SubaddSweep,
    TriangleSweep,
    Selfdist,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::IntegralCheck => "integral-check",
            Self::SubaddSweep => "subadd-sweep",
            Self::TriangleSweep => "triangle-sweep",
            Self::Selfdist => "selfdist",
        }
    }

    /// Property tolerance used when none is configured.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Self::IntegralCheck => 1e-6,
            Self::SubaddSweep => 1e-8,
            Self::TriangleSweep => 1e-5,
            Self::Selfdist => 1e-3,
        }
    }
}

/// Where cost observables come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostFamily {
    /// `(X, Y, Z)`; qubits only.
    Pauli,
    /// `d` seeded random Hermitian matrices per sample.
    Random,
    /// A fixed observables file.
    File(PathBuf),
}

impl CostFamily {
    /// `pauli`, `random`, or anything else as a path.
    pub fn parse(s: &str) -> Self {
        match s {
            "pauli" => Self::Pauli,
            "random" => Self::Random,
            path => Self::File(PathBuf::from(path)),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureParams {
    pub truncation: f64,
    pub panels: usize,
    pub order: usize,
}

impl Default for QuadratureParams {
    fn default() -> Self {
        Self { truncation: DEFAULT_TRUNCATION, panels: DEFAULT_PANELS, order: DEFAULT_ORDER }
    }
}

impl QuadratureParams {
    pub fn rule(&self) -> Result<QuadratureRule> {
        build_quadrature(self.truncation, self.panels, self.order)
    }
}

/// Everything that determines the records of a sweep. `jobs` and the output
/// settings do not affect record contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub dim: usize,
    /// Output dimension of sampled channels; `dim` when unset.
    pub dim_out: Option<usize>,
    /// Tuple length; 3 for Pauli costs.
    pub d: usize,
    pub costs: CostFamily,
    pub samples: usize,
    pub seed: Option<u64>,
    /// Rank of sampled states; full when unset.
    pub rank: Option<usize>,
    /// Kraus count of sampled channels; `dim` when unset.
    pub num_kraus: Option<usize>,
    /// Property tolerance; per-experiment default when unset.
    pub tol: Option<f64>,
    pub quadrature: QuadratureParams,
    pub solver: SolverParams,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::IntegralCheck,
            dim: 2,
            dim_out: None,
            d: 3,
            costs: CostFamily::Pauli,
            samples: 10,
            seed: None,
            rank: None,
            num_kraus: None,
            tol: None,
            quadrature: QuadratureParams::default(),
            solver: SolverParams::default(),
            jobs: 1,
            out: None,
            format: OutputFormat::Json,
        }
    }
}

fn invalid(msg: impl Into<String>) -> QotError {
    QotError::InvalidParameters(msg.into())
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out.unwrap_or(self.dim)
    }

    pub fn rank_in(&self, dim: usize) -> usize {
        self.rank.unwrap_or(dim).min(dim)
    }

    pub fn num_kraus(&self) -> usize {
        self.num_kraus.unwrap_or(self.dim)
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or_else(|| self.experiment.default_tolerance())
    }

    /// Checks ranges; returns the master seed.
    pub fn validate(&self) -> Result<u64> {
        let seed = self.seed.ok_or_else(|| invalid("a master seed is required (--seed)"))?;
        for (name, d) in [("dim", self.dim), ("dim_out", self.dim_out())] {
            if d == 0 || d > MAX_DIM {
                return Err(invalid(format!("{name} must be in 1..={MAX_DIM}, got {d}")));
            }
        }
        if self.dim_out() != self.dim && self.experiment != ExperimentKind::IntegralCheck {
            return Err(invalid("dim_out differs from dim only for integral-check"));
        }
        if self.d == 0 {
            return Err(invalid("tuple length d must be positive"));
        }
        if self.costs == CostFamily::Pauli && (self.dim != 2 || self.dim_out() != 2 || self.d > 3) {
            return Err(invalid("Pauli costs need dim 2 and d <= 3"));
        }
        if let Some(r) = self.rank {
            if r == 0 || r > self.dim {
                return Err(QotError::InvalidRank { rank: r, dim: self.dim });
            }
        }
        if self.num_kraus() == 0 || self.dim * self.num_kraus() < self.dim_out() {
            return Err(invalid(format!("{} Kraus operators cannot be unital here", self.num_kraus())));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid(format!("tolerance must be positive, got {t}")));
            }
        }
        if self.jobs == 0 {
            return Err(invalid("jobs must be at least 1"));
        }
        self.quadrature.rule()?;
        Ok(seed)
    }

    /// Cost tuple on `dim` for one sample; `stream` separates the tuples of
    /// different marginals in the same sample.
    pub fn cost_tuple(&self, dim: usize, sample_seed: u64, stream: u64) -> Result<ObservableTuple> {
        match &self.costs {
            CostFamily::Pauli => Ok(ObservableTuple::pauli().truncated(self.d)),
            CostFamily::Random => {
                let base = derive_seed(sample_seed, 100 + stream);
                let entries = (0..self.d as u64).map(|k| random_observable(dim, derive_seed(base, k))).collect();
                ObservableTuple::new(dim, entries)
            }
            CostFamily::File(path) => {
                let xs = ObservableTuple::read(path)?;
                if xs.dim() != dim {
                    return Err(crate::error::dim_mismatch(format!(
                        "observables file has dim {}, sweep needs {dim}",
                        xs.dim()
                    )));
                }
                Ok(xs)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_round_trip() {
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::TriangleSweep,
            seed: Some(7),
            costs: CostFamily::File("obs.json".into()),
            ..Default::default()
        };
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&s).unwrap(), cfg);
        let partial: ExperimentConfig =
            serde_json::from_str(r#"{"experiment": "selfdist", "seed": 3, "samples": 4}"#).unwrap();
        assert_eq!(partial.samples, 4);
        assert_eq!(partial.dim, 2);
    }

    #[test]
    fn validation() {
        let base = ExperimentConfig { seed: Some(1), ..Default::default() };
        assert!(base.validate().is_ok());
        assert!(ExperimentConfig { seed: None, ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { dim: 3, ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { dim: 3, costs: CostFamily::Random, ..base.clone() }.validate().is_ok());
        assert!(ExperimentConfig { rank: Some(3), ..base.clone() }.validate().is_err());
        assert!(ExperimentConfig { jobs: 0, ..base }.validate().is_err());
    }
}
