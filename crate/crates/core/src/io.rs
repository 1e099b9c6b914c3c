//! JSON instance files.
//!
//! ```json
//! {"type": "density_matrix", "dim": 2, "data": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}
//! ```
//!
//! Matrices are row lists of `[re, im]` pairs. Observables and Kraus families
//! carry a list of matrices; channels and Choi matrices add `dim_out`.
//! Floats are written in shortest round-trip form, so write-then-read is exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::quantum::{ChoiMatrix, DensityMatrix, KrausChannel, ObservableTuple};

pub type MatrixData = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Instance {
    DensityMatrix { dim: usize, data: MatrixData },
    Observables { dim: usize, data: Vec<MatrixData> },
    KrausChannel { dim: usize, dim_out: usize, data: Vec<MatrixData> },
    ChoiMatrix { dim: usize, dim_out: usize, data: MatrixData },
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::DensityMatrix { .. } => "density_matrix",
            Self::Observables { .. } => "observables",
            Self::KrausChannel { .. } => "kraus_channel",
            Self::ChoiMatrix { .. } => "choi_matrix",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instances are plain data")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(fs::write(path, self.to_json() + "\n")?)
    }
}

pub fn matrix_to_data(m: &ComplexMatrix) -> MatrixData {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

pub fn matrix_from_data(data: &MatrixData, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if data.len() != rows || data.iter().any(|row| row.len() != cols) {
        return Err(dim_mismatch(format!("expected a {rows}x{cols} matrix")));
    }
    let flat = data.iter().flatten().map(|[re, im]| C64::new(*re, *im)).collect();
    ComplexMatrix::from_vec(rows, cols, flat)
}

fn wrong_kind(expected: &str, got: &Instance) -> crate::QotError {
    crate::QotError::Parse(format!("expected a {expected} instance, found {}", got.kind()))
}

/// Conversion to and from [`Instance`], validating on the way in.
pub trait JsonInstance: Sized {
    fn to_instance(&self) -> Instance;
    fn from_instance(inst: &Instance) -> Result<Self>;

    fn to_json(&self) -> String {
        self.to_instance().to_json()
    }

    fn from_json(s: &str) -> Result<Self> {
        Self::from_instance(&Instance::from_json(s)?)
    }

    fn read(path: &Path) -> Result<Self> {
        Self::from_instance(&Instance::read(path)?)
    }

    fn write(&self, path: &Path) -> Result<()> {
        self.to_instance().write(path)
    }
}

impl JsonInstance for DensityMatrix {
    fn to_instance(&self) -> Instance {
        Instance::DensityMatrix { dim: self.dim(), data: matrix_to_data(self.matrix()) }
    }

    fn from_instance(inst: &Instance) -> Result<Self> {
        match inst {
            Instance::DensityMatrix { dim, data } => DensityMatrix::new(matrix_from_data(data, *dim, *dim)?),
            other => Err(wrong_kind("density_matrix", other)),
        }
    }
}

impl JsonInstance for ObservableTuple {
    fn to_instance(&self) -> Instance {
        Instance::Observables { dim: self.dim(), data: self.iter().map(matrix_to_data).collect() }
    }

    fn from_instance(inst: &Instance) -> Result<Self> {
        match inst {
            Instance::Observables { dim, data } => {
                let entries = data.iter().map(|d| matrix_from_data(d, *dim, *dim)).collect::<Result<_>>()?;
                ObservableTuple::new(*dim, entries)
            }
            other => Err(wrong_kind("observables", other)),
        }
    }
}

impl JsonInstance for KrausChannel {
    fn to_instance(&self) -> Instance {
        Instance::KrausChannel {
            dim: self.dim_in(),
            dim_out: self.dim_out(),
            data: self.kraus().iter().map(matrix_to_data).collect(),
        }
    }

    fn from_instance(inst: &Instance) -> Result<Self> {
        match inst {
            Instance::KrausChannel { dim, dim_out, data } => {
                let kraus = data.iter().map(|d| matrix_from_data(d, *dim, *dim_out)).collect::<Result<_>>()?;
                KrausChannel::new(kraus)
            }
            other => Err(wrong_kind("kraus_channel", other)),
        }
    }
}

impl JsonInstance for ChoiMatrix {
    fn to_instance(&self) -> Instance {
        Instance::ChoiMatrix { dim: self.dim_in(), dim_out: self.dim_out(), data: matrix_to_data(self.matrix()) }
    }

    fn from_instance(inst: &Instance) -> Result<Self> {
        match inst {
            Instance::ChoiMatrix { dim, dim_out, data } => {
                let n = dim * dim_out;
                ChoiMatrix::new(*dim, *dim_out, matrix_from_data(data, n, n)?)
            }
            other => Err(wrong_kind("choi_matrix", other)),
        }
    }
}
