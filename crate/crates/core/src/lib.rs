//! Finite-dimensional quantum optimal transport.
//!
//! * [`linalg`]: dense complex matrices, Jacobi eigensolver, PSD powers.
//! * [`quantum`]: density matrices, cost observables, Kraus/Choi channels.
//! * [`kms`]: KMS inner product and the transport cost of a channel.
//! * [`integral`]: the `L_v`/`R_v` operators and the integral representation
//!   of the cost against `2 sech(2 pi t) dt`.
//! * [`io`]: JSON instance files.
//! * [`optimizer`]: the quantum Wasserstein divergence as an SDP over Choi matrices.
//! * [`harness`]: seeded experiment sweeps backing the `qot` CLI.

pub mod error;
pub mod harness;
pub mod integral;
pub mod io;
pub mod kms;
pub mod linalg;
pub mod optimizer;
pub mod quantum;
pub mod tolerances;

pub use error::{QotError, Result};
