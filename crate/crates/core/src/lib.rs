//! Structured disturbance covariance estimation for adaptive radar.
//!
//! The sample covariance matrix is projected onto the set of matrices made of a
//! positive semidefinite coloured part plus a white-noise floor of at least
//! `sigma2`, with condition number at most `kappa`. The projection under any
//! unitarily invariant norm is a shrinkage estimator: it keeps the sample
//! eigenvectors and remaps the eigenvalues through a one-parameter family whose
//! parameter solves a scalar convex problem.
//!
//! Modules:
//! - [`linalg`]: Hermitian matrices, eigendecomposition, sampling factors, weight solves.
//! - [`projector`]: the projection itself, closed-form Frobenius and spectral solvers,
//!   a generic gauge solver and a brute-force grid oracle.
//! - [`baselines`]: SCM, NSCM and the fixed-point estimator.
//! - [`scenarios`]: jammer and clutter covariance models, steering vectors, samplers.
//! - [`harness`]: Monte Carlo SINR benchmarking and result files.

// `!(x > 0.0)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod projector;
pub mod scenarios;
pub mod tolerances;

pub use error::{Error, Result};
pub use linalg::{HermitianMatrix, SpectralDecomposition};
pub use num_complex::Complex64;

/// Complex column vector used for snapshots, steering vectors and weights.
pub type CVector = nalgebra::DVector<Complex64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

/// Converts a power in dB to linear units.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
