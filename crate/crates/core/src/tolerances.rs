//! Named numerical tolerances shared across the crate.

use serde::{Deserialize, Serialize};

/// Asymmetry accepted when ingesting a matrix as Hermitian.
pub const HERMITIAN_INGEST_TOL: f64 = 1e-9;

/// Eigenvalues in `[-EIG_CLAMP_REL * d1, 0)` are treated as round-off and set to zero.
pub const EIG_CLAMP_REL: f64 = 1e-10;

/// Eigenvalues below `-INDEFINITE_REL * ||A||_2` make a PSD-only operation fail.
pub const INDEFINITE_REL: f64 = 1e-6;

/// Pseudo-inverse cutoff is `n * PINV_REL_PER_DIM * d1`.
pub const PINV_REL_PER_DIM: f64 = 1e-12;

/// Iteration cap handed to the Hermitian eigensolver.
pub const EIG_MAX_ITER: usize = 10_000;

/// Absolute bracket width at which the generic scalar solver stops.
pub const GENERIC_U_TOL: f64 = 1e-10;

/// Objective slack defining the optimal plateau in the derivative-free generic path.
pub const PLATEAU_REL: f64 = 1e-12;

/// Relative slack on the one-sided derivative when testing for optimality.
pub const DERIVATIVE_REL: f64 = 1e-12;

/// Squared norm below which a datum is considered all-zero.
pub const DEGENERATE_DATUM: f64 = 1e-300;

/// dB value reported for a zero SINR.
pub const SINR_DB_FLOOR: f64 = -300.0;

/// Overridable set of solver tolerances. `Default` gives the constants above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub eig_clamp_rel: f64,
    pub indefinite_rel: f64,
    pub generic_u_tol: f64,
    pub plateau_rel: f64,
    pub derivative_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eig_clamp_rel: EIG_CLAMP_REL,
            indefinite_rel: INDEFINITE_REL,
            generic_u_tol: GENERIC_U_TOL,
            plateau_rel: PLATEAU_REL,
            derivative_rel: DERIVATIVE_REL,
        }
    }
}
