//! Closed-form scalar solver for the spectral norm: `G2(u) = max_i h_i(u)`.
//!
//! Only `d1`, `dN` and `kappa` matter; the lowest minimiser is one of a handful of
//! linear expressions selected by threshold tests, evaluated in order.

use super::shrinkage::{prepare_eigenvalues, Branch, ShrinkageSolution, SpectralCase};
use crate::error::Result;
use crate::tolerances::Tolerances;

fn max_entry(h: &[f64]) -> f64 {
    h.iter().fold(0.0, |a, &b| a.max(b))
}

/// Lowest minimiser of `G2`. The reported objective is `max_i h_i(u_star)`.
pub fn solve_u_spectral(d: &[f64], kappa: f64) -> Result<ShrinkageSolution> {
    let d = prepare_eigenvalues(d, kappa, &Tolerances::default())?;
    let (u, branch) = spectral_u(&d, kappa);
    Ok(ShrinkageSolution::at(&d, kappa, u, branch, max_entry))
}

pub(crate) fn spectral_u(d: &[f64], kappa: f64) -> (f64, Branch) {
    let d1 = d[0];
    let dn = d[d.len() - 1];
    if d1 == 0.0 {
        return (1.0 / kappa, Branch::DegenerateZero);
    }
    if kappa == 1.0 {
        // minimise max_i |c - d_i| over c >= 1
        return ((0.5 * (d1 + dn)).max(1.0), Branch::KappaOne);
    }
    let case = |c| Branch::Spectral(c);
    if d1 <= 1.0 {
        (1.0 / kappa, case(SpectralCase::Case1))
    } else if d1 <= kappa {
        if dn <= 1.0 {
            (((d1 + dn - 1.0) / kappa).max(1.0 / kappa), case(SpectralCase::Case2))
        } else {
            (d1 / kappa, case(SpectralCase::Case3))
        }
    } else if dn <= 1.0 {
        let eta = (d1 + dn - 1.0) / kappa;
        if eta <= 1.0 {
            (eta.max(1.0 / kappa), case(SpectralCase::Case4Low))
        } else {
            ((d1 + dn) / (1.0 + kappa), case(SpectralCase::Case4High))
        }
    } else if dn <= d1 / kappa {
        ((d1 + dn) / (1.0 + kappa), case(SpectralCase::Case5Crossing))
    } else {
        (d1 / kappa, case(SpectralCase::Case5Identity))
    }
}
