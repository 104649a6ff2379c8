//! Brute-force grid oracle for the scalar problem. Test infrastructure only.

use super::gauge::Gauge;
use super::shrinkage::{h_closed_form, prepare_eigenvalues};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

pub const MIN_GRID_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OraclePoint {
    pub u: f64,
    pub objective: f64,
}

/// Grid point minimising `g(h(u))` on a uniform grid over
/// `[1/kappa, max(1, d1) (1 + 1e-6)]`. Ties go to the lowest point.
///
/// `h` is evaluated through its piecewise closed form, a code path independent
/// of the one the solvers use.
pub fn oracle_u(gauge: &dyn Gauge, d: &[f64], kappa: f64, grid_points: usize) -> Result<OraclePoint> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::InvalidParameter(format!(
            "oracle needs at least {MIN_GRID_POINTS} grid points, got {grid_points}"
        )));
    }
    let d = prepare_eigenvalues(d, kappa, &Tolerances::default())?;
    let lo = 1.0 / kappa;
    let hi = d[0].max(1.0) * (1.0 + 1e-6);
    let step = (hi - lo) / (grid_points - 1) as f64;
    let mut h = vec![0.0; d.len()];
    let mut best = OraclePoint { u: lo, objective: f64::INFINITY };
    for k in 0..grid_points {
        let u = lo + step * k as f64;
        for (hi, &di) in h.iter_mut().zip(&d) {
            *hi = h_closed_form(di, u, kappa);
        }
        let g = gauge.eval(&h);
        if g < best.objective {
            best = OraclePoint { u, objective: g };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projector::gauge::{Euclidean, MaxEntry};

    #[test]
    fn frobenius_worked_value() {
        let p = oracle_u(&Euclidean, &[10.0, 0.5], 2.0, 1_000_000).unwrap();
        assert!((p.u - 4.1).abs() < 1e-5, "{}", p.u);
    }

    #[test]
    fn left_edge_on_plateau() {
        let p = oracle_u(&MaxEntry, &[0.8, 0.5], 3.0, 1000).unwrap();
        assert_eq!(p.u, 1.0 / 3.0);
        assert!((p.objective - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_coarse_grids() {
        assert!(oracle_u(&Euclidean, &[1.0], 2.0, 999).is_err());
    }
}
