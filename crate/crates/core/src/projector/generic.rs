//! Scalar solver for an arbitrary gauge.
//!
//! `phi(u) = g(h_1(u), .., h_N(u))` is convex on `[1/kappa, max(1, d1)]` and
//! non-decreasing beyond. The lowest minimiser is `inf { u : phi'(u+) >= 0 }`,
//! found by bisection on the sign of the exact right derivative when the gauge
//! provides one. Otherwise a golden-section search locates a minimiser and a
//! leftward bisection walks to the start of the optimal plateau.

use super::gauge::Gauge;
use super::shrinkage::{h_right_slope, lambda_one, prepare_eigenvalues, Branch, GenericMethod, ShrinkageSolution};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

const MAX_BISECTIONS: usize = 400;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

struct Objective<'a> {
    gauge: &'a dyn Gauge,
    d: &'a [f64],
    kappa: f64,
}

impl Objective<'_> {
    fn residuals(&self, u: f64) -> Vec<f64> {
        self.d.iter().map(|&di| (lambda_one(di, u, self.kappa) - di).abs()).collect()
    }

    fn value(&self, u: f64) -> Result<f64> {
        let v = self.gauge.eval(&self.residuals(u));
        if !v.is_finite() || v < 0.0 {
            return Err(Error::GaugeContract(format!("gauge `{}` returned {v} at u = {u}", self.gauge.name())));
        }
        Ok(v)
    }

    fn right_derivative(&self, u: f64) -> Option<f64> {
        let h = self.residuals(u);
        let slopes: Vec<f64> = self.d.iter().map(|&di| h_right_slope(di, u, self.kappa)).collect();
        self.gauge.directional_derivative(&h, &slopes)
    }
}

pub fn solve_u_generic(gauge: &dyn Gauge, d: &[f64], kappa: f64) -> Result<ShrinkageSolution> {
    solve_u_generic_with(gauge, d, kappa, &Tolerances::default())
}

pub fn solve_u_generic_with(gauge: &dyn Gauge, d: &[f64], kappa: f64, tol: &Tolerances) -> Result<ShrinkageSolution> {
    let d = prepare_eigenvalues(d, kappa, tol)?;
    let obj = Objective { gauge, d: &d, kappa };
    let lo = 1.0 / kappa;
    let hi = d[0].max(1.0);

    let (u, branch) = if d[0] == 0.0 {
        (lo, Branch::DegenerateZero)
    } else if let Some(u) = derivative_bisection(&obj, lo, hi, tol)? {
        (u, Branch::Generic(GenericMethod::DerivativeBisection))
    } else {
        (golden_then_plateau(&obj, lo, hi, tol)?, Branch::Generic(GenericMethod::GoldenSection))
    };
    let objective = obj.value(u)?;
    let lambda_star = d.iter().map(|&di| lambda_one(di, u, kappa)).collect();
    Ok(ShrinkageSolution { u_star: u, lambda_star, objective, branch })
}

fn derivative_bisection(obj: &Objective<'_>, mut lo: f64, mut hi: f64, tol: &Tolerances) -> Result<Option<f64>> {
    // |phi'| <= g(|slopes|) <= kappa * g(1, .., 1)
    let ones = vec![1.0; obj.d.len()];
    let scale = obj.kappa.max(1.0) * obj.gauge.eval(&ones);
    let slack = tol.derivative_rel * scale;
    let nonneg = |u: f64| -> Result<Option<bool>> {
        match obj.right_derivative(u) {
            None => Ok(None),
            Some(s) if s.is_finite() => Ok(Some(s >= -slack)),
            Some(s) => Err(Error::GaugeContract(format!("gauge `{}` derivative {s} at u = {u}", obj.gauge.name()))),
        }
    };
    match nonneg(lo)? {
        None => return Ok(None),
        Some(true) => return Ok(Some(lo)),
        Some(false) => {}
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol.generic_u_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if nonneg(mid)?.unwrap_or(false) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn golden_then_plateau(obj: &Objective<'_>, lo: f64, hi: f64, tol: &Tolerances) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut e = a + INV_PHI * (b - a);
    let mut fc = obj.value(c)?;
    let mut fe = obj.value(e)?;
    let mut best = (obj.value(lo)?, lo);
    for (f, u) in [(obj.value(hi)?, hi), (fc, c), (fe, e)] {
        if f < best.0 {
            best = (f, u);
        }
    }
    while b - a > tol.generic_u_tol {
        // ties move left so a flat region resolves towards its lower end
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - INV_PHI * (b - a);
            fc = obj.value(c)?;
            if fc < best.0 {
                best = (fc, c);
            }
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + INV_PHI * (b - a);
            fe = obj.value(e)?;
            if fe < best.0 {
                best = (fe, e);
            }
        }
    }
    let (f_min, mut right) = best;
    let level = f_min + tol.plateau_rel * (1.0 + f_min);
    let mut left = lo;
    if obj.value(left)? <= level {
        return Ok(left);
    }
    for _ in 0..MAX_BISECTIONS {
        if right - left <= tol.generic_u_tol {
            break;
        }
        let mid = 0.5 * (left + right);
        if mid <= left || mid >= right {
            break;
        }
        if obj.value(mid)? <= level {
            right = mid;
        } else {
            left = mid;
        }
    }
    Ok(right)
}
