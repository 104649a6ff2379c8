//! Symmetric gauge functions on non-negative vectors.
//!
//! A unitarily invariant matrix norm is a symmetric monotone vector norm applied to
//! the singular values. Implementations must be pure: the projector may call them
//! concurrently from many threads.

use std::fmt;

use crate::error::{Error, Result};

pub trait Gauge: Send + Sync {
    fn name(&self) -> String;

    /// Gauge value on a non-negative vector.
    fn eval(&self, x: &[f64]) -> f64;

    /// One-sided directional derivative `lim_{t -> 0+} (g(x + t dir) - g(x)) / t`,
    /// when it is known in closed form. `None` makes the generic solver fall back
    /// to derivative-free search.
    fn directional_derivative(&self, _x: &[f64], _dir: &[f64]) -> Option<f64> {
        None
    }
}

/// `sqrt(sum x_i^2)`, the Frobenius gauge.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl Gauge for Euclidean {
    fn name(&self) -> String {
        "euclidean".into()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn directional_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        let norm = self.eval(x);
        if norm > 0.0 {
            Some(x.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>() / norm)
        } else {
            Some(self.eval(dir))
        }
    }
}

/// `max_i x_i`, the spectral gauge (Ky Fan 1).
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxEntry;

impl Gauge for MaxEntry {
    fn name(&self) -> String {
        "max".into()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        x.iter().fold(0.0, |a, &b| a.max(b.abs()))
    }

    fn directional_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        KyFan { k: Some(1) }.directional_derivative(x, dir)
    }
}

/// Sum of the `k` largest entries; `k = None` sums everything (trace / nuclear gauge).
#[derive(Debug, Clone, Copy, Default)]
pub struct KyFan {
    pub k: Option<usize>,
}

impl KyFan {
    fn take(&self, n: usize) -> usize {
        self.k.map_or(n, |k| k.min(n))
    }
}

impl Gauge for KyFan {
    fn name(&self) -> String {
        match self.k {
            Some(k) => format!("kyfan:{k}"),
            None => "kyfan".into(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut v: Vec<f64> = x.iter().map(|a| a.abs()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v.iter().take(self.take(x.len())).sum()
    }

    fn directional_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        // x >= 0 throughout; for small t > 0 the order of x + t dir is lexicographic in (x, dir)
        let mut idx: Vec<usize> = (0..x.len()).collect();
        idx.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(dir[b].total_cmp(&dir[a])));
        Some(idx.iter().take(self.take(x.len())).map(|&i| dir[i]).sum())
    }
}

/// Wraps a closure as a derivative-free gauge.
pub struct FnGauge<F> {
    name: String,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> FnGauge<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> Gauge for FnGauge<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

impl<F> fmt::Debug for FnGauge<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnGauge").field("name", &self.name).finish()
    }
}

/// Built-in gauges by name: `euclidean`, `max`, `kyfan` (trace), `kyfan:<k>`.
pub fn gauge_by_name(name: &str) -> Result<Box<dyn Gauge>> {
    match name {
        "euclidean" | "frobenius" => Ok(Box::new(Euclidean)),
        "max" | "spectral" => Ok(Box::new(MaxEntry)),
        "kyfan" | "trace" | "nuclear" => Ok(Box::new(KyFan { k: None })),
        _ => {
            if let Some(k) = name.strip_prefix("kyfan:") {
                let k: usize =
                    k.parse().map_err(|_| Error::InvalidParameter(format!("bad Ky Fan order in `{name}`")))?;
                if k == 0 {
                    return Err(Error::InvalidParameter("Ky Fan order must be >= 1".into()));
                }
                Ok(Box::new(KyFan { k: Some(k) }))
            } else {
                Err(Error::InvalidParameter(format!(
                    "unknown gauge `{name}` (expected euclidean, max, kyfan or kyfan:<k>)"
                )))
            }
        }
    }
}
