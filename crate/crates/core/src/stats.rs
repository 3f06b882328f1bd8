//! Monte Carlo aggregation.
//!
//! Per-path values are always collected into index order before reduction, so
//! a report is a pure function of `(seed, config)` whatever the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::paths::TimeGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub horizon: f64,
    pub n_steps: usize,
    pub dt: f64,
}

impl From<&TimeGrid> for GridSummary {
    fn from(g: &TimeGrid) -> Self {
        Self {
            horizon: g.horizon(),
            n_steps: g.n_steps(),
            dt: g.dt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub master_seed: u64,
    pub grid: Option<GridSummary>,
}

impl EstimatorReport {
    pub fn from_samples(samples: &[f64], master_seed: u64, grid: Option<&TimeGrid>) -> Self {
        let s = SampleStats::from_slice(samples);
        Self {
            mean: s.mean,
            std_error: s.std_error(),
            n_paths: s.n,
            master_seed,
            grid: grid.map(GridSummary::from),
        }
    }

    /// `(mean - target) / std_error`; infinite when the error is zero and
    /// the mean misses the target.
    pub fn z_score(&self, target: f64) -> f64 {
        z_score(self.mean, target, self.std_error)
    }
}

pub fn z_score(value: f64, target: f64, std_error: f64) -> f64 {
    let diff = value - target;
    if diff == 0.0 {
        0.0
    } else if std_error > 0.0 {
        diff / std_error
    } else {
        f64::INFINITY.copysign(diff)
    }
}

/// Mean and unbiased variance of a sample, via a two-pass sum in index order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

impl SampleStats {
    pub fn from_slice(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                n,
                mean: f64::NAN,
                variance: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self { n, mean, variance }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            (self.variance / self.n as f64).sqrt()
        }
    }
}

/// Sample covariance of two equally long slices.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n - 1.0)
}

pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    covariance(xs, ys) / (covariance(xs, xs) * covariance(ys, ys)).sqrt()
}

/// Evaluates `f` on every path index in parallel and returns the results in
/// index order.
pub fn par_collect<T, F>(n_paths: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n_paths as u64).into_par_iter().map(f).collect()
}
