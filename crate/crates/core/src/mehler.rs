//! Ornstein–Uhlenbeck quantities through an independent Brownian copy `B̂`.
//!
//! `P_t F(B) = Ê[F(e^{−t/2} B + √(1 − e^{−t}) B̂)]` and
//! `Γ[F] = Ê[(d/dθ F(B cos θ + B̂ sin θ))²]` at `θ = 0`. The mixed path at
//! time `t` is the rotated path at `θ = arccos e^{−t/2}`.

use serde::{Deserialize, Serialize};

use crate::chaos::CompiledChaos;
use crate::error::{Error, Result};
use crate::lent::{richardson_ratio, BoundCylindrical};
use crate::paths::{simulate_brownian, SamplePath, TimeGrid};
use crate::rng::RngStream;

/// A functional evaluated pathwise on a grid.
pub trait PathFunctional: Sync {
    fn grid(&self) -> &TimeGrid;
    fn evaluate_increments(&self, dx: &[f64]) -> Result<f64>;
}

impl PathFunctional for CompiledChaos {
    fn grid(&self) -> &TimeGrid {
        CompiledChaos::grid(self)
    }

    fn evaluate_increments(&self, dx: &[f64]) -> Result<f64> {
        Ok(CompiledChaos::evaluate_increments(self, dx))
    }
}

impl PathFunctional for BoundCylindrical {
    fn grid(&self) -> &TimeGrid {
        BoundCylindrical::grid(self)
    }

    fn evaluate_increments(&self, dx: &[f64]) -> Result<f64> {
        let path = SamplePath::from_increments(*self.grid(), crate::paths::PathKind::Mixture, dx.to_vec())?;
        self.evaluate(&path)
    }
}

/// The `B̂` samples attached to one outer path: streams `(seed, outer, j)`, `j < count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerStreams {
    pub master_seed: u64,
    pub outer: u64,
    pub count: usize,
}

impl InnerStreams {
    pub fn path(&self, grid: &TimeGrid, j: usize) -> SamplePath {
        simulate_brownian(grid, RngStream::inner(self.master_seed, self.outer, j as u64))
    }
}

/// Parameters of a two-level OU evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuEvaluation {
    pub t_semigroup: f64,
    pub inner_paths: usize,
    pub theta: f64,
}

impl OuEvaluation {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_semigroup >= 0.0 && self.t_semigroup.is_finite()) {
            return Err(Error::Domain(format!(
                "semigroup time must be non-negative, got {}",
                self.t_semigroup
            )));
        }
        if self.inner_paths < 1 {
            return Err(Error::Config("inner_paths must be at least 1".into()));
        }
        if !(self.theta > 0.0) {
            return Err(Error::Domain(format!(
                "difference step must be positive, got {}",
                self.theta
            )));
        }
        Ok(())
    }
}

fn mix(x: &[f64], y: &[f64], c: f64, s: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| c * a + s * b).collect()
}

/// Inner mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerAverage {
    pub mean: f64,
    pub std_error: f64,
}

fn average(xs: &[f64]) -> InnerAverage {
    let s = crate::stats::SampleStats::from_slice(xs);
    InnerAverage {
        mean: s.mean,
        std_error: if xs.len() > 1 { s.std_error() } else { f64::NAN },
    }
}

fn mehler_coefficients(t: f64) -> (f64, f64) {
    ((-0.5 * t).exp(), (-(-t).exp_m1()).sqrt())
}

/// `P_t F(B)` by inner averaging; `t = 0` returns `F(B)` without sampling.
pub fn mehler_semigroup<F: PathFunctional + ?Sized>(
    f: &F,
    outer: &SamplePath,
    t: f64,
    inner: InnerStreams,
) -> Result<InnerAverage> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("semigroup time must be non-negative, got {t}")));
    }
    f.grid().ensure_same(&outer.grid)?;
    if t == 0.0 {
        return Ok(InnerAverage {
            mean: f.evaluate_increments(&outer.increments)?,
            std_error: 0.0,
        });
    }
    if inner.count == 0 {
        return Err(Error::Config("need at least one inner path".into()));
    }
    let (c, s) = mehler_coefficients(t);
    let values = (0..inner.count)
        .map(|j| {
            let hat = inner.path(&outer.grid, j);
            f.evaluate_increments(&mix(&outer.increments, &hat.increments, c, s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(average(&values))
}

/// `(F(B cos θ + B̂ sin θ) − F(B cos θ − B̂ sin θ)) / 2θ`.
pub fn gradient_brownian_rotation<F: PathFunctional + ?Sized>(
    f: &F,
    outer: &SamplePath,
    hat: &SamplePath,
    theta: f64,
) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("difference step must be positive, got {theta}")));
    }
    outer.grid.ensure_same(&hat.grid)?;
    let (c, s) = (theta.cos(), theta.sin());
    let plus = f.evaluate_increments(&mix(&outer.increments, &hat.increments, c, s))?;
    let minus = f.evaluate_increments(&mix(&outer.increments, &hat.increments, c, -s))?;
    Ok((plus - minus) / (2.0 * theta))
}

/// `Γ[F](B)` as the inner mean of squared rotation gradients. Never negative.
pub fn carre_du_champ<F: PathFunctional + ?Sized>(
    f: &F,
    outer: &SamplePath,
    inner: InnerStreams,
    theta: f64,
) -> Result<InnerAverage> {
    if inner.count < 2 {
        return Err(Error::Config(format!(
            "need at least 2 inner paths, got {}",
            inner.count
        )));
    }
    let squares = (0..inner.count)
        .map(|j| gradient_brownian_rotation(f, outer, &inner.path(&outer.grid, j), theta).map(|g| g * g))
        .collect::<Result<Vec<_>>>()?;
    Ok(average(&squares))
}

/// `(1/t)(P_t(F²) − 2F P_t F + F²)` for each `t`, all sharing the same `B̂` samples,
/// which makes each value the inner mean of `(F(mixed) − F(B))² / t`.
pub fn semigroup_limit_gamma<F: PathFunctional + ?Sized>(
    f: &F,
    outer: &SamplePath,
    t_list: &[f64],
    inner: InnerStreams,
) -> Result<Vec<f64>> {
    if let Some(bad) = t_list.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::Domain(format!("times must be positive, got {bad}")));
    }
    if inner.count == 0 {
        return Err(Error::Config("need at least one inner path".into()));
    }
    f.grid().ensure_same(&outer.grid)?;
    let base = f.evaluate_increments(&outer.increments)?;
    let mut sums = vec![0.0; t_list.len()];
    for j in 0..inner.count {
        let hat = inner.path(&outer.grid, j);
        for (sum, &t) in sums.iter_mut().zip(t_list) {
            let (c, s) = mehler_coefficients(t);
            let v = f.evaluate_increments(&mix(&outer.increments, &hat.increments, c, s))?;
            *sum += (v - base).powi(2);
        }
    }
    Ok(sums
        .iter()
        .zip(t_list)
        .map(|(s, t)| s / (inner.count as f64 * t))
        .collect())
}

/// First-order Richardson extrapolation of the two smallest times of a
/// geometric list, e.g. `{1e-1, 1e-2, 1e-3}`.
pub fn extrapolate_gamma(t_list: &[f64], values: &[f64]) -> Result<f64> {
    let n = t_list.len();
    if n < 2 || values.len() != n {
        return Err(Error::Dimension(format!("{} times for {} values", n, values.len())));
    }
    let ratio = t_list[n - 2] / t_list[n - 1];
    if !(ratio > 1.0) {
        return Err(Error::Domain("times must be decreasing".into()));
    }
    Ok(richardson_ratio(values[n - 2], values[n - 1], ratio, 1))
}
