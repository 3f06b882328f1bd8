//! Gradient of `sup_{s ≤ T} (B_s + K_s)` by a lent jump.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::paths::{add_jump_at_step, combine, PathKind, SamplePath};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupremumGradient {
    /// `(M(B + a 1_{· ≥ u}) − M(B)) / a`.
    pub value: f64,
    /// `sup_{s ≥ u} − sup_{s < u}` over grid points.
    pub gap: f64,
    /// `|gap| ≤ a`: the quotient may lie strictly between 0 and 1.
    pub tied: bool,
}

fn grid_max(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `k` is the independent càdlàg path, `brownian` the path being perturbed.
pub fn supremum_gradient(k: &SamplePath, brownian: &SamplePath, u: f64, a: f64) -> Result<SupremumGradient> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("jump size must be positive, got {a}")));
    }
    let step = brownian.grid.snap_forward(u)?;
    let sum = combine(brownian, k, 1.0, 1.0, PathKind::Mixture)?;
    let bumped = add_jump_at_step(&sum, step, a);
    let value = (grid_max(&bumped.levels) - grid_max(&sum.levels)) / a;
    let gap = grid_max(&sum.levels[step..]) - grid_max(&sum.levels[..step]);
    Ok(SupremumGradient {
        value,
        gap,
        tied: gap.abs() <= a,
    })
}
