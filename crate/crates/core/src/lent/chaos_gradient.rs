//! The gradient `F^♯ = d/dθ F^θ |_{θ=0} = ∫ D_s F dM_s` of a finite chaos.

use crate::chaos::{CompiledChaos, RotatedFunctional};
use crate::error::{Error, Result};
use crate::paths::SamplePath;

/// `(F^{θ₀} − F^{−θ₀}) / 2θ₀`.
pub fn gradient_chaos(f: &CompiledChaos, brownian: &SamplePath, martingale: &SamplePath, theta0: f64) -> Result<f64> {
    if !(theta0 > 0.0) {
        return Err(Error::Domain(format!("difference step must be positive, got {theta0}")));
    }
    let plus = f.rotated(brownian, martingale, theta0)?;
    let minus = f.rotated(brownian, martingale, -theta0)?;
    Ok((plus - minus) / (2.0 * theta0))
}

/// `Σ_k D_k F(B) · ΔM_k`, with `D_k F` obtained by kernel contraction.
pub fn sharp_by_contraction(f: &CompiledChaos, brownian: &SamplePath, martingale: &SamplePath) -> Result<f64> {
    brownian.grid.ensure_same(&martingale.grid)?;
    let d = f.derivative_profile(brownian)?;
    Ok(d.iter().zip(&martingale.increments).map(|(a, b)| a * b).sum())
}
