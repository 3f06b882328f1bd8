//! Exponential vectors of the rotated pair `(Y^θ, Y^{θ+π/2})`.
//!
//! With `V_t = ∫h₁ dY^θ + ∫h₂ dY^{θ+π/2}` the stochastic exponential is
//!
//! ```text
//! E_t = exp(V_t − ½[V,V]^c_t) · Π_{s ≤ t} (1 + ΔV_s) e^{−ΔV_s}.
//! ```
//!
//! In terms of the underlying drivers `V = ∫(h₁cosθ − h₂sinθ) dB + ∫(h₁sinθ + h₂cosθ) dM`.
//! Only continuous drivers feed `[V,V]^c`; jumps enter through the product.

use super::step::StepFunction;
use crate::error::{Error, Result};
use crate::paths::{rotation_coefficients, PathKind, SamplePath, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpVectorValue {
    pub value: f64,
    /// Some jump factor `1 + ΔV_s` was exactly zero.
    pub zero_factor: bool,
}

/// Exponential vector with its two integrands sampled on a grid.
#[derive(Debug, Clone)]
pub struct ExponentialVector {
    grid: TimeGrid,
    h1: Vec<f64>,
    h2: Vec<f64>,
    /// grid index of the evaluation time
    upto: usize,
}

impl ExponentialVector {
    pub fn new(h1: &StepFunction, h2: &StepFunction, grid: &TimeGrid, t: f64) -> Result<Self> {
        if !(0.0..=grid.horizon()).contains(&t) || !grid.is_grid_point(t) {
            return Err(Error::Domain(format!("evaluation time {t} is not a grid point")));
        }
        Ok(Self {
            grid: *grid,
            h1: h1.on_grid(grid),
            h2: h2.on_grid(grid),
            upto: grid.index_at_or_after(t)?,
        })
    }

    pub fn evaluate(&self, brownian: &SamplePath, martingale: &SamplePath, theta: f64) -> Result<ExpVectorValue> {
        self.grid.ensure_same(&brownian.grid)?;
        self.grid.ensure_same(&martingale.grid)?;
        let (c, s) = rotation_coefficients(theta);
        let dt = self.grid.dt();
        let b_coeff = |j: usize| self.h1[j] * c - self.h2[j] * s;
        let m_coeff = |j: usize| self.h1[j] * s + self.h2[j] * c;
        let continuous = |p: &SamplePath| {
            !matches!(
                p.kind,
                PathKind::CompensatedPoisson | PathKind::SymmetricCompoundPoisson
            )
        };

        let mut v = 0.0;
        let mut bracket = 0.0;
        for j in 0..self.upto {
            let (a, b) = (b_coeff(j), m_coeff(j));
            v += a * brownian.increments[j] + b * martingale.increments[j];
            if continuous(brownian) {
                bracket += a * a * dt;
            }
            if continuous(martingale) {
                bracket += b * b * dt;
            }
        }
        let mut log_comp = 0.0;
        let mut product = 1.0;
        let mut zero_factor = false;
        let jumps = brownian
            .jumps
            .iter()
            .map(|j| (j, b_coeff(j.step - 1)))
            .chain(martingale.jumps.iter().map(|j| (j, m_coeff(j.step - 1))));
        for (jump, coeff) in jumps.filter(|(j, _)| j.step <= self.upto) {
            let dv = coeff * jump.size;
            log_comp += dv;
            product *= 1.0 + dv;
            zero_factor |= 1.0 + dv == 0.0;
        }
        Ok(ExpVectorValue {
            value: (v - 0.5 * bracket - log_comp).exp() * product,
            zero_factor,
        })
    }
}

/// `E_t^θ(h₁, h₂)` on one pair of paths.
pub fn exponential_vector(
    h1: &StepFunction,
    h2: &StepFunction,
    brownian: &SamplePath,
    martingale: &SamplePath,
    theta: f64,
    t: f64,
) -> Result<ExpVectorValue> {
    ExponentialVector::new(h1, h2, &brownian.grid, t)?.evaluate(brownian, martingale, theta)
}
