//! Duality `E[F ∫G dB] = E[∫ D_u F · G_u du]` for deterministic step processes `G`.

use serde::Serialize;

use crate::chaos::{ChaosVector, CompiledChaos, SimplexKernel, StepFunction};
use crate::error::{Error, Result};
use crate::paths::{simulate_brownian, TimeGrid};
use crate::rng::RngStream;
use crate::stats::{par_collect, SampleStats};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IbpReport {
    pub lhs: f64,
    pub rhs: f64,
    /// Standard error of the per-path difference `lhs_i − rhs_i`.
    pub pooled_std_error: f64,
    pub n_paths: usize,
}

impl IbpReport {
    pub fn z_score(&self) -> f64 {
        crate::stats::z_score(self.lhs, self.rhs, self.pooled_std_error)
    }
}

#[derive(Debug, Clone)]
pub struct IbpPair {
    pub name: &'static str,
    pub f: ChaosVector,
    pub g: StepFunction,
    /// Common value of both sides.
    pub expected: f64,
}

/// Unit-norm step function on `[0, 1]` used by the registered pairs.
pub fn unit_h() -> StepFunction {
    let r = 2f64.sqrt();
    StepFunction::new(vec![0.0, 0.5, 1.0], vec![0.8 * r, 0.6 * r]).expect("valid step function")
}

/// The three built-in `(F, G)` pairs.
pub fn registered_pairs() -> Vec<IbpPair> {
    let one = StepFunction::indicator(0.0, 1.0).expect("valid step function");
    let h = unit_h();
    vec![
        IbpPair {
            name: "terminal-value",
            f: ChaosVector::single(SimplexKernel::power(&one, 1, 1.0)),
            g: one.clone(),
            expected: 1.0,
        },
        IbpPair {
            name: "second-chaos-against-h",
            f: ChaosVector::single(SimplexKernel::power(&h, 2, 1.0)),
            g: h.clone(),
            expected: 0.0,
        },
        IbpPair {
            // (∫h dB)² = I_2(h⊗h) + ‖h‖²
            name: "square-against-one",
            f: ChaosVector::new(h.square_norm(), vec![SimplexKernel::power(&h, 2, 1.0)]),
            g: one,
            expected: 0.0,
        },
    ]
}

pub fn integration_by_parts_check(
    f: &ChaosVector,
    g: &StepFunction,
    grid: &TimeGrid,
    n_paths: usize,
    master_seed: u64,
) -> Result<IbpReport> {
    if n_paths < 2 {
        return Err(Error::Config(format!("need at least 2 paths, got {n_paths}")));
    }
    let compiled = CompiledChaos::new(f, grid)?;
    let gv = g.on_grid(grid);
    let dt = grid.dt();
    let rows = par_collect(n_paths, |i| -> Result<(f64, f64)> {
        let b = simulate_brownian(grid, RngStream::brownian(master_seed, i));
        let fv = compiled.evaluate(&b)?;
        let stoch: f64 = gv.iter().zip(&b.increments).map(|(a, d)| a * d).sum();
        let d = compiled.derivative_profile(&b)?;
        let inner: f64 = d.iter().zip(&gv).map(|(a, b)| a * b).sum::<f64>() * dt;
        Ok((fv * stoch, inner))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let lhs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let diff: Vec<f64> = rows.iter().map(|r| r.0 - r.1).collect();
    Ok(IbpReport {
        lhs: SampleStats::from_slice(&lhs).mean,
        rhs: SampleStats::from_slice(&rhs).mean,
        pooled_std_error: SampleStats::from_slice(&diff).std_error(),
        n_paths,
    })
}
