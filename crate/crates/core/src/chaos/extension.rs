//! Chaotic extensions `F ↦ F^θ` and their covariance in the rotation angle.

use serde::{Deserialize, Serialize};

use super::expvec::ExponentialVector;
use super::integral::CompiledChaos;
use super::kernel::ChaosVector;
use crate::error::{Error, Result};
use crate::paths::simulate_brownian;
use crate::paths::{rotate, rotation_coefficients, MartingaleKind, SamplePath, TimeGrid};
use crate::rng::RngStream;
use crate::stats::{par_collect, SampleStats};

/// A functional that can be read against the rotated pair `(B, M)` at angle θ.
pub trait RotatedFunctional: Sync {
    fn grid(&self) -> &TimeGrid;
    fn rotated(&self, brownian: &SamplePath, martingale: &SamplePath, theta: f64) -> Result<f64>;
}

impl RotatedFunctional for CompiledChaos {
    fn grid(&self) -> &TimeGrid {
        CompiledChaos::grid(self)
    }

    fn rotated(&self, brownian: &SamplePath, martingale: &SamplePath, theta: f64) -> Result<f64> {
        brownian.grid.ensure_same(&martingale.grid)?;
        self.grid().ensure_same(&brownian.grid)?;
        let (c, s) = rotation_coefficients(theta);
        if s == 0.0 && c == 1.0 {
            return Ok(self.evaluate_increments(&brownian.increments));
        }
        let dx: Vec<f64> = brownian
            .increments
            .iter()
            .zip(&martingale.increments)
            .map(|(b, m)| c * b + s * m)
            .collect();
        Ok(self.evaluate_increments(&dx))
    }
}

/// `E_T(h)`, extended as `E_T^θ(h, 0)`.
#[derive(Debug, Clone)]
pub struct ExtendedExponential {
    inner: ExponentialVector,
    grid: TimeGrid,
}

impl ExtendedExponential {
    pub fn new(h: &super::step::StepFunction, grid: &TimeGrid) -> Result<Self> {
        let zero = super::step::StepFunction::zero();
        Ok(Self {
            inner: ExponentialVector::new(h, &zero, grid, grid.horizon())?,
            grid: *grid,
        })
    }
}

impl RotatedFunctional for ExtendedExponential {
    fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    fn rotated(&self, brownian: &SamplePath, martingale: &SamplePath, theta: f64) -> Result<f64> {
        Ok(self.inner.evaluate(brownian, martingale, theta)?.value)
    }
}

/// `F^θ = f(∅) + Σ I_n(f_n)` against `Y^θ = B cos θ + M sin θ`.
pub fn chaotic_extension(f: &ChaosVector, brownian: &SamplePath, martingale: &SamplePath, theta: f64) -> Result<f64> {
    let y = rotate(brownian, martingale, theta)?;
    CompiledChaos::new(f, &y.grid)?.evaluate(&y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovariancePoint {
    pub phi: f64,
    pub mean: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of `φ ↦ E[F^{θ₀+φ} F^{θ₀}]`.
///
/// Every angle reuses the same `(B, M)` pair per path.
pub fn covariance_curve<F: RotatedFunctional + ?Sized>(
    f: &F,
    phis: &[f64],
    n_paths: usize,
    master_seed: u64,
    martingale: MartingaleKind,
    theta0: f64,
) -> Result<Vec<CovariancePoint>> {
    if n_paths < 2 {
        return Err(Error::Config(format!("need at least 2 paths, got {n_paths}")));
    }
    let grid = *f.grid();
    let rows = par_collect(n_paths, |i| -> Result<Vec<f64>> {
        let b = simulate_brownian(&grid, RngStream::brownian(master_seed, i));
        let m = martingale.simulate(&grid, master_seed, i);
        let base = f.rotated(&b, &m, theta0)?;
        phis.iter()
            .map(|phi| Ok(f.rotated(&b, &m, theta0 + phi)? * base))
            .collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(phis
        .iter()
        .enumerate()
        .map(|(j, &phi)| {
            let xs: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let s = SampleStats::from_slice(&xs);
            CovariancePoint {
                phi,
                mean: s.mean,
                std_error: s.std_error(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::integral::iterated_integral;
    use crate::chaos::kernel::SimplexKernel;
    use crate::chaos::step::StepFunction;
    use crate::paths::simulate_compensated_poisson;
    use std::f64::consts::PI;

    fn h() -> StepFunction {
        StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.2, -0.6]).unwrap()
    }

    #[test]
    fn theta_zero_is_brownian_evaluation() {
        let g = TimeGrid::unit(100).unwrap();
        let b = simulate_brownian(&g, RngStream::brownian(5, 0));
        let m = simulate_compensated_poisson(&g, RngStream::poisson(5, 0));
        let f = ChaosVector::new(
            0.3,
            vec![SimplexKernel::power(&h(), 2, 1.0), SimplexKernel::power(&h(), 1, 2.0)],
        );
        let direct = CompiledChaos::new(&f, &g).unwrap().evaluate(&b).unwrap();
        assert_eq!(chaotic_extension(&f, &b, &m, 0.0).unwrap(), direct);
    }

    #[test]
    fn first_chaos_is_linear_in_rotation() {
        let g = TimeGrid::unit(100).unwrap();
        let b = simulate_brownian(&g, RngStream::brownian(5, 1));
        let m = simulate_compensated_poisson(&g, RngStream::poisson(5, 1));
        let k = SimplexKernel::power(&h(), 1, 1.0);
        let (ib, im) = (iterated_integral(&k, &b).unwrap(), iterated_integral(&k, &m).unwrap());
        for theta in [0.1, 0.7, 2.0, -1.3] {
            let v = chaotic_extension(&ChaosVector::single(k.clone()), &b, &m, theta).unwrap();
            assert!((v - (theta.cos() * ib + theta.sin() * im)).abs() < 1e-12);
        }
    }

    #[test]
    fn compiled_route_matches_rotation_route() {
        let g = TimeGrid::unit(50).unwrap();
        let b = simulate_brownian(&g, RngStream::brownian(5, 2));
        let m = simulate_compensated_poisson(&g, RngStream::poisson(5, 2));
        let f = ChaosVector::single(SimplexKernel::power(&h(), 3, 1.0));
        let c = CompiledChaos::new(&f, &g).unwrap();
        let a = c.rotated(&b, &m, 0.4).unwrap();
        let e = chaotic_extension(&f, &b, &m, 0.4).unwrap();
        assert!((a - e).abs() < 1e-13 * e.abs().max(1.0));
    }

    #[test]
    fn too_few_paths() {
        let g = TimeGrid::unit(10).unwrap();
        let c = CompiledChaos::new(&ChaosVector::single(SimplexKernel::power(&h(), 1, 1.0)), &g).unwrap();
        assert!(matches!(
            covariance_curve(&c, &[0.0], 1, 0, MartingaleKind::CompensatedPoisson, 0.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn first_chaos_curve_is_cosine() {
        let g = TimeGrid::unit(100).unwrap();
        let one = StepFunction::indicator(0.0, 1.0).unwrap();
        let c = CompiledChaos::new(&ChaosVector::single(SimplexKernel::power(&one, 1, 1.0)), &g).unwrap();
        let phis = [0.0, PI / 4.0, PI / 2.0];
        let curve = covariance_curve(&c, &phis, 40_000, 9, MartingaleKind::SymmetricCompound, 0.0).unwrap();
        for p in curve {
            assert!((p.mean - p.phi.cos()).abs() < 4.0 * p.std_error + 1e-12, "{p:?}");
        }
    }
}
