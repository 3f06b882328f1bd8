//! Cylindrical functionals `Φ(I_{k_1}(f_1), …, I_{k_m}(f_m))`.

use std::fmt;
use std::sync::Arc;

use super::{GradientEstimate, GradientMethod};
use crate::chaos::{CompiledKernel, SimplexKernel, StepFunction};
use crate::error::{Error, Result};
use crate::paths::{add_jump_at_step, SamplePath, TimeGrid};

pub type ScalarMap = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct CylindricalFunctional {
    args: Vec<SimplexKernel>,
    phi: ScalarMap,
    phi_grad: GradientMap,
    /// `Φ` is assumed C¹ and Lipschitz.
    pub lipschitz: bool,
}

impl fmt::Debug for CylindricalFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CylindricalFunctional")
            .field("args", &self.args)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

impl CylindricalFunctional {
    /// `Φ(∫h_1 dX, …, ∫h_k dX)`.
    pub fn new(hs: Vec<StepFunction>, phi: ScalarMap, phi_grad: GradientMap) -> Self {
        let args = hs.into_iter().map(|h| SimplexKernel::power(&h, 1, 1.0)).collect();
        Self::of_integrals(args, phi, phi_grad)
    }

    /// `Φ` applied to iterated integrals of arbitrary orders.
    pub fn of_integrals(args: Vec<SimplexKernel>, phi: ScalarMap, phi_grad: GradientMap) -> Self {
        Self {
            args,
            phi,
            phi_grad,
            lipschitz: false,
        }
    }

    /// `∫h dX`.
    pub fn linear(h: StepFunction) -> Self {
        Self::new(vec![h], Arc::new(|x| x[0]), Arc::new(|_| vec![1.0]))
    }

    /// `(∫h dX)²`.
    pub fn square(h: StepFunction) -> Self {
        Self::new(vec![h], Arc::new(|x| x[0] * x[0]), Arc::new(|x| vec![2.0 * x[0]]))
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn args(&self) -> &[SimplexKernel] {
        &self.args
    }

    pub fn phi(&self, x: &[f64]) -> f64 {
        (self.phi)(x)
    }

    pub fn phi_grad(&self, x: &[f64]) -> Vec<f64> {
        (self.phi_grad)(x)
    }

    pub fn bind(&self, grid: &TimeGrid) -> Result<BoundCylindrical> {
        let kernels = self
            .args
            .iter()
            .map(|k| CompiledKernel::new(k, grid))
            .collect::<Result<_>>()?;
        Ok(BoundCylindrical {
            functional: self.clone(),
            kernels,
            grid: *grid,
        })
    }
}

/// A cylindrical functional with its arguments compiled on a grid.
#[derive(Debug, Clone)]
pub struct BoundCylindrical {
    functional: CylindricalFunctional,
    kernels: Vec<CompiledKernel>,
    grid: TimeGrid,
}

impl BoundCylindrical {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn functional(&self) -> &CylindricalFunctional {
        &self.functional
    }

    pub fn arguments(&self, path: &SamplePath) -> Result<Vec<f64>> {
        self.kernels.iter().map(|k| k.integrate(path)).collect()
    }

    pub fn evaluate(&self, path: &SamplePath) -> Result<f64> {
        Ok(self.functional.phi(&self.arguments(path)?))
    }

    /// Chain rule `Σ_i Φ'_i · ∂I_i/∂ΔX_{step-1}`, one entry per grid step.
    pub fn derivative_profile(&self, path: &SamplePath) -> Result<Vec<f64>> {
        let x = self.arguments(path)?;
        let grad = self.functional.phi_grad(&x);
        if grad.len() != x.len() {
            return Err(Error::Dimension(format!(
                "gradient of length {} for {} arguments",
                grad.len(),
                x.len()
            )));
        }
        let mut out = vec![0.0; self.grid.n_steps()];
        for (k, gi) in self.kernels.iter().zip(grad) {
            for (o, d) in out.iter_mut().zip(k.derivative_profile(path)?) {
                *o += gi * d;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalGradient {
    pub jump_difference: GradientEstimate,
    pub analytic: GradientEstimate,
    /// `u` was not a grid point and has been moved forward.
    pub snapped: bool,
}

/// `D_u F` by a central jump difference of size `±a`, alongside the chain-rule value.
pub fn gradient_cylindrical(f: &BoundCylindrical, path: &SamplePath, u: f64, a: f64) -> Result<CylindricalGradient> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("jump size must be positive, got {a}")));
    }
    f.grid.ensure_same(&path.grid)?;
    let grid = path.grid;
    let step = grid.snap_forward(u)?;
    let snapped = !grid.is_grid_point(u);
    let plus = f.evaluate(&add_jump_at_step(path, step, a))?;
    let minus = f.evaluate(&add_jump_at_step(path, step, -a))?;
    let analytic = f.derivative_profile(path)?[step - 1];
    let (u, t) = (grid.time(step), grid.horizon());
    Ok(CylindricalGradient {
        jump_difference: GradientEstimate {
            u,
            t,
            value: (plus - minus) / (2.0 * a),
            method: GradientMethod::JumpDifference,
            theta: Some(a),
        },
        analytic: GradientEstimate {
            u,
            t,
            value: analytic,
            method: GradientMethod::Analytic,
            theta: None,
        },
        snapped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::simulate_brownian;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    fn grid() -> TimeGrid {
        TimeGrid::unit(100).unwrap()
    }

    #[test]
    fn terminal_value_has_unit_gradient() {
        let g = grid();
        let f = CylindricalFunctional::linear(StepFunction::indicator(0.0, 1.0).unwrap())
            .bind(&g)
            .unwrap();
        let b = simulate_brownian(&g, RngStream::brownian(1, 0));
        for u in [0.01, 0.3, 0.5, 1.0] {
            let r = gradient_cylindrical(&f, &b, u, 1e-4).unwrap();
            assert!((r.jump_difference.value - 1.0).abs() < 1e-10);
            assert_eq!(r.analytic.value, 1.0);
            assert!(!r.snapped);
        }
    }

    #[test]
    fn off_grid_u_is_snapped_and_flagged() {
        let g = grid();
        let f = CylindricalFunctional::linear(StepFunction::indicator(0.0, 1.0).unwrap())
            .bind(&g)
            .unwrap();
        let b = simulate_brownian(&g, RngStream::brownian(1, 0));
        let r = gradient_cylindrical(&f, &b, 0.305, 1e-4).unwrap();
        assert!(r.snapped);
        assert!((r.analytic.u - 0.31).abs() < 1e-12);
        assert!(gradient_cylindrical(&f, &b, 0.0, 1e-4).is_err());
    }

    #[test]
    fn square_gradient_uses_left_endpoint_value() {
        let g = grid();
        let h = StepFunction::new(vec![0.0, 0.5, 1.0], vec![2f64.sqrt() * 0.8, 2f64.sqrt() * 0.6]).unwrap();
        let f = CylindricalFunctional::square(h.clone()).bind(&g).unwrap();
        let b = simulate_brownian(&g, RngStream::brownian(1, 3));
        let x = f.arguments(&b).unwrap()[0];
        for u in [0.2, 0.5, 0.51, 0.9] {
            let r = gradient_cylindrical(&f, &b, u, 1e-3).unwrap();
            let expected = 2.0 * x * h.eval(r.analytic.u - g.dt());
            assert!((r.analytic.value - expected).abs() < 1e-12);
            assert!((r.jump_difference.value - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn iterated_arguments_chain_rule() {
        let g = grid();
        let h = StepFunction::new(vec![0.0, 0.4, 1.0], vec![1.0, -0.5]).unwrap();
        let args = vec![SimplexKernel::power(&h, 2, 1.0), SimplexKernel::power(&h, 3, 0.5)];
        let f = CylindricalFunctional::of_integrals(
            args,
            Arc::new(|x| (x[0] + 0.3 * x[1]).sin()),
            Arc::new(|x| {
                let c = (x[0] + 0.3 * x[1]).cos();
                vec![c, 0.3 * c]
            }),
        )
        .bind(&g)
        .unwrap();
        let b = simulate_brownian(&g, RngStream::brownian(1, 4));
        let mut worst: f64 = 0.0;
        for u in [0.1, 0.45, 0.8] {
            let r = gradient_cylindrical(&f, &b, u, 1e-4).unwrap();
            worst = worst.max((r.jump_difference.value - r.analytic.value).abs());
        }
        assert!(worst < 1e-6, "{worst}");
    }

    proptest! {
        #[test]
        fn linear_functional_gradient_is_h(seed in 0u64..1000, u_step in 1usize..=100, a in 1e-6f64..1.0) {
            let g = grid();
            let h = StepFunction::new(vec![0.0, 0.25, 0.75, 1.0], vec![1.5, -2.0, 0.5]).unwrap();
            let f = CylindricalFunctional::linear(h.clone()).bind(&g).unwrap();
            let b = simulate_brownian(&g, RngStream::brownian(seed, 0));
            let r = gradient_cylindrical(&f, &b, g.time(u_step), a).unwrap();
            let expected = h.eval(g.time(u_step - 1));
            prop_assert!((r.jump_difference.value - expected).abs() < 1e-8);
            prop_assert_eq!(r.analytic.value, expected);
        }
    }
}
