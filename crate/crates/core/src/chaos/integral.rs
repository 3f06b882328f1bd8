//! Discrete iterated integrals over the simplex.
//!
//! For factor values `g_k(t_j)` sampled at left endpoints, the forward
//! recursion
//!
//! ```text
//! J_0 ≡ 1,   J_k(t_{m+1}) = J_k(t_m) + J_{k-1}(t_m) · g_k(t_m) · ΔX_m
//! ```
//!
//! sums `Π g_k(t_{j_k}) ΔX_{j_k}` over strictly increasing step indices, so
//! every term is predictable. The Malliavin derivative with respect to one
//! increment is obtained by contraction: the increment is removed from the
//! chain and the pieces before and after it are integrated separately.

use super::kernel::{factorial, ChaosVector, SimplexKernel, DEFAULT_MAX_ORDER};
use crate::error::{Error, Result};
use crate::paths::{SamplePath, TimeGrid};

/// A simplex term with its factors sampled on a grid.
#[derive(Debug, Clone)]
struct GridTerm {
    coeff: f64,
    /// `values[k][j] = g_{k+1}(t_j)`
    values: Vec<Vec<f64>>,
}

/// A kernel bound to a grid, ready for repeated integration.
#[derive(Debug, Clone)]
pub struct CompiledKernel {
    grid: TimeGrid,
    order: usize,
    /// `n!` times the simplex coefficients.
    terms: Vec<GridTerm>,
    constant: f64,
}

impl CompiledKernel {
    pub fn new(kernel: &SimplexKernel, grid: &TimeGrid) -> Result<Self> {
        Self::with_max_order(kernel, grid, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(kernel: &SimplexKernel, grid: &TimeGrid, max_order: usize) -> Result<Self> {
        let order = kernel.order();
        if order > max_order {
            return Err(Error::Config(format!("kernel order {order} above maximum {max_order}")));
        }
        if order == 0 {
            return Ok(Self {
                grid: *grid,
                order,
                terms: Vec::new(),
                constant: kernel.weight(),
            });
        }
        let sampled: Vec<Vec<f64>> = kernel.factors().iter().map(|g| g.on_grid(grid)).collect();
        let nf = factorial(order);
        let terms = kernel
            .simplex_terms()
            .into_iter()
            .map(|t| GridTerm {
                coeff: nf * t.coeff,
                values: t.factors.iter().map(|&i| sampled[i].clone()).collect(),
            })
            .collect();
        Ok(Self {
            grid: *grid,
            order,
            terms,
            constant: 0.0,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `I_n(f_n)` against the increments of `driver`.
    pub fn integrate(&self, driver: &SamplePath) -> Result<f64> {
        self.grid.ensure_same(&driver.grid)?;
        Ok(self.integrate_increments(&driver.increments))
    }

    pub(crate) fn integrate_increments(&self, dx: &[f64]) -> f64 {
        if self.order == 0 {
            return self.constant;
        }
        self.terms
            .iter()
            .map(|t| t.coeff * forward_chain(&t.values, dx, dx.len()))
            .sum()
    }

    /// `I_n(f_n)` restricted to the first `upto` steps, i.e. evaluated at `t_upto`.
    pub fn integrate_until(&self, driver: &SamplePath, upto: usize) -> Result<f64> {
        self.grid.ensure_same(&driver.grid)?;
        if self.order == 0 {
            return Ok(self.constant);
        }
        let upto = upto.min(self.grid.n_steps());
        Ok(self
            .terms
            .iter()
            .map(|t| t.coeff * forward_chain(&t.values, &driver.increments, upto))
            .sum())
    }

    /// `∂ I_n / ∂ ΔX_k` for every step `k`.
    pub fn derivative_profile(&self, driver: &SamplePath) -> Result<Vec<f64>> {
        self.grid.ensure_same(&driver.grid)?;
        let mut out = vec![0.0; self.grid.n_steps()];
        self.accumulate_derivative(&driver.increments, 1.0, &mut out);
        Ok(out)
    }

    pub(crate) fn accumulate_derivative(&self, dx: &[f64], scale: f64, out: &mut [f64]) {
        for t in &self.terms {
            contraction(&t.values, dx, scale * t.coeff, out);
        }
    }
}

fn forward_chain(values: &[Vec<f64>], dx: &[f64], upto: usize) -> f64 {
    let n = values.len();
    let mut j = [0.0f64; DEFAULT_MAX_ORDER + 1];
    let mut big;
    let acc: &mut [f64] = if n < j.len() {
        &mut j[..=n]
    } else {
        big = vec![0.0; n + 1];
        &mut big[..]
    };
    acc[0] = 1.0;
    for (step, &d) in dx[..upto].iter().enumerate() {
        for k in (1..=n).rev() {
            acc[k] += acc[k - 1] * values[k - 1][step] * d;
        }
    }
    acc[n]
}

/// Adds `scale · ∂J_n/∂ΔX_k` to `out[k]` for every step, where
/// `∂J_n/∂ΔX_k = Σ_i L_{i-1}(k) · g_i(t_k) · R_{i+1}(k)`, `L` being the
/// partial chain over steps `< k` and `R` the tail chain over steps `> k`.
fn contraction(values: &[Vec<f64>], dx: &[f64], scale: f64, out: &mut [f64]) {
    let n = values.len();
    let steps = dx.len();
    // forward partial chains L_0..L_{n-1} before each step
    let mut lower = vec![0.0; n * steps];
    let mut acc = vec![0.0; n + 1];
    acc[0] = 1.0;
    for step in 0..steps {
        lower[step * n..(step + 1) * n].copy_from_slice(&acc[..n]);
        for k in (1..=n).rev() {
            acc[k] += acc[k - 1] * values[k - 1][step] * dx[step];
        }
    }
    // backward tails: tail[m] = chain of factors m+1..n over steps > k
    let mut tail = vec![0.0; n + 1];
    tail[n] = 1.0;
    for step in (0..steps).rev() {
        let l = &lower[step * n..(step + 1) * n];
        let d: f64 = (0..n).map(|i| l[i] * values[i][step] * tail[i + 1]).sum();
        out[step] += scale * d;
        for m in 0..n {
            tail[m] += values[m][step] * dx[step] * tail[m + 1];
        }
    }
}

/// `I_n(f_n)` of one kernel against a driver.
pub fn iterated_integral(kernel: &SimplexKernel, driver: &SamplePath) -> Result<f64> {
    CompiledKernel::new(kernel, &driver.grid)?.integrate(driver)
}

/// A chaos vector bound to a grid.
#[derive(Debug, Clone)]
pub struct CompiledChaos {
    constant: f64,
    kernels: Vec<CompiledKernel>,
    grid: TimeGrid,
}

impl CompiledChaos {
    pub fn new(f: &ChaosVector, grid: &TimeGrid) -> Result<Self> {
        Self::with_max_order(f, grid, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(f: &ChaosVector, grid: &TimeGrid, max_order: usize) -> Result<Self> {
        f.validate(max_order)?;
        let kernels = f
            .kernels
            .iter()
            .map(|k| CompiledKernel::with_max_order(k, grid, max_order))
            .collect::<Result<_>>()?;
        Ok(Self {
            constant: f.constant,
            kernels,
            grid: *grid,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `f(∅) + Σ I_n(f_n)` against the increments of `driver`.
    pub fn evaluate(&self, driver: &SamplePath) -> Result<f64> {
        self.grid.ensure_same(&driver.grid)?;
        Ok(self.evaluate_increments(&driver.increments))
    }

    pub(crate) fn evaluate_increments(&self, dx: &[f64]) -> f64 {
        self.constant + self.kernels.iter().map(|k| k.integrate_increments(dx)).sum::<f64>()
    }

    /// Discrete Malliavin derivative `D_k F = ∂F/∂ΔX_k` for every step.
    pub fn derivative_profile(&self, driver: &SamplePath) -> Result<Vec<f64>> {
        self.grid.ensure_same(&driver.grid)?;
        let mut out = vec![0.0; self.grid.n_steps()];
        for k in &self.kernels {
            k.accumulate_derivative(&driver.increments, 1.0, &mut out);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::step::StepFunction;
    use crate::paths::{add_jump_at_step, simulate_brownian, simulate_compensated_poisson};
    use crate::rng::RngStream;

    fn grid(n: usize) -> TimeGrid {
        TimeGrid::unit(n).unwrap()
    }

    fn h() -> StepFunction {
        StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.5]).unwrap()
    }

    #[test]
    fn first_order_indicator_is_terminal_value() {
        let g = grid(100);
        let b = simulate_brownian(&g, RngStream::brownian(1, 0));
        let k = SimplexKernel::power(&StepFunction::indicator(0.0, 1.0).unwrap(), 1, 1.0);
        let v = iterated_integral(&k, &b).unwrap();
        assert!((v - b.terminal()).abs() < 1e-12);
    }

    #[test]
    fn order_zero_is_constant() {
        let g = grid(10);
        let b = simulate_brownian(&g, RngStream::brownian(1, 0));
        assert_eq!(iterated_integral(&SimplexKernel::constant(2.5), &b).unwrap(), 2.5);
    }

    #[test]
    fn order_limit_and_grid_mismatch() {
        let g = grid(10);
        let b = simulate_brownian(&g, RngStream::brownian(1, 0));
        let k = SimplexKernel::power(&h(), 9, 1.0);
        assert!(matches!(iterated_integral(&k, &b), Err(Error::Config(_))));
        let c = CompiledKernel::new(&SimplexKernel::power(&h(), 2, 1.0), &grid(11)).unwrap();
        assert!(matches!(c.integrate(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn second_order_matches_brute_force_double_sum() {
        let g = grid(37);
        let p = simulate_compensated_poisson(&g, RngStream::poisson(3, 2));
        let f = h();
        let k = StepFunction::new(vec![0.1, 0.6, 0.9], vec![2.0, -1.0]).unwrap();
        let kern = SimplexKernel::symmetric(vec![f.clone(), k.clone()], 1.0);
        let fv = f.on_grid(&g);
        let kv = k.on_grid(&g);
        let dx = &p.increments;
        let mut brute = 0.0;
        for i in 0..37 {
            for j in i + 1..37 {
                brute += (fv[i] * kv[j] + kv[i] * fv[j]) * dx[i] * dx[j];
            }
        }
        let v = iterated_integral(&kern, &p).unwrap();
        assert!((v - brute).abs() < 1e-12, "{v} vs {brute}");
    }

    #[test]
    fn power_kernel_is_affine_in_each_increment() {
        let g = grid(50);
        let b = simulate_brownian(&g, RngStream::brownian(4, 4));
        let c = CompiledKernel::new(&SimplexKernel::power(&h(), 3, 1.0), &g).unwrap();
        let base = c.integrate(&b).unwrap();
        let profile = c.derivative_profile(&b).unwrap();
        for step in [1usize, 10, 25, 50] {
            let a = 0.37;
            let plus = c.integrate(&add_jump_at_step(&b, step, a)).unwrap();
            assert!((plus - base - a * profile[step - 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_matches_finite_differences_for_ordered_kernel() {
        let g = grid(40);
        let b = simulate_brownian(&g, RngStream::brownian(5, 5));
        let k = SimplexKernel::ordered(
            vec![
                h(),
                StepFunction::indicator(0.2, 1.0).unwrap(),
                StepFunction::constant(0.0, 0.7, -2.0).unwrap(),
            ],
            0.8,
        );
        let c = CompiledKernel::new(&k, &g).unwrap();
        let profile = c.derivative_profile(&b).unwrap();
        for step in 1..=40 {
            let a = 1e-3;
            let up = c.integrate(&add_jump_at_step(&b, step, a)).unwrap();
            let down = c.integrate(&add_jump_at_step(&b, step, -a)).unwrap();
            assert!(((up - down) / (2.0 * a) - profile[step - 1]).abs() < 1e-9);
        }
    }

    #[test]
    fn integrate_until_is_running_value() {
        let g = grid(20);
        let b = simulate_brownian(&g, RngStream::brownian(6, 0));
        let c = CompiledKernel::new(
            &SimplexKernel::power(&StepFunction::indicator(0.0, 1.0).unwrap(), 1, 1.0),
            &g,
        )
        .unwrap();
        for k in 0..=20 {
            assert!((c.integrate_until(&b, k).unwrap() - b.levels[k]).abs() < 1e-12);
        }
    }
}
