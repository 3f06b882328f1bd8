//! Chaos kernels built from elementary tensors of step functions.
//!
//! A [`SimplexKernel`] of order `n` stands for a symmetric function `f_n` on
//! `ℝ₊ⁿ`. Two flavours are supported:
//!
//! * `symmetrize = true`: `f_n = w · sym(g_1 ⊗ … ⊗ g_n)`;
//! * `symmetrize = false`: `f_n` is the symmetric function whose restriction
//!   to the ordered simplex `s_1 < … < s_n` equals `w · g_1(s_1)…g_n(s_n)`.
//!
//! Both are reduced to a list of simplex terms `c · g_{π(1)} ⊗ … ⊗ g_{π(n)}`
//! restricted to the simplex, which is what the integrator consumes. The
//! multiple integral is `I_n(f_n) = n! Σ c ∫_{Δ_n} g_π dX`.

use serde::{Deserialize, Serialize};

use super::step::{simplex_integral, StepFunction};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelSpec", into = "KernelSpec")]
pub struct SimplexKernel {
    factors: Vec<StepFunction>,
    weight: f64,
    symmetrize: bool,
}

/// On-disk form: `{order, factors: [{breakpoints, values}], weight, symmetrize?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelSpec {
    pub order: usize,
    #[serde(default)]
    pub factors: Vec<StepFunction>,
    #[serde(default = "one")]
    pub weight: f64,
    #[serde(default = "yes")]
    pub symmetrize: bool,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl TryFrom<KernelSpec> for SimplexKernel {
    type Error = Error;
    fn try_from(spec: KernelSpec) -> Result<Self> {
        if spec.factors.len() != spec.order {
            return Err(Error::InvalidKernel(format!(
                "order {} with {} factors",
                spec.order,
                spec.factors.len()
            )));
        }
        if !spec.weight.is_finite() {
            return Err(Error::InvalidKernel("non-finite weight".into()));
        }
        Ok(Self {
            factors: spec.factors,
            weight: spec.weight,
            symmetrize: spec.symmetrize,
        })
    }
}

impl From<SimplexKernel> for KernelSpec {
    fn from(k: SimplexKernel) -> Self {
        KernelSpec {
            order: k.factors.len(),
            factors: k.factors,
            weight: k.weight,
            symmetrize: k.symmetrize,
        }
    }
}

/// One term `coeff · g_{labels[0]} ⊗ … ⊗ g_{labels[n-1]}` on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexTerm {
    pub coeff: f64,
    pub factors: Vec<usize>,
}

impl SimplexKernel {
    /// `w · sym(g_1 ⊗ … ⊗ g_n)`.
    pub fn symmetric(factors: Vec<StepFunction>, weight: f64) -> Self {
        Self {
            factors,
            weight,
            symmetrize: true,
        }
    }

    /// Kernel equal to `w · g_1 ⊗ … ⊗ g_n` on the ordered simplex.
    pub fn ordered(factors: Vec<StepFunction>, weight: f64) -> Self {
        Self {
            factors,
            weight,
            symmetrize: false,
        }
    }

    /// `w · h^{⊗n}`.
    pub fn power(h: &StepFunction, n: usize, weight: f64) -> Self {
        Self::symmetric(vec![h.clone(); n], weight)
    }

    pub fn constant(value: f64) -> Self {
        Self::symmetric(Vec::new(), value)
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[StepFunction] {
        &self.factors
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrize
    }

    pub fn with_weight(&self, weight: f64) -> Self {
        Self { weight, ..self.clone() }
    }

    /// Simplex expansion of the kernel.
    ///
    /// For a symmetrized tensor, identical factors are grouped so that
    /// `h^{⊗n}` expands to a single term.
    pub fn simplex_terms(&self) -> Vec<SimplexTerm> {
        let n = self.order();
        if !self.symmetrize || n <= 1 {
            return vec![SimplexTerm {
                coeff: self.weight,
                factors: (0..n).collect(),
            }];
        }
        // label each factor by the first equal factor
        let labels: Vec<usize> = (0..n)
            .map(|i| (0..=i).find(|&j| self.factors[j] == self.factors[i]).unwrap_or(i))
            .collect();
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        let mut multiplicity = 1.0;
        let mut run = 1usize;
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                run += 1;
                multiplicity *= run as f64;
            } else {
                run = 1;
            }
        }
        let coeff = self.weight * multiplicity / factorial(n);
        let mut terms = Vec::new();
        let mut perm = sorted;
        loop {
            terms.push(SimplexTerm {
                coeff,
                factors: perm.clone(),
            });
            if !next_permutation(&mut perm) {
                break;
            }
        }
        terms
    }

    /// `⟨f, g⟩_{L²(λ_n)}` of the two symmetric functions, exact.
    pub fn inner(&self, other: &SimplexKernel) -> Result<f64> {
        if self.order() != other.order() {
            return Err(Error::InvalidKernel(format!(
                "inner product of orders {} and {}",
                self.order(),
                other.order()
            )));
        }
        let n = self.order();
        if n == 0 {
            return Ok(self.weight * other.weight);
        }
        if self.symmetrize && other.symmetrize {
            return Ok(self.weight * other.weight * gram_permanent(&self.factors, &other.factors) / factorial(n));
        }
        Ok(self.inner_by_simplex(other))
    }

    /// Inner product computed from the two simplex expansions:
    /// `⟨f, g⟩ = n! Σ c c' ∫_{Δ_n} Π_i g_{π(i)} g'_{π'(i)}`.
    pub fn inner_by_simplex(&self, other: &SimplexKernel) -> f64 {
        let n = self.order();
        let mut total = 0.0;
        for a in self.simplex_terms() {
            for b in other.simplex_terms() {
                let prods: Vec<StepFunction> = (0..n)
                    .map(|i| self.factors[a.factors[i]].product(&other.factors[b.factors[i]]))
                    .collect();
                let refs: Vec<&StepFunction> = prods.iter().collect();
                total += a.coeff * b.coeff * simplex_integral(&refs);
            }
        }
        factorial(n) * total
    }

    pub fn square_norm(&self) -> f64 {
        self.inner(self).unwrap_or(f64::NAN)
    }

    /// Kernels of order `n - 1` whose sum is `n · f_n(·, u)` restricted to
    /// the open simplex, i.e. `D_u I_n(f_n) = I_{n-1}(Σ returned kernels)`.
    pub fn contract_at(&self, u: f64) -> Vec<SimplexKernel> {
        let n = self.order();
        if n == 0 {
            return Vec::new();
        }
        if self.symmetrize {
            (0..n)
                .map(|i| {
                    let rest: Vec<StepFunction> = (0..n).filter(|&j| j != i).map(|j| self.factors[j].clone()).collect();
                    SimplexKernel::symmetric(rest, self.weight * self.factors[i].eval(u))
                })
                .collect()
        } else {
            (0..n)
                .map(|i| {
                    // factors before i live on [0, u), factors after on [u, ∞)
                    let rest: Vec<StepFunction> = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| {
                            let window = if j < i {
                                StepFunction::indicator(0.0, u.max(f64::MIN_POSITIVE))
                            } else {
                                StepFunction::indicator(u, f64::MAX)
                            };
                            window
                                .map(|w| self.factors[j].product(&w))
                                .unwrap_or_else(|_| StepFunction::zero())
                        })
                        .collect();
                    SimplexKernel::ordered(rest, n as f64 * self.weight * self.factors[i].eval(u))
                })
                .collect()
        }
    }
}

/// `Σ_π Π_i ⟨g_i, k_{π(i)}⟩`, by Ryser's formula with Gray-code subset updates.
fn gram_permanent(gs: &[StepFunction], ks: &[StepFunction]) -> f64 {
    let n = gs.len();
    if n == 0 {
        return 1.0;
    }
    if gs.iter().all(|g| *g == gs[0]) && ks.iter().all(|k| *k == ks[0]) {
        return factorial(n) * gs[0].inner(&ks[0]).powi(n as i32);
    }
    let gram: Vec<Vec<f64>> = gs.iter().map(|g| ks.iter().map(|k| g.inner(k)).collect()).collect();
    // row sums over the current column subset
    let mut sums = vec![0.0; n];
    let mut total = 0.0;
    let mut subset = 0u64;
    for step in 1u64..(1u64 << n) {
        let col = step.trailing_zeros() as usize;
        subset ^= 1 << col;
        let sign_in = if subset & (1 << col) != 0 { 1.0 } else { -1.0 };
        for (s, row) in sums.iter_mut().zip(&gram) {
            *s += sign_in * row[col];
        }
        let size = subset.count_ones() as usize;
        let term: f64 = sums.iter().product();
        total += if (n - size).is_multiple_of(2) { term } else { -term };
    }
    total
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Lexicographic successor; `false` once the last permutation is reached.
fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// A finite chaos expansion `F = f(∅) + Σ I_n(f_n)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChaosVector {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub kernels: Vec<SimplexKernel>,
}

impl ChaosVector {
    pub fn new(constant: f64, kernels: Vec<SimplexKernel>) -> Self {
        Self { constant, kernels }
    }

    pub fn single(kernel: SimplexKernel) -> Self {
        Self::new(0.0, vec![kernel])
    }

    /// `Σ_{k ≤ n_max} I_k(h^{⊗k} / k!)`, the truncated exponential vector.
    pub fn exponential_truncated(h: &StepFunction, n_max: usize) -> Self {
        let kernels = (1..=n_max)
            .map(|k| SimplexKernel::power(h, k, 1.0 / factorial(k)))
            .collect();
        Self::new(1.0, kernels)
    }

    pub fn max_order(&self) -> usize {
        self.kernels.iter().map(|k| k.order()).max().unwrap_or(0)
    }

    /// `E[F]`.
    pub fn mean(&self) -> f64 {
        self.constant
            + self
                .kernels
                .iter()
                .filter(|k| k.order() == 0)
                .map(|k| k.weight())
                .sum::<f64>()
    }

    /// `‖f_n‖²` for the summed kernel of order `n`.
    pub fn order_square_norm(&self, n: usize) -> f64 {
        let ks: Vec<&SimplexKernel> = self.kernels.iter().filter(|k| k.order() == n).collect();
        let mut total = 0.0;
        for a in &ks {
            for b in &ks {
                total += a.inner(b).unwrap_or(f64::NAN);
            }
        }
        total
    }

    fn orders(&self) -> Vec<usize> {
        let mut orders: Vec<usize> = self.kernels.iter().map(|k| k.order()).filter(|&n| n > 0).collect();
        orders.sort_unstable();
        orders.dedup();
        orders
    }

    /// `E[F²] = E[F]² + Σ_{n ≥ 1} n! ‖f_n‖²`.
    pub fn second_moment(&self) -> f64 {
        self.mean().powi(2) + self.variance()
    }

    pub fn variance(&self) -> f64 {
        self.orders()
            .into_iter()
            .map(|n| factorial(n) * self.order_square_norm(n))
            .sum()
    }

    /// `Σ n · n! ‖f_n‖² = E[Γ[F]]`, twice the Ornstein–Uhlenbeck energy.
    pub fn energy(&self) -> f64 {
        self.orders()
            .into_iter()
            .map(|n| n as f64 * factorial(n) * self.order_square_norm(n))
            .sum()
    }

    /// Keeps only the terms of chaos order `n`.
    pub fn order_component(&self, n: usize) -> Self {
        let kernels = self.kernels.iter().filter(|k| k.order() == n).cloned().collect();
        Self::new(if n == 0 { self.constant } else { 0.0 }, kernels)
    }

    pub fn validate(&self, max_order: usize) -> Result<()> {
        if !self.constant.is_finite() {
            return Err(Error::InvalidKernel("non-finite constant".into()));
        }
        if let Some(k) = self.kernels.iter().find(|k| k.order() > max_order) {
            return Err(Error::Config(format!(
                "kernel order {} above maximum {max_order}",
                k.order()
            )));
        }
        Ok(())
    }
}
