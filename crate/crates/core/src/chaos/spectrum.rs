//! Spectral weights of the rotation process of an exponential vector.
//!
//! `c_n² = c_{−n}² = Σ_k (‖h‖²/2)^{2k+n} / (k! (n+k)!)`, i.e. the modified
//! Bessel function `I_n(‖h‖²)`. Terms are generated by their ratios
//! `x² / ((k+1)(n+k+1))` so no factorial is ever formed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub h_norm_sq: f64,
    /// `coefficients[n] = c_n²` for `n = 0..=truncation_n`.
    pub coefficients: Vec<f64>,
    pub truncation_n: usize,
    pub series_tolerance: f64,
}

impl SpectrumReport {
    /// `c_0² + 2 Σ_{n ≥ 1} c_n²`, the total mass.
    pub fn total_mass(&self) -> f64 {
        let mut sum = Neumaier::default();
        for (n, c) in self.coefficients.iter().enumerate().rev() {
            sum.add(if n == 0 { *c } else { 2.0 * c });
        }
        sum.value()
    }

    /// `|Σ c_n² − e^{‖h‖²}|`.
    pub fn parseval_defect(&self) -> f64 {
        (self.total_mass() - self.h_norm_sq.exp()).abs()
    }

    /// `Σ_{n ∈ ℤ} c_n² e^{inφ} = c_0² + 2 Σ_{n ≥ 1} c_n² cos(nφ)`.
    pub fn fourier(&self, phi: f64) -> f64 {
        let mut sum = Neumaier::default();
        for (n, c) in self.coefficients.iter().enumerate().rev() {
            sum.add(if n == 0 { *c } else { 2.0 * c * (n as f64 * phi).cos() });
        }
        sum.value()
    }
}

pub fn bessel_spectrum(h_norm_sq: f64, n_max: i64, tol: f64) -> Result<SpectrumReport> {
    if n_max < 0 {
        return Err(Error::Domain(format!("n_max must be non-negative, got {n_max}")));
    }
    if !(h_norm_sq.is_finite() && h_norm_sq >= 0.0) {
        return Err(Error::Domain(format!(
            "‖h‖² must be finite and non-negative, got {h_norm_sq}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let x = 0.5 * h_norm_sq;
    let x2 = x * x;
    let n_max = n_max as usize;
    let mut coefficients = Vec::with_capacity(n_max + 1);
    // leading term x^n / n!
    let mut lead = 1.0f64;
    for n in 0..=n_max {
        if n > 0 {
            lead *= x / n as f64;
        }
        let mut sum = Neumaier::default();
        let mut term = lead;
        let mut k = 0usize;
        while term > 0.0 {
            sum.add(term);
            term *= x2 / ((k + 1) as f64 * (n + k + 1) as f64);
            k += 1;
            if term < tol * sum.value() {
                sum.add(term);
                break;
            }
        }
        coefficients.push(sum.value());
    }
    Ok(SpectrumReport {
        h_norm_sq,
        coefficients,
        truncation_n: n_max,
        series_tolerance: tol,
    })
}

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
