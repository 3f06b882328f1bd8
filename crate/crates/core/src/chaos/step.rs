use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paths::TimeGrid;

/// Piecewise-constant function on right-open intervals
/// `[breakpoints[i], breakpoints[i + 1])`, zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = Error;
    fn try_from(raw: RawStep) -> Result<Self> {
        StepFunction::new(raw.breakpoints, raw.values)
    }
}

impl From<StepFunction> for RawStep {
    fn from(s: StepFunction) -> Self {
        RawStep {
            breakpoints: s.breakpoints,
            values: s.values,
        }
    }
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidKernel(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidKernel("non-finite breakpoint or value".into()));
        }
        if breakpoints[0] < 0.0 {
            return Err(Error::InvalidKernel("breakpoints must be non-negative".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidKernel("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { breakpoints, values })
    }

    /// `value · 1_{[a, b)}`.
    pub fn constant(a: f64, b: f64, value: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![value])
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::constant(a, b, 1.0)
    }

    pub fn zero() -> Self {
        Self {
            breakpoints: vec![0.0],
            values: Vec::new(),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        // index of the last breakpoint <= t
        let i = self.breakpoints.partition_point(|&b| b <= t);
        if i == 0 || i > self.values.len() {
            0.0
        } else {
            self.values[i - 1]
        }
    }

    /// Values at the left endpoints `t_0, …, t_{n-1}` of every grid step.
    pub fn on_grid(&self, grid: &TimeGrid) -> Vec<f64> {
        (0..grid.n_steps()).map(|k| self.eval(grid.time(k))).collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Pointwise product, on the merged breakpoints.
    pub fn product(&self, other: &StepFunction) -> StepFunction {
        let pts = merged_breakpoints([self, other]);
        if pts.len() < 2 {
            return Self::zero();
        }
        let values = pts.windows(2).map(|w| self.eval(w[0]) * other.eval(w[0])).collect();
        Self {
            breakpoints: pts,
            values,
        }
    }

    pub fn integral(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| v * (w[1] - w[0]))
            .sum()
    }

    /// `⟨self, other⟩_{L²}`, exact.
    pub fn inner(&self, other: &StepFunction) -> f64 {
        self.product(other).integral()
    }

    pub fn square_norm(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| v * v * (w[1] - w[0]))
            .sum()
    }
}

pub(crate) fn merged_breakpoints<'a>(fs: impl IntoIterator<Item = &'a StepFunction>) -> Vec<f64> {
    let mut pts: Vec<f64> = fs.into_iter().flat_map(|f| f.breakpoints.iter().copied()).collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

/// `∫_{0 < s_1 < … < s_n} φ_1(s_1)…φ_n(s_n) ds`, exact.
///
/// Between consecutive merged breakpoints every `φ_i` is constant, so the
/// partial integrals `F_k(s) = ∫_0^s F_{k-1}(r) φ_k(r) dr` are polynomials of
/// degree `k` on each piece and can be carried as coefficient vectors.
pub fn simplex_integral(factors: &[&StepFunction]) -> f64 {
    let n = factors.len();
    if n == 0 {
        return 1.0;
    }
    let pts = merged_breakpoints(factors.iter().copied());
    // at[k] = F_k at the left end of the current piece
    let mut at = vec![0.0; n + 1];
    at[0] = 1.0;
    let mut poly: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    for w in pts.windows(2) {
        let (left, width) = (w[0], w[1] - w[0]);
        poly[0] = vec![1.0];
        for k in 1..=n {
            let v = factors[k - 1].eval(left);
            let mut p = Vec::with_capacity(k + 1);
            p.push(at[k]);
            p.extend(poly[k - 1].iter().enumerate().map(|(j, c)| v * c / (j + 1) as f64));
            poly[k] = p;
        }
        for k in 1..=n {
            at[k] = poly[k].iter().rev().fold(0.0, |acc, c| acc * width + c);
        }
    }
    at[n]
}
