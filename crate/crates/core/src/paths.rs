//! Driving processes on a shared uniform grid.
//!
//! A [`SamplePath`] stores per-step increments together with the levels at
//! every grid point. Integration consumes increments, functionals consume
//! levels, and both are O(n). Jumps of the Poisson-type drivers are snapped
//! forward to the first grid point at or after the drawn time, so a jump at
//! grid point `t_k` lives in increment `k - 1` and is seen by every level
//! `t_j`, `j >= k`.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Relative slack used when snapping a time onto the grid.
const SNAP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, n_steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
        }
        if n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        Ok(Self { horizon, n_steps })
    }

    /// The unit interval split into `n_steps` steps.
    pub fn unit(n_steps: usize) -> Result<Self> {
        Self::new(1.0, n_steps)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    /// Grid point `t_k`; `t_0 = 0` and `t_n = T` exactly.
    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.horizon
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| self.time(k)).collect()
    }

    /// Index of the first grid point `t_k >= u`, for `u` in `(0, T]`.
    /// The result is in `1..=n_steps`.
    pub fn snap_forward(&self, u: f64) -> Result<usize> {
        if !(u > 0.0 && u <= self.horizon * (1.0 + SNAP_EPS)) {
            return Err(Error::Domain(format!("time {u} outside (0, {}]", self.horizon)));
        }
        let k = (u / self.dt() - SNAP_EPS).ceil().max(1.0) as usize;
        Ok(k.min(self.n_steps))
    }

    /// Index of the first grid point `t_k >= t`, for `t` in `[0, T]`.
    pub fn index_at_or_after(&self, t: f64) -> Result<usize> {
        if t == 0.0 {
            Ok(0)
        } else {
            self.snap_forward(t)
        }
    }

    /// Whether `u` coincides with a grid point up to snapping slack.
    pub fn is_grid_point(&self, u: f64) -> bool {
        let x = u / self.dt();
        (x - x.round()).abs() <= SNAP_EPS * x.abs().max(1.0)
    }

    pub fn ensure_same(&self, other: &TimeGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "grid mismatch: (T={}, n={}) vs (T={}, n={})",
                self.horizon, self.n_steps, other.horizon, other.n_steps
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathKind {
    Brownian,
    CompensatedPoisson,
    SymmetricCompoundPoisson,
    Rotation,
    Mixture,
}

/// A jump visible from grid point `step` onwards, carried by increment
/// `step - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub step: usize,
    /// Snapped time `t_step`.
    pub time: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub grid: TimeGrid,
    pub kind: PathKind,
    /// `increments[k] = X(t_{k+1}) - X(t_k)`.
    pub increments: Vec<f64>,
    /// `levels[k] = X(t_k)`, `levels.len() == n_steps + 1`.
    pub levels: Vec<f64>,
    pub jumps: Vec<Jump>,
}

impl SamplePath {
    pub fn from_increments(grid: TimeGrid, kind: PathKind, increments: Vec<f64>) -> Result<Self> {
        if increments.len() != grid.n_steps() {
            return Err(Error::Dimension(format!(
                "{} increments for {} steps",
                increments.len(),
                grid.n_steps()
            )));
        }
        let levels = cumulative(&increments);
        Ok(Self {
            grid,
            kind,
            increments,
            levels,
            jumps: Vec::new(),
        })
    }

    pub fn zero(grid: TimeGrid) -> Self {
        Self {
            grid,
            kind: PathKind::Mixture,
            increments: vec![0.0; grid.n_steps()],
            levels: vec![0.0; grid.n_steps() + 1],
            jumps: Vec::new(),
        }
    }

    pub fn terminal(&self) -> f64 {
        self.levels[self.grid.n_steps()]
    }

    /// Level at the first grid point at or after `t`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        Ok(self.levels[self.grid.index_at_or_after(t)?])
    }

    /// Jumps with `time <= t`.
    pub fn jumps_until(&self, t: f64) -> impl Iterator<Item = &Jump> {
        self.jumps.iter().filter(move |j| j.time <= t)
    }

    /// Path obtained by scaling every increment, level and jump by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            kind: PathKind::Mixture,
            increments: self.increments.iter().map(|x| c * x).collect(),
            levels: self.levels.iter().map(|x| c * x).collect(),
            jumps: scale_jumps(&self.jumps, c),
        }
    }
}

fn cumulative(increments: &[f64]) -> Vec<f64> {
    let mut levels = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    levels.push(acc);
    for dx in increments {
        acc += dx;
        levels.push(acc);
    }
    levels
}

fn scale_jumps(jumps: &[Jump], c: f64) -> Vec<Jump> {
    if c == 0.0 {
        return Vec::new();
    }
    jumps.iter().map(|j| Jump { size: c * j.size, ..*j }).collect()
}

/// Standard Brownian motion: i.i.d. `N(0, dt)` increments, `B_0 = 0`.
pub fn simulate_brownian(grid: &TimeGrid, stream: RngStream) -> SamplePath {
    let mut rng = stream.rng();
    let sd = grid.dt().sqrt();
    let increments: Vec<f64> = (0..grid.n_steps())
        .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let levels = cumulative(&increments);
    SamplePath {
        grid: *grid,
        kind: PathKind::Brownian,
        increments,
        levels,
        jumps: Vec::new(),
    }
}

/// Unit-rate jump times from exponential gaps, snapped forward to the grid,
/// with an optional mark per jump.
fn draw_jumps<R: Rng>(grid: &TimeGrid, rng: &mut R, symmetric_marks: bool) -> Vec<Jump> {
    let mut jumps = Vec::new();
    let mut t = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        t += gap;
        if t > grid.horizon() {
            break;
        }
        let size = if symmetric_marks {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        } else {
            1.0
        };
        // `t` is in (0, T], so snapping cannot fail.
        let step = grid.snap_forward(t).unwrap_or(grid.n_steps());
        jumps.push(Jump {
            step,
            time: grid.time(step),
            size,
        });
    }
    jumps
}

/// Compensated unit-rate Poisson process `Ñ_t = N_t - t`.
///
/// The compensator is carried as a continuous drift `-dt` per step; the
/// level at `t_k` is `N(t_k) - t_k` computed directly. Several jumps may
/// share a step.
pub fn simulate_compensated_poisson(grid: &TimeGrid, stream: RngStream) -> SamplePath {
    let mut rng = stream.rng();
    let jumps = draw_jumps(grid, &mut rng, false);
    let n = grid.n_steps();
    let dt = grid.dt();
    let mut counts = vec![0.0; n];
    for j in &jumps {
        counts[j.step - 1] += 1.0;
    }
    let increments: Vec<f64> = counts.iter().map(|c| c - dt).collect();
    let mut levels = Vec::with_capacity(n + 1);
    let mut count = 0.0;
    levels.push(0.0);
    for (k, c) in counts.iter().enumerate() {
        count += c;
        levels.push(count - grid.time(k + 1));
    }
    SamplePath {
        grid: *grid,
        kind: PathKind::CompensatedPoisson,
        increments,
        levels,
        jumps,
    }
}

/// Compound Poisson process with unit rate and marks `±1` of probability ½,
/// `M_t = Σ_{n ≤ N_t} J_n`. No compensator is needed.
pub fn simulate_symmetric_compound_poisson(grid: &TimeGrid, stream: RngStream) -> SamplePath {
    let mut rng = stream.rng();
    let jumps = draw_jumps(grid, &mut rng, true);
    let mut increments = vec![0.0; grid.n_steps()];
    for j in &jumps {
        increments[j.step - 1] += j.size;
    }
    let levels = cumulative(&increments);
    SamplePath {
        grid: *grid,
        kind: PathKind::SymmetricCompoundPoisson,
        increments,
        levels,
        jumps,
    }
}

/// `(cos θ, sin θ)`, exact at integer multiples of π/2.
pub fn rotation_coefficients(theta: f64) -> (f64, f64) {
    let q = theta / FRAC_PI_2;
    let r = q.round();
    if (q - r).abs() < 1e-12 {
        match (r as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        (theta.cos(), theta.sin())
    }
}

/// `Y^θ = B cos θ + M sin θ`, increment by increment and level by level.
pub fn rotate(brownian: &SamplePath, martingale: &SamplePath, theta: f64) -> Result<SamplePath> {
    let (c, s) = rotation_coefficients(theta);
    combine(brownian, martingale, c, s, PathKind::Rotation)
}

/// `a·X + b·Y` on a shared grid.
pub fn combine(x: &SamplePath, y: &SamplePath, a: f64, b: f64, kind: PathKind) -> Result<SamplePath> {
    x.grid.ensure_same(&y.grid)?;
    let increments = x
        .increments
        .iter()
        .zip(&y.increments)
        .map(|(dx, dy)| a * dx + b * dy)
        .collect();
    let levels = x.levels.iter().zip(&y.levels).map(|(lx, ly)| a * lx + b * ly).collect();
    let mut jumps = scale_jumps(&x.jumps, a);
    jumps.extend(scale_jumps(&y.jumps, b));
    jumps.sort_by_key(|j| j.step);
    Ok(SamplePath {
        grid: x.grid,
        kind,
        increments,
        levels,
        jumps,
    })
}

/// The path `ω + a·1_{· ≥ u}`, with `u` snapped forward to the grid.
pub fn add_unit_jump(path: &SamplePath, u: f64, a: f64) -> Result<SamplePath> {
    let k = path.grid.snap_forward(u)?;
    Ok(add_jump_at_step(path, k, a))
}

/// Same as [`add_unit_jump`] with the snapped grid index given directly.
pub fn add_jump_at_step(path: &SamplePath, step: usize, a: f64) -> SamplePath {
    assert!(step >= 1 && step <= path.grid.n_steps(), "jump step out of range");
    let mut out = path.clone();
    if a == 0.0 {
        return out;
    }
    out.increments[step - 1] += a;
    for level in &mut out.levels[step..] {
        *level += a;
    }
    let pos = out.jumps.partition_point(|j| j.step <= step);
    out.jumps.insert(
        pos,
        Jump {
            step,
            time: path.grid.time(step),
            size: a,
        },
    );
    out.kind = PathKind::Mixture;
    out
}

/// Which normal martingale drives the orthogonal direction of a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MartingaleKind {
    /// Compensated unit-rate Poisson process `Ñ`.
    CompensatedPoisson,
    /// Compound Poisson with symmetric `±1` marks.
    SymmetricCompound,
    /// An independent Brownian copy `B̂`.
    Brownian,
}

impl MartingaleKind {
    pub fn simulate(&self, grid: &TimeGrid, master_seed: u64, path: u64) -> SamplePath {
        match self {
            Self::CompensatedPoisson => simulate_compensated_poisson(grid, RngStream::poisson(master_seed, path)),
            Self::SymmetricCompound => {
                simulate_symmetric_compound_poisson(grid, RngStream::compound(master_seed, path))
            }
            Self::Brownian => simulate_brownian(grid, RngStream::hat(master_seed, path)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CompensatedPoisson => "compensated-poisson",
            Self::SymmetricCompound => "symmetric-compound",
            Self::Brownian => "brownian-copy",
        }
    }
}
