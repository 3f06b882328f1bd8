//! Simulation of Brownian and normal-martingale drivers, discrete Wiener
//! chaos, and Malliavin gradients computed by inserting a jump into the
//! driving path.
//!
//! ```
//! use lentparticle::chaos::{ChaosVector, CompiledChaos, SimplexKernel, StepFunction};
//! use lentparticle::paths::{simulate_brownian, TimeGrid};
//! use lentparticle::rng::RngStream;
//!
//! let grid = TimeGrid::unit(100).unwrap();
//! let h = StepFunction::indicator(0.0, 1.0).unwrap();
//! let f = CompiledChaos::new(&ChaosVector::single(SimplexKernel::power(&h, 1, 1.0)), &grid).unwrap();
//! let b = simulate_brownian(&grid, RngStream::brownian(7, 0));
//! assert!((f.evaluate(&b).unwrap() - b.terminal()).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos;
pub mod error;
pub mod lent;
pub mod mehler;
pub mod paths;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use lent::{GradientEstimate, GradientMethod};
pub use paths::{MartingaleKind, SamplePath, TimeGrid};
pub use rng::RngStream;
pub use stats::EstimatorReport;

/// Library version, recorded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
