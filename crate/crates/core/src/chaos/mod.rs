//! Step-function kernels, iterated integrals and chaotic extensions.

pub mod expvec;
pub mod extension;
pub mod integral;
pub mod kernel;
pub mod spectrum;
pub mod step;

pub use expvec::{exponential_vector, ExpVectorValue, ExponentialVector};
pub use extension::{chaotic_extension, covariance_curve, CovariancePoint, ExtendedExponential, RotatedFunctional};
pub use integral::{iterated_integral, CompiledChaos, CompiledKernel};
pub use kernel::{ChaosVector, KernelSpec, SimplexKernel, SimplexTerm, DEFAULT_MAX_ORDER};
pub use spectrum::{bessel_spectrum, SpectrumReport};
pub use step::{simplex_integral, StepFunction};
