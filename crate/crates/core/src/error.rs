use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// Non-finite state produced by a time-stepping scheme.
    #[error("numerical blowup at step {step}")]
    NumericalBlowup { step: usize },

    /// The first-variation process vanished at the perturbation point.
    #[error("singular flow: first variation is zero at step {step}")]
    SingularFlow { step: usize },
}
