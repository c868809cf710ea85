use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a special function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exponents with `2 + a + b <= 0`; the conformal time transform does not exist.
    #[error("singular parameters: 2 + a + b = {0} must be positive")]
    SingularParameters(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    /// Integration of the mode with wavenumber `k` broke down.
    #[error("numerical failure for mode k = {k}: {reason}")]
    NumericalFailure { k: f64, reason: String },

    /// Several modes failed in a batch evolution.
    #[error("{} mode(s) failed, first: {}", .0.len(), .0[0])]
    ModeFailures(Vec<Error>),

    #[error("empty fit window: {0}")]
    EmptyWindow(String),

    #[error("trajectories end at different times ({0} vs {1})")]
    InconsistentEndTimes(f64, f64),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("non-positive power {value} at k = {k}")]
    NonPositivePower { k: f64, value: f64 },

    #[error("CFL violation: step {dt} exceeds bound {bound}")]
    Cfl { dt: f64, bound: f64 },

    #[error("non-finite lattice value at step {step}")]
    NonFinite { step: usize },
}

impl Error {
    /// True for failures of the numerical integration itself (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NumericalFailure { .. } | Error::Cfl { .. } | Error::NonFinite { .. } => true,
            Error::ModeFailures(errs) => errs.iter().any(Error::is_numerical),
            _ => false,
        }
    }
}
