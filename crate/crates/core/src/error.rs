use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular input: {0}")]
    SingularInput(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no convergence after {iterations} iterations (last increment {increment:.3e}, certificate bound {certificate} iterations)")]
    Iteration {
        iterations: usize,
        increment: f64,
        certificate: usize,
    },
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("inconsistent evaluation: gap {gap:.3e} exceeds {allowed:.3e}")]
    Inconsistency { gap: f64, allowed: f64 },
    #[error("near-zero division: {0}")]
    NearZeroDivision(String),
    #[error("extrapolation error: {0}")]
    Extrapolation(String),
    #[error("step size underflow at x = {x:.6e}")]
    Stiffness { x: f64 },
    #[error("resonance at zero energy: {0}")]
    ResonanceAtZero(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("k0 too small: Born term ratio {ratio:.3} at order {order}")]
    K0TooSmall { order: usize, ratio: f64 },
    #[error("grid error: {0}")]
    Grid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::SingularInput(_) => "singular_input",
            Error::Hypothesis(_) => "hypothesis",
            Error::Parameter(_) => "parameter",
            Error::Iteration { .. } => "iteration",
            Error::Truncation(_) => "truncation",
            Error::Inconsistency { .. } => "inconsistency",
            Error::NearZeroDivision(_) => "near_zero_division",
            Error::Extrapolation(_) => "extrapolation",
            Error::Stiffness { .. } => "stiffness",
            Error::ResonanceAtZero(_) => "resonance_at_zero",
            Error::Resolution(_) => "resolution",
            Error::K0TooSmall { .. } => "k0_too_small",
            Error::Grid(_) => "grid",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
