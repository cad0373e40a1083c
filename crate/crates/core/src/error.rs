use thiserror::Error;

/// Failures surfaced by the numerical kernels and the experiment driver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("singular velocity basis: {0}")]
    SingularBasis(String),
    #[error("non-positive quadrature weight {weight:e} at node {index}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("no node placement satisfies the moment constraint: {0}")]
    MomentConstraint(String),
    #[error("no sign change in pole interval {interval} of the dispersion relation")]
    BracketFailure { interval: usize },
    #[error("evaluation at a pole: T - lambda*v = {0:e}")]
    PoleHit(f64),
    #[error("ill-conditioned {what}: condition estimate {cond:e}")]
    IllConditioned { what: &'static str, cond: f64 },
    #[error("non-positive tumbling rate {rate:e} at velocity {velocity}")]
    NonPositiveRate { velocity: f64, rate: f64 },
    #[error("degenerate two-stream denominator {0:e}")]
    DegenerateDenominator(f64),
    #[error("singular cell matrix in {0}")]
    SolveFailure(&'static str),
    #[error("configuration error in field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    /// Name of the module that raised the error, as reported by the CLI.
    pub fn module(&self) -> &'static str {
        match self {
            Error::SingularBasis(_) | Error::NegativeWeight { .. } | Error::MomentConstraint(_) => {
                "quadrature"
            }
            Error::BracketFailure { .. } | Error::PoleHit(_) => "spectral",
            Error::IllConditioned { .. } | Error::NonPositiveRate { .. } => "scattering",
            Error::DegenerateDenominator(_) => "twostream",
            Error::SolveFailure(_) => "kinetic_solver",
            Error::Config { .. } => "config",
            Error::InvalidInput(_) | Error::Io(_) => "experiments",
        }
    }

    /// Process exit code: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
