use num_complex::Complex64;
use thiserror::Error;

/// Errors produced anywhere in the capacitance pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {0} lies outside the accuracy region |Im z| <= 50")]
    AccuracyRegion(Complex64),

    #[error("Ci has a logarithmic singularity at z = 0")]
    Singularity,

    #[error("batch evaluation failed at index {index}: {source}")]
    Batch {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("precision guard: N*pi*kappa = {product:.3} exceeds {threshold}")]
    PrecisionGuard { product: f64, threshold: f64 },

    #[error("kernel entry K[{m}][{n}] = {value:e} violates |K_mn| <= 2 K_00 = {bound:e}")]
    BoundViolation {
        m: usize,
        n: usize,
        value: f64,
        bound: f64,
    },

    #[error("singular system at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("system too badly conditioned (1-norm condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("residual {residual:e} exceeds bound {bound:e}")]
    Residual { residual: f64, bound: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error("chain precondition: {0}")]
    ChainPrecondition(String),

    #[error("quadrature budget exhausted: {0}")]
    QuadratureBudget(String),

    #[error("at N = {trunc}: {source}")]
    AtTruncation {
        trunc: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
