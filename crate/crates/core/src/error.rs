use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("site {site} out of range for a space with {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("steady state residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotConverged { residual: f64, tol: f64 },

    #[error("steady state has eigenvalue {0:.3e}; truncation too small or steady state not unique")]
    NegativeSteadyState(f64),

    #[error("singular steady-state system: {0}")]
    Singular(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("trace drifted by {drift:.3e} at t = {t}")]
    TraceDrift { t: f64, drift: f64 },

    #[error("cutoff {cutoff} exceeds the maximum {max} without convergence")]
    CutoffExceeded { cutoff: usize, max: usize },

    #[error("series has {len} samples, at least {min} required")]
    SeriesTooShort { len: usize, min: usize },

    #[error("series spans {periods:.2} oscillation periods, at least {min} required")]
    TooFewPeriods { periods: f64, min: f64 },

    #[error("time grid is not uniform and strictly increasing")]
    NonUniformGrid,

    #[error("analytic signal vanishes on {fraction:.1}% of the samples")]
    ZeroAmplitude { fraction: f64 },

    #[error("expectation value {0:.3e} is not positive")]
    NonPositiveExpectation(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short token written to the `error` column of sweep tables.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::SiteOutOfRange { .. } => "site_out_of_range",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidState(_) => "invalid_state",
            Error::InvalidModel(_) => "invalid_model",
            Error::NotConverged { .. } => "not_converged",
            Error::NegativeSteadyState(_) => "negative_steady_state",
            Error::Singular(_) => "singular",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::TraceDrift { .. } => "trace_drift",
            Error::CutoffExceeded { .. } => "cutoff_exceeded",
            Error::SeriesTooShort { .. } => "series_too_short",
            Error::TooFewPeriods { .. } => "too_few_periods",
            Error::NonUniformGrid => "non_uniform_grid",
            Error::ZeroAmplitude { .. } => "zero_amplitude",
            Error::NonPositiveExpectation(_) => "non_positive_expectation",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
