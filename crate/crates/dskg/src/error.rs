use thiserror::Error;

/// Failures surfaced by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms (last term {last_term:e})")]
    NonConvergent { terms: usize, last_term: f64 },

    #[error("connection formula ill-conditioned: |c-a-b| distance to an integer is {distance:e}")]
    IllConditioned { distance: f64 },

    #[error("point outside the light cone (hypergeometric argument {arg})")]
    OutsideCone { arg: f64 },

    #[error("kernel value not real: imaginary part {imag:e} against real part {real:e}")]
    NotReal { real: f64, imag: f64 },

    #[error("quadrature failed on [{a}, {b}]: error estimate {error:e} after {panels} panels")]
    QuadratureFailure {
        a: f64,
        b: f64,
        error: f64,
        panels: usize,
    },

    #[error("finite-difference derivative did not settle: {0}")]
    DerivativeFailure(String),

    #[error("time integrator step fell below {min_step:e} at t = {t}")]
    StiffnessFailure { t: f64, min_step: f64 },

    #[error("CFL condition violated: dt = {dt}, dx = {dx}, factor = {factor}")]
    CflViolation { dt: f64, dx: f64, factor: f64 },

    #[error("unsupported norm exponent q = {0}")]
    UnsupportedNorm(f64),

    #[error("unknown data preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad input rather than by a numerical method failing.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::OutsideCone { .. }
                | Error::CflViolation { .. }
                | Error::UnsupportedNorm(_)
                | Error::UnknownPreset(_)
                | Error::Validation(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
