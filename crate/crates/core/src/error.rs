use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid system parameters: {0}")]
    InvalidSystem(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("envelope underflow at t = {t}: Ω = {value:e} does not exceed the floor {floor:e}")]
    EnvelopeUnderflow { t: f64, value: f64, floor: f64 },

    #[error("degenerate off-resonance Rabi frequency at t = {t} (|Ω̃′| = {modulus:e})")]
    DegenerateRabi { t: f64, modulus: f64 },

    #[error("integrator step size underflow at t = {t} (h = {step:e})")]
    StepSizeUnderflow { t: f64, step: f64 },

    #[error("integrator exceeded {steps} steps before reaching t = {t}")]
    TooManySteps { t: f64, steps: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("at grid index {index}: {source}")]
    AtIndex { index: usize, source: Box<Error> },

    #[error("scenario '{name}': {source}")]
    InScenario { name: String, source: Box<Error> },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub fn at_index(self, index: usize) -> Self {
        match self {
            e @ Error::AtIndex { .. } => e,
            e => Error::AtIndex {
                index,
                source: Box::new(e),
            },
        }
    }

    pub fn in_scenario(self, name: &str) -> Self {
        Error::InScenario {
            name: name.to_string(),
            source: Box::new(self),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidPulse(_)
            | Error::InvalidSystem(_)
            | Error::InvalidGrid(_)
            | Error::InvalidScenario(_)
            | Error::Config(_)
            | Error::GridMismatch(_) => ErrorCategory::Validation,
            Error::EnvelopeUnderflow { .. }
            | Error::DegenerateRabi { .. }
            | Error::StepSizeUnderflow { .. }
            | Error::TooManySteps { .. } => ErrorCategory::Numerical,
            Error::Io { .. } => ErrorCategory::Io,
            Error::AtIndex { source, .. } | Error::InScenario { source, .. } => source.category(),
        }
    }
}
