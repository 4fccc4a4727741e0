//! Error type shared by every module, plus the CLI exit-code mapping.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative rate or coupling: {name} = {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("non-finite input: {name}")]
    NonFiniteInput { name: &'static str },

    #[error("invalid input: {what}")]
    InvalidInput { what: String },

    #[error("both fields are zero; dressed states are undefined")]
    ZeroField,

    #[error("degenerate weak-probe denominator (|D| = {magnitude:.3e})")]
    DegenerateDenominator { magnitude: f64 },

    #[error("steady state is not unique (null-space dimension {null_dim})")]
    NonUniqueSteadyState { null_dim: usize },

    #[error("steady-state solve failed (condition estimate {cond:.3e})")]
    SolverFailure { cond: f64 },

    #[error("integrator step size underflow at t = {t:.6}")]
    StepFailure { t: f64 },

    #[error("non-physical state at t = {t:.6}: {detail}")]
    NonPhysicalState { t: f64, detail: String },

    #[error("too few samples for a spectrum: {n}")]
    TooFewSamples { n: usize },

    #[error("config parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },

    #[error("missing required config key `{key}`")]
    MissingRequired { key: &'static str },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 0 success, 2 config error, 3 solver error, 4 I/O error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NegativeRate { .. }
            | Error::NonFiniteInput { .. }
            | Error::InvalidInput { .. }
            | Error::Parse { .. }
            | Error::UnknownKey { .. }
            | Error::MissingRequired { .. } => 2,
            Error::ZeroField
            | Error::DegenerateDenominator { .. }
            | Error::NonUniqueSteadyState { .. }
            | Error::SolverFailure { .. }
            | Error::StepFailure { .. }
            | Error::NonPhysicalState { .. }
            | Error::TooFewSamples { .. } => 3,
            Error::Io { .. } => 4,
        }
    }

    /// Short stable tag used in scan tables and CSV status columns.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::NegativeRate { .. } => "negative_rate",
            Error::NonFiniteInput { .. } => "non_finite_input",
            Error::InvalidInput { .. } => "invalid_input",
            Error::ZeroField => "zero_field",
            Error::DegenerateDenominator { .. } => "degenerate_denominator",
            Error::NonUniqueSteadyState { .. } => "non_unique_steady_state",
            Error::SolverFailure { .. } => "solver_failure",
            Error::StepFailure { .. } => "step_failure",
            Error::NonPhysicalState { .. } => "non_physical_state",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::Parse { .. } => "parse_error",
            Error::UnknownKey { .. } => "unknown_key",
            Error::MissingRequired { .. } => "missing_required",
            Error::Io { .. } => "io_error",
        }
    }
}

/// Wraps an I/O error with the path it occurred on.
pub fn io_err(path: &std::path::Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_documented_mapping() {
        assert_eq!(Error::MissingRequired { key: "mode" }.exit_code(), 2);
        assert_eq!(
            Error::NegativeRate {
                name: "gamma_ca",
                value: -1.0
            }
            .exit_code(),
            2
        );
        assert_eq!(Error::NonUniqueSteadyState { null_dim: 4 }.exit_code(), 3);
        assert_eq!(Error::StepFailure { t: 0.5 }.exit_code(), 3);
        let io = Error::Io {
            path: "out.csv".into(),
            source: std::io::Error::other("denied"),
        };
        assert_eq!(io.exit_code(), 4);
    }
}
