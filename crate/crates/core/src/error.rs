use thiserror::Error;

/// Errors produced by constructors and operations across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("tensor product dimension {0} exceeds the configured maximum of {max}", max = crate::MAX_DIM)]
    DimensionOverflow(usize),

    #[error("non-finite component encountered in {0}")]
    NonFinite(&'static str),

    #[error("operator is not Hermitian within tolerance {tol} (defect {defect:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("reference operator is numerically zero; no phase reference entry")]
    ZeroPhaseReference,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("negative outcome probability {0:.3e} exceeds the clamping tolerance; effect is broken")]
    NegativeProbability(f64),

    #[error("confusion matrix is not column-stochastic: column {column} sums to {sum}")]
    NonStochastic { column: usize, sum: f64 },

    #[error("angle {name} = {value} outside the open interval ({low}, {high})")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        low: f64,
        high: f64,
    },

    #[error("atom index {0} invalid; expected 1 or 2")]
    InvalidAtom(u8),

    #[error("level pair ({0}, {1}) invalid; expected 1 <= a < b <= 3")]
    InvalidLevels(u8, u8),

    #[error("negative gate duration {0}")]
    NegativeDuration(f64),

    #[error("delay {delay} exceeds the duration {duration} of the {gate} gate")]
    DelayExceedsDuration {
        gate: &'static str,
        delay: f64,
        duration: f64,
    },

    #[error("pulse step of dimension {step} in a sequence of dimension {sequence}")]
    MixedDimensions { step: usize, sequence: usize },

    #[error("prior probabilities must be non-negative and sum to 1 (sum {0})")]
    InvalidPriors(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True when the error reflects a bad user-supplied parameter rather
    /// than a numeric contract violation discovered mid-computation.
    pub fn is_argument_error(&self) -> bool {
        matches!(
            self,
            Error::AngleOutOfRange { .. }
                | Error::InvalidProbability(_)
                | Error::InvalidAtom(_)
                | Error::InvalidLevels(_, _)
                | Error::NegativeDuration(_)
                | Error::DelayExceedsDuration { .. }
                | Error::InvalidPriors(_)
                | Error::InvalidArgument(_)
                | Error::Empty(_)
        )
    }
}
