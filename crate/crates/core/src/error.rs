use thiserror::Error;

/// Errors produced by the spectrum, dynamics and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input is empty")]
    Empty,

    #[error("need at least 2 energy levels, got {0}")]
    TooFewLevels(usize),

    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value {value} at index {index} of {what}")]
    NonFinite {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("negative population {value} at level {index}")]
    NegativePopulation { index: usize, value: f64 },

    #[error("all populations are zero")]
    ZeroPopulation,

    #[error("populations sum to {0}, expected 1 within 1e-12")]
    NotNormalized(f64),

    #[error("invalid energy spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid distance weights: {0}")]
    InvalidWeights(String),

    #[error("{which} state has zero ground-state population")]
    ZeroGroundPopulation { which: &'static str },

    #[error("imaginary time must be nonnegative, got {0} (use Direction::AllowBackward)")]
    NegativeTime(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The "hot" state is strictly closer to the ground state than the "cold" one.
    /// Callers can swap the arguments.
    #[error(
        "cold state is hotter than hot state (D_hot = {hot}, D_cold = {cold}); swap the arguments"
    )]
    ColdIsHotter { hot: f64, cold: f64 },

    #[error("states are equally distant from the ground state (D = {0})")]
    EqualDistance(f64),

    #[error("estimate inapplicable: {0}")]
    EstimateInapplicable(String),

    #[error("no Mpemba effect between these states: {0}")]
    NoMpemba(String),

    #[error("state does not have the required sparse form: {0}")]
    NotSparseForm(String),

    #[error("collinear family: {0}")]
    InvalidFamily(String),

    #[error("member at lambda = {lambda} leaves the simplex (component {index} = {value})")]
    InvalidMember {
        lambda: f64,
        index: usize,
        value: f64,
    },

    #[error("invalid spin-chain configuration: {0}")]
    InvalidChain(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
