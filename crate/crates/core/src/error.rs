use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid leg pair ({0}, {1}): legs must be distinct and within 1..=3")]
    InvalidLegPair(usize, usize),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pole hit in {pair} at (k1, k2) = ({k1}, {k2})")]
    Pole { pair: String, k1: f64, k2: f64 },

    #[error("momentum k = {0} is outside the domain (k = 0 is excluded)")]
    ZeroMomentum(f64),

    #[error("could not place {requested} momenta with exclusion radius {radius} after {attempts} draws")]
    SamplingExhausted { requested: usize, radius: f64, attempts: usize },

    #[error("unknown momentum label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate momentum label `{0}`")]
    DuplicateLabel(String),

    #[error("no component index supplied for label `{0}`")]
    MissingComponent(String),

    #[error("component index {index} out of range for dimension {dim}")]
    ComponentOutOfRange { index: usize, dim: usize },

    #[error(
        "substitution violates pairing: {annihilator} = {annihilator_value} but {sign:+} * {creator} = {creator_value}"
    )]
    InconsistentSubstitution {
        annihilator: String,
        creator: String,
        sign: i8,
        annihilator_value: f64,
        creator_value: f64,
    },

    #[error("ordering violated: {0}")]
    Ordering(String),

    #[error("degenerate momenta: {0}")]
    Degenerate(String),

    #[error("{requested} particles requested, at most {max} supported")]
    TooManyParticles { requested: usize, max: usize },

    #[error("S-matrix `{0}` is not translation invariant; set the override flag to double it")]
    NotTranslationInvariant(String),

    #[error("finite-difference grid reaches the origin: {0}")]
    GridTouchesOrigin(String),
}

pub type Result<T> = std::result::Result<T, Error>;
