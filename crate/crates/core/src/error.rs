use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode {mode} is out of range for {num_modes} modes")]
    ModeOutOfRange { mode: usize, num_modes: usize },

    #[error("mode count mismatch: expected {expected}, found {found}")]
    ModeCountMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero-norm state cannot be normalized")]
    ZeroNorm,

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("reflectivity {0} is outside [0, 1]")]
    InvalidReflectivity(f64),

    #[error("target mode {0} appears more than once")]
    DuplicateMode(usize),

    #[error("{element} expects {expected} target modes, got {found}")]
    ArityMismatch {
        element: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("encoding mismatch: {0}")]
    EncodingMismatch(String),

    #[error("state has no support on the logical subspace")]
    NoLogicalSupport,

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("detection patterns of branches {0} and {1} are not mutually exclusive")]
    OverlappingPatterns(usize, usize),

    #[error("invalid case {0}, expected 1, 2 or 3")]
    InvalidCase(u8),

    #[error("unsupported detection pattern: {0}")]
    UnsupportedPattern(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
}
