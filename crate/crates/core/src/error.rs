use thiserror::Error;

/// Errors raised by vector arithmetic, binding, lexicon and learning operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least {1}")]
    InvalidDimension(usize, usize),

    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("similarity undefined for a zero vector")]
    UndefinedSimilarity,

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("role-filler structure is empty")]
    EmptyStructure,

    #[error("role set is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularRoles { condition: f64 },

    #[error("cleanup memory is empty")]
    EmptyMemory,

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("unknown tag `{0}`")]
    UnknownTag(String),

    #[error("tag `{0}` used more than once")]
    RepeatedTag(String),

    #[error("category mismatch: expected {expected}, found {found}")]
    CategoryMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("learning rate {0} outside [0, 1]")]
    InvalidLearningRate(f64),

    #[error("phrase distribution is empty")]
    EmptyPhraseDistribution,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Serialization(err.to_string())
    }
}
