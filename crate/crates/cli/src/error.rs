use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("numeric check failed: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

/// Argument-shaped library errors are configuration problems; the rest are
/// numeric failures surfacing at run time.
impl From<holodisco::Error> for CliError {
    fn from(e: holodisco::Error) -> Self {
        use holodisco::Error as E;
        match e {
            E::InvalidArgument(_)
            | E::InvalidDimension(..)
            | E::InvalidLearningRate(_)
            | E::EmptyPhraseDistribution
            | E::UnknownWord(_)
            | E::UnknownTag(_)
            | E::RepeatedTag(_)
            | E::DuplicateName(_)
            | E::CategoryMismatch { .. }
            | E::Serialization(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
