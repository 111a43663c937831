use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("level {level} outside presented range {min}..={max}")]
    LevelOutOfRange { level: usize, min: usize, max: usize },
    #[error("invalid level pair (m={m}, n={n}): {reason}")]
    InvalidLevels { m: usize, n: usize, reason: String },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("expansion needs {needed} units, cap is {cap}")]
    ExpansionTooLarge { needed: String, cap: u64 },
    #[error("level {0} has no restricted decomposition")]
    NotRestricted(usize),
    #[error("invalid family parameters: {0}")]
    FamilyParams(String),
    #[error("spec carries no stage metadata")]
    NoStageMetadata,
    #[error("time {0} is not determined by the seed")]
    WindowUndetermined(i128),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("every edge of the truncated path is maximal; more depth is needed")]
    TruncatedMaximal,
    #[error("diagram not in reduced form: {0}")]
    NotReducedForm(String),
    #[error("diagram is not rank-2 proximal: {0}")]
    NotRank2Proximal(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("letter {0:?} is not in the alphabet")]
    ForeignLetter(char),
    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("value does not fit: {0}")]
    Overflow(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub fn too_large(needed: impl ToString, cap: u64) -> Self {
        Error::ExpansionTooLarge { needed: needed.to_string(), cap }
    }

    /// Stable machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LevelOutOfRange { .. } => "LevelOutOfRange",
            Error::InvalidLevels { .. } => "InvalidLevels",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::ExpansionTooLarge { .. } => "ExpansionTooLarge",
            Error::NotRestricted(_) => "NotRestricted",
            Error::FamilyParams(_) => "FamilyParams",
            Error::NoStageMetadata => "NoStageMetadata",
            Error::WindowUndetermined(_) => "WindowUndetermined",
            Error::InvalidSeed(_) => "InvalidSeed",
            Error::TruncatedMaximal => "TruncatedMaximal",
            Error::NotReducedForm(_) => "NotReducedForm",
            Error::NotRank2Proximal(_) => "NotRank2Proximal",
            Error::InvalidDiagram(_) => "InvalidDiagram",
            Error::InvalidPath(_) => "InvalidPath",
            Error::ForeignLetter(_) => "ForeignLetter",
            Error::InvalidSubstitution(_) => "InvalidSubstitution",
            Error::Precondition(_) => "Precondition",
            Error::Overflow(_) => "Overflow",
            Error::Json(_) => "Json",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
