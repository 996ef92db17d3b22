use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group specification: {0}")]
    InvalidGroup(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("cannot parse word `{word}`: {reason}")]
    WordSyntax { word: String, reason: String },
    #[error("operands belong to different action models")]
    ModelMismatch,
    #[error("unsupported action model: {0}")]
    UnsupportedModel(String),
    #[error("the identity element is not allowed here")]
    IdentityElement,
    #[error("element has odd order {0}; two classes cannot separate its orbits")]
    OddOrder(u64),
    #[error("set is empty")]
    EmptySet,
    #[error("the given sets do not cover the target set")]
    NotACover,
    #[error("atom count {count} exceeds the cap of {cap}")]
    AtomCap { count: usize, cap: usize },
    #[error("certificate failed verification: {0}")]
    Unverified(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
}

impl Error {
    /// Stable message code, used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGroup(_) => "E_GROUP",
            Error::UnknownGenerator(_) | Error::WordSyntax { .. } => "E_PARSE",
            Error::ModelMismatch | Error::UnsupportedModel(_) => "E_MODEL",
            Error::IdentityElement | Error::OddOrder(_) | Error::EmptySet | Error::NotACover => "E_PRECONDITION",
            Error::AtomCap { .. } => "E_ATOM_CAP",
            Error::Unverified(_) => "E_VERIFY",
            Error::Malformed(_) => "E_MALFORMED",
            Error::WindowTooSmall(_) => "E_WINDOW",
            Error::DimensionMismatch(_) => "E_DIMENSION",
            Error::InvalidBounds(_) => "E_BOUNDS",
        }
    }
}

/// Outcome of checking a certificate: either it holds, or the first violated clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Verdict::Valid => None,
            Verdict::Invalid(r) => Some(r),
        }
    }

    pub(crate) fn fail(reason: impl Into<String>) -> Self {
        Verdict::Invalid(reason.into())
    }
}

/// Result of a bounded search. `NotFoundWithinBounds` never means non-existence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    NotFoundWithinBounds,
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            SearchOutcome::NotFoundWithinBounds => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> SearchOutcome<U> {
        match self {
            SearchOutcome::Found(t) => SearchOutcome::Found(f(t)),
            SearchOutcome::NotFoundWithinBounds => SearchOutcome::NotFoundWithinBounds,
        }
    }
}
