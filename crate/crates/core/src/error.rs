use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid pregeometry: {0}")]
    InvalidPregeometry(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    /// A subset argument is not contained in the universe it is measured against.
    #[error("argument error: {0}")]
    Argument(String),
    #[error("{what} has size {size}, above the cap of {cap}")]
    SizeLimit { what: String, size: usize, cap: usize },
    #[error("structure is not in the class: {0}")]
    NotInClass(String),
    #[error("set {0} is not self-sufficient in the ambient structure")]
    NotSelfSufficient(String),
    #[error("replacement does not have the same underlying set: {0}")]
    SetMismatch(String),
    #[error("replacement changes the pregeometry of the replaced set")]
    PregeometryMismatch,
    #[error("no room for replacement tuples: {0}")]
    Infeasible(String),
    #[error("tuple {0} is not present")]
    TupleNotPresent(String),
    #[error("unsupported signature: {0}")]
    UnsupportedSignature(String),
    #[error("overlap mismatch: {0}")]
    OverlapMismatch(String),
    #[error("lift failure: {0}")]
    LiftFailed(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

impl Error {
    pub fn size(what: impl Into<String>, size: usize, cap: usize) -> Self {
        Error::SizeLimit { what: what.into(), size, cap }
    }

    pub fn is_size_limit(&self) -> bool {
        matches!(self, Error::SizeLimit { .. })
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}
