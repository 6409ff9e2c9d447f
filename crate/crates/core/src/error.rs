use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An element or operation was handed to a group of the wrong backend.
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    /// Two objects that must live over the same group do not.
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    /// Two objects that must share an alphabet do not.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("infinite index: {0}")]
    InfiniteIndex(String),
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("invalid coset table: {0}")]
    InvalidCosetTable(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHomomorphism(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    /// A pattern or element enumeration grew past its configured cap.
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    /// A backtracking search ran out of node budget before finishing.
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
    #[error("configuration is not in the shift: {0}")]
    NotInShift(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
