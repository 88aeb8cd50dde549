use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("modulus {0:?} is not a monic irreducible polynomial of the declared degree")]
    ReducibleModulus(Vec<u32>),
    #[error("field of order {0} exceeds the supported maximum of {max}", max = crate::field::MAX_ORDER)]
    FieldTooLarge(u64),
    #[error("element code {code} is out of range for a field of order {order}")]
    ElementOutOfRange { code: u32, order: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix dimensions must be positive, found {0}x{1}")]
    EmptyShape(usize, usize),
    #[error("expected rank {expected}, found rank {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix code {0} is out of range")]
    CodeOutOfRange(u64),
    #[error("matrix space too large to index")]
    SpaceTooLarge,
    #[error("set is not an adjacent set")]
    NotAdjacentSet,
    #[error("set does not contain the zero matrix")]
    MissingZero,
    #[error("invalid standard map: {0}")]
    InvalidSpec(String),
    #[error("invalid map table: {0}")]
    InvalidTable(String),
    #[error("map does not preserve adjacency (first violating pair: codes {0} and {1})")]
    NotAPreserver(u64, u64),
    #[error("incoherent pencil images: {0}")]
    IncoherentCase(String),
    #[error("recovery failed: {0}")]
    RecoveryFailed(String),
    #[error("scalar action matches no field automorphism")]
    FieldAutomorphismMismatch,
    #[error("unknown lemma id {0:?}")]
    UnknownLemma(String),
    #[error("enumeration task too large: {0}")]
    TaskTooLarge(String),
    #[error("counterexample found: {0}")]
    Counterexample(String),
    #[error("malformed document: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
