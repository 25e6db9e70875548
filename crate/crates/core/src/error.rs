use thiserror::Error;

use crate::syntax::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),
    #[error("atom `{0}` is declared more than once")]
    DuplicateAtom(String),
    #[error("atom `{0}` is not in the vocabulary")]
    UnknownAtom(String),
    #[error("vocabulary has {atoms} atoms, above the enumeration cap of {cap}")]
    VocabularyTooLarge { atoms: usize, cap: usize },
    #[error("degree vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("weight {value} is outside {range}")]
    WeightOutOfRange { value: String, range: &'static str },
    #[error("invalid weight literal `{0}`")]
    InvalidWeight(String),
    #[error("invalid bitstring `{text}` for a vocabulary of {width} atoms")]
    InvalidBitstring { text: String, width: usize },
    #[error("knowledge base `{0}` has a formula with weight below 1")]
    NotClassical(String),
    #[error("semantic models [{semantic}] differ from syntactic models [{syntactic}]")]
    MethodsDisagree { semantic: String, syntactic: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}
