use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by callers that map errors onto transport codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or out-of-range input.
    Input,
    /// Well-formed input outside the domain of the operation.
    Domain,
    /// A computed object broke an invariant that should always hold.
    Invariant,
    /// A configured resource cap was hit.
    Resource,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported Dynkin type {series}{rank}")]
    UnsupportedType { series: String, rank: usize },

    #[error("letter {letter} at position {position} is outside 1..={rank}")]
    LetterOutOfRange { position: usize, letter: usize, rank: usize },

    #[error("{what} {index} is out of range (limit {limit})")]
    IndexOutOfRange { what: &'static str, index: usize, limit: usize },

    #[error("word {word:?} is not reduced")]
    NotReduced { word: Vec<usize> },

    #[error("{pattern:?} cannot be spelled inside the word; its Demazure product has reduced word {demazure:?}")]
    NotSpellable { pattern: Vec<usize>, demazure: Vec<usize> },

    #[error("vertex {0} is frozen")]
    FrozenVertex(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("words {from:?} and {to:?} are not related by braid moves")]
    NotEquivalent { from: Vec<usize>, to: Vec<usize> },

    #[error("mutation at vertex {vertex} is not covered by the parameter recursion: {reason}")]
    OutsideRecursion { vertex: usize, reason: String },

    #[error("{0}")]
    Domain(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("search exceeded {limit} states")]
    SearchLimit { limit: usize },

    #[error("integer overflow in {0}")]
    Overflow(String),

    #[error("enumeration needs {needed} tuples, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnsupportedType { .. }
            | Error::LetterOutOfRange { .. }
            | Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch(_) => ErrorKind::Input,
            Error::NotReduced { .. }
            | Error::NotSpellable { .. }
            | Error::FrozenVertex(_)
            | Error::NotEquivalent { .. }
            | Error::OutsideRecursion { .. }
            | Error::Domain(_) => ErrorKind::Domain,
            Error::Invariant(_) => ErrorKind::Invariant,
            Error::SearchLimit { .. } | Error::Overflow(_) | Error::BudgetExceeded { .. } => ErrorKind::Resource,
        }
    }

    /// Stable snake-case identifier for the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnsupportedType { .. } => "unsupported_type",
            Error::LetterOutOfRange { .. } => "letter_out_of_range",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::NotReduced { .. } => "not_reduced",
            Error::NotSpellable { .. } => "not_spellable",
            Error::FrozenVertex(_) => "frozen_vertex",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NotEquivalent { .. } => "not_equivalent",
            Error::OutsideRecursion { .. } => "outside_recursion",
            Error::Domain(_) => "domain",
            Error::Invariant(_) => "invariant_violation",
            Error::SearchLimit { .. } => "search_limit",
            Error::Overflow(_) => "overflow",
            Error::BudgetExceeded { .. } => "budget_exceeded",
        }
    }
}
