use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: i64, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("graph is not folded")]
    NotFolded,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no basepoint")]
    NoBasepoint,
    #[error("not a valid finite group: {0}")]
    InvalidQuotient(String),
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(usize),
    #[error("vertex budget exceeded at level {level}: next cover needs {needed} vertices (budget {budget})")]
    BudgetExceeded {
        level: usize,
        needed: u128,
        budget: usize,
    },
    #[error("word is trivial")]
    TrivialWord,
    #[error("word does not lie in the cover's subgroup")]
    NotInSubgroup,
    #[error("quotient is not invariant under the endomorphism")]
    NotInvariant,
    #[error("endomorphism is not an automorphism")]
    NotAutomorphism,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid rotation system: {0}")]
    InvalidRotation(String),
    #[error("intersection pairing degenerate on closed homology: {0}")]
    DegeneratePairing(String),
    #[error("sample word is not in the stated lower-central term (term of degree {degree} survives)")]
    NotInLcsTerm { degree: usize },
    #[error("cost guard: {0}")]
    CostGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;
