use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("valuation unknown below truncation")]
    ValuationUnknown,
    #[error("residue of an element with negative valuation")]
    NegativeValuation,
    #[error("insufficient truncation: {0}")]
    InsufficientPrecision(String),
    #[error("empty polynomial")]
    EmptyPolynomial,
    #[error("zero polynomial has no roots")]
    ZeroPolynomial,
    #[error("monomial input: no nonzero root is guaranteed")]
    MonomialInput,
    #[error("no nonzero root: {0}")]
    NoNonzeroRoot(String),
    #[error("residue field oracle unavailable for a nontrivial automorphism")]
    OracleUnavailable,
    #[error("nonroot search exhausted after {0} candidates")]
    NonrootSearchExhausted(usize),
    #[error("variable count mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("iteration cap of {cap} refinement steps exceeded")]
    IterationCap { cap: usize },
    #[error("residual valuations converge to {limit} at or below the target after {steps} steps")]
    Stalled { steps: usize, limit: crate::rho::RhoRational },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("root isolation failed: {0}")]
    Isolation(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// True for failures that signal a broken invariant of the algorithms
    /// rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Consistency(_) | Error::Isolation(_))
    }
}
