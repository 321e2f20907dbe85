use thiserror::Error;

/// Errors raised by the constructions and checkers in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),

    #[error("carrier of size {size} exceeds the configured bound {bound}")]
    CarrierTooLarge { size: usize, bound: usize },

    #[error("no basis relation contains the identity")]
    MissingReflexivity,

    #[error("saturation produced more than {bound} distinct relations")]
    SaturationBound { bound: usize },

    #[error("map `{0}` is not monotone")]
    NotMonotone(String),

    #[error("order is not a preorder: {0}")]
    NotAPreorder(String),

    #[error("BCO axiom ({axiom}) violated: {detail}")]
    BcoAxiomViolation { axiom: &'static str, detail: String },

    #[error("invalid partial function `{name}`: {detail}")]
    InvalidPartialFunction { name: String, detail: String },

    #[error("search space of {size} candidates exceeds the cap {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    #[error("fiber enumeration of {size} predicates exceeds the cap {cap}")]
    EnumerationCapExceeded { size: u128, cap: u128 },

    #[error("uniform preorder is not cartesian with the given structure")]
    NotCartesian,

    #[error("relation `{0}` is not in the uniform preorder")]
    NotInPreorder(String),

    #[error("uniform preorder is not a DCO: generator `{0}` is not single-valued")]
    NotDco(String),

    #[error("relational completeness witness is invalid: {0}")]
    NotRelationallyComplete(String),

    #[error("no combinators k, s found in the filter")]
    KsSearchFailed,

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("applicative structure has no designated k and s")]
    MissingCombinators,

    #[error("coefficient `{0}` is not in the filter")]
    CoefficientOutsideFilter(String),

    #[error("invalid applicative structure: {0}")]
    InvalidStructure(String),

    #[error("term syntax error: {0}")]
    TermSyntax(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
