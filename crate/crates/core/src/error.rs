use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division is not exact: {0}")]
    NotDivisible(String),
    #[error("invalid basis label (n,r,m) = ({n},{r},{m}) (doubled)")]
    InvalidLabel { n: i32, r: i32, m: i32 },
    #[error("generator {0} has no epsilon-zero derivative form")]
    UnsupportedGenerator(String),
    #[error("coefficient is not divisible by eps: {0}")]
    NotEpsDivisible(String),
    #[error("sector mismatch: expected {expected}, found {found}")]
    SectorMismatch { expected: String, found: String },
    #[error("operation needs a numeric parameter point")]
    SymbolicPointUnsupported,
    #[error("hypergeometric series does not terminate")]
    NonTerminating,
    #[error("hypergeometric denominator vanishes before the series terminates")]
    DegenerateDenominator,
    #[error("invalid angular momentum coupling: {0}")]
    InvalidCoupling(String),
    #[error("element mixes integer and half-integer n")]
    MixedParity,
    #[error("n_max {} exceeds the hard cap {}", crate::coeff::fmt_half_int(*requested), crate::coeff::fmt_half_int(*cap))]
    CapExceeded { requested: i32, cap: i32 },
    #[error("inconsistent reduced matrix element: {0}")]
    InconsistentReduction(String),
    #[error("selection rule violated: {0}")]
    SelectionRule(String),
    #[error("value not representable in the coefficient ring: {0}")]
    NotRepresentable(String),
    #[error("invalid parameter point: {0}")]
    InvalidPoint(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
