use thiserror::Error;

/// Errors raised by the algebra and geometry kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("series live in different variable universes or truncations")]
    UniverseMismatch,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("elements belong to different Frobenius algebras")]
    AlgebraMismatch,

    #[error("invalid Frobenius algebra: {0}")]
    InvalidAlgebra(String),

    #[error("residue coefficient lost to truncation (z^{exponent} pairs with an unknown coefficient)")]
    ResidueTruncated { exponent: i32 },

    #[error("window [{min}, {max}] too small: {what}")]
    WindowTooSmall { min: i32, max: i32, what: String },

    #[error("operator product overflowed the coefficient truncation")]
    WindowOverflow,

    #[error("result would be incomplete inside the genus window: {0}")]
    GenusWindow(String),

    #[error("truncation bound exhausted: {0}")]
    TruncationExhausted(String),

    #[error("unstable correlator: genus {genus} with {points} insertions")]
    Unstable { genus: u32, points: usize },

    #[error("correlator missing from table: {0}")]
    MissingCorrelator(String),

    #[error("under-determined coefficient while solving constraints: {0}")]
    UnderDetermined(String),

    #[error("z^-1 depth {depth} exceeded by a nonzero contribution at z^{exponent}")]
    ZDepthExceeded { depth: u32, exponent: i32 },

    #[error("point lies outside the formal neighbourhood of -z: {0}")]
    NotFormal(String),

    #[error("element is not in H_+: coefficient at z^{0}")]
    NotPositive(i32),

    #[error("Euler class is not invertible: {0}")]
    NotInvertible(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse `{0}`")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
