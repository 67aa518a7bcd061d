use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("covariance matrix violates the uncertainty relation (min eigenvalue {0:e})")]
    NotPhysical(f64),

    #[error("channel is not completely positive (min eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{0} is not normalized (sum {1})")]
    NotNormalized(&'static str, f64),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("channel is not congruent to any canonical one-mode form")]
    Unclassified,

    #[error("Fock cutoff {cutoff} too small: trace leakage {leakage:e}")]
    CutoffTooSmall { cutoff: usize, leakage: f64 },

    #[error("recursion breaks at n = {n}: leading coefficient {leading:e}")]
    RecursionBreak { n: usize, leading: f64 },

    #[error("pair ({n}, {m}) is not admissible: {reason}")]
    InadmissiblePair {
        n: usize,
        m: usize,
        reason: &'static str,
    },

    #[error("relative-entropy gap is indeterminate (both divergences infinite)")]
    IndeterminateGap,

    #[error("no certified witness: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
