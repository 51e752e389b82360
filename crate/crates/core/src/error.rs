use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid elliptic modulus tau = {0} (Im tau must be positive)")]
    InvalidModulus(Complex64),

    #[error("q-series tolerance {tol:e} is unreachable for tau = {tau}")]
    ToleranceUnreachable { tau: Complex64, tol: f64 },

    #[error("invalid theta characteristic ({a}, {b})")]
    InvalidCharacteristic { a: u8, b: u8 },

    #[error("unsupported derivative order {0} (expected 1, 2 or 3)")]
    UnsupportedDerivativeOrder(u32),

    #[error("index {index} out of range for {what}")]
    IndexOutOfRange { what: &'static str, index: usize },

    #[error("{what}: argument {at} lies within {guard:e} of a pole")]
    Pole {
        what: &'static str,
        at: Complex64,
        guard: f64,
    },

    #[error("invalid spin: 2*ell = {0}")]
    InvalidSpin(i64),

    #[error("could not find a well-conditioned theta basis for 2*ell = {two_ell} after {attempts} attempts")]
    BasisConditioning { two_ell: u32, attempts: usize },

    #[error("{what}: interpolation residual {residual:e} exceeds {threshold:e}")]
    InterpolationResidual {
        what: &'static str,
        residual: f64,
        threshold: f64,
    },

    #[error("{what}: matrix is singular or ill-conditioned")]
    Singular { what: &'static str },

    #[error("Hilbert space dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("sites {0} and {1} have coincident inhomogeneities")]
    CoincidentSites(usize, usize),

    #[error("spin mismatch at site {site}: spec has 2*ell = {expected}, representation has {found}")]
    SpinMismatch {
        site: usize,
        expected: u32,
        found: u32,
    },

    #[error("total spin 2*ell_total = {0} is not an even integer")]
    NonIntegerTotalSpin(u32),

    #[error("{what}: no convergence")]
    NoConvergence { what: &'static str },

    #[error("{what}: resulting vector vanishes (norm {norm:e})")]
    NullVector { what: &'static str, norm: f64 },

    #[error("{what}: extraction unstable (relative disagreement {disagreement:e})")]
    UnstableExtraction { what: &'static str, disagreement: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
