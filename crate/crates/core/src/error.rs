use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Why a pure-state specification lies outside the admissible domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdmissibilityError {
    #[error("coupling c[{i},{j}] = {value} is outside (-1, 1)")]
    CouplingOutOfRange { i: usize, j: usize, value: f64 },
    #[error("exponent matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode count must be between 1 and {max}, got {found}")]
    ModeCount { found: usize, max: usize },
    #[error("coupling key ({i},{j}) is invalid for {modes} modes (need 1 <= i < j <= n)")]
    CouplingIndex { i: usize, j: usize, modes: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is not symmetric at ({row},{col})")]
    Asymmetric { row: usize, col: usize },
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    #[error("inadmissible state: {0}")]
    Inadmissible(#[from] AdmissibilityError),
    #[error(
        "covariance violates the uncertainty relation (smallest eigenvalue {min_eigenvalue:e})"
    )]
    Unphysical { min_eigenvalue: f64 },
    #[error("lambda[{index}] = {value} is outside [-1, 1]")]
    LambdaOutOfRange { index: usize, value: f64 },
    #[error("lambda[{index}] = 0 makes the scaled covariance singular")]
    ZeroLambda { index: usize },
    #[error("PPT pattern entry {index} is {value}, expected +1 or -1")]
    Pattern { index: usize, value: f64 },
    #[error("minor order {order} is outside [{min}, {max}]")]
    MinorOrder {
        order: usize,
        min: usize,
        max: usize,
    },
    #[error("invalid slice plan: {0}")]
    Plan(String),
    #[error("determinant has imaginary residue {imag:e} (real part {real:e})")]
    ComplexResidue { real: f64, imag: f64 },
    #[error("invalid option: {0}")]
    Options(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::ComplexResidue { .. })
    }
}
