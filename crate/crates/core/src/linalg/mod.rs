//! Dense and matrix-free complex linear algebra, generic over the real scalar.

pub mod dense;
pub mod eig;
pub mod expm;
pub mod lanczos;
pub mod linear_map;
pub mod lu;
pub mod random;
pub mod scalar;
pub mod sparse;

pub use dense::CMatrix;
pub use eig::{hermitian_eig, hermitian_eigvals, HermitianEigen};
pub use expm::{matrix_exp, matrix_log_principal, unitary_spectrum, SkewSpectrum, UnitarySpectrum};
pub use lanczos::{lanczos_extremal, EigenPair, Extremal, LanczosOptions};
pub use linear_map::{DiagonalMap, LinearMap, SparseMap, Squared, DEFAULT_MATERIALIZATION_THRESHOLD};
pub use lu::Lu;
pub use scalar::Real;
pub use sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("logarithm branch: {0}")]
    Branch(String),
}
