use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("invalid tolerance policy: {0}")]
    InvalidTolerance(String),
    #[error("elements belong to different algebras: {0:?} vs {1:?}")]
    AlgebraMismatch(Vec<usize>, Vec<usize>),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("block index {index} out of range for {blocks} blocks")]
    BadIndex { index: usize, blocks: usize },
    #[error("element is not a projection")]
    NotProjection,
    #[error("element is not a minimal projection")]
    NotMinimal,
    #[error("element is not a partial isometry")]
    NotPartialIsometry,
    #[error("element is not unitary")]
    NotUnitary,
    #[error("element is not quasi-normal")]
    NotQuasiNormal,
    #[error("element is not a central projection")]
    NotCentralProjection,
    #[error("image of a scalar multiple of the identity is not scalar")]
    NotScalar,
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("lambda must lie in [0, 1], got {0}")]
    BadLambda(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
