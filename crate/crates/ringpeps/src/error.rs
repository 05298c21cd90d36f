//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("axis `{0}` not found")]
    AxisNotFound(String),
    #[error("dimension mismatch: axis `{a_label}` has dim {a_dim}, axis `{b_label}` has dim {b_dim}")]
    DimMismatch {
        a_label: String,
        a_dim: usize,
        b_label: String,
        b_dim: usize,
    },
    #[error("duplicate axis label `{0}`")]
    DuplicateLabel(String),
    #[error("label sets do not match the tensor axes: {0}")]
    LabelSetMismatch(String),
    #[error("matrix is not Hermitian within tolerance (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semi-definite (min eigenvalue {min:.3e} at scale {scale:.3e})")]
    NotPsd { min: f64, scale: f64 },
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("vanishing norm: {0}")]
    ZeroNorm(String),
    #[error("linear dependence detected: {0}")]
    LinearDependence(String),
    #[error("site {0:?} out of range for {1}x{2} lattice")]
    SiteOutOfRange((usize, usize), usize, usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("archive format error: {0}")]
    Format(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
