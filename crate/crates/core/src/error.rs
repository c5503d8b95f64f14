use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("depth mismatch: expected {expected}, found {found}")]
    DepthMismatch { expected: usize, found: usize },

    #[error("scalar level must be {expected}, found {found}")]
    ScalarLevel { expected: f64, found: f64 },

    #[error("not weakly geometric: symmetric defect {defect:e}")]
    NotWeaklyGeometric { defect: f64 },

    #[error("matrix is not skew-symmetric: defect {defect:e}")]
    NotSkew { defect: f64 },

    #[error("invalid Schatten exponent p = {0}")]
    InvalidSchatten(f64),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid control: {0}")]
    InvalidControl(String),

    #[error("time grids differ")]
    GridMismatch,

    #[error("partition is not a subset of the sample grid: {0}")]
    NotSubset(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}
