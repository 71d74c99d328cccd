//! Berezin–Toeplitz quantization of the projective line with half-form
//! correction: exact geometry, operator families, symbol extraction and the
//! formal symbol calculus.

pub mod formal;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod metaplectic;
pub mod poly;
pub mod rates;
pub mod scalar;
pub mod sections;
pub mod symbols;
pub mod toeplitz;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("function is not globally smooth on the sphere")]
    NotSmooth,
    #[error("form degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: u8, got: u8 },
    #[error("symbol dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("k-grids of the two families differ")]
    GridMismatch,
    #[error("specs of the two operators differ")]
    SpecMismatch,
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("section is not a rational section of the expected bundle: {0}")]
    MalformedSection(String),
    #[error("{0}")]
    Fit(String),
    #[error("curvature extraction is inconsistent across field pairs")]
    CurvatureInconsistent,
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
