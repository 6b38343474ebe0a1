use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("map does not carry the source subspace into the target subspace")]
    NotPreserved,

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("characteristic polynomial has a non-rational root")]
    IrrationalEigenvalue,

    #[error("invalid core data: {}", .0.join("; "))]
    InvalidCore(Vec<String>),

    #[error("invalid monodromic mixed Hodge module: {}", .0.join("; "))]
    InvalidMmhm(Vec<String>),

    #[error("invalid gluing datum: {}", .0.join("; "))]
    InvalidGluing(Vec<String>),

    #[error("not a morphism: {0}")]
    NotAMorphism(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("eigenvalue {alpha} has denominator not dividing m = {m}")]
    EigenvalueDenominatorMismatch { alpha: String, m: u64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}
