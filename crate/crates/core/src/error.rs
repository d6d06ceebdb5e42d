use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degree mismatch: expected {expected}, got {actual}")]
    DegreeMismatch { expected: usize, actual: usize },

    #[error("form degree {degree} exceeds ambient dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("operation `{op}` is undefined on forms of degree {degree}")]
    InvalidDegree { op: &'static str, degree: usize },

    #[error("invalid multi-index {indices:?} for dimension {dim}")]
    InvalidMultiIndex { indices: Vec<usize>, dim: usize },

    #[error("radial exponent {exponent} with homogeneous degree {degree} is not integrable at the origin in dimension {dim}")]
    NotIntegrable { exponent: i32, degree: usize, dim: usize },

    #[error("radial exponent {0} is below the supported minimum of -3")]
    RadialExponentTooSingular(i32),

    #[error("radius must be positive")]
    NonPositiveRadius,

    #[error("ansatz degree {degree} insufficient: boundary misfit {misfit}")]
    AnsatzInsufficient { degree: usize, misfit: f64 },

    #[error("Gram matrix is not positive definite (pivot {pivot} at index {index})")]
    BasisConditioning { index: usize, pivot: f64 },

    #[error("eigenvalue certification failed: expected multiplicity {expected}, rational nullity {actual}")]
    CertificationMismatch { expected: usize, actual: usize },

    #[error("degenerate metric at evaluation point")]
    DegenerateMetric,

    #[error("finite-difference step {0} outside [1e-4, 1e-2]")]
    StepOutOfRange(f64),

    #[error("missing eigenform: {0}")]
    MissingEigenform(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed cache document {path}: {reason}")]
    Cache { path: String, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
