use thiserror::Error;

/// Errors raised by the spectral, field and oracle routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("group action is not free: {0}")]
    NonFreeAction(String),

    #[error("eigen table incomplete: window needs {kind} eigenvalues up to {required}, table is complete below {cutoff}")]
    IncompleteTable {
        kind: String,
        required: f64,
        cutoff: f64,
    },

    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    #[error("mesh is not a closed oriented surface: {0}")]
    OpenMesh(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("frequency undefined: {0}")]
    FrequencyUndefined(String),

    #[error("field is not harmonic: max residual {0:e}")]
    NotHarmonic(f64),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("singular Gram matrix (condition number {0:e})")]
    SingularGram(f64),

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("oracle check failed: {0}")]
    OracleMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
