use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("elements belong to algebras with different parameters")]
    MixedParams,

    #[error("parameters are not in the required class: {0}")]
    WrongClass(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("relation {relation} violated: residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    RelationViolated {
        relation: String,
        residual: f64,
        tol: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by floating point tolerance rather than by invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Degenerate(_))
    }
}
