use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A point, stencil or parameter fell outside the region where a field is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// An array is not an element of the space of cohomogeneity-one structures.
    #[error("membership error: component ({a},{b},{c}) violates {rule} by {violation:e}")]
    Membership {
        a: usize,
        b: usize,
        c: usize,
        rule: &'static str,
        violation: f64,
    },

    /// The Killing fields became linearly dependent along the normal geodesic.
    #[error("rank error: {0}")]
    Rank(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
