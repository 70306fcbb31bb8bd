use thiserror::Error;

#[derive(Debug, Error)]
pub enum HitError {
    #[error("invalid tiling parameters p={p}, q={q}: (p-2)(q-2) must exceed 4 and p,q >= 3")]
    NotHyperbolic { p: usize, q: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("duplicate or dangling leg id {0}")]
    LegId(i64),
    #[error("invalid region: {0}")]
    Region(String),
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("size limit exceeded: {what} needs {needed}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        needed: usize,
        limit: usize,
    },
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("invalid spin triple: s^2 = {0}")]
    InvalidTriple(f64),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HitError>;
