use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} has {found} entries, expected {expected}")]
    Dimension {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("basis rows {row_a} and {row_b} are not orthonormal (deviation {deviation:e})")]
    NotOrthonormal {
        row_a: usize,
        row_b: usize,
        deviation: f64,
    },

    #[error("vectors do not give a unit decomposition (deviation {deviation:e} > {tol:e})")]
    NotUnitDecomposition { deviation: f64, tol: f64 },

    #[error(
        "profile is not realizable: top-{prefix} sum {profile_sum} violates bound {bound} (tolerance {tol:e})"
    )]
    NotRealizable {
        prefix: usize,
        profile_sum: f64,
        bound: f64,
        tol: f64,
    },

    #[error("point set is rank deficient: spans {rank} of {dim} dimensions")]
    RankDeficient { rank: usize, dim: usize },

    #[error("solver did not converge after {iterations} iterations (gap {gap:e})")]
    NotConverged { iterations: usize, gap: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("body is unbounded: functionals span {rank} of {dim} dimensions")]
    Unbounded { rank: usize, dim: usize },

    #[error("degenerate body: {0}")]
    Degenerate(String),

    #[error("exact volume supports k <= {max_k} and at most {max_m} generators, got k = {k}, m = {m}; use estimate_volume")]
    UnsupportedDimension {
        k: usize,
        m: usize,
        max_k: usize,
        max_m: usize,
    },

    #[error("origin is not an interior point of the body")]
    OriginNotInterior,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
