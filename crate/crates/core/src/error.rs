use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty set")]
    EmptySet,
    #[error("set touches frame")]
    TouchesFrame,
    #[error("origin on path")]
    OriginOnPath,
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("mismatched domains: [{a0}, {a1}] vs [{b0}, {b1}]")]
    DomainMismatch { a0: f64, a1: f64, b0: f64, b1: f64 },
    #[error("path too short: needs samples up to t = {needed}, ends at {end}")]
    PathTooShort { needed: f64, end: f64 },
    #[error("polynomial degree must be at least 2")]
    DegreeTooLow,
    #[error("bounding box too small: must contain the disc of radius {radius}")]
    BboxTooSmall { radius: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("t_grid too coarse")]
    TGridTooCoarse,
    #[error("sub-eigenvalue condition violated: lambda = {lambda} but lambda1 = {lambda1}")]
    SubEigenvalue { lambda: f64, lambda1: f64 },
    #[error("invalid psi")]
    InvalidPsi,
    #[error("set not thin at this resolution/n")]
    NotThin,
    #[error("instability detected: {0}")]
    Unstable(String),
    #[error("refinement inconsistency: pinned value off by {0:e}")]
    Refinement(f64),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
