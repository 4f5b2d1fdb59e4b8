use std::path::PathBuf;

use thiserror::Error;

use crate::grid::SpaceTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("algebra dimension mismatch: expected k = {expected}, found k = {found}")]
    AlgebraMismatch { expected: usize, found: usize },

    #[error("expected a {expected:?}-space function, found {found:?}")]
    WrongSpace { expected: SpaceTag, found: SpaceTag },

    #[error("non-finite value at grid point {index} (x = {coords:?})")]
    NonFinite { index: usize, coords: Vec<f64> },

    #[error("matrix is not skew-symmetric (max |J + J^T| = {asymmetry:e})")]
    NotSkew { asymmetry: f64 },

    #[error("{what} = {value:?} is not on the lattice (spacing {spacing:e})")]
    OffLattice {
        what: &'static str,
        value: Vec<f64>,
        spacing: f64,
    },

    #[error("difference step {step:e} is below the lattice resolution {resolution:e}")]
    StepBelowResolution { step: f64, resolution: f64 },

    #[error("derivation index {index} out of range 1..={max}")]
    DerivationIndex { index: usize, max: usize },

    #[error("mollifier index m = {m} is not admissible on this grid (largest admissible m is {max})")]
    InadmissibleMollifier { m: usize, max: usize },

    #[error("differential polynomial has an order-zero term")]
    ZeroOrderTerm,

    #[error("probe list is empty")]
    EmptyProbes,

    #[error("operator has no adjoint: {0}")]
    NotAdjointable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed container: {0}")]
    Container(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
