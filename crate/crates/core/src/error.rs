use thiserror::Error;

/// Everything that can go wrong while building, querying or estimating.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed measure spec: {0}")]
    MalformedSpec(String),

    #[error("malformed spectrum: {0}")]
    MalformedSpectrum(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("partition base {requested} does not match the natural base {natural} of the measure")]
    BaseMismatch { requested: u32, natural: u32 },

    #[error("cell has zero mass")]
    ZeroMass,

    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("cell boundary carries mass {0:e}")]
    BoundaryMass(f64),

    #[error("measure is not a probability measure (total mass {0})")]
    NotNormalized(f64),

    #[error("tolerance {tol:e} unreachable: {reason}")]
    ToleranceUnreachable { tol: f64, reason: String },

    #[error("resource limit `{name}` exceeded: requested {requested}, limit {limit}")]
    LimitExceeded {
        name: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("depth {requested} exceeds the resolution {available} of the representation")]
    DepthExceeded { requested: u32, available: u32 },

    #[error("too few usable scales: {usable} (need at least {required})")]
    TooFewScales { usable: usize, required: usize },

    #[error("iteration did not converge within {0} steps")]
    NonConvergence(usize),

    #[error("all sampled values fall below the numeric floor {0:e}")]
    NumericFloor(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("undecidable support query: {0}")]
    Undecidable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn limit(
        name: &'static str,
        requested: impl TryInto<u128>,
        limit: impl TryInto<u128>,
    ) -> Self {
        Error::LimitExceeded {
            name,
            requested: requested.try_into().unwrap_or(u128::MAX),
            limit: limit.try_into().unwrap_or(u128::MAX),
        }
    }
}
