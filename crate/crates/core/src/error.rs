use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate sample set: x = {0} appears more than once")]
    DegenerateSamples(String),

    #[error("missing value for symbol `{0}`")]
    MissingSymbol(String),

    #[error("cell ({0},{1}) lies outside the diagram of {2}")]
    CellOutsideDiagram(u32, u32, String),

    #[error("invalid partition {0:?}: parts must be positive and weakly decreasing")]
    InvalidPartition(Vec<u32>),

    #[error("non-generic specialization: {0}")]
    NonGeneric(String),

    #[error("invalid specialization: {0}")]
    InvalidSpecialization(String),

    #[error("invalid integrand parameters: {0}")]
    InvalidSpec(String),

    #[error("convention or arithmetic fault: count {value} for (delta={delta}, d={d}) is not an integer")]
    NonInteger { delta: u32, d: u32, value: String },

    #[error("degree bound violated or sampling window invalid: {0}")]
    DegreeBound(String),

    #[error("dual specialization mismatch for {context}: {first} != {second}")]
    SpecializationMismatch {
        context: String,
        first: String,
        second: String,
    },

    #[error("nu unavailable for (d={d}, delta={delta}, n={n_lines})")]
    NuUnavailable { d: u32, delta: u32, n_lines: u32 },

    #[error("decomposition needs unsupported components: {0}")]
    UnsupportedComponents(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
