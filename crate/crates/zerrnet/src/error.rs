use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("instance has a cycle: {}", .witness.join(" -> "))]
    Cyclic { witness: Vec<String> },

    #[error("instance is invalid: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("structural mismatch at {location}: {reason}")]
    Structural { location: String, reason: String },

    #[error("enumeration budget exceeded: needs {needed} items, budget {budget} (set ZERRNET_BUDGET or pass an explicit budget to override)")]
    Budget { needed: u128, budget: u64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown edge {0:?}")]
    UnknownEdge(String),

    #[error("sources are not co-located (hosts {0:?})")]
    NotColocated(Vec<String>),

    #[error("no good partition set found within {attempts} attempts")]
    NoGoodPartition { attempts: u32 },

    #[error("no source tuple decodes correctly; fixed-value choice is undefined")]
    NoCorrectTuple,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
