use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its legal range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An edge-step function was evaluated outside its domain t >= 1.
    #[error("time {t} is outside the function domain (t >= 1)")]
    TimeOutOfDomain { t: u64 },

    /// A function value left [0, 1] by more than floating-point noise.
    #[error("function value {value} at t = {t} lies outside [0, 1]")]
    ValueOutOfRange { t: u64, value: f64 },

    /// A table lookup asked for an index past the built horizon.
    #[error("index {index} exceeds the table horizon {horizon}")]
    HorizonExceeded { index: u64, horizon: u64 },

    /// A running product left the representable f64 range.
    #[error("normalizer product overflowed at index {index}")]
    Overflow { index: u64 },

    /// The requested run would allocate more memory than the budget allows.
    #[error("{steps} steps need an estimated {required_bytes} bytes, over the {budget_bytes} byte budget")]
    MemoryBudget {
        steps: u64,
        required_bytes: u64,
        budget_bytes: u64,
    },

    /// A per-vertex operation referenced a vertex that has not been born.
    #[error("vertex {vertex} does not exist at time {t}")]
    VertexNotBorn { vertex: u32, t: u64 },

    /// Two snapshots that must come from one trajectory do not.
    #[error("snapshots come from different trajectories: {reason}")]
    TrajectoryMismatch { reason: String },

    /// An edge-list file failed to parse.
    #[error("malformed edge list at line {line}: {reason}")]
    EdgeListParse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
