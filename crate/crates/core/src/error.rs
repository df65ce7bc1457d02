use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("variable `{0}` appears in both operands of a product")]
    SharedVariable(String),

    #[error("variable `{name}` has no value labelled `{value}`")]
    UnknownValue { name: String, value: String },

    #[error("invalid variable: {0}")]
    InvalidVariable(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("conditioning on an event of probability zero")]
    ZeroProbabilityEvent,

    #[error("invalid event: {0}")]
    InvalidEvent(String),

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("node name `{0}` collides with a generated noise variable")]
    NoiseNameCollision(String),

    #[error("graph contains a directed cycle")]
    CyclicGraph,

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("invalid causal model: {0}")]
    InvalidModel(String),

    #[error("invalid intervention: {0}")]
    InvalidIntervention(String),

    #[error("distribution marginal mismatch: {0}")]
    MarginalMismatch(String),

    #[error("overlapping arc targets on `{0}`: no single-equation-per-variable model exists; keep the generalized form")]
    OverlappingTargets(String),

    #[error("internal bound violated: {0}")]
    BoundViolation(String),

    #[error("JSON input: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
