use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("resolution vertex has length {found}, diagram has {expected} crossings")]
    ResolutionLength { expected: usize, found: usize },

    #[error("edge {0} is not an edge of the diagram")]
    UnknownEdge(u32),

    #[error("invalid tangle region: {0}")]
    InvalidTangle(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("operation {op} expects a tensor of arity {expected}, got {found}")]
    Arity {
        op: String,
        expected: usize,
        found: usize,
    },

    #[error("d∘d ≠ 0: generator {source_gen} reaches {target_gen} in two steps")]
    DSquaredNonzero {
        source_gen: String,
        target_gen: String,
    },

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("differential decreases the filtration: {0}")]
    FiltrationViolated(String),

    #[error("diagram has {crossings} crossings, above the configured cap of {cap}")]
    CrossingCap { crossings: usize, cap: usize },

    #[error("plugin error: {0}")]
    Plugin(String),

    #[error("unsupported for relation {relation}: {what}")]
    UnsupportedRelation { relation: String, what: String },

    #[error("invalid cobordism move: {0}")]
    InvalidMove(String),

    #[error("differential is not homogeneous for any supported grading")]
    NoCompatibleGrading,

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
