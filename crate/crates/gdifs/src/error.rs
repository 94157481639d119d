use crate::graph::Vertex;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),

    #[error("path depth {depth} exceeds the enumeration cap {cap}")]
    DepthCap { depth: usize, cap: usize },

    #[error("{needed} cylinders exceed the budget of {budget}; lower the depth, raise the budget, or use the chaos game")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("path budget of {budget} exceeded ({needed} paths) and sampling was not permitted")]
    PathBudgetExceeded { needed: u128, budget: u128 },

    #[error("linear part is singular (sigma_min = {0:.3e}); maps must be injective")]
    NonInjective(f64),

    #[error("map is not a contraction (sigma_max = {0})")]
    NonContractive(f64),

    #[error("invalid Lipschitz bounds: require 0 < lower <= upper < 1, got ({0}, {1})")]
    InvalidBounds(f64, f64),

    #[error("dimension {0} unsupported; this crate handles d in 1..=3")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("bounding-box iteration did not stabilise within {0} iterations (non-contractive input?)")]
    BoxIterationDiverged(usize),

    #[error("empty point set")]
    EmptyPointSet,

    #[error("vertex {0} has no incoming edge; the random walk cannot reach it")]
    NoIncomingEdge(Vertex),

    #[error("ambiguous address at level {level}: point is within {margin:.3e} of two distinct cylinders")]
    AmbiguousAddress { level: usize, margin: f64 },

    #[error("graphs differ structurally; the coding map needs identical edge sets")]
    GraphMismatch,

    #[error("strong separation not certified on the {0} system")]
    SeparationNotCertified(&'static str),

    #[error("coding-map hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("system contains a non-similarity map (edge {0}); similarity dimension undefined")]
    NonSimilarity(u64),

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("bisection bracket failure: spectral radius at s = {s} is {rho}, still above 1")]
    BracketFailure { s: f64, rho: f64 },

    #[error("scale {0:.3e} is below the resolution floor {1:.3e}")]
    ScaleBelowFloor(f64, f64),

    #[error("need at least {0} scales, got {1}")]
    TooFewScales(usize, usize),

    #[error("operation requires a planar (d = 2) system, got d = {0}")]
    NonPlanar(usize),

    #[error("raster of {0}x{1} pixels exceeds the grid limit")]
    GridTooLarge(usize, usize),

    #[error("open-set tuple invalid: {0}")]
    InvalidOpenSets(String),

    #[error("degenerate sampling: every candidate pair was filtered out")]
    DegenerateSampling,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
