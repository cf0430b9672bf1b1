use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field order {0}; expected 2, 3 or 5")]
    UnsupportedField(u8),
    #[error("field table check failed: {0}")]
    FieldAxiom(String),
    #[error("degenerate form: {0}")]
    DegenerateForm(String),
    #[error("axiom violation at point {point}, line {line}: {reason}")]
    AxiomViolation { point: u32, line: u32, reason: String },
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("points {0} and {1} are not opposite")]
    NotOpposite(u32, u32),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("consecutive base points at index {index} are not opposite")]
    ConsecutiveNotOpposite { index: usize },
    #[error("no frame satisfies the constraints")]
    NoFrame,
    #[error("bad root indices: {0}")]
    BadIndices(String),
    #[error("recipe degenerate: {0}")]
    RecipeDegenerate(String),
    #[error("chain not opposite at index {index}")]
    ChainNotOpposite { index: usize },
    #[error("bad configuration: {0}")]
    BadConfiguration(String),
    #[error("lines {0} and {1} are not opposite")]
    LinesNotOpposite(u32, u32),
    #[error("copying stalled with {missing} uncovered lines")]
    CoverageIncomplete { missing: usize },
    #[error("no admissible host pair for point {0}")]
    NoHostPair(u32),
    #[error("group closure exceeded cap {0}")]
    ClosureCapExceeded(usize),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
