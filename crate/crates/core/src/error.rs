use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid grid function: {0}")]
    InvalidGridFunction(String),
    #[error("component count mismatch: {left} vs {right}")]
    ComponentMismatch { left: usize, right: usize },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("empty region")]
    EmptyRegion,
    #[error("vacuum state: v = {0}")]
    Vacuum(f64),
    #[error("riemann solver diverged: {0}")]
    RiemannDiverged(String),
    #[error("cfl violated at cell {cell}: courant number {courant} exceeds {limit}")]
    CflViolated { cell: usize, courant: f64, limit: f64 },
    #[error("characteristic speed {speed} at cell {cell} is not positive")]
    NonPositiveSpeed { cell: usize, speed: f64 },
    #[error("implicit solve diverged after {iterations} iterations (residual {residual:e})")]
    ImplicitDiverged { iterations: usize, residual: f64 },
    #[error("smoothing blow-up risk: eps = {eps} but admissible eps < {admissible}")]
    SmoothingBlowUp { eps: f64, admissible: f64 },
    #[error("entropy pair check failed: {0}")]
    EntropyPair(String),
    #[error("invalid scheme config: {0}")]
    SchemeConfig(String),
    #[error("invalid history: {0}")]
    InvalidHistory(String),
    #[error("test function support [{lo}, {hi}] exceeds mesh extent")]
    SupportOutsideMesh { lo: f64, hi: f64 },
    #[error("test function not nonnegative at (t, x) = ({t}, {x})")]
    NegativeTestFunction { t: f64, x: f64 },
    #[error("flagged cell {cell} inside interval")]
    FlaggedInside { cell: usize },
    #[error("invalid postprocess parameters: {0}")]
    Params(String),
    #[error("strip {strip} too narrow for an admissible trapezoid")]
    StripTooNarrow { strip: usize },
    #[error("missing strips: expected {expected}, got {got}")]
    MissingStrips { expected: usize, got: usize },
    #[error("final times differ: {history} vs reference {reference}")]
    TimeMismatch { history: f64, reference: f64 },
    #[error("reference mesh dx = {reference} is not at least 4x finer than {history}")]
    ReferenceTooCoarse { history: f64, reference: f64 },
    #[error("meshes must differ")]
    MeshesMustDiffer,
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
