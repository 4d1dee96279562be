use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid envelope: {0}")]
    InvalidEnvelope(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature did not reach tolerance {requested:e} (achieved error estimate {achieved:e})")]
    Quadrature { requested: f64, achieved: f64 },
    #[error("coefficient {n} aliases on a grid of {grid_size} points (need |n| < grid/2)")]
    Aliasing { n: i64, grid_size: usize },
    #[error("realized window spans {span}, shorter than the requested length {x}")]
    WindowTooShort { x: f64, span: f64 },
    #[error("duplicate translation point {0}")]
    DuplicatePoint(f64),
    #[error("translation set is not a subset of the integers")]
    NonInteger,
    #[error("zero set covers {fraction:.3} of the circle; zero counting is meaningless")]
    ZeroSetTooLarge { fraction: f64 },
    #[error("cross-check failed: {0}")]
    Inconsistent(String),
    #[error("gram dimension {dim} exceeds the eigen-solve cap {cap}")]
    WindowTooLarge { dim: usize, cap: usize },
    #[error("all gram eigenvalues fall below the kernel cut")]
    Degenerate,
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("grid of {grid} points is too coarse; need at least {required}")]
    GridTooCoarse { grid: usize, required: usize },
}
