use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("eigen/singular value solver did not converge")]
    NoConvergence,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("translation {shift} is not aligned to the grid (shift * q must be an integer)")]
    OffGridShift { shift: f64 },
    #[error("modulation {freq} is not periodic on the grid (freq * P must be an integer)")]
    OffGridFrequency { freq: f64 },
    #[error("dilation {factor} is not coprime to the grid size {n}")]
    NonCoprimeDilation { factor: i64, n: usize },
    #[error("indicator endpoints [{start}, {end}) are not grid aligned inside one period")]
    OffGridEndpoints { start: f64, end: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid wave packet parameters: {0}")]
    InvalidParams(String),

    #[error("frame system has no vectors")]
    EmptySystem,
    #[error("frame operator is singular (lower bound {lower:.3e}); not a frame")]
    NotAFrame { lower: f64 },
    #[error("system is not a Parseval frame (bounds {lower:.6}, {upper:.6})")]
    NotParseval { lower: f64, upper: f64 },
    #[error("operator is not hyponormal (commutator minimum eigenvalue {min_eig:.3e})")]
    NotHyponormal { min_eig: f64 },
    #[error("system is not an operator-controlled frame: {0}")]
    NotThetaFrame(String),
    #[error("transform operator is singular or ill conditioned (condition {condition:.3e})")]
    SingularU { condition: f64 },

    #[error("partition cells overlap at index {0}")]
    PartitionNotDisjoint(usize),
    #[error("partition does not cover index {0}")]
    PartitionNotExhaustive(usize),
    #[error("invalid combination: {0}")]
    InvalidCombination(String),

    #[error("unknown example id {0:?}")]
    UnknownExample(String),
}
