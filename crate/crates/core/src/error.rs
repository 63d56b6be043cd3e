use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid order {0}: the root-of-unity order must be at least 1")]
    InvalidOrder(usize),

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("occupation vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("photon number mismatch: input carries {input} photons, output carries {output}")]
    PhotonMismatch { input: u64, output: u64 },

    #[error("transition carries no photons")]
    EmptyTransition,

    #[error("matrix is {rows}x{cols}, a square matrix is required")]
    NotSquare { rows: usize, cols: usize },

    #[error("{what}: side {side} exceeds the limit {limit}; {advice}")]
    ResourceGuard {
        what: &'static str,
        side: usize,
        limit: usize,
        advice: &'static str,
    },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("alternating sum needs 2^{q} to divide {order}")]
    AfsrNotDivisible { order: usize, q: u32 },

    #[error("output {0:?} is not a coincident state with equal photons in every port")]
    NotCoincident(Vec<u32>),

    #[error("degenerate JKN parameter: sum of squared margins equals the total photon number ({0})")]
    DegenerateJkn(u64),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
