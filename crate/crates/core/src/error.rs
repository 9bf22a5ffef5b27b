use thiserror::Error;

/// Errors raised by the library.
///
/// Floating-point payloads are stored as `f64` whatever the scalar type of
/// the computation that produced them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group half-order n must be at least 3, got {0}")]
    InvalidOrder(i64),

    #[error("state ({i}, {j}) has a negative coordinate")]
    NegativeState { i: i64, j: i64 },

    #[error("state ({i}, {j}) is not an interior state")]
    NotInterior { i: usize, j: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("cone index k = {k} outside 0..={n}")]
    ConeIndex { k: i64, n: u32 },

    #[error("orbit point within {distance:e} of a pole at z = {re} + {im}i")]
    PoleCollision { distance: f64, re: f64, im: f64 },

    #[error("group closure produced {found} elements, expected {expected}")]
    GroupClosure { expected: usize, found: usize },

    #[error("cycle check `{cycle}` failed at z = {re} + {im}i (residual {residual:e})")]
    CycleCheck {
        cycle: &'static str,
        re: f64,
        im: f64,
        residual: f64,
    },

    #[error("linear solver stalled after {iterations} iterations (residual {residual:e})")]
    SolverStalled { iterations: usize, residual: f64 },

    #[error("truncation did not converge after {doublings} doublings (last relative change {delta:e})")]
    TruncationNotConverged { doublings: u32, delta: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("point outside the admissible region: {0}")]
    OutsideRegion(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
