//! Error taxonomy shared by the lattice kernels and the operators.

use thiserror::Error;

/// Errors raised by lattice kernels, grid operators and series evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Lattice coefficients violate the family constraints.
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    /// A fractional order is out of the admissible range.
    #[error("invalid order: {0}")]
    InvalidOrder(String),

    /// A grid function is malformed (empty, non-finite, mismatched base).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Gamma or q-gamma evaluated at a non-positive integer.
    #[error("gamma pole at argument {arg}")]
    Pole { arg: f64 },

    /// An infinite product or series did not converge within the term budget.
    #[error("no convergence within {terms} terms")]
    Divergence { terms: usize },

    /// Arguments outside the supported domain of a kernel.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grid too short for the requested operator depth.
    #[error("grid too short: need more than {needed} points, got {got}")]
    Size { needed: usize, got: usize },

    /// The direct kernel form is undefined at integer orders.
    #[error("direct kernel undefined for integer order alpha = {alpha}; use the compose form")]
    IntegerOrder { alpha: f64 },

    /// Operation not defined for this lattice family.
    #[error("unsupported lattice family: {0}")]
    Family(String),

    /// Order restriction of a sequential operator violated.
    #[error("order restriction violated: {0}")]
    Order(String),

    /// Evaluation point is not aligned with the operator's grid class.
    #[error("grid alignment error: {0}")]
    Alignment(String),

    /// Degenerate problem input (e.g. vanishing leading coefficient).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}
