use thiserror::Error;

use crate::tree::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid tree parameters: {0}")]
    InvalidParams(String),

    #[error("vertex index {index} is outside the tree truncated at depth {depth_cap}")]
    OutOfRange { index: u64, depth_cap: u32 },

    /// A neighbor (or a step target) would fall below the truncation depth.
    #[error("vertex {vertex:?} at depth {depth} touches the truncation depth {depth_cap}")]
    BoundaryOverflow {
        vertex: VertexId,
        depth: u32,
        depth_cap: u32,
    },

    #[error("size {size} exceeds the {available} vertices available")]
    SizeExceeded { size: u64, available: u64 },

    #[error("permutation image of {from:?} lies outside the truncated tree")]
    ImageOverflow { from: VertexId },

    #[error("permutation is not injective: {first:?} and {second:?} both map to {image:?}")]
    NotInjective {
        first: VertexId,
        second: VertexId,
        image: VertexId,
    },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("permutation #{position} is not a tree automorphism")]
    NotAutomorphism { position: usize },

    #[error("laziness {0} outside [1/(d+1), 1)")]
    LazinessOutOfRange(String),

    #[error("probability {0} outside (0, 1)")]
    ProbabilityOutOfRange(String),

    #[error("partitions have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("function is not concave on the given points")]
    NotConcave,

    #[error("argument {0} lies outside the domain of the piecewise-linear function")]
    OutsideDomain(String),

    #[error("dominance precondition violated")]
    NotDominated,

    #[error("operation requires a non-empty vertex set")]
    EmptySet,

    #[error("size {0} too small for the closed form (need > 1)")]
    TooSmall(u64),

    #[error("exact arithmetic overflowed")]
    ArithmeticOverflow,

    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("coupling completion infeasible at {0}")]
    InfeasibleCompletion(i64),

    #[error("bridge endpoints invalid: {0}")]
    InvalidBridge(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("unsupported degree: {0}")]
    UnsupportedDegree(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
