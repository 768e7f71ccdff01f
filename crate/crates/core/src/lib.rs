//! Permuted random walks on the rooted `d`-regular tree.
//!
//! The crate covers four layers:
//!
//! * [`tree`]: canonical breadth-first indexing of the tree, balls, spheres,
//!   quasi-balls and their parity-restricted versions;
//! * [`sets`] and [`partition`]: neighborhood multiplicity profiles, the exact
//!   isoperimetric identity `|N(J)| = (d-1)|J| + κ1 + κ2`, and the dominance
//!   order on partitions, with [`exhaustive`] running every subset check over
//!   a small ball;
//! * [`measure`]: exact (shared-denominator integer) and `f64` distributions,
//!   the lazy and simple step operators, decreasing rearrangements and
//!   majorization, plus end-to-end verification of walk-versus-permuted-walk
//!   comparisons;
//! * [`schedule`] and [`walks`]: permutation schedules, Monte Carlo walks,
//!   and the automorphism, binomial, bridge and epoch couplings.

pub mod error;
pub mod exhaustive;
pub mod measure;
pub mod partition;
pub mod rng;
pub mod schedule;
pub mod sets;
pub mod tree;
pub mod walks;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use measure::{Distribution, ExactDistribution, FloatDistribution, Laziness, Mass, Prob};
pub use partition::Partition;
pub use schedule::{PermutationSpec, Schedule};
pub use tree::{Parity, TreeParams, TreePath, VertexId, VertexSet};

/// Lazy walks step within closed neighborhoods `N(v)`; simple walks within
/// open neighborhoods `N'(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    Lazy,
    Simple,
}

impl std::fmt::Display for WalkKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WalkKind::Lazy => "lazy",
            WalkKind::Simple => "simple",
        })
    }
}
