//! Exhaustive checks of the set identities and inequalities over every
//! subset of a small ball.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::run_replicates;
use crate::sets::{check_iso_exact, iso_lower_bound, k_profile, neighborhood};
use crate::tree::{Parity, TreeParams, VertexId, VertexSet};
use crate::{Partition, WalkKind};

/// Largest ball (in vertices) whose power set is enumerated.
pub const MAX_BALL_VERTICES: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetCheck {
    /// `|N(J)| = (d-1)|J| + κ1 + κ2`.
    IsoExact,
    LazyLowerBound,
    SimpleLowerBound,
    /// `Σ k_i = (d+1)|J|`.
    LazyMassIdentity,
    /// `Σ k'_i = d|J|`.
    SimpleMassIdentity,
    /// `k(J) ≻ k(quasi-ball)`.
    LazyDominance,
    /// `k'(J) ≻ k'(half-quasi-ball)` for the even half-quasi-ball.
    SimpleDominanceEven,
    SimpleDominanceOdd,
}

impl SubsetCheck {
    pub const ALL: [SubsetCheck; 8] = [
        SubsetCheck::IsoExact,
        SubsetCheck::LazyLowerBound,
        SubsetCheck::SimpleLowerBound,
        SubsetCheck::LazyMassIdentity,
        SubsetCheck::SimpleMassIdentity,
        SubsetCheck::LazyDominance,
        SubsetCheck::SimpleDominanceEven,
        SubsetCheck::SimpleDominanceOdd,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetViolation {
    pub check: SubsetCheck,
    pub members: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExhaustiveReport {
    pub d: u32,
    pub radius: u32,
    pub subsets: u64,
    pub violation_counts: BTreeMap<SubsetCheck, u64>,
    /// Up to [`ExhaustiveReport::KEPT`] violating subsets, in mask order.
    pub violations: Vec<SubsetViolation>,
}

impl ExhaustiveReport {
    pub const KEPT: usize = 100;

    pub fn passed(&self) -> bool {
        self.violation_counts.values().all(|&n| n == 0)
    }

    pub fn total_violations(&self) -> u64 {
        self.violation_counts.values().sum()
    }
}

/// Smallest depth cap holding `N(B_radius)` and half-quasi-balls of both
/// parities with up to `|B_radius|` vertices plus their neighborhoods.
fn suite_tree(d: u32, radius: u32) -> Result<TreeParams> {
    let need = TreeParams::new(d, radius)?.vertex_count();
    let mut cap = radius + 1;
    loop {
        let inner = TreeParams::new(d, cap - 1)?;
        if [Parity::Even, Parity::Odd].iter().all(|&p| inner.parity_class_size(p) >= need) {
            return TreeParams::new(d, cap);
        }
        cap += 1;
    }
}

/// Runs every [`SubsetCheck`] on every non-empty `J ⊆ B_radius`.
pub fn verify_subsets(d: u32, radius: u32, workers: usize) -> Result<ExhaustiveReport> {
    let ball = TreeParams::new(d, radius)?.vertex_count();
    if ball > MAX_BALL_VERTICES {
        return Err(Error::BudgetExceeded { needed: 1u128 << ball.min(127), budget: 1u128 << MAX_BALL_VERTICES });
    }
    let tree = suite_tree(d, radius)?;
    let mut lazy_balls = vec![None];
    let mut half_balls = vec![None];
    for s in 1..=ball {
        lazy_balls.push(Some(k_profile(&tree, &tree.quasi_ball(s)?.members(), WalkKind::Lazy)?.parts));
        let mut pair = Vec::with_capacity(2);
        for parity in [Parity::Even, Parity::Odd] {
            pair.push(k_profile(&tree, &tree.half_quasi_ball(s, parity)?.members(&tree)?, WalkKind::Simple)?.parts);
        }
        half_balls.push(Some(pair));
    }
    let subsets = (1u64 << ball) - 1;
    let results = run_replicates(subsets, workers, |i| {
        let set: VertexSet = (0..ball).filter(|b| (i + 1) >> b & 1 == 1).map(VertexId).collect();
        let s = set.len();
        let halves = half_balls[s].as_ref().expect("sizes start at one");
        check_subset(&tree, &set, lazy_balls[s].as_ref().expect("sizes start at one"), halves)
    })?;
    let mut report = ExhaustiveReport {
        d,
        radius,
        subsets,
        violation_counts: SubsetCheck::ALL.iter().map(|&c| (c, 0)).collect(),
        violations: Vec::new(),
    };
    for (i, failed) in results.into_iter().enumerate() {
        for check in failed? {
            *report.violation_counts.entry(check).or_insert(0) += 1;
            if report.violations.len() < ExhaustiveReport::KEPT {
                let mask = i as u64 + 1;
                let members = (0..ball).filter(|b| mask >> b & 1 == 1).collect();
                report.violations.push(SubsetViolation { check, members });
            }
        }
    }
    Ok(report)
}

fn check_subset(tree: &TreeParams, set: &VertexSet, ball: &Partition, halves: &[Partition]) -> Result<Vec<SubsetCheck>> {
    let d = tree.degree() as u64;
    let size = set.len() as u64;
    let mut failed = Vec::new();
    if !check_iso_exact(tree, set)? {
        failed.push(SubsetCheck::IsoExact);
    }
    for (kind, check) in [(WalkKind::Lazy, SubsetCheck::LazyLowerBound), (WalkKind::Simple, SubsetCheck::SimpleLowerBound)] {
        if (neighborhood(tree, set, kind)?.len() as u64) < iso_lower_bound(tree, set, kind)? {
            failed.push(check);
        }
    }
    let lazy = k_profile(tree, set, WalkKind::Lazy)?.parts;
    let simple = k_profile(tree, set, WalkKind::Simple)?.parts;
    if lazy.size() != (d + 1) * size {
        failed.push(SubsetCheck::LazyMassIdentity);
    }
    if simple.size() != d * size {
        failed.push(SubsetCheck::SimpleMassIdentity);
    }
    if !lazy.dominates(ball)? {
        failed.push(SubsetCheck::LazyDominance);
    }
    for (half, check) in halves.iter().zip([SubsetCheck::SimpleDominanceEven, SubsetCheck::SimpleDominanceOdd]) {
        if !simple.dominates(half)? {
            failed.push(check);
        }
    }
    Ok(failed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = verify_subsets(3, 1, 2).unwrap();
        assert_eq!(report.subsets, 15);
        assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn refuses_large_balls() {
        assert!(matches!(verify_subsets(3, 3, 1), Err(Error::BudgetExceeded { .. })));
    }
}
