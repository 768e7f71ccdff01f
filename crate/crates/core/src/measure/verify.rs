//! Exact end-to-end comparisons between a walk and its permuted version.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;

use super::{depth_cdf_dominates, Distribution, Laziness, Mass, Prob};
use crate::error::{Error, Result};
use crate::schedule::Schedule;
use crate::sets::k_profile;
use crate::tree::{TreeParams, TreePath, VertexId, VertexSet};
use crate::WalkKind;

#[derive(Debug, Clone, Copy)]
pub struct ChainConfig {
    pub kind: WalkKind,
    /// Ignored for simple walks.
    pub gamma: Laziness,
    pub horizon: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainStep {
    pub t: usize,
    pub majorizes: bool,
    /// Greedy (lazy) or half-greedy (simple) arrangement of `p_t`.
    pub arranged: bool,
    /// Depth domination with shift 0 (lazy) or 2 (simple).
    pub depth_dominates: bool,
    pub depth_dominates_unshifted: bool,
    pub entropy_p: f64,
    pub entropy_q: f64,
    /// `H(p_t) ≤ H(q_t)`, the Schur-concavity consequence of majorization.
    pub entropy_ordered: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub t: usize,
    pub check: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub kind: WalkKind,
    pub d: u32,
    pub horizon: usize,
    /// Whether shifted depth domination is a theorem for this configuration
    /// (always for lazy walks, `d > 2` for simple walks).
    pub depth_enforced: bool,
    pub steps: Vec<ChainStep>,
    pub first_violation: Option<Violation>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Evolves `p_t` (plain walk) and `q_t` (permuted walk) from the root and
/// checks the comparison at every step.
pub fn verify_majorization_chain<M: Mass>(
    tree: TreeParams,
    schedule: &Schedule,
    config: ChainConfig,
) -> Result<ChainReport> {
    let d = tree.degree();
    if schedule.d != d {
        return Err(Error::InvalidParams(format!("schedule is for d = {}, tree has d = {d}", schedule.d)));
    }
    if config.kind == WalkKind::Lazy {
        config.gamma.check_for(d)?;
    }
    let step = |p: &Distribution<M>| match config.kind {
        WalkKind::Lazy => p.lazy_step(config.gamma),
        WalkKind::Simple => p.simple_step(),
    };
    let (shift, depth_enforced) = match config.kind {
        WalkKind::Lazy => (0, true),
        WalkKind::Simple => (2, d > 2),
    };
    let mut p = Distribution::<M>::point(tree, VertexId::ROOT)?;
    let mut q = p.clone();
    let mut steps = Vec::with_capacity(config.horizon);
    let mut first_violation = None;
    for t in 1..=config.horizon {
        p = step(&p)?;
        q = step(&q)?.permute(schedule.get(t))?;
        let (entropy_p, entropy_q) = (p.shannon_entropy(), q.shannon_entropy());
        let record = ChainStep {
            t,
            majorizes: p.majorizes(&q)?,
            arranged: match config.kind {
                WalkKind::Lazy => p.is_greedily_arranged(),
                WalkKind::Simple => p.is_half_greedily_arranged(),
            },
            depth_dominates: depth_cdf_dominates(&p, &q, shift)?,
            depth_dominates_unshifted: depth_cdf_dominates(&p, &q, 0)?,
            entropy_p,
            entropy_q,
            entropy_ordered: entropy_p <= entropy_q,
        };
        if first_violation.is_none() {
            let failed = [
                (!record.majorizes, "majorization"),
                (!record.arranged, "arrangement"),
                (depth_enforced && !record.depth_dominates, "depth domination"),
                (!record.entropy_ordered, "entropy order"),
            ]
            .into_iter()
            .find(|(bad, _)| *bad);
            if let Some((_, check)) = failed {
                first_violation = Some(Violation { t, check: check.to_string() });
            }
        }
        steps.push(record);
    }
    Ok(ChainReport { kind: config.kind, d, horizon: config.horizon, depth_enforced, steps, first_violation })
}

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// Exact law of a statistic of the depth sequence, as counts out of
/// `total` equally likely step sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable<K> {
    pub counts: BTreeMap<K, u128>,
    pub total: u128,
}

impl<K: Ord> JointTable<K> {
    pub fn probability(&self, pred: impl Fn(&K) -> bool) -> Ratio<u128> {
        let hits: u128 = self.counts.iter().filter(|(k, _)| pred(k)).map(|(_, &c)| c).sum();
        Ratio::new(hits, self.total)
    }
}

/// Enumerates all step sequences of length `horizon` of the walk permuted by
/// `schedule` (lazy walks stay with probability `1/(d+1)`). The statistic
/// receives depths indexed by time, `depths[0] = 0`.
pub fn enumerate_joint<K: Ord>(
    schedule: &Schedule,
    kind: WalkKind,
    horizon: usize,
    budget: u128,
    statistic: impl Fn(&[u32]) -> K,
) -> Result<JointTable<K>> {
    let d = schedule.d;
    let choices = match kind {
        WalkKind::Lazy => d + 1,
        WalkKind::Simple => d,
    };
    let total = (choices as u128)
        .checked_pow(horizon as u32)
        .filter(|&n| n <= budget)
        .ok_or(Error::BudgetExceeded {
            needed: (choices as u128).saturating_pow(horizon as u32),
            budget,
        })?;
    let mut table = JointTable { counts: BTreeMap::new(), total };
    let mut depths = vec![0u32; horizon + 1];
    walk_tree(schedule, kind, 1, &TreePath::root(), &mut depths, &statistic, &mut table)?;
    Ok(table)
}

fn walk_tree<K: Ord>(
    schedule: &Schedule,
    kind: WalkKind,
    t: usize,
    at: &TreePath,
    depths: &mut Vec<u32>,
    statistic: &impl Fn(&[u32]) -> K,
    table: &mut JointTable<K>,
) -> Result<()> {
    if t == depths.len() {
        *table.counts.entry(statistic(depths)).or_insert(0) += 1;
        return Ok(());
    }
    let d = schedule.d;
    let stay = kind == WalkKind::Lazy;
    for choice in 0..d + stay as u32 {
        let mut next = at.clone();
        if choice < d {
            next.step_to_neighbor(choice);
        }
        schedule.get(t).apply_path(d, &mut next)?;
        depths[t] = next.depth();
        walk_tree(schedule, kind, t + 1, &next, depths, statistic, table)?;
    }
    Ok(())
}

/// The three sides of `q'(J) ≤ (1/(d+1)) Σ q*(k_i) ≤ (1/(d+1)) Σ q*(m_i)`,
/// with `k` the profile of `J` and `m` the profile of the quasi-ball of the
/// same size.
#[derive(Debug, Clone, Copy)]
pub struct ProofChain<M> {
    pub stepped_mass: Prob<M>,
    pub profile_bound: Prob<M>,
    pub ball_bound: Prob<M>,
}

impl<M: Mass> ProofChain<M> {
    pub fn holds(&self) -> Result<bool> {
        Ok(self.stepped_mass.compare(self.profile_bound)?.is_le() && self.profile_bound.compare(self.ball_bound)?.is_le())
    }
}

pub fn proof_chain<M: Mass>(q: &Distribution<M>, set: &VertexSet) -> Result<ProofChain<M>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let tree = q.tree();
    let d = tree.degree() as u64;
    let stepped = q.lazy_step(Laziness::uniform(d as u32))?;
    let stepped_mass = stepped.mass_of_set(set)?;
    let k = k_profile(tree, set, WalkKind::Lazy)?;
    let ball = tree.quasi_ball(set.len() as u64)?.members();
    let m = k_profile(tree, &ball, WalkKind::Lazy)?;
    let prefix = q.rearrangement()?;
    let q_star = |x: u64| prefix[(x as usize).min(prefix.len() - 1)];
    let sum = |parts: &[u64]| parts.iter().try_fold(M::zero(), |acc, &x| acc.add(q_star(x)));
    let den = q.denom().mul(M::from_u64(d + 1))?;
    Ok(ProofChain {
        stepped_mass,
        profile_bound: Prob { num: sum(k.parts.parts())?, den },
        ball_bound: Prob { num: sum(m.parts.parts())?, den },
    })
}

/// Weight `a` with `q'_γ = a q + (1 - a) q'_δ`, namely `a = (γ - δ) / (1 - δ)`.
pub fn mixture_weight(gamma: Laziness, delta: Laziness) -> Ratio<u64> {
    let one = Ratio::from_integer(1);
    (gamma.ratio() - delta.ratio()) / (one - delta.ratio())
}

/// Checks `q'_γ = a q + (1 - a) q'_δ` for `δ = 1/(d+1)` and `a` from
/// [`mixture_weight`], exactly.
pub fn mixture_identity_holds(q: &Distribution<u128>, gamma: Laziness) -> Result<bool> {
    let delta = Laziness::uniform(q.tree().degree());
    gamma.check_for(q.tree().degree())?;
    let a = mixture_weight(gamma, delta);
    let lhs = q.lazy_step(gamma)?;
    let rhs = q.combine(a, &q.lazy_step(delta)?, Ratio::from_integer(1) - a)?;
    Ok(lhs == rhs)
}
