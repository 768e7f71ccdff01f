//! Monte Carlo walks and explicit couplings.

mod binomial;
mod epoch;
mod exceptional;
mod report;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::Laziness;
use crate::rng::stream;
use crate::schedule::{PermutationSpec, Schedule};
use crate::tree::{TreeParams, TreePath, VertexId};
use crate::WalkKind;

pub use binomial::{default_shift, BinomialCoupling, ExactWeight, Weight};
pub use epoch::{
    bridge_coupling, bridge_paths, epoch_coupling, slowdown_composition, slowdown_with_plan, EpochPlan, EpochRun,
};
pub use exceptional::{exceptional_time_experiment, run_exceptional};
pub use report::{CouplingReport, GapKind, GapRow, GapSummary, GapTracker};

/// Depths (always) and vertices (optionally) of one sampled trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkTrace {
    pub kind: WalkKind,
    pub seed: u64,
    pub replicate: u64,
    pub schedule_id: Option<String>,
    pub depths: Vec<u32>,
    pub positions: Option<Vec<VertexId>>,
}

impl WalkTrace {
    pub fn horizon(&self) -> usize {
        self.depths.len() - 1
    }

    /// `|X_T| / T`.
    pub fn speed(&self) -> f64 {
        match self.horizon() {
            0 => 0.0,
            t => self.depths[t] as f64 / t as f64,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub d: u32,
    pub kind: WalkKind,
    /// Probability of staying put; only used by lazy walks.
    pub gamma: Laziness,
    pub horizon: u64,
    /// Record vertex indices in a tree truncated at this depth.
    pub record_positions: Option<u32>,
}

impl SimConfig {
    fn check(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidParams(format!("degree {} < 2", self.d)));
        }
        if self.kind == WalkKind::Lazy {
            self.gamma.check_for(self.d)?;
        }
        Ok(())
    }
}

/// One step of the unpermuted walk.
fn step<R: Rng + ?Sized>(path: &mut TreePath, d: u32, kind: WalkKind, gamma: f64, rng: &mut R) {
    if kind == WalkKind::Lazy && rng.random_bool(gamma) {
        return;
    }
    path.step_to_neighbor(rng.random_range(0..d));
}

/// Samples a walk from the root, applying `schedule` after every step.
pub fn simulate(config: &SimConfig, schedule: Option<&Schedule>, seed: u64, replicate: u64) -> Result<WalkTrace> {
    config.check()?;
    if let Some(s) = schedule {
        if s.d != config.d {
            return Err(Error::InvalidParams("schedule degree differs from walk degree".into()));
        }
    }
    let recorder = config.record_positions.map(|cap| TreeParams::new(config.d, cap)).transpose()?;
    let gamma = config.gamma.to_f64();
    let mut rng = stream(seed, replicate);
    let mut path = TreePath::root();
    let mut depths = Vec::with_capacity(config.horizon as usize + 1);
    let mut positions = recorder.map(|_| Vec::with_capacity(config.horizon as usize + 1));
    depths.push(0);
    if let Some(p) = positions.as_mut() {
        p.push(VertexId::ROOT);
    }
    for t in 1..=config.horizon as usize {
        step(&mut path, config.d, config.kind, gamma, &mut rng);
        if let Some(s) = schedule {
            s.get(t).apply_path(config.d, &mut path)?;
        }
        depths.push(path.depth());
        if let (Some(tree), Some(p)) = (recorder.as_ref(), positions.as_mut()) {
            let v = tree.vertex_of(&path).map_err(|_| Error::BoundaryOverflow {
                vertex: VertexId(u64::MAX),
                depth: path.depth(),
                depth_cap: tree.depth_cap(),
            })?;
            p.push(v);
        }
    }
    Ok(WalkTrace {
        kind: config.kind,
        seed,
        replicate,
        schedule_id: schedule.map(|_| "custom".to_string()),
        depths,
        positions,
    })
}

/// `|Π(x)|` for a composition `Π` of automorphisms (edge shifts, or
/// translations on the line), without copying all of `x`: an edge shift reads
/// at most two leading slots and removes at most one, so `n` of them only see
/// the first `2n + 2` slots.
fn composed_depth(d: u32, x: &TreePath, applied: &[&PermutationSpec]) -> Result<u32> {
    if applied.is_empty() {
        return Ok(x.depth());
    }
    if d == 2 {
        let mut c = x.line_coordinate();
        for spec in applied {
            c = spec.apply_line(c)?;
        }
        return Ok(c.unsigned_abs() as u32);
    }
    let keep = (2 * applied.len() + 2).min(x.depth() as usize);
    let mut head = TreePath::root();
    head.slots_mut().extend(x.slots().iter().take(keep));
    for spec in applied {
        spec.apply_path(d, &mut head)?;
    }
    Ok(head.depth() + x.depth() - keep as u32)
}

/// Drives `X` by one walk and sets `Y_t = π_t ∘ ... ∘ π_1 (X_t)`, which is a
/// permuted walk when every `π_t` is an automorphism. The report tracks
/// `|X_t| - |Y_t|` against `2 ln t`.
pub fn automorphism_coupling(
    config: &SimConfig,
    schedule: &Schedule,
    seed: u64,
    replicate: u64,
    keep_rows: bool,
) -> Result<(WalkTrace, WalkTrace, CouplingReport)> {
    config.check()?;
    schedule.check_automorphisms()?;
    let d = config.d;
    let gamma = config.gamma.to_f64();
    let mut rng = stream(seed, replicate);
    let mut x = TreePath::root();
    let mut applied: Vec<&PermutationSpec> = Vec::new();
    let n = config.horizon as usize;
    let (mut dx, mut dy) = (Vec::with_capacity(n + 1), Vec::with_capacity(n + 1));
    dx.push(0);
    dy.push(0);
    let mut tracker = GapTracker::new(GapKind::Automorphism, config.horizon, keep_rows);
    for t in 1..=n {
        step(&mut x, d, config.kind, gamma, &mut rng);
        let spec = schedule.get(t);
        if !spec.is_identity() {
            applied.push(spec);
        }
        let depth_y = composed_depth(d, &x, &applied)?;
        dx.push(x.depth());
        dy.push(depth_y);
        tracker.push(t as u64, x.depth() as i64, depth_y as i64);
    }
    let trace = |depths| WalkTrace {
        kind: config.kind,
        seed,
        replicate,
        schedule_id: None,
        depths,
        positions: None,
    };
    let mut ty = trace(dy);
    ty.schedule_id = Some("automorphisms".into());
    Ok((trace(dx), ty, tracker.finish(seed, replicate)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::random_edge_shift_schedule;

    fn lazy(d: u32, horizon: u64) -> SimConfig {
        SimConfig { d, kind: WalkKind::Lazy, gamma: Laziness::uniform(d), horizon, record_positions: None }
    }

    #[test]
    fn trivial_horizon() {
        let trace = simulate(&lazy(3, 0), None, 1, 0).unwrap();
        assert_eq!(trace.depths, vec![0]);
        let mut config = lazy(3, 0);
        config.record_positions = Some(2);
        assert_eq!(simulate(&config, None, 1, 0).unwrap().positions, Some(vec![VertexId::ROOT]));
    }

    #[test]
    fn traces_are_walks() {
        let mut config = lazy(3, 40);
        config.record_positions = Some(41);
        let trace = simulate(&config, None, 5, 2).unwrap();
        let tree = TreeParams::new(3, 41).unwrap();
        let positions = trace.positions.as_ref().unwrap();
        for w in positions.windows(2) {
            assert!(tree.neighbors_closed(w[0]).unwrap().contains(&w[1]));
        }
        for (v, &depth) in positions.iter().zip(&trace.depths) {
            assert_eq!(tree.depth(*v).unwrap(), depth);
        }
        assert_eq!(trace, simulate(&config, None, 5, 2).unwrap());
        assert_ne!(trace.depths, simulate(&config, None, 5, 3).unwrap().depths);
    }

    #[test]
    fn positions_overflow() {
        let mut config = lazy(3, 50);
        config.record_positions = Some(2);
        assert!(matches!(simulate(&config, None, 1, 0), Err(Error::BoundaryOverflow { .. })));
    }

    #[test]
    fn composed_depth_matches_full_application() {
        let mut rng = stream(12, 0);
        for d in [2u32, 3, 4] {
            for _ in 0..300 {
                let mut x = TreePath::root();
                for _ in 0..rng.random_range(0..30) {
                    x.step_to_neighbor(rng.random_range(0..d));
                }
                let specs: Vec<PermutationSpec> = (0..rng.random_range(0..8))
                    .map(|_| match rng.random_range(0..3) {
                        0 if d == 2 => PermutationSpec::Translation { offset: rng.random_range(-5..=5) },
                        _ => PermutationSpec::EdgeShift { target: rng.random_range(1..=d as u64) },
                    })
                    .collect();
                let applied: Vec<&PermutationSpec> = specs.iter().collect();
                let mut y = x.clone();
                for spec in &applied {
                    spec.apply_path(d, &mut y).unwrap();
                }
                assert_eq!(composed_depth(d, &x, &applied).unwrap(), y.depth());
            }
        }
    }

    #[test]
    fn identity_coupling_has_no_gap() {
        let (x, y, report) = automorphism_coupling(&lazy(3, 500), &Schedule::identity(3), 3, 0, false).unwrap();
        assert_eq!(x.depths, y.depths);
        assert_eq!(report.summary.max_gap, 0);
        assert_eq!(report.summary.min_gap, 0);
    }

    #[test]
    fn edge_shift_coupling_gap_is_small() {
        let mut rng = stream(8, 0);
        let schedule = random_edge_shift_schedule(3, 2000, 0.2, &mut rng);
        let (_, _, report) = automorphism_coupling(&lazy(3, 2000), &schedule, 4, 0, false).unwrap();
        // the gap can only change by one per shift and shrinks once X is far away
        assert!(report.summary.max_gap <= 2000);
        let bad = Schedule { d: 3, depth: 0, permutations: vec![PermutationSpec::Transposition { u: 0, w: 1 }] };
        assert!(matches!(
            automorphism_coupling(&lazy(3, 5), &bad, 1, 0, false),
            Err(Error::NotAutomorphism { position: 1 })
        ));
    }
}
