//! Epoch-wise coupling of two `±1` walks so that the second one gains on
//! the first, and its use to slow down a lazy walk on the tree.

use num_rational::Ratio;
use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::binomial::BinomialCoupling;
use super::composed_depth;
use super::report::{CouplingReport, GapKind, GapTracker};
use crate::error::{Error, Result};
use crate::measure::Laziness;
use crate::rng::stream;
use crate::schedule::Schedule;
use crate::tree::TreePath;

/// Uniform path of `len` steps ending at `a`, and a copy in which
/// `(b - a) / 2` uniformly chosen down-steps are flipped up.
pub fn bridge_paths<R: Rng + ?Sized>(a: i64, b: i64, len: usize, rng: &mut R) -> Result<(Vec<i8>, Vec<i8>)> {
    let n = len as i64;
    if a.abs() > n || (n + a) % 2 != 0 {
        return Err(Error::InvalidBridge(format!("no path of length {len} ends at {a}")));
    }
    if b < a || (b - a) % 2 != 0 {
        return Err(Error::InvalidBridge(format!("endpoints {a} -> {b} need b ≥ a and even difference")));
    }
    let ups = ((n + a) / 2) as usize;
    let flips = ((b - a) / 2) as usize;
    if flips > len - ups {
        return Err(Error::InvalidBridge(format!("only {} down-steps to flip, need {flips}", len - ups)));
    }
    let mut s: Vec<i8> = std::iter::repeat_n(1, ups).chain(std::iter::repeat_n(-1, len - ups)).collect();
    s.shuffle(rng);
    Ok(flip_down_steps(s, flips, rng))
}

fn flip_down_steps<R: Rng + ?Sized>(s: Vec<i8>, flips: usize, rng: &mut R) -> (Vec<i8>, Vec<i8>) {
    let downs: Vec<usize> = s.iter().enumerate().filter(|(_, &x)| x < 0).map(|(i, _)| i).collect();
    let mut s2 = s.clone();
    for k in index::sample(rng, downs.len(), flips) {
        s2[downs[k]] = 1;
    }
    (s, s2)
}

/// Seeded form of [`bridge_paths`].
pub fn bridge_coupling(a: i64, b: i64, len: usize, seed: u64) -> Result<(Vec<i8>, Vec<i8>)> {
    bridge_paths(a, b, len, &mut stream(seed, 0))
}

fn uniform_path<R: Rng + ?Sized>(ups: usize, len: usize, rng: &mut R) -> Vec<i8> {
    let mut s: Vec<i8> = std::iter::repeat_n(1, ups).chain(std::iter::repeat_n(-1, len - ups)).collect();
    s.shuffle(rng);
    s
}

/// Binomial couplings for the epochs `(2^n, 2^{n+1}]` needed to cover a
/// number of steps, shared across replicates.
#[derive(Debug, Clone)]
pub struct EpochPlan {
    pub p: Ratio<u64>,
    couplings: Vec<BinomialCoupling<f64>>,
}

impl EpochPlan {
    pub fn new(p: Ratio<u64>, max_steps: u64) -> Result<EpochPlan> {
        let mut couplings = Vec::new();
        let mut len = 2u64;
        while len < max_steps {
            couplings.push(BinomialCoupling::new(len, p, None)?);
            len *= 2;
        }
        if couplings.is_empty() {
            // validates p even when no epoch is needed
            BinomialCoupling::<f64>::new(1, p, None)?;
        }
        Ok(EpochPlan { p, couplings })
    }

    /// Coupled increments `(ξ, ξ')` for `steps` steps. The first two steps are
    /// independent; each later epoch takes its endpoint pair from the
    /// binomial coupling and its paths from the bridge when `Δ' ≥ Δ`.
    pub fn increments<R: Rng + ?Sized>(&self, steps: usize, rng: &mut R) -> Result<(Vec<i8>, Vec<i8>)> {
        let p = *self.p.numer() as f64 / *self.p.denom() as f64;
        let mut xs = Vec::with_capacity(steps);
        let mut ys = Vec::with_capacity(steps);
        let coin = |rng: &mut R| if rng.random_bool(p) { 1i8 } else { -1 };
        for _ in 0..steps.min(2) {
            xs.push(coin(rng));
            ys.push(coin(rng));
        }
        let mut epoch = 0;
        while xs.len() < steps {
            let coupling = self
                .couplings
                .get(epoch)
                .ok_or_else(|| Error::InvalidParams(format!("plan does not cover {steps} steps")))?;
            let len = coupling.n as usize;
            let (b, b2) = coupling.sample(rng);
            let (delta, delta2) = (2 * b as i64 - len as i64, 2 * b2 as i64 - len as i64);
            let (s, s2) = if delta2 >= delta {
                flip_down_steps(uniform_path(b as usize, len, rng), (b2 - b) as usize, rng)
            } else {
                (uniform_path(b as usize, len, rng), uniform_path(b2 as usize, len, rng))
            };
            let take = len.min(steps - xs.len());
            xs.extend_from_slice(&s[..take]);
            ys.extend_from_slice(&s2[..take]);
            epoch += 1;
        }
        Ok((xs, ys))
    }
}

/// Positions of both walks and the gap report.
#[derive(Debug, Clone)]
pub struct EpochRun {
    pub x: Vec<i64>,
    pub x_prime: Vec<i64>,
    pub report: CouplingReport,
}

fn partial_sums(steps: &[i8]) -> Vec<i64> {
    let mut out = Vec::with_capacity(steps.len() + 1);
    out.push(0);
    let mut acc = 0i64;
    for &s in steps {
        acc += s as i64;
        out.push(acc);
    }
    out
}

/// Two `±1` walks with up-probability `p` over `horizon` steps; the report
/// tracks `X'_t - X_t` against `√t / (ln t)^c`.
pub fn epoch_coupling(
    plan: &EpochPlan,
    horizon: u64,
    c: f64,
    seed: u64,
    replicate: u64,
    keep_rows: bool,
) -> Result<EpochRun> {
    if horizon < 2 {
        return Err(Error::InvalidParams("horizon must be at least 2".into()));
    }
    let mut rng = stream(seed, replicate);
    let (xs, ys) = plan.increments(horizon as usize, &mut rng)?;
    let (x, x_prime) = (partial_sums(&xs), partial_sums(&ys));
    let mut tracker = GapTracker::new(GapKind::Epoch { c }, horizon, keep_rows);
    for t in 1..=horizon as usize {
        tracker.push(t as u64, x[t], x_prime[t]);
    }
    Ok(EpochRun { x, x_prime, report: tracker.finish(seed, replicate) })
}

/// Lazy walks `X` and `X'` on `T_d` whose depths are driven by coupled
/// increments with shared holding times, and `Y_t = Π_t(X'_t)`. The report
/// tracks `|Y_t| - |X_t|` against `√t / (ln t)^(2c)`.
pub fn slowdown_composition(
    schedule: &Schedule,
    horizon: u64,
    c: f64,
    seed: u64,
    replicate: u64,
    keep_rows: bool,
) -> Result<CouplingReport> {
    let d = schedule.d;
    if d <= 2 {
        return Err(Error::UnsupportedDegree(format!("slow-down needs d > 2, got {d}")));
    }
    schedule.check_automorphisms()?;
    let plan = EpochPlan::new(Ratio::new(d as u64 - 1, d as u64), horizon)?;
    slowdown_with_plan(&plan, schedule, horizon, c, seed, replicate, keep_rows)
}

/// [`slowdown_composition`] with a prebuilt plan for `p = (d-1)/d`.
pub fn slowdown_with_plan(
    plan: &EpochPlan,
    schedule: &Schedule,
    horizon: u64,
    c: f64,
    seed: u64,
    replicate: u64,
    keep_rows: bool,
) -> Result<CouplingReport> {
    let d = schedule.d;
    let gamma = Laziness::uniform(d).to_f64();
    let mut rng = stream(seed, replicate);
    let (xs, ys) = plan.increments(horizon as usize, &mut rng)?;
    let mut tracker = GapTracker::new(GapKind::Slowdown { c }, horizon, keep_rows);
    let (mut depth_x, mut moves) = (0u32, 0usize);
    let mut x2 = TreePath::root();
    let mut applied = Vec::new();
    for t in 1..=horizon as usize {
        if !rng.random_bool(gamma) {
            let (a, b) = (xs[moves], ys[moves]);
            moves += 1;
            depth_x = if depth_x == 0 || a > 0 { depth_x + 1 } else { depth_x - 1 };
            if x2.is_root() || b > 0 {
                let slot = rng.random_range(0..x2.child_count(d));
                x2.push_child(slot);
            } else {
                x2.pop();
            }
        }
        let spec = schedule.get(t);
        if !spec.is_identity() {
            applied.push(spec);
        }
        tracker.push(t as u64, depth_x as i64, composed_depth(d, &x2, &applied)? as i64);
    }
    Ok(tracker.finish(seed, replicate))
}
