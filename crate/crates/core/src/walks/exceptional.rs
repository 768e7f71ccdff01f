use rand::Rng;

use super::report::{CouplingReport, GapKind, GapTracker};
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::schedule::{ExceptionalSchedule, GrowthFn};

/// Lazy walk `X` on `Z` (stay with probability `1/3`) and the permuted walk
/// `Y` obtained by applying the translations of [`ExceptionalSchedule`] after
/// every shared step, so that `Y_t = X_t - ℓ_t`. The report tracks
/// `|X_t| - |Y_t|` normalized by `φ(t)`.
///
/// `Y` is evolved through the schedule itself; any `t` with
/// `|Y_t + ℓ_t| ≠ |X_t|` is reported as an error.
pub fn exceptional_time_experiment(
    schedule: &ExceptionalSchedule,
    seed: u64,
    replicate: u64,
    keep_rows: bool,
) -> Result<CouplingReport> {
    let horizon = schedule.horizon;
    let mut rng = stream(seed, replicate);
    let mut tracker = GapTracker::new(GapKind::Exceptional, horizon, keep_rows);
    let (mut x, mut y) = (0i64, 0i64);
    for t in 1..=horizon {
        let step = match rng.random_range(0..3u8) {
            0 => 0,
            1 => 1,
            _ => -1,
        };
        x += step;
        y = schedule.translation(t).apply_line(y + step)?;
        if (y + schedule.ell(t)).abs() != x.abs() {
            return Err(Error::InvalidPermutation(format!("schedule inconsistent at t = {t}")));
        }
        tracker.push(t, x.abs(), y.abs());
    }
    Ok(tracker.finish(seed, replicate))
}

/// Convenience wrapper building the schedule first.
pub fn run_exceptional(horizon: u64, growth: GrowthFn, seed: u64, replicate: u64, keep_rows: bool) -> Result<CouplingReport> {
    exceptional_time_experiment(&ExceptionalSchedule::build(horizon, growth)?, seed, replicate, keep_rows)
}
