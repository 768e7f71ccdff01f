use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schedule::phi;

/// Which gap is tracked and what counts as a violation at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapKind {
    /// `|X_t| - |Y_t|`; violation when it exceeds `2 ln t`.
    Automorphism,
    /// `X'_t - X_t`; violation when it is below `√t / (ln t)^c`.
    Epoch { c: f64 },
    /// `|Y_t| - |X_t|`; violation when it is below `√t / (ln t)^(2c)`.
    Slowdown { c: f64 },
    /// `|X_t| - |Y_t|`, normalized by `φ(t)`; no threshold.
    Exceptional,
}

impl GapKind {
    /// Threshold column: the bound for threshold kinds, `φ(t)` otherwise.
    pub fn scale(&self, t: u64) -> f64 {
        let tf = t as f64;
        match *self {
            GapKind::Automorphism => 2.0 * tf.ln(),
            GapKind::Epoch { c } => tf.sqrt() / tf.ln().powf(c),
            GapKind::Slowdown { c } => tf.sqrt() / tf.ln().powf(2.0 * c),
            GapKind::Exceptional => phi(t) as f64,
        }
    }

    fn violates(&self, t: u64, gap: i64) -> bool {
        if t < 2 {
            return false;
        }
        let g = gap as f64;
        match self {
            GapKind::Automorphism => g > self.scale(t),
            GapKind::Epoch { .. } | GapKind::Slowdown { .. } => g < self.scale(t),
            GapKind::Exceptional => false,
        }
    }

    fn header(&self) -> &'static str {
        match self {
            GapKind::Exceptional => "phi_t",
            _ => "threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    pub t: u64,
    pub depth_x: i64,
    pub depth_y: i64,
    pub gap: i64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSummary {
    pub horizon: u64,
    pub violations: u64,
    /// Last `t ≥ 2` at which the gap condition fails.
    pub last_violation: Option<u64>,
    /// Last `t` with a negative gap.
    pub last_negative: Option<u64>,
    pub final_x: i64,
    pub final_y: i64,
    pub final_gap: i64,
    pub min_gap: i64,
    pub max_gap: i64,
    /// Gap quantiles over `t = 1..=T` at levels 0.1, 0.25, 0.5, 0.75, 0.9.
    pub quantiles: [i64; 5],
    /// Running maximum of `gap / φ(t)` (exceptional runs).
    pub max_over_phi: Option<f64>,
    /// Running maximum of `gap / √(t L(t))` with `L = ln ln`, clamped to 1.
    pub max_over_lil: Option<f64>,
    /// Same as `max_over_phi` restricted to `t ≥ √T`.
    pub late_max_over_phi: Option<f64>,
}

impl GapSummary {
    /// `∃ t₀ ≤ bound` such that the gap condition holds on `[t₀, T]`.
    pub fn settles_by(&self, bound: u64) -> bool {
        self.last_violation.is_none_or(|t| t < bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub gap: GapKind,
    pub seed: u64,
    pub replicate: u64,
    pub summary: GapSummary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<GapRow>,
}

impl CouplingReport {
    /// CSV with columns `t, depth_X, depth_Y, gap` and `phi_t` or `threshold`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Parse(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "depth_X", "depth_Y", "gap", self.gap.header()]).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.t.to_string(),
                r.depth_x.to_string(),
                r.depth_y.to_string(),
                r.gap.to_string(),
                format!("{}", r.scale),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Streaming accumulator for a [`CouplingReport`].
#[derive(Debug)]
pub struct GapTracker {
    kind: GapKind,
    horizon: u64,
    keep_rows: bool,
    rows: Vec<GapRow>,
    gaps: Vec<i64>,
    violations: u64,
    last_violation: Option<u64>,
    last_negative: Option<u64>,
    last: (i64, i64),
    max_over_phi: f64,
    max_over_lil: f64,
    late_max_over_phi: f64,
}

impl GapTracker {
    pub fn new(kind: GapKind, horizon: u64, keep_rows: bool) -> GapTracker {
        GapTracker {
            kind,
            horizon,
            keep_rows,
            rows: Vec::new(),
            gaps: Vec::with_capacity(horizon as usize),
            violations: 0,
            last_violation: None,
            last_negative: None,
            last: (0, 0),
            max_over_phi: f64::NEG_INFINITY,
            max_over_lil: f64::NEG_INFINITY,
            late_max_over_phi: f64::NEG_INFINITY,
        }
    }

    /// Records time `t` with tracked values `x` and `y`.
    pub fn push(&mut self, t: u64, x: i64, y: i64) {
        let gap = match self.kind {
            GapKind::Automorphism | GapKind::Exceptional => x - y,
            GapKind::Epoch { .. } | GapKind::Slowdown { .. } => y - x,
        };
        self.last = (x, y);
        self.gaps.push(gap);
        if gap < 0 {
            self.last_negative = Some(t);
        }
        if self.kind.violates(t, gap) {
            self.violations += 1;
            self.last_violation = Some(t);
        }
        if self.kind == GapKind::Exceptional && t >= 1 {
            let tf = t as f64;
            let ratio = gap as f64 / phi(t) as f64;
            self.max_over_phi = self.max_over_phi.max(ratio);
            if t * t >= self.horizon {
                self.late_max_over_phi = self.late_max_over_phi.max(ratio);
            }
            let l = if t < 16 { 1.0 } else { tf.ln().ln() };
            self.max_over_lil = self.max_over_lil.max(gap as f64 / (tf * l).sqrt());
        }
        if self.keep_rows {
            self.rows.push(GapRow { t, depth_x: x, depth_y: y, gap, scale: self.kind.scale(t) });
        }
    }

    pub fn finish(self, seed: u64, replicate: u64) -> CouplingReport {
        let mut sorted = self.gaps.clone();
        sorted.sort_unstable();
        let quantile = |q: f64| {
            if sorted.is_empty() {
                0
            } else {
                sorted[((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1]
            }
        };
        let exceptional = self.kind == GapKind::Exceptional;
        let finite = |v: f64| (exceptional && v.is_finite()).then_some(v);
        CouplingReport {
            gap: self.kind,
            seed,
            replicate,
            summary: GapSummary {
                horizon: self.horizon,
                violations: self.violations,
                last_violation: self.last_violation,
                last_negative: self.last_negative,
                final_x: self.last.0,
                final_y: self.last.1,
                final_gap: self.gaps.last().copied().unwrap_or(0),
                min_gap: sorted.first().copied().unwrap_or(0),
                max_gap: sorted.last().copied().unwrap_or(0),
                quantiles: [0.1, 0.25, 0.5, 0.75, 0.9].map(quantile),
                max_over_phi: finite(self.max_over_phi),
                max_over_lil: finite(self.max_over_lil),
                late_max_over_phi: finite(self.late_max_over_phi),
            },
            rows: self.rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_summary() {
        let mut tr = GapTracker::new(GapKind::Epoch { c: 4.0 }, 4, true);
        for (t, x, y) in [(1, 1, -1), (2, 2, 0), (3, 1, 3), (4, 0, 4)] {
            tr.push(t, x, y);
        }
        let r = tr.finish(7, 0);
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.summary.last_negative, Some(2));
        assert_eq!(r.summary.min_gap, -2);
        assert_eq!(r.summary.max_gap, 4);
        assert_eq!(r.summary.final_gap, 4);
        assert_eq!(r.summary.quantiles[2], -2);
        assert!(r.summary.max_over_phi.is_none());
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,depth_X,depth_Y,gap,threshold\n1,1,-1,-2,"));
    }

    #[test]
    fn exceptional_normalizations() {
        let mut tr = GapTracker::new(GapKind::Exceptional, 16, false);
        tr.push(16, 4, 0);
        let s = tr.finish(0, 0).summary;
        // φ(16) = 4
        assert_eq!(s.max_over_phi, Some(1.0));
        assert_eq!(s.late_max_over_phi, Some(1.0));
        assert!(s.max_over_lil.unwrap() > 0.9);
    }
}
