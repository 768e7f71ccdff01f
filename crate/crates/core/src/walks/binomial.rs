//! Coupling of two `Binomial(n, p)` variables with `B' = B + m` on a window
//! just below the mean.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};
use crate::partition::Scalar;

/// Probability weights: exact rationals or `f64`.
pub trait Weight: Scalar + Send + Sync {
    fn one() -> Self;
    fn ratio(num: u64, den: u64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Weight for f64 {
    fn one() -> Self {
        1.0
    }
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Weight for BigRational {
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Exact weights for rational-mode couplings.
pub type ExactWeight = BigRational;

fn positive<W: Weight>(w: &W) -> bool {
    *w > W::zero()
}

/// `max(1, ⌊√n / (ln n)²⌋)`, and `1` for `n < 2`.
pub fn default_shift(n: u64) -> u64 {
    if n < 2 {
        return 1;
    }
    let nf = n as f64;
    ((nf.sqrt() / nf.ln().powi(2)).floor() as u64).max(1)
}

/// Joint law of `(B, B')`:
///
/// * `B' = B` off `I = [pn - √n, pn]`;
/// * `B' = B + m` on `J = [pn - √n, pn - m]`;
/// * on `I \ J`, `B'` is the monotone (quantile) transport of `B` onto the
///   mass of `I` that the shift left uncovered.
#[derive(Debug, Clone)]
pub struct BinomialCoupling<W> {
    pub n: u64,
    pub p: Ratio<u64>,
    pub m: u64,
    /// Integer points of `I`, inclusive.
    pub interval_i: Option<(u64, u64)>,
    /// Integer points of `J`, inclusive.
    pub interval_j: Option<(u64, u64)>,
    pmf: Vec<W>,
    /// `(b, b', mass)` for `b ∈ I \ J`, ordered by `b` then `b'`.
    transport: Vec<(u64, u64, W)>,
    cdf: Vec<f64>,
    /// Per source in `I \ J`: range into `transport` and cumulative
    /// conditional probabilities.
    rows: Vec<(usize, usize)>,
    row_cdf: Vec<f64>,
}

impl<W: Weight> BinomialCoupling<W> {
    pub fn new(n: u64, p: Ratio<u64>, m: Option<u64>) -> Result<BinomialCoupling<W>> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        if *p.numer() == 0 || p >= Ratio::from_integer(1) {
            return Err(Error::ProbabilityOutOfRange(p.to_string()));
        }
        let m = m.unwrap_or_else(|| default_shift(n));
        if m == 0 {
            return Err(Error::InvalidParams("shift must be positive".into()));
        }
        let pmf = binomial_pmf::<W>(n, p);
        let interval_i = window(n, p)?;
        let interval_j = interval_i.and_then(|(lo, hi)| hi.checked_sub(m).filter(|&top| top >= lo).map(|top| (lo, top)));

        let mut transport = Vec::new();
        if let Some((lo, hi)) = interval_i {
            let in_j = |b: u64| interval_j.is_some_and(|(a, z)| a <= b && b <= z);
            let sources: Vec<u64> = (lo..=hi).filter(|&b| !in_j(b)).collect();
            let mut residual = Vec::with_capacity((hi - lo + 1) as usize);
            for j in lo..=hi {
                let mut r = pmf[j as usize].clone();
                if j >= m && in_j(j - m) {
                    r = r - pmf[(j - m) as usize].clone();
                }
                if r < W::zero() {
                    return Err(Error::InfeasibleCompletion(j as i64));
                }
                residual.push((j, r));
            }
            transport = monotone_transport(&sources, &pmf, &residual);
        }

        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for w in &pmf {
            acc += w.to_f64();
            cdf.push(acc);
        }
        let mut rows = Vec::new();
        let mut row_cdf = Vec::with_capacity(transport.len());
        let mut start = 0;
        while start < transport.len() {
            let b = transport[start].0;
            let end = start + transport[start..].iter().take_while(|r| r.0 == b).count();
            let total: f64 = transport[start..end].iter().map(|r| r.2.to_f64()).sum();
            let mut acc = 0.0;
            for r in &transport[start..end] {
                acc += r.2.to_f64() / total;
                row_cdf.push(acc);
            }
            rows.push((start, end));
            start = end;
        }
        Ok(BinomialCoupling { n, p, m, interval_i, interval_j, pmf, transport, cdf, rows, row_cdf })
    }

    pub fn pmf(&self) -> &[W] {
        &self.pmf
    }

    fn in_i(&self, b: u64) -> bool {
        self.interval_i.is_some_and(|(lo, hi)| lo <= b && b <= hi)
    }

    fn in_j(&self, b: u64) -> bool {
        self.interval_j.is_some_and(|(lo, hi)| lo <= b && b <= hi)
    }

    /// Atoms `((b, b'), mass)` of the joint law.
    pub fn joint(&self) -> Vec<((u64, u64), W)> {
        let mut out = Vec::with_capacity(self.pmf.len() + self.transport.len());
        for (b, w) in self.pmf.iter().enumerate() {
            let b = b as u64;
            if !self.in_i(b) {
                out.push(((b, b), w.clone()));
            } else if self.in_j(b) {
                out.push(((b, b + self.m), w.clone()));
            }
        }
        out.extend(self.transport.iter().map(|(b, c, w)| ((*b, *c), w.clone())));
        out
    }

    /// Marginal laws of `B` and `B'` recomputed from the joint atoms.
    pub fn marginals(&self) -> (Vec<W>, Vec<W>) {
        let size = self.n as usize + 1;
        let (mut first, mut second) = (vec![W::zero(); size], vec![W::zero(); size]);
        for ((b, c), w) in self.joint() {
            first[b as usize] = first[b as usize].clone() + w.clone();
            second[c as usize] = second[c as usize].clone() + w;
        }
        (first, second)
    }

    fn joint_mass(&self, pred: impl Fn(u64, u64) -> bool) -> W {
        self.joint().into_iter().filter(|((b, c), _)| pred(*b, *c)).fold(W::zero(), |acc, (_, w)| acc + w)
    }

    /// `Pr(B' < B)`.
    pub fn prob_backward(&self) -> W {
        self.joint_mass(|b, c| c < b)
    }

    /// `Pr(B' - B ≥ m)`.
    pub fn prob_advanced(&self) -> W {
        let m = self.m;
        self.joint_mass(|b, c| c >= b + m)
    }

    /// `Pr(B ∈ J)`.
    pub fn prob_in_j(&self) -> W {
        match self.interval_j {
            None => W::zero(),
            Some((lo, hi)) => self.pmf[lo as usize..=hi as usize].iter().fold(W::zero(), |acc, w| acc + w.clone()),
        }
    }

    /// `Pr(B ∈ I \ J)`.
    pub fn prob_transported(&self) -> W {
        self.transport.iter().fold(W::zero(), |acc, r| acc + r.2.clone())
    }

    /// Draws `(B, B')`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (u64, u64) {
        let u: f64 = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let b = self.cdf.partition_point(|&c| c <= u).min(self.n as usize) as u64;
        if !self.in_i(b) {
            return (b, b);
        }
        if self.in_j(b) {
            return (b, b + self.m);
        }
        let Some(&(start, end)) = self.rows.iter().find(|(s, _)| self.transport[*s].0 == b) else {
            return (b, b);
        };
        let u: f64 = rng.random::<f64>() * self.row_cdf[end - 1];
        let k = self.row_cdf[start..end].partition_point(|&c| c <= u).min(end - start - 1);
        (b, self.transport[start + k].1)
    }
}

/// Exact (for rationals) binomial pmf built from the mode by ratio recurrences.
fn binomial_pmf<W: Weight>(n: u64, p: Ratio<u64>) -> Vec<W> {
    let (a, b) = (*p.numer(), *p.denom());
    let mode = ((n + 1) as u128 * a as u128 / b as u128).min(n as u128) as usize;
    let odds_up = W::ratio(a, b - a);
    let odds_down = W::ratio(b - a, a);
    let mut w = vec![W::zero(); n as usize + 1];
    w[mode] = <W as Weight>::one();
    for k in mode..n as usize {
        w[k + 1] = w[k].clone() * W::ratio(n - k as u64, k as u64 + 1) * odds_up.clone();
    }
    for k in (1..=mode).rev() {
        w[k - 1] = w[k].clone() * W::ratio(k as u64, n - k as u64 + 1) * odds_down.clone();
    }
    let total = w.iter().fold(W::zero(), |acc, x| acc + x.clone());
    w.into_iter().map(|x| x / total.clone()).collect()
}

/// Integer points of `[pn - √n, pn]`, decided exactly.
fn window(n: u64, p: Ratio<u64>) -> Result<Option<(u64, u64)>> {
    let (a, b) = (*p.numer() as i128, *p.denom() as i128);
    let an = a.checked_mul(n as i128).ok_or(Error::ArithmeticOverflow)?;
    let hi = an / b;
    // i ≥ pn - √n  ⇔  an - ib ≤ 0  or  (an - ib)² ≤ b² n
    let ok = |i: i128| -> Result<bool> {
        let gap = an - i * b;
        if gap <= 0 {
            return Ok(true);
        }
        let lhs = gap.checked_mul(gap).ok_or(Error::ArithmeticOverflow)?;
        let rhs = (b * b).checked_mul(n as i128).ok_or(Error::ArithmeticOverflow)?;
        Ok(lhs <= rhs)
    };
    let approx = (a as f64 / b as f64 * n as f64 - (n as f64).sqrt()).floor() as i128;
    let mut lo = (approx - 2).max(0);
    while lo > 0 && ok(lo - 1)? {
        lo -= 1;
    }
    while !ok(lo)? {
        lo += 1;
    }
    Ok((lo <= hi).then_some((lo as u64, hi as u64)))
}

/// North-west corner coupling of source masses `pmf[s]` (ascending `s`) with
/// target masses `residual` (ascending).
fn monotone_transport<W: Weight>(sources: &[u64], pmf: &[W], residual: &[(u64, W)]) -> Vec<(u64, u64, W)> {
    let mut out = Vec::new();
    let (mut si, mut ti) = (0, 0);
    let mut rs = sources.first().map(|&s| pmf[s as usize].clone()).unwrap_or_else(W::zero);
    let mut rt = residual.first().map(|r| r.1.clone()).unwrap_or_else(W::zero);
    while si < sources.len() && ti < residual.len() {
        let take = if rs < rt { rs.clone() } else { rt.clone() };
        if positive(&take) {
            out.push((sources[si], residual[ti].0, take.clone()));
        }
        rs = rs - take.clone();
        rt = rt - take;
        if !positive(&rs) {
            si += 1;
            if si < sources.len() {
                rs = pmf[sources[si] as usize].clone();
            }
        }
        if !positive(&rt) {
            ti += 1;
            if ti < residual.len() {
                rt = residual[ti].1.clone();
            }
        }
    }
    out
}
