//! Distributions on the truncated tree and the operators acting on them.
//!
//! A [`Distribution`] stores sparse weights `w(v)` over a shared denominator
//! `D`, so `p(v) = w(v) / D`. With `M = u128` the representation is exact:
//! after every operation the weights and `D` are divided by their common
//! gcd, which makes the representation unique and lets equality, rearrangement
//! and majorization be decided by integer cross-multiplication. With
//! `M = f64` the denominator stays `1` and comparisons use an absolute
//! tolerance of `1e-12`.

pub mod verify;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Debug};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::PermutationSpec;
use crate::tree::{Parity, TreeParams, VertexId, VertexSet};

pub use verify::{
    enumerate_joint, mixture_identity_holds, mixture_weight, proof_chain, verify_majorization_chain, ChainConfig, ChainReport,
    ChainStep, JointTable, ProofChain, DEFAULT_ENUMERATION_BUDGET,
};

/// Absolute tolerance for float-mode comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Weight type of a [`Distribution`].
pub trait Mass: Copy + PartialOrd + Debug + Send + Sync + 'static {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn is_zero(self) -> bool;
    fn add(self, other: Self) -> Result<Self>;
    fn mul(self, other: Self) -> Result<Self>;
    fn to_f64(self) -> f64;
    /// Compares `a / da` with `b / db`.
    fn compare(a: Self, da: Self, b: Self, db: Self) -> Result<Ordering>;
    /// Divides the whole distribution by `divisor` and renormalizes the
    /// representation.
    fn rescale(weights: &mut BTreeMap<VertexId, Self>, denom: &mut Self, divisor: u64) -> Result<()>;
    /// Normalizes weights whose sum is `total`.
    fn set_total(weights: &mut BTreeMap<VertexId, Self>, denom: &mut Self, total: Self) -> Result<()>;
}

impl Mass for u128 {
    const EXACT: bool = true;

    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_u64(v: u64) -> Self {
        v as u128
    }
    fn is_zero(self) -> bool {
        self == 0
    }
    fn add(self, other: Self) -> Result<Self> {
        self.checked_add(other).ok_or(Error::ArithmeticOverflow)
    }
    fn mul(self, other: Self) -> Result<Self> {
        self.checked_mul(other).ok_or(Error::ArithmeticOverflow)
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn compare(a: Self, da: Self, b: Self, db: Self) -> Result<Ordering> {
        Ok(a.mul(db)?.cmp(&b.mul(da)?))
    }
    fn rescale(weights: &mut BTreeMap<VertexId, Self>, denom: &mut Self, divisor: u64) -> Result<()> {
        *denom = denom.mul(divisor as u128)?;
        let g = weights.values().fold(*denom, |g, &w| g.gcd(&w));
        if g > 1 {
            *denom /= g;
            weights.values_mut().for_each(|w| *w /= g);
        }
        Ok(())
    }
    fn set_total(weights: &mut BTreeMap<VertexId, Self>, denom: &mut Self, total: Self) -> Result<()> {
        *denom = total;
        Self::rescale(weights, denom, 1)
    }
}

impl Mass for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn is_zero(self) -> bool {
        self == 0.0
    }
    fn add(self, other: Self) -> Result<Self> {
        Ok(self + other)
    }
    fn mul(self, other: Self) -> Result<Self> {
        Ok(self * other)
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn compare(a: Self, da: Self, b: Self, db: Self) -> Result<Ordering> {
        let diff = a / da - b / db;
        Ok(if diff.abs() <= FLOAT_TOLERANCE {
            Ordering::Equal
        } else if diff < 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        })
    }
    fn rescale(weights: &mut BTreeMap<VertexId, Self>, _denom: &mut Self, divisor: u64) -> Result<()> {
        let divisor = divisor as f64;
        weights.values_mut().for_each(|w| *w /= divisor);
        Ok(())
    }
    fn set_total(weights: &mut BTreeMap<VertexId, Self>, denom: &mut Self, total: Self) -> Result<()> {
        *denom = 1.0;
        weights.values_mut().for_each(|w| *w /= total);
        Ok(())
    }
}

/// A probability `num / den` in the arithmetic of `M`.
#[derive(Debug, Clone, Copy)]
pub struct Prob<M> {
    pub num: M,
    pub den: M,
}

impl<M: Mass> Prob<M> {
    pub fn to_f64(self) -> f64 {
        self.num.to_f64() / self.den.to_f64()
    }

    pub fn compare(self, other: Prob<M>) -> Result<Ordering> {
        M::compare(self.num, self.den, other.num, other.den)
    }
}

impl Prob<u128> {
    pub fn ratio(self) -> Ratio<u128> {
        Ratio::new(self.num, self.den)
    }
}

/// Laziness `γ`, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Laziness(Ratio<u64>);

impl Laziness {
    pub fn new(num: u64, den: u64) -> Result<Laziness> {
        if den == 0 || num >= den {
            return Err(Error::LazinessOutOfRange(format!("{num}/{den}")));
        }
        Ok(Laziness(Ratio::new(num, den)))
    }

    /// `1/(d+1)`: the walk stays with the same probability as each move.
    pub fn uniform(d: u32) -> Laziness {
        Laziness(Ratio::new(1, d as u64 + 1))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// Requires `γ ∈ [1/(d+1), 1)`.
    pub fn check_for(self, d: u32) -> Result<()> {
        if self.0 < Ratio::new(1, d as u64 + 1) || self.0 >= Ratio::from_integer(1) {
            return Err(Error::LazinessOutOfRange(format!("{} for d = {d}", self.0)));
        }
        Ok(())
    }
}

impl FromStr for Laziness {
    type Err = Error;

    /// Accepts `a/b` or an exact decimal such as `0.25`.
    fn from_str(s: &str) -> Result<Laziness> {
        let r = parse_ratio(s)?;
        Laziness::new(*r.numer(), *r.denom())
    }
}

/// Parses `a/b` or an exact decimal such as `0.6667` into a fraction.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::Parse(format!("fraction `{s}`"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if b == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(a, b));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}

impl fmt::Display for Laziness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl TryFrom<String> for Laziness {
    type Error = Error;
    fn try_from(s: String) -> Result<Laziness> {
        s.parse()
    }
}

impl From<Laziness> for String {
    fn from(g: Laziness) -> String {
        g.to_string()
    }
}

/// Sparse distribution `p(v) = weights[v] / denom` on a truncated tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<M> {
    tree: TreeParams,
    weights: BTreeMap<VertexId, M>,
    denom: M,
}

pub type ExactDistribution = Distribution<u128>;
pub type FloatDistribution = Distribution<f64>;

impl<M: Mass> Distribution<M> {
    pub fn point(tree: TreeParams, v: VertexId) -> Result<Distribution<M>> {
        tree.depth(v)?;
        Ok(Distribution { tree, weights: BTreeMap::from([(v, M::one())]), denom: M::one() })
    }

    /// Weights are taken relative to their sum.
    pub fn from_weights(tree: TreeParams, weights: impl IntoIterator<Item = (VertexId, M)>) -> Result<Distribution<M>> {
        let mut map = BTreeMap::new();
        let mut total = M::zero();
        for (v, w) in weights {
            tree.depth(v)?;
            // negated so that NaN weights are rejected too
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(w >= M::zero()) {
                return Err(Error::Parse(format!("negative weight at {v}")));
            }
            total = total.add(w)?;
            if !w.is_zero() {
                let slot = map.entry(v).or_insert(M::zero());
                *slot = slot.add(w)?;
            }
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(total > M::zero()) {
            return Err(Error::Parse("weights sum to zero".into()));
        }
        let mut denom = M::one();
        M::set_total(&mut map, &mut denom, total)?;
        Ok(Distribution { tree, weights: map, denom })
    }

    pub fn tree(&self) -> &TreeParams {
        &self.tree
    }

    /// Same distribution viewed in a tree with another depth cap.
    pub fn with_tree(&self, tree: TreeParams) -> Result<Distribution<M>> {
        if tree.degree() != self.tree.degree() {
            return Err(Error::InvalidParams("degree mismatch".into()));
        }
        for &v in self.weights.keys() {
            tree.depth(v)?;
        }
        Ok(Distribution { tree, weights: self.weights.clone(), denom: self.denom })
    }

    pub fn denom(&self) -> M {
        self.denom
    }

    /// Atoms with positive mass in index order, as numerators over [`Self::denom`].
    pub fn atoms(&self) -> impl Iterator<Item = (VertexId, M)> + '_ {
        self.weights.iter().map(|(&v, &w)| (v, w))
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn support(&self) -> VertexSet {
        self.weights.keys().copied().collect()
    }

    pub fn max_depth(&self) -> u32 {
        self.weights.keys().next_back().map_or(0, |&v| self.tree.depth(v).expect("support in range"))
    }

    pub fn mass_of(&self, v: VertexId) -> Prob<M> {
        Prob { num: self.weights.get(&v).copied().unwrap_or(M::zero()), den: self.denom }
    }

    pub fn mass_of_set(&self, set: &VertexSet) -> Result<Prob<M>> {
        let num = set.iter().filter_map(|v| self.weights.get(v)).try_fold(M::zero(), |acc, &w| acc.add(w))?;
        Ok(Prob { num, den: self.denom })
    }

    pub fn total(&self) -> Result<Prob<M>> {
        let num = self.weights.values().try_fold(M::zero(), |acc, &w| acc.add(w))?;
        Ok(Prob { num, den: self.denom })
    }

    /// Total is `1` exactly (exact mode) or within tolerance (float mode).
    pub fn is_normalized(&self) -> Result<bool> {
        let t = self.total()?;
        Ok(M::compare(t.num, t.den, M::one(), M::one())? == Ordering::Equal)
    }

    /// Weights in decreasing order; ties broken by vertex index.
    pub fn sorted_weights(&self) -> Vec<M> {
        let mut atoms: Vec<(VertexId, M)> = self.atoms().collect();
        atoms.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
        atoms.into_iter().map(|(_, w)| w).collect()
    }

    /// Prefix sums `p*(0), p*(1), ..., p*(|support|)` as numerators.
    pub fn rearrangement(&self) -> Result<Vec<M>> {
        let mut out = Vec::with_capacity(self.weights.len() + 1);
        let mut acc = M::zero();
        out.push(acc);
        for w in self.sorted_weights() {
            acc = acc.add(w)?;
            out.push(acc);
        }
        Ok(out)
    }

    /// `p*(s)`: the total mass of the `s` largest atoms.
    pub fn p_star(&self, s: usize) -> Result<Prob<M>> {
        let prefix = self.rearrangement()?;
        Ok(Prob { num: prefix[s.min(prefix.len() - 1)], den: self.denom })
    }

    /// `p*(j) ≥ q*(j)` for every `j`.
    pub fn majorizes(&self, q: &Distribution<M>) -> Result<bool> {
        let (ps, qs) = (self.rearrangement()?, q.rearrangement()?);
        let n = ps.len().max(qs.len());
        for j in 1..n {
            let a = ps[j.min(ps.len() - 1)];
            let b = qs[j.min(qs.len() - 1)];
            if M::compare(a, self.denom, b, q.denom)? == Ordering::Less {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same multiset of atom masses.
    pub fn same_rearrangement(&self, q: &Distribution<M>) -> Result<bool> {
        let (ps, qs) = (self.sorted_weights(), q.sorted_weights());
        if ps.len() != qs.len() {
            return Ok(false);
        }
        for (&a, &b) in ps.iter().zip(&qs) {
            if M::compare(a, self.denom, b, q.denom)? != Ordering::Equal {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `p(v_i) ≥ p(v_{i+1})` along the canonical order.
    pub fn is_greedily_arranged(&self) -> bool {
        let mut prev: Option<M> = None;
        for (i, (&v, &w)) in self.weights.iter().enumerate() {
            if v.0 != i as u64 || prev.is_some_and(|p| w > p) {
                return false;
            }
            prev = Some(w);
        }
        true
    }

    /// Supported on one parity class and nonincreasing along it.
    pub fn is_half_greedily_arranged(&self) -> bool {
        let Some(&first) = self.weights.keys().next() else {
            return true;
        };
        let parity = Parity::of_depth(self.tree.depth(first).expect("support in range"));
        let mut prev: Option<M> = None;
        for (i, (&v, &w)) in self.weights.iter().enumerate() {
            let depth = self.tree.depth(v).expect("support in range");
            if Parity::of_depth(depth) != parity || self.tree.parity_rank(v).expect("support in range") != i as u64 {
                return false;
            }
            if prev.is_some_and(|p| w > p) {
                return false;
            }
            prev = Some(w);
        }
        true
    }

    fn step(&self, c_self: u64, c_neighbor: u64, divisor: u64) -> Result<Distribution<M>> {
        let (cs, cn) = (M::from_u64(c_self), M::from_u64(c_neighbor));
        let mut out: BTreeMap<VertexId, M> = BTreeMap::new();
        let mut neighbors = Vec::with_capacity(self.tree.degree() as usize);
        for (&v, &w) in &self.weights {
            neighbors.clear();
            self.tree.open_neighbors_into(v, &mut neighbors)?;
            if c_self > 0 {
                let slot = out.entry(v).or_insert(M::zero());
                *slot = slot.add(w.mul(cs)?)?;
            }
            let share = w.mul(cn)?;
            for &u in &neighbors {
                let slot = out.entry(u).or_insert(M::zero());
                *slot = slot.add(share)?;
            }
        }
        out.retain(|_, w| !w.is_zero());
        let mut denom = self.denom;
        M::rescale(&mut out, &mut denom, divisor)?;
        Ok(Distribution { tree: self.tree, weights: out, denom })
    }

    /// `p'(v) = γ p(v) + (1-γ)/d Σ_{u ∈ N'(v)} p(u)`.
    pub fn lazy_step(&self, gamma: Laziness) -> Result<Distribution<M>> {
        let d = self.tree.degree() as u64;
        gamma.check_for(d as u32)?;
        let (a, b) = (*gamma.ratio().numer(), *gamma.ratio().denom());
        let overflow = || Error::ArithmeticOverflow;
        self.step(
            a.checked_mul(d).ok_or_else(overflow)?,
            b - a,
            b.checked_mul(d).ok_or_else(overflow)?,
        )
    }

    /// `p'(v) = (1/d) Σ_{u ∈ N'(v)} p(u)`.
    pub fn simple_step(&self) -> Result<Distribution<M>> {
        self.step(0, 1, self.tree.degree() as u64)
    }

    /// `p'(π(v)) = p(v)`.
    pub fn permute(&self, pi: &PermutationSpec) -> Result<Distribution<M>> {
        if pi.is_identity() {
            return Ok(self.clone());
        }
        let mut out = BTreeMap::new();
        let mut source: HashMap<VertexId, VertexId> = HashMap::with_capacity(self.weights.len());
        for (&v, &w) in &self.weights {
            let image = pi.apply(&self.tree, v)?;
            if let Some(first) = source.insert(image, v) {
                return Err(Error::NotInjective { first, second: v, image });
            }
            out.insert(image, w);
        }
        Ok(Distribution { tree: self.tree, weights: out, denom: self.denom })
    }

    /// `a·self + b·other`; the weights must sum to `1`.
    pub fn combine(&self, a: Ratio<u64>, other: &Distribution<M>, b: Ratio<u64>) -> Result<Distribution<M>> {
        if self.tree != other.tree {
            return Err(Error::InvalidParams("distributions live on different trees".into()));
        }
        let m = |x: u64| M::from_u64(x);
        // a = x/y, b = u/w; common denominator D1 D2 y w.
        let (x, y, u, w) = (*a.numer(), *a.denom(), *b.numer(), *b.denom());
        let ca = m(x).mul(m(w))?.mul(other.denom)?;
        let cb = m(u).mul(m(y))?.mul(self.denom)?;
        let mut out: BTreeMap<VertexId, M> = BTreeMap::new();
        for (&v, &p) in &self.weights {
            let slot = out.entry(v).or_insert(M::zero());
            *slot = slot.add(p.mul(ca)?)?;
        }
        for (&v, &q) in &other.weights {
            let slot = out.entry(v).or_insert(M::zero());
            *slot = slot.add(q.mul(cb)?)?;
        }
        out.retain(|_, w| !w.is_zero());
        let mut denom = if M::EXACT { self.denom.mul(other.denom)? } else { M::one() };
        let divisor = y.checked_mul(w).ok_or(Error::ArithmeticOverflow)?;
        M::rescale(&mut out, &mut denom, divisor)?;
        let dist = Distribution { tree: self.tree, weights: out, denom };
        if !dist.is_normalized()? {
            return Err(Error::Parse("combination weights do not sum to 1".into()));
        }
        Ok(dist)
    }

    /// Numerators of `Pr[depth = n]` for `n = 0..=max_depth`.
    pub fn depth_masses(&self) -> Result<Vec<M>> {
        let mut out = vec![M::zero(); self.max_depth() as usize + 1];
        for (&v, &w) in &self.weights {
            let n = self.tree.depth(v)? as usize;
            out[n] = out[n].add(w)?;
        }
        Ok(out)
    }

    /// Numerators of `Pr[depth ≥ n]` for `n = 0..=max_depth + 1`.
    pub fn depth_tail(&self) -> Result<Vec<M>> {
        let masses = self.depth_masses()?;
        let mut tail = vec![M::zero(); masses.len() + 1];
        for n in (0..masses.len()).rev() {
            tail[n] = tail[n + 1].add(masses[n])?;
        }
        Ok(tail)
    }

    /// `-Σ p log₂ p`, summed over atoms in decreasing order so that equal
    /// rearrangements give bit-identical values.
    pub fn shannon_entropy(&self) -> f64 {
        let den = self.denom.to_f64();
        self.sorted_weights()
            .into_iter()
            .map(|w| w.to_f64() / den)
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
struct ExactAtom(u64, u128, u128);

#[derive(Serialize, Deserialize)]
struct FloatAtom(u64, f64);

impl Distribution<u128> {
    /// Exact weights as reduced fractions `[[index, num, den], ...]`.
    pub fn to_json(&self) -> String {
        let atoms: Vec<ExactAtom> = self
            .atoms()
            .map(|(v, w)| {
                let g = w.gcd(&self.denom);
                ExactAtom(v.0, w / g, self.denom / g)
            })
            .collect();
        serde_json::to_string(&atoms).expect("atoms serialize")
    }

    pub fn from_json(tree: TreeParams, text: &str) -> Result<Distribution<u128>> {
        let atoms: Vec<ExactAtom> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if atoms.iter().any(|a| a.2 == 0) {
            return Err(Error::Parse("zero denominator".into()));
        }
        let lcm = atoms.iter().try_fold(1u128, |l, a| {
            let g = l.gcd(&a.2);
            (l / g).checked_mul(a.2).ok_or(Error::ArithmeticOverflow)
        })?;
        let weights = atoms
            .iter()
            .map(|a| Ok((VertexId(a.0), a.1.mul(lcm / a.2)?)))
            .collect::<Result<Vec<_>>>()?;
        let total = weights.iter().try_fold(0u128, |acc, (_, w)| acc.add(*w))?;
        if total != lcm {
            return Err(Error::Parse("weights do not sum to 1".into()));
        }
        Distribution::from_weights(tree, weights)
    }
}

impl Distribution<f64> {
    /// `[[index, weight], ...]`.
    pub fn to_json(&self) -> String {
        let atoms: Vec<FloatAtom> = self.atoms().map(|(v, w)| FloatAtom(v.0, w)).collect();
        serde_json::to_string(&atoms).expect("atoms serialize")
    }

    pub fn from_json(tree: TreeParams, text: &str) -> Result<Distribution<f64>> {
        let atoms: Vec<FloatAtom> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > FLOAT_TOLERANCE {
            return Err(Error::Parse(format!("weights sum to {total}")));
        }
        Distribution::from_weights(tree, atoms.into_iter().map(|a| (VertexId(a.0), a.1)))
    }

    /// Float copy of an exact distribution.
    pub fn from_exact(p: &Distribution<u128>) -> Distribution<f64> {
        let den = p.denom as f64;
        Distribution {
            tree: p.tree,
            weights: p.weights.iter().map(|(&v, &w)| (v, w as f64 / den)).collect(),
            denom: 1.0,
        }
    }
}

/// `Pr_q[depth + shift ≥ n] ≥ Pr_p[depth ≥ n]` for every `n`.
pub fn depth_cdf_dominates<M: Mass>(p: &Distribution<M>, q: &Distribution<M>, shift: u32) -> Result<bool> {
    let (tp, tq) = (p.depth_tail()?, q.depth_tail()?);
    let one_q = q.denom;
    for (n, &a) in tp.iter().enumerate() {
        let b = match n.checked_sub(shift as usize) {
            None => one_q,
            Some(k) => tq.get(k).copied().unwrap_or(M::zero()),
        };
        if M::compare(b, q.denom, a, p.denom)? == Ordering::Less {
            return Ok(false);
        }
    }
    Ok(true)
}
