//! Fixed-length partitions, the dominance order, and the Karamata
//! (Hardy–Littlewood–Pólya) inequality for concave functions.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonincreasing sequence of nonnegative integers. Trailing zeros are kept so
/// that profiles of a given degree always have the same length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<u64>);

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Partition> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parse(format!("parts {parts:?} are not nonincreasing")));
        }
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|μ| = Σ μ_i`.
    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    /// `self ≻ other`: equal sizes and every prefix sum of `self` is at least
    /// the matching prefix sum of `other`.
    pub fn dominates(&self, other: &Partition) -> Result<bool> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        if self.size() != other.size() {
            return Ok(false);
        }
        let (mut mine, mut theirs) = (0u64, 0u64);
        for (a, b) in self.0.iter().zip(&other.0) {
            mine += a;
            theirs += b;
            if mine < theirs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Field-like scalar usable for piecewise-linear evaluation.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn zero() -> Self;
    fn from_u64(v: u64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_u64(v: u64) -> Self {
        v as f64
    }
}

impl Scalar for Ratio<i128> {
    fn zero() -> Self {
        Ratio::from_integer(0)
    }
    fn from_u64(v: u64) -> Self {
        Ratio::from_integer(v as i128)
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// Concave piecewise-linear function through the given breakpoints.
#[derive(Debug, Clone)]
pub struct ConcavePiecewise<T> {
    points: Vec<(T, T)>,
}

impl<T: Scalar> ConcavePiecewise<T> {
    /// Breakpoints must have strictly increasing abscissae and nonincreasing
    /// successive slopes.
    pub fn new(points: Vec<(T, T)>) -> Result<ConcavePiecewise<T>> {
        if points.is_empty() {
            return Err(Error::Parse("no breakpoints".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Parse("breakpoints must be strictly increasing".into()));
        }
        for w in points.windows(3) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            let (x2, y2) = &w[2];
            // slope01 >= slope12, with positive run lengths cross-multiplied
            let lhs = (y1.clone() - y0.clone()) * (x2.clone() - x1.clone());
            let rhs = (y2.clone() - y1.clone()) * (x1.clone() - x0.clone());
            if lhs < rhs {
                return Err(Error::NotConcave);
            }
        }
        Ok(ConcavePiecewise { points })
    }

    /// Interpolates `(j, values[j])` for `j = 0, 1, ...`.
    pub fn from_integer_samples(values: Vec<T>) -> Result<ConcavePiecewise<T>> {
        let points = values.into_iter().enumerate().map(|(j, y)| (T::from_u64(j as u64), y)).collect();
        ConcavePiecewise::new(points)
    }

    pub fn eval(&self, x: &T) -> Result<T> {
        let first = &self.points[0];
        let last = &self.points[self.points.len() - 1];
        if *x < first.0 || *x > last.0 {
            return Err(Error::OutsideDomain(format!("{x:?}")));
        }
        if self.points.len() == 1 {
            return Ok(first.1.clone());
        }
        let seg = self.points.windows(2).find(|w| *x <= w[1].0).expect("x within domain");
        let (x0, y0) = &seg[0];
        let (x1, y1) = &seg[1];
        let t = (x.clone() - x0.clone()) / (x1.clone() - x0.clone());
        Ok(y0.clone() + (y1.clone() - y0.clone()) * t)
    }
}

/// Checks `Σ f(μ_i) ≤ Σ f(λ_i)` for concave `f` and `μ ≻ λ`.
pub fn karamata_check<T: Scalar>(f: &ConcavePiecewise<T>, mu: &Partition, lambda: &Partition) -> Result<bool> {
    if !mu.dominates(lambda)? {
        return Err(Error::NotDominated);
    }
    let sum = |p: &Partition| -> Result<T> {
        p.parts().iter().try_fold(T::zero(), |acc, &x| Ok(acc + f.eval(&T::from_u64(x))?))
    };
    Ok(sum(mu)? <= sum(lambda)?)
}
