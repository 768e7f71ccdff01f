//! Translation schedule on `Z` whose permuted walk returns close to the
//! origin at infinitely many times.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PermutationSpec, Schedule};
use crate::error::{Error, Result};

/// `⌊((4/3) t L(t))^{1/2}⌋` with `L(t) = ln ln t`, clamped to `1` for `t < 16`.
pub fn phi(t: u64) -> u64 {
    let tf = t as f64;
    let l = if t < 16 { 1.0 } else { tf.ln().ln() };
    ((4.0 / 3.0) * tf * l).sqrt().floor() as u64
}

/// Block length `f`: positive, nondecreasing, and slower than `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GrowthFn {
    /// `⌈log₂(t + 2)⌉`
    CeilLog2,
    Constant { value: u64 },
    /// `⌈t^{1/k}⌉`
    Root { k: u32 },
}

impl GrowthFn {
    pub fn eval(&self, t: u64) -> u64 {
        match *self {
            GrowthFn::CeilLog2 => 64 - (t + 1).leading_zeros() as u64,
            GrowthFn::Constant { value } => value,
            GrowthFn::Root { k } => {
                let mut r = (t as f64).powf(1.0 / k as f64).ceil().max(1.0) as u64;
                let pow = |r: u64| (0..k).try_fold(1u64, |acc, _| acc.checked_mul(r));
                while r > 1 && pow(r - 1).is_some_and(|p| p >= t) {
                    r -= 1;
                }
                while pow(r).is_some_and(|p| p < t) {
                    r += 1;
                }
                r
            }
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            GrowthFn::Constant { value: 0 } => Err(Error::InvalidParams("constant block length must be positive".into())),
            GrowthFn::Root { k: 0 } => Err(Error::InvalidParams("root order must be positive".into())),
            _ => Ok(()),
        }
    }
}

impl FromStr for GrowthFn {
    type Err = Error;

    /// `log2`, `const:K` or `root:K`.
    fn from_str(s: &str) -> Result<GrowthFn> {
        let bad = || Error::Parse(format!("unknown block length `{s}`"));
        let f = match s.split_once(':') {
            None if s == "log2" => GrowthFn::CeilLog2,
            Some(("const", v)) => GrowthFn::Constant { value: v.parse().map_err(|_| bad())? },
            Some(("root", v)) => GrowthFn::Root { k: v.parse().map_err(|_| bad())? },
            _ => return Err(bad()),
        };
        f.check()?;
        Ok(f)
    }
}

impl fmt::Display for GrowthFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFn::CeilLog2 => write!(f, "log2"),
            GrowthFn::Constant { value } => write!(f, "const:{value}"),
            GrowthFn::Root { k } => write!(f, "root:{k}"),
        }
    }
}

/// One block `(b_j, b_j + f(b_j)]` of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub start: u64,
    pub len: u64,
    pub phi: u64,
}

/// Offsets `ℓ_t` for `t ≤ T`. Within block `j` they sweep
/// `[-2φ(b_j), 2φ(b_j))` in `f(b_j)` equal steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionalSchedule {
    pub growth: GrowthFn,
    pub horizon: u64,
    pub blocks: Vec<Block>,
    ell: Vec<i64>,
}

impl ExceptionalSchedule {
    pub fn build(horizon: u64, growth: GrowthFn) -> Result<ExceptionalSchedule> {
        growth.check()?;
        let mut ell = vec![0i64; horizon as usize + 1];
        let mut blocks = Vec::new();
        let mut b = 1u64;
        while b <= horizon {
            let len = growth.eval(b);
            let phi_b = phi(b) as i64;
            let f = len as i64;
            for i in 0..len {
                let t = b + i;
                if t > horizon {
                    break;
                }
                ell[t as usize] = (phi_b * (4 * i as i64 - 2 * f)).div_euclid(f);
            }
            blocks.push(Block { start: b, len, phi: phi_b as u64 });
            b += len;
        }
        Ok(ExceptionalSchedule { growth, horizon, blocks, ell })
    }

    /// `ℓ_t`, with `ℓ_0 = 0`.
    pub fn ell(&self, t: u64) -> i64 {
        self.ell[t as usize]
    }

    pub fn ells(&self) -> &[i64] {
        &self.ell
    }

    /// `π_t`: translation by `ℓ_{t-1} - ℓ_t`, so that `Π_t(x) = x - ℓ_t`.
    pub fn translation(&self, t: u64) -> PermutationSpec {
        PermutationSpec::Translation { offset: self.ell(t - 1) - self.ell(t) }
    }

    pub fn to_schedule(&self) -> Schedule {
        Schedule {
            d: 2,
            depth: 0,
            permutations: (1..=self.horizon).map(|t| self.translation(t)).collect(),
        }
    }

    /// Every `ℓ_{b_j + i}` lies in `[-2φ(b_j), 2φ(b_j)]`.
    pub fn offsets_within_bounds(&self) -> bool {
        self.blocks.iter().all(|blk| {
            let bound = 2 * blk.phi as i64;
            (blk.start..(blk.start + blk.len).min(self.horizon + 1)).all(|t| self.ell(t).abs() <= bound)
        })
    }
}
