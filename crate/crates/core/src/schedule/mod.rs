//! Permutation schedules `(π_t)` and their action on vertices and paths.

mod exceptional;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{path_index, TreeParams, TreePath, VertexId};

pub use exceptional::{phi, ExceptionalSchedule, GrowthFn};

/// One permutation of the vertex set.
///
/// `Explicit` and `Transposition` act as the identity outside the indices
/// they mention. `EdgeShift` is the reflection across the edge between the
/// root and its child `target` (`1..=d`); children are matched in sorted slot
/// order. `Translation` is only defined on `T_2 ≅ Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PermutationSpec {
    Identity,
    Explicit { map: Vec<u64> },
    Transposition { u: u64, w: u64 },
    EdgeShift { target: u64 },
    Translation { offset: i64 },
}

static IDENTITY: PermutationSpec = PermutationSpec::Identity;

fn tree_covering(d: u32, index: u64) -> Result<TreeParams> {
    let mut cap = 0;
    loop {
        let tree = TreeParams::new(d, cap)?;
        if tree.vertex_count() > index {
            return Ok(tree);
        }
        cap += 1;
    }
}

fn path_for_index(d: u32, index: u64) -> Result<TreePath> {
    tree_covering(d, index)?.path_of(VertexId(index))
}

impl PermutationSpec {
    pub fn is_identity(&self) -> bool {
        matches!(self, PermutationSpec::Identity)
    }

    /// Kinds that are automorphisms of the whole tree.
    pub fn is_automorphism_kind(&self) -> bool {
        matches!(
            self,
            PermutationSpec::Identity | PermutationSpec::EdgeShift { .. } | PermutationSpec::Translation { .. }
        )
    }

    fn check_degree(&self, d: u32) -> Result<()> {
        match *self {
            PermutationSpec::EdgeShift { target } if target == 0 || target > d as u64 => Err(
                Error::InvalidPermutation(format!("edge shift target {target} is not a child of the root")),
            ),
            PermutationSpec::Translation { .. } if d != 2 => {
                Err(Error::UnsupportedDegree(format!("translations need d = 2, got {d}")))
            }
            _ => Ok(()),
        }
    }

    /// Image of `v`; errors if it falls outside the truncated tree.
    pub fn apply(&self, tree: &TreeParams, v: VertexId) -> Result<VertexId> {
        tree.depth(v)?;
        let overflow = |image: u64| {
            if image < tree.vertex_count() {
                Ok(VertexId(image))
            } else {
                Err(Error::ImageOverflow { from: v })
            }
        };
        match self {
            PermutationSpec::Identity => Ok(v),
            PermutationSpec::Explicit { map } => overflow(map.get(v.0 as usize).copied().unwrap_or(v.0)),
            &PermutationSpec::Transposition { u, w } => overflow(match v.0 {
                x if x == u => w,
                x if x == w => u,
                x => x,
            }),
            PermutationSpec::EdgeShift { .. } | PermutationSpec::Translation { .. } => {
                let mut path = tree.path_of(v)?;
                self.apply_path(tree.degree(), &mut path)?;
                tree.vertex_of(&path).map_err(|_| Error::ImageOverflow { from: v })
            }
        }
    }

    /// Applies the permutation to an unbounded position in place.
    pub fn apply_path(&self, d: u32, path: &mut TreePath) -> Result<()> {
        self.check_degree(d)?;
        match self {
            PermutationSpec::Identity => {}
            PermutationSpec::Explicit { map } => {
                if let Some(index) = shallow_index(d, path, map.len() as u64) {
                    if let Some(&image) = map.get(index as usize) {
                        *path = path_for_index(d, image)?;
                    }
                }
            }
            &PermutationSpec::Transposition { u, w } => {
                if let Some(index) = shallow_index(d, path, u.max(w).saturating_add(1)) {
                    if index == u {
                        *path = path_for_index(d, w)?;
                    } else if index == w {
                        *path = path_for_index(d, u)?;
                    }
                }
            }
            &PermutationSpec::EdgeShift { target } => edge_shift(path, target as u32 - 1),
            &PermutationSpec::Translation { offset } => {
                *path = TreePath::from_line_coordinate(path.line_coordinate() + offset);
            }
        }
        Ok(())
    }

    /// Action on the signed coordinate of `T_2 ≅ Z`.
    pub fn apply_line(&self, x: i64) -> Result<i64> {
        self.check_degree(2)?;
        Ok(match *self {
            PermutationSpec::Identity => x,
            PermutationSpec::Translation { offset } => x + offset,
            // reflections across the edges {0, 1} and {0, -1}
            PermutationSpec::EdgeShift { target: 1 } => 1 - x,
            PermutationSpec::EdgeShift { .. } => -1 - x,
            PermutationSpec::Explicit { .. } | PermutationSpec::Transposition { .. } => {
                let mut path = TreePath::from_line_coordinate(x);
                self.apply_path(2, &mut path)?;
                path.line_coordinate()
            }
        })
    }

    /// Checks bijectivity (explicit maps) and edge preservation on
    /// `B_depth_check` (automorphism kinds).
    pub fn validate(&self, d: u32, depth_check: u32) -> ValidationReport {
        let mut issues = Vec::new();
        if let Err(e) = self.check_degree(d) {
            issues.push(e.to_string());
            return ValidationReport { valid: false, issues };
        }
        match self {
            PermutationSpec::Identity | PermutationSpec::Transposition { .. } => {}
            PermutationSpec::Explicit { map } => explicit_issues(d, map, &mut issues),
            PermutationSpec::EdgeShift { .. } | PermutationSpec::Translation { .. } => {
                match TreeParams::new(d, depth_check) {
                    Ok(tree) => self.edge_issues(&tree, &mut issues),
                    Err(e) => issues.push(e.to_string()),
                }
            }
        }
        ValidationReport { valid: issues.is_empty(), issues }
    }

    fn edge_issues(&self, tree: &TreeParams, issues: &mut Vec<String>) {
        let d = tree.degree();
        let mut seen: HashMap<TreePath, u64> = HashMap::new();
        for i in 0..tree.vertex_count() {
            let v = VertexId(i);
            let mut image = tree.path_of(v).expect("in range");
            self.apply_path(d, &mut image).expect("degree checked");
            if let Some(prev) = seen.insert(image.clone(), i) {
                issues.push(format!("v{prev} and v{i} share an image"));
            }
            if let Some(parent) = tree.parent(v).expect("in range") {
                let mut parent_image = tree.path_of(parent).expect("in range");
                self.apply_path(d, &mut parent_image).expect("degree checked");
                if !adjacent(&image, &parent_image) {
                    issues.push(format!("edge {{{parent}, {v}}} is not preserved"));
                }
            }
        }
    }
}

/// Index of `path` when it can be below `limit`; skips the index
/// computation for paths that are too deep.
fn shallow_index(d: u32, path: &TreePath, limit: u64) -> Option<u64> {
    let (mut first_at_depth, mut sphere) = (0u64, 1u64);
    for n in 0..path.depth() {
        first_at_depth = first_at_depth.saturating_add(sphere);
        if first_at_depth >= limit {
            return None;
        }
        sphere = sphere.saturating_mul(if n == 0 { d as u64 } else { d as u64 - 1 });
    }
    path_index(d, path).filter(|&i| i < limit)
}

/// Reflection across the edge `{root, child k}`.
fn edge_shift(path: &mut TreePath, k: u32) {
    let slots = path.slots_mut();
    match slots.front().copied() {
        None => slots.push_back(k),
        Some(first) if first == k => {
            slots.pop_front();
            if let Some(b) = slots.pop_front() {
                slots.push_front(if b < k { b } else { b + 1 });
            }
        }
        Some(a) => {
            slots.pop_front();
            slots.push_front(if a < k { a } else { a - 1 });
            slots.push_front(k);
        }
    }
}

fn adjacent(a: &TreePath, b: &TreePath) -> bool {
    let (short, long) = if a.depth() < b.depth() { (a, b) } else { (b, a) };
    long.depth() == short.depth() + 1 && long.slots().iter().zip(short.slots()).all(|(x, y)| x == y)
}

fn explicit_issues(d: u32, map: &[u64], issues: &mut Vec<String>) {
    let n = map.len() as u64;
    let is_ball = (0..64).map_while(|r| TreeParams::new(d, r).ok()).any(|t| t.vertex_count() == n);
    if !is_ball {
        issues.push(format!("domain size {n} is not the size of a ball"));
    }
    let mut source: HashMap<u64, usize> = HashMap::with_capacity(map.len());
    for (i, &image) in map.iter().enumerate() {
        if image >= n {
            issues.push(format!("v{i} maps to v{image}, outside the domain"));
        } else if let Some(prev) = source.insert(image, i) {
            issues.push(format!("v{prev} and v{i} both map to v{image}"));
        }
    }
    let missing: Vec<u64> = (0..n).filter(|x| !source.contains_key(x)).take(8).collect();
    if !missing.is_empty() {
        issues.push(format!("no preimage for {missing:?}"));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub issues: Vec<String>,
}

/// `π_1, π_2, ...`; entries past the stored prefix are the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub d: u32,
    pub depth: u32,
    pub permutations: Vec<PermutationSpec>,
}

impl Schedule {
    pub fn identity(d: u32) -> Schedule {
        Schedule { d, depth: 0, permutations: Vec::new() }
    }

    /// `π_t` for `t ≥ 1`.
    pub fn get(&self, t: usize) -> &PermutationSpec {
        t.checked_sub(1).and_then(|i| self.permutations.get(i)).unwrap_or(&IDENTITY)
    }

    pub fn from_json(text: &str) -> Result<Schedule> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serializes")
    }

    /// Errors with the first position that is not an automorphism kind.
    pub fn check_automorphisms(&self) -> Result<()> {
        match self.permutations.iter().position(|p| !p.is_automorphism_kind()) {
            Some(i) => Err(Error::NotAutomorphism { position: i + 1 }),
            None => Ok(()),
        }
    }

    /// Reports for every stored permutation that fails validation.
    pub fn validate(&self, depth_check: u32) -> Vec<(usize, ValidationReport)> {
        self.permutations
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1, p.validate(self.d, depth_check)))
            .filter(|(_, r)| !r.valid)
            .collect()
    }

    /// Depth cap large enough that a walk started at the root and permuted by
    /// this schedule stays inside the truncated tree for `horizon` steps.
    pub fn required_depth_cap(&self, horizon: usize) -> Result<u32> {
        let mut bound: u64 = 0;
        for t in 1..=horizon {
            bound += 1;
            bound = match self.get(t) {
                PermutationSpec::Identity => bound,
                PermutationSpec::Explicit { map } => match map.len() {
                    0 => bound,
                    n => bound.max(tree_covering(self.d, n as u64 - 1)?.depth_cap() as u64),
                },
                &PermutationSpec::Transposition { u, w } => {
                    bound.max(tree_covering(self.d, u.max(w))?.depth_cap() as u64)
                }
                PermutationSpec::EdgeShift { .. } => bound + 1,
                &PermutationSpec::Translation { offset } => bound + offset.unsigned_abs(),
            };
        }
        u32::try_from(bound).map_err(|_| Error::ArithmeticOverflow)
    }

    /// `Π_t = π_t ∘ ... ∘ π_1` applied to `path`.
    pub fn apply_prefix(&self, t: usize, path: &mut TreePath) -> Result<()> {
        for spec in self.permutations.iter().take(t) {
            spec.apply_path(self.d, path)?;
        }
        Ok(())
    }
}

/// Uniformly random bijection of `B_radius`, extended by the identity.
pub fn random_bijection<R: Rng + ?Sized>(d: u32, radius: u32, rng: &mut R) -> Result<PermutationSpec> {
    let n = TreeParams::new(d, radius)?.vertex_count();
    let mut map: Vec<u64> = (0..n).collect();
    map.shuffle(rng);
    Ok(PermutationSpec::Explicit { map })
}

pub fn random_bijection_schedule<R: Rng + ?Sized>(d: u32, radius: u32, horizon: usize, rng: &mut R) -> Result<Schedule> {
    let permutations = (0..horizon).map(|_| random_bijection(d, radius, rng)).collect::<Result<_>>()?;
    Ok(Schedule { d, depth: radius, permutations })
}

/// Each `π_t` is an edge shift towards a uniform root child with probability
/// `rate`, and the identity otherwise.
pub fn random_edge_shift_schedule<R: Rng + ?Sized>(d: u32, horizon: usize, rate: f64, rng: &mut R) -> Schedule {
    let permutations = (0..horizon)
        .map(|_| {
            if rng.random_bool(rate) {
                PermutationSpec::EdgeShift { target: rng.random_range(1..=d as u64) }
            } else {
                PermutationSpec::Identity
            }
        })
        .collect();
    Schedule { d, depth: 0, permutations }
}
