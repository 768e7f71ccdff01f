//! Canonical breadth-first indexing of the rooted `d`-regular tree.
//!
//! Vertices are numbered `v0, v1, v2, ...` sphere by sphere. The root has `d`
//! children (indices `1..=d`); every other vertex has `d - 1` children, and the
//! children of the `j`-th vertex of sphere `n` occupy the contiguous block
//! `offset(n + 1) + (d - 1) * j + {0, ..., d - 2}`. Children of earlier
//! vertices therefore precede children of later ones, which is exactly the
//! ordering that makes prefixes of the order ("quasi-balls") well behaved.
//!
//! Everything is pure index arithmetic; nothing about the tree is stored
//! beyond the degree and the truncation depth. Deep positions that do not fit
//! an index (long simulations) are handled by [`TreePath`].

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl VertexId {
    pub const ROOT: VertexId = VertexId(0);

    pub fn index(self) -> u64 {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Finite vertex set, kept sorted by canonical index.
pub type VertexSet = BTreeSet<VertexId>;

/// Parity class of a vertex: `V0` holds even depths, `V1` odd depths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even = 0,
    Odd = 1,
}

impl Parity {
    pub fn of_depth(depth: u32) -> Parity {
        if depth.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn bit(self) -> u32 {
        self as u32
    }

    pub fn from_bit(bit: u32) -> Result<Parity> {
        match bit {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            other => Err(Error::InvalidParams(format!("parity must be 0 or 1, got {other}"))),
        }
    }
}

/// Degree and truncation depth of the tree under consideration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeParams {
    d: u32,
    depth_cap: u32,
}

impl TreeParams {
    /// Fails when `d < 2` or when `|B_D|` does not fit a `u64` index.
    pub fn new(d: u32, depth_cap: u32) -> Result<TreeParams> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("degree must be at least 2, got {d}")));
        }
        let params = TreeParams { d, depth_cap };
        if checked_ball_size(d, depth_cap as i64).is_none() {
            return Err(Error::InvalidParams(format!(
                "ball of radius {depth_cap} in T_{d} does not fit a 64-bit index"
            )));
        }
        Ok(params)
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn depth_cap(&self) -> u32 {
        self.depth_cap
    }

    /// Same degree, different truncation.
    pub fn with_depth_cap(&self, depth_cap: u32) -> Result<TreeParams> {
        TreeParams::new(self.d, depth_cap)
    }

    /// `|B_D|`.
    pub fn vertex_count(&self) -> u64 {
        self.ball_size(self.depth_cap as i64)
    }

    /// `s_0 = 1`, `s_n = d (d-1)^(n-1)`; saturates at `u64::MAX`.
    pub fn sphere_size(&self, n: u32) -> u64 {
        checked_sphere_size(self.d, n).unwrap_or(u64::MAX)
    }

    /// `|B_n|`, with `|B_{-1}| = 0`; saturates at `u64::MAX`.
    pub fn ball_size(&self, n: i64) -> u64 {
        checked_ball_size(self.d, n).unwrap_or(u64::MAX)
    }

    /// `|B'_n|`: vertices of depth at most `n` with depth of the same parity as `n`.
    pub fn half_ball_size(&self, n: i64) -> u64 {
        if n < 0 {
            return 0;
        }
        let mut total: u64 = 0;
        let mut k = n;
        while k >= 0 {
            total = total.saturating_add(self.sphere_size(k as u32));
            k -= 2;
        }
        total
    }

    /// Index of the first vertex of sphere `n`.
    pub fn sphere_offset(&self, n: u32) -> u64 {
        self.ball_size(n as i64 - 1)
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if v.0 >= self.vertex_count() {
            Err(Error::OutOfRange { index: v.0, depth_cap: self.depth_cap })
        } else {
            Ok(())
        }
    }

    /// Depth and position within its sphere.
    fn locate(&self, v: VertexId) -> Result<(u32, u64)> {
        self.check(v)?;
        let mut n = 0u32;
        let mut offset = 0u64;
        loop {
            let size = self.sphere_size(n);
            if v.0 - offset < size {
                return Ok((n, v.0 - offset));
            }
            offset += size;
            n += 1;
        }
    }

    fn at(&self, depth: u32, pos: u64) -> VertexId {
        VertexId(self.sphere_offset(depth) + pos)
    }

    pub fn depth(&self, v: VertexId) -> Result<u32> {
        self.locate(v).map(|(n, _)| n)
    }

    pub fn parent(&self, v: VertexId) -> Result<Option<VertexId>> {
        let (n, pos) = self.locate(v)?;
        Ok(match n {
            0 => None,
            1 => Some(VertexId::ROOT),
            _ => Some(self.at(n - 1, pos / (self.d as u64 - 1))),
        })
    }

    /// Children in canonical order; fails if they lie beyond the truncation depth.
    pub fn children(&self, v: VertexId) -> Result<Vec<VertexId>> {
        let (n, pos) = self.locate(v)?;
        if n >= self.depth_cap {
            return Err(Error::BoundaryOverflow { vertex: v, depth: n, depth_cap: self.depth_cap });
        }
        Ok(self.children_unchecked(n, pos).collect())
    }

    fn children_unchecked(&self, n: u32, pos: u64) -> impl Iterator<Item = VertexId> {
        let (first, count) = if n == 0 {
            (1, self.d as u64)
        } else {
            let k = self.d as u64 - 1;
            (self.sphere_offset(n + 1) + k * pos, k)
        };
        (first..first + count).map(VertexId)
    }

    /// Parent (if any) followed by the children of `v`, appended to `out`.
    pub fn open_neighbors_into(&self, v: VertexId, out: &mut Vec<VertexId>) -> Result<()> {
        let (n, pos) = self.locate(v)?;
        if n >= self.depth_cap {
            return Err(Error::BoundaryOverflow { vertex: v, depth: n, depth_cap: self.depth_cap });
        }
        match n {
            0 => {}
            1 => out.push(VertexId::ROOT),
            _ => out.push(self.at(n - 1, pos / (self.d as u64 - 1))),
        }
        out.extend(self.children_unchecked(n, pos));
        Ok(())
    }

    /// `N'(v)`: the `d` neighbors of `v`.
    pub fn neighbors_open(&self, v: VertexId) -> Result<VertexSet> {
        let mut out = Vec::with_capacity(self.d as usize);
        self.open_neighbors_into(v, &mut out)?;
        Ok(out.into_iter().collect())
    }

    /// `N(v)`: `v` together with its `d` neighbors.
    pub fn neighbors_closed(&self, v: VertexId) -> Result<VertexSet> {
        let mut set = self.neighbors_open(v)?;
        set.insert(v);
        Ok(set)
    }

    /// Number of vertices of the given parity within the truncation.
    pub fn parity_class_size(&self, parity: Parity) -> u64 {
        let d = self.depth_cap as i64;
        let top = if (d % 2) as u32 == parity.bit() { d } else { d - 1 };
        self.half_ball_size(top)
    }

    /// Position of `v` in the canonical order restricted to its parity class.
    pub fn parity_rank(&self, v: VertexId) -> Result<u64> {
        let (n, pos) = self.locate(v)?;
        Ok(self.half_ball_size(n as i64 - 2) + pos)
    }

    /// Inverse of [`parity_rank`](Self::parity_rank).
    pub fn vertex_at_parity_rank(&self, parity: Parity, rank: u64) -> Result<VertexId> {
        let available = self.parity_class_size(parity);
        if rank >= available {
            return Err(Error::SizeExceeded { size: rank + 1, available });
        }
        let mut n = parity.bit();
        let mut remaining = rank;
        loop {
            let size = self.sphere_size(n);
            if remaining < size {
                return Ok(self.at(n, remaining));
            }
            remaining -= size;
            n += 2;
        }
    }

    pub fn quasi_ball(&self, size: u64) -> Result<QuasiBall> {
        let available = self.vertex_count();
        if size > available {
            return Err(Error::SizeExceeded { size, available });
        }
        Ok(QuasiBall { size })
    }

    pub fn half_quasi_ball(&self, size: u64, parity: Parity) -> Result<HalfQuasiBall> {
        let available = self.parity_class_size(parity);
        if size > available {
            return Err(Error::SizeExceeded { size, available });
        }
        Ok(HalfQuasiBall { size, parity })
    }

    /// Writes a quasi-ball size as `|B_n| + a (d-1) + c` with `c < d - 1` and
    /// `B_n ⊆ B ⊊ B_{n+1}`.
    pub fn quasi_ball_shape(&self, size: u64) -> Result<BallShape> {
        if size == 0 {
            return Err(Error::TooSmall(size));
        }
        let mut n: i64 = 0;
        while self.ball_size(n + 1) <= size {
            n += 1;
        }
        let rest = size - self.ball_size(n);
        let k = self.d as u64 - 1;
        Ok(BallShape { n, a: rest / k, c: rest % k })
    }

    /// Same decomposition relative to half-balls of the given parity:
    /// `|B'_n| + a (d-1) + c` with `n ≡ parity`, `B'_n ⊆ B ⊊ B'_{n+2}`.
    /// `n = -1` stands for the empty half-ball.
    pub fn half_quasi_ball_shape(&self, size: u64, parity: Parity) -> Result<BallShape> {
        if size == 0 {
            return Err(Error::TooSmall(size));
        }
        let mut n: i64 = if parity == Parity::Even { 0 } else { -1 };
        while self.half_ball_size(n + 2) <= size {
            n += 2;
        }
        let rest = size - self.half_ball_size(n);
        let k = self.d as u64 - 1;
        Ok(BallShape { n, a: rest / k, c: rest % k })
    }

    /// Root-to-vertex path of child slots.
    pub fn path_of(&self, v: VertexId) -> Result<TreePath> {
        let (n, mut pos) = self.locate(v)?;
        let mut slots = VecDeque::with_capacity(n as usize);
        if n > 0 {
            let k = self.d as u64 - 1;
            for _ in 1..n {
                slots.push_front((pos % k) as u32);
                pos /= k;
            }
            slots.push_front(pos as u32);
        }
        Ok(TreePath { slots })
    }

    /// Vertex at the end of `path`; fails beyond the truncation depth.
    pub fn vertex_of(&self, path: &TreePath) -> Result<VertexId> {
        match path_index(self.d, path) {
            Some(index) if path.depth() <= self.depth_cap => Ok(VertexId(index)),
            Some(index) => Err(Error::OutOfRange { index, depth_cap: self.depth_cap }),
            None => Err(Error::OutOfRange { index: u64::MAX, depth_cap: self.depth_cap }),
        }
    }

    /// Signed coordinate of `v` under `T_2 ≅ Z`: `v_{2k-1} ↦ +k`, `v_{2k} ↦ -k`.
    pub fn line_coordinate(&self, v: VertexId) -> Result<i64> {
        if self.d != 2 {
            return Err(Error::UnsupportedDegree("line coordinates need d = 2".into()));
        }
        self.check(v)?;
        let i = v.0 as i64;
        Ok(if i == 0 {
            0
        } else if i % 2 == 1 {
            (i + 1) / 2
        } else {
            -(i / 2)
        })
    }

    pub fn vertex_at_coordinate(&self, x: i64) -> Result<VertexId> {
        if self.d != 2 {
            return Err(Error::UnsupportedDegree("line coordinates need d = 2".into()));
        }
        let index = if x >= 0 { (2 * x - 1).max(0) } else { -2 * x } as u64;
        let v = VertexId(index);
        self.check(v)?;
        Ok(v)
    }
}

fn checked_sphere_size(d: u32, n: u32) -> Option<u64> {
    if n == 0 {
        return Some(1);
    }
    (d as u64 - 1).checked_pow(n - 1)?.checked_mul(d as u64)
}

fn checked_ball_size(d: u32, n: i64) -> Option<u64> {
    let mut total: u64 = 0;
    for k in 0..=n {
        total = total.checked_add(checked_sphere_size(d, k as u32)?)?;
    }
    Some(total)
}

/// Canonical index of the vertex reached by `path`, if it fits a `u64`.
pub fn path_index(d: u32, path: &TreePath) -> Option<u64> {
    let n = path.depth();
    if n == 0 {
        return Some(0);
    }
    let k = d as u64 - 1;
    let mut pos: u64 = 0;
    for &slot in &path.slots {
        pos = pos.checked_mul(k)?.checked_add(slot as u64)?;
    }
    checked_ball_size(d, n as i64 - 1)?.checked_add(pos)
}

/// `n`, `a`, `c` in `|B| = |B_n| + a (d-1) + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallShape {
    pub n: i64,
    pub a: u64,
    pub c: u64,
}

/// Prefix `{v_0, ..., v_{size-1}}` of the canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuasiBall {
    pub size: u64,
}

impl QuasiBall {
    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.size
    }

    pub fn members(&self) -> VertexSet {
        (0..self.size).map(VertexId).collect()
    }
}

/// Prefix of the canonical order restricted to one parity class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfQuasiBall {
    pub size: u64,
    pub parity: Parity,
}

impl HalfQuasiBall {
    pub fn members(&self, tree: &TreeParams) -> Result<VertexSet> {
        (0..self.size).map(|r| tree.vertex_at_parity_rank(self.parity, r)).collect()
    }

    pub fn contains(&self, tree: &TreeParams, v: VertexId) -> Result<bool> {
        let depth = tree.depth(v)?;
        Ok(Parity::of_depth(depth) == self.parity && tree.parity_rank(v)? < self.size)
    }
}

/// Position given as child slots from the root: the first slot is in `0..d`,
/// later ones in `0..d-1`. Not bounded by any truncation depth.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TreePath {
    slots: VecDeque<u32>,
}

impl TreePath {
    pub fn root() -> TreePath {
        TreePath::default()
    }

    pub fn from_slots(d: u32, slots: impl IntoIterator<Item = u32>) -> Result<TreePath> {
        let slots: VecDeque<u32> = slots.into_iter().collect();
        for (i, &s) in slots.iter().enumerate() {
            let bound = if i == 0 { d } else { d - 1 };
            if s >= bound {
                return Err(Error::InvalidParams(format!("slot {s} at level {i} exceeds {bound}")));
            }
        }
        Ok(TreePath { slots })
    }

    pub fn depth(&self) -> u32 {
        self.slots.len() as u32
    }

    pub fn is_root(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &VecDeque<u32> {
        &self.slots
    }

    pub(crate) fn slots_mut(&mut self) -> &mut VecDeque<u32> {
        &mut self.slots
    }

    pub fn push_child(&mut self, slot: u32) {
        self.slots.push_back(slot);
    }

    /// Moves to the parent; no-op at the root.
    pub fn pop(&mut self) -> Option<u32> {
        self.slots.pop_back()
    }

    /// Number of children of the current vertex.
    pub fn child_count(&self, d: u32) -> u32 {
        if self.is_root() {
            d
        } else {
            d - 1
        }
    }

    /// Applies neighbor move `choice ∈ 0..d`: for the root, child `choice`;
    /// otherwise `0` is the parent and `1..d` are the children.
    pub fn step_to_neighbor(&mut self, choice: u32) {
        if self.is_root() {
            self.slots.push_back(choice);
        } else if choice == 0 {
            self.slots.pop_back();
        } else {
            self.slots.push_back(choice - 1);
        }
    }

    /// Signed coordinate under `T_2 ≅ Z` (first slot 0 is the positive half-line).
    pub fn line_coordinate(&self) -> i64 {
        match self.slots.front() {
            None => 0,
            Some(0) => self.slots.len() as i64,
            Some(_) => -(self.slots.len() as i64),
        }
    }

    pub fn from_line_coordinate(x: i64) -> TreePath {
        let n = x.unsigned_abs() as usize;
        let mut slots = VecDeque::with_capacity(n);
        if n > 0 {
            slots.push_back(if x > 0 { 0 } else { 1 });
            slots.extend(std::iter::repeat_n(0, n - 1));
        }
        TreePath { slots }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(d: u32, cap: u32) -> TreeParams {
        TreeParams::new(d, cap).unwrap()
    }

    /// Independent construction: BFS from the root, listing children of each
    /// dequeued vertex, with explicit parent pointers.
    fn bfs_parents(d: u32, depth: u32) -> Vec<(Option<usize>, u32)> {
        let mut nodes: Vec<(Option<usize>, u32)> = vec![(None, 0)];
        let mut i = 0;
        while i < nodes.len() {
            let (parent, dep) = nodes[i];
            if dep < depth {
                let kids = if parent.is_none() { d } else { d - 1 };
                for _ in 0..kids {
                    nodes.push((Some(i), dep + 1));
                }
            }
            i += 1;
        }
        nodes
    }

    #[test]
    fn depth_examples() {
        let tree = t(3, 4);
        assert_eq!(tree.depth(VertexId(0)).unwrap(), 0);
        assert_eq!(tree.depth(VertexId(3)).unwrap(), 1);
        assert_eq!(tree.depth(VertexId(4)).unwrap(), 2);
        assert!(matches!(tree.depth(VertexId(10_000)), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn neighbor_examples() {
        let tree = t(3, 4);
        let set = |v: &[u64]| v.iter().copied().map(VertexId).collect::<VertexSet>();
        assert_eq!(tree.neighbors_closed(VertexId(0)).unwrap(), set(&[0, 1, 2, 3]));
        assert_eq!(tree.neighbors_closed(VertexId(1)).unwrap(), set(&[1, 0, 4, 5]));
        assert_eq!(tree.neighbors_closed(VertexId(4)).unwrap(), set(&[4, 1, 10, 11]));
        assert_eq!(tree.neighbors_open(VertexId(0)).unwrap(), set(&[1, 2, 3]));
        assert_eq!(tree.neighbors_open(VertexId(1)).unwrap(), set(&[0, 4, 5]));
        assert_eq!(t(2, 4).neighbors_open(VertexId(1)).unwrap(), set(&[0, 3]));
        // v4 has depth 2; with cap 2 its children are cut off.
        assert!(matches!(
            t(3, 2).neighbors_closed(VertexId(4)),
            Err(Error::BoundaryOverflow { .. })
        ));
    }

    #[test]
    fn ball_sizes() {
        let tree = t(3, 6);
        assert_eq!(tree.ball_size(-1), 0);
        assert_eq!(tree.ball_size(2), 10);
        assert_eq!(tree.half_ball_size(2), 7);
        assert_eq!(tree.ball_size(1), 4);
        assert!(tree.ball_size(1) <= 1 + 3 * 2);
        assert_eq!(1 + 3 * 2, tree.half_ball_size(2));
        assert_eq!(t(2, 5).ball_size(5), 11);
        for (d, cap) in [(2u32, 6u32), (3, 6), (4, 6), (5, 4)] {
            let tree = t(d, cap);
            let spheres: u64 = (0..=cap).map(|n| tree.sphere_size(n)).sum();
            assert_eq!(spheres, tree.vertex_count());
            if d > 2 {
                let closed = 1 + d as u64 * ((d as u64 - 1).pow(cap) - 1) / (d as u64 - 2);
                assert_eq!(closed, tree.vertex_count());
            } else {
                assert_eq!(2 * cap as u64 + 1, tree.vertex_count());
            }
        }
    }

    #[test]
    fn quasi_balls() {
        let tree = t(3, 4);
        let set = |v: &[u64]| v.iter().copied().map(VertexId).collect::<VertexSet>();
        assert_eq!(tree.quasi_ball(1).unwrap().members(), set(&[0]));
        assert_eq!(tree.quasi_ball(5).unwrap().members(), set(&[0, 1, 2, 3, 4]));
        let half = tree.half_quasi_ball(4, Parity::Even).unwrap();
        assert_eq!(half.members(&tree).unwrap(), set(&[0, 4, 5, 6]));
        assert!(half.contains(&tree, VertexId(6)).unwrap());
        assert!(!half.contains(&tree, VertexId(7)).unwrap());
        assert!(tree.quasi_ball(tree.vertex_count() + 1).is_err());
        for n in 0..=4 {
            let ball: VertexSet = (0..tree.vertex_count())
                .map(VertexId)
                .filter(|&v| tree.depth(v).unwrap() <= n)
                .collect();
            assert_eq!(tree.quasi_ball(tree.ball_size(n as i64)).unwrap().members(), ball);
        }
    }

    #[test]
    fn shapes() {
        let tree = t(3, 5);
        assert_eq!(tree.quasi_ball_shape(5).unwrap(), BallShape { n: 1, a: 0, c: 1 });
        assert_eq!(tree.quasi_ball_shape(4).unwrap(), BallShape { n: 1, a: 0, c: 0 });
        assert_eq!(tree.quasi_ball_shape(3).unwrap(), BallShape { n: 0, a: 1, c: 0 });
        assert_eq!(
            tree.half_quasi_ball_shape(2, Parity::Odd).unwrap(),
            BallShape { n: -1, a: 1, c: 0 }
        );
        for s in 1..tree.ball_size(4) {
            let shape = tree.quasi_ball_shape(s).unwrap();
            assert!(shape.c < 2);
            assert!(tree.ball_size(shape.n) <= s && s < tree.ball_size(shape.n + 1));
            assert_eq!(tree.ball_size(shape.n) + 2 * shape.a + shape.c, s);
        }
    }

    #[test]
    fn matches_bfs_construction() {
        for (d, cap) in [(2u32, 6u32), (3, 6), (4, 5)] {
            let tree = t(d, cap);
            let nodes = bfs_parents(d, cap);
            assert_eq!(nodes.len() as u64, tree.vertex_count());
            for (i, &(parent, dep)) in nodes.iter().enumerate() {
                let v = VertexId(i as u64);
                assert_eq!(tree.depth(v).unwrap(), dep);
                assert_eq!(tree.parent(v).unwrap(), parent.map(|p| VertexId(p as u64)));
            }
        }
    }

    #[test]
    fn ordering_and_round_trip_exhaustive() {
        for (d, cap) in [(2u32, 6u32), (3, 6), (4, 6)] {
            let tree = t(d, cap);
            let inner = tree.ball_size(cap as i64 - 1);
            let mut last_child_max: Option<(u32, u64)> = None;
            for i in 0..inner {
                let v = VertexId(i);
                let kids = tree.children(v).unwrap();
                for &c in &kids {
                    assert_eq!(tree.parent(c).unwrap(), Some(v));
                }
                let dep = tree.depth(v).unwrap();
                let lo = kids.iter().min().unwrap().0;
                let hi = kids.iter().max().unwrap().0;
                if let Some((prev_dep, prev_hi)) = last_child_max {
                    if prev_dep == dep {
                        assert!(prev_hi < lo);
                    }
                }
                last_child_max = Some((dep, hi));
                if i + 1 < inner {
                    assert!(dep <= tree.depth(VertexId(i + 1)).unwrap());
                }
                let path = tree.path_of(v).unwrap();
                assert_eq!(path.depth(), dep);
                assert_eq!(tree.vertex_of(&path).unwrap(), v);
            }
        }
    }

    #[test]
    fn parity_ranks_invert() {
        let tree = t(3, 5);
        for parity in [Parity::Even, Parity::Odd] {
            for r in 0..tree.parity_class_size(parity) {
                let v = tree.vertex_at_parity_rank(parity, r).unwrap();
                assert_eq!(tree.parity_rank(v).unwrap(), r);
                assert_eq!(Parity::of_depth(tree.depth(v).unwrap()), parity);
            }
        }
    }

    #[test]
    fn line_coordinates() {
        let tree = t(2, 6);
        for x in -6..=6 {
            let v = tree.vertex_at_coordinate(x).unwrap();
            assert_eq!(tree.line_coordinate(v).unwrap(), x);
            assert_eq!(tree.path_of(v).unwrap().line_coordinate(), x);
            assert_eq!(tree.vertex_of(&TreePath::from_line_coordinate(x)).unwrap(), v);
            assert_eq!(tree.depth(v).unwrap() as i64, x.abs());
        }
        assert!(t(3, 2).line_coordinate(VertexId(1)).is_err());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(TreeParams::new(1, 3).is_err());
        assert!(TreeParams::new(3, 80).is_err());
        assert!(TreeParams::new(2, 0).is_ok());
    }
}
