//! Neighborhood combinatorics of finite vertex sets: multiplicity profiles
//! `|K_i(J)|`, connectivity counts, and the isoperimetric identities and
//! bounds built from them.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::tree::{HalfQuasiBall, Parity, QuasiBall, TreeParams, VertexId, VertexSet};
use crate::WalkKind;

/// `(|K_1(J)|, ..., |K_L(J)|)` with `L = d + 1` (lazy, closed neighborhoods)
/// or `L = d` (simple, open neighborhoods).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KProfile {
    pub kind: WalkKind,
    pub parts: Partition,
}

/// A value that is well defined but degenerate for the given input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flagged<T> {
    pub value: T,
    pub degenerate: bool,
}

fn neighbors_into(tree: &TreeParams, v: VertexId, kind: WalkKind, out: &mut Vec<VertexId>) -> Result<()> {
    out.clear();
    if kind == WalkKind::Lazy {
        out.push(v);
    }
    tree.open_neighbors_into(v, out)
}

/// Number of `J`-members in `N(w)` (resp. `N'(w)`) for every `w` touched by `J`.
pub fn neighborhood_multiplicity(
    tree: &TreeParams,
    set: &VertexSet,
    kind: WalkKind,
) -> Result<HashMap<VertexId, u32>> {
    let mut counts = HashMap::new();
    let mut buf = Vec::with_capacity(tree.degree() as usize + 1);
    for &u in set {
        // w ∈ N(u) iff u ∈ N(w)
        neighbors_into(tree, u, kind, &mut buf)?;
        for &w in &buf {
            *counts.entry(w).or_insert(0u32) += 1;
        }
    }
    Ok(counts)
}

fn profile_len(tree: &TreeParams, kind: WalkKind) -> usize {
    match kind {
        WalkKind::Lazy => tree.degree() as usize + 1,
        WalkKind::Simple => tree.degree() as usize,
    }
}

pub fn k_profile(tree: &TreeParams, set: &VertexSet, kind: WalkKind) -> Result<KProfile> {
    let counts = neighborhood_multiplicity(tree, set, kind)?;
    let len = profile_len(tree, kind);
    let mut parts = vec![0u64; len];
    for &c in counts.values() {
        for part in parts.iter_mut().take(c as usize) {
            *part += 1;
        }
    }
    Ok(KProfile { kind, parts: Partition::new(parts)? })
}

/// The sets `K_1(J) ⊇ K_2(J) ⊇ ...` themselves.
pub fn k_sets(tree: &TreeParams, set: &VertexSet, kind: WalkKind) -> Result<Vec<VertexSet>> {
    let counts = neighborhood_multiplicity(tree, set, kind)?;
    let mut sets = vec![VertexSet::new(); profile_len(tree, kind)];
    for (&w, &c) in &counts {
        for s in sets.iter_mut().take(c as usize) {
            s.insert(w);
        }
    }
    Ok(sets)
}

/// `N(J)` (lazy) or `N'(J)` (simple).
pub fn neighborhood(tree: &TreeParams, set: &VertexSet, kind: WalkKind) -> Result<VertexSet> {
    Ok(neighborhood_multiplicity(tree, set, kind)?.into_keys().collect())
}

fn components(set: &VertexSet, edges: impl IntoIterator<Item = (usize, usize)>) -> u64 {
    if set.is_empty() {
        return 0;
    }
    let mut uf = UnionFind::<usize>::new(set.len());
    for (a, b) in edges {
        uf.union(a, b);
    }
    let mut labels = uf.into_labeling();
    labels.sort_unstable();
    labels.dedup();
    labels.len() as u64
}

/// Components of the subgraph induced by `J`.
pub fn kappa1(tree: &TreeParams, set: &VertexSet) -> Result<u64> {
    let pos: HashMap<VertexId, usize> = set.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    for (i, &v) in set.iter().enumerate() {
        if let Some(p) = tree.parent(v)? {
            if let Some(&j) = pos.get(&p) {
                edges.push((i, j));
            }
        }
    }
    Ok(components(set, edges))
}

/// Components of `J` once vertices at distance two are also joined. Two
/// vertices are within distance two exactly when some closed neighborhood
/// contains both.
pub fn kappa2(tree: &TreeParams, set: &VertexSet) -> Result<u64> {
    let mut first_seen: HashMap<VertexId, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut buf = Vec::new();
    for (i, &u) in set.iter().enumerate() {
        neighbors_into(tree, u, WalkKind::Lazy, &mut buf)?;
        for &w in &buf {
            match first_seen.get(&w) {
                Some(&j) => edges.push((i, j)),
                None => {
                    first_seen.insert(w, i);
                }
            }
        }
    }
    Ok(components(set, edges))
}

/// `(iso(J), con(J))`: members with no neighbor in `J`, and the rest.
pub fn iso_con(tree: &TreeParams, set: &VertexSet) -> Result<(VertexSet, VertexSet)> {
    let mut connected = VertexSet::new();
    for &v in set {
        if let Some(p) = tree.parent(v)? {
            if set.contains(&p) {
                connected.insert(v);
                connected.insert(p);
            }
        }
    }
    let isolated = set.difference(&connected).copied().collect();
    Ok((isolated, connected))
}

/// `(d - 1)|J| + κ1(J) + κ2(J)`, which equals `|N(J)|`. Flagged for `J = ∅`.
pub fn iso_exact(tree: &TreeParams, set: &VertexSet) -> Result<Flagged<u64>> {
    let value = (tree.degree() as u64 - 1) * set.len() as u64 + kappa1(tree, set)? + kappa2(tree, set)?;
    Ok(Flagged { value, degenerate: set.is_empty() })
}

/// Compares [`iso_exact`] against a direct count of `|N(J)|`.
pub fn check_iso_exact(tree: &TreeParams, set: &VertexSet) -> Result<bool> {
    let direct = neighborhood(tree, set, WalkKind::Lazy)?.len() as u64;
    Ok(iso_exact(tree, set)?.value == direct)
}

/// Lower bound on `|N(J)|` (lazy) or `|N'(J)|` (simple).
pub fn iso_lower_bound(tree: &TreeParams, set: &VertexSet, kind: WalkKind) -> Result<u64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let d = tree.degree() as u64;
    match kind {
        WalkKind::Lazy => {
            let (iso, con) = iso_con(tree, set)?;
            Ok(if con.is_empty() {
                1 + d * set.len() as u64
            } else {
                2 + d * iso.len() as u64 + (d - 1) * con.len() as u64
            })
        }
        WalkKind::Simple => {
            let mut class_sizes = [0u64; 2];
            for &v in set {
                class_sizes[Parity::of_depth(tree.depth(v)?).bit() as usize] += 1;
            }
            Ok(class_sizes.iter().filter(|&&n| n > 0).map(|&n| 1 + (d - 1) * n).sum())
        }
    }
}

/// Closed-form `|K_i(B)|` for a quasi-ball with `|B| > 1`.
///
/// Advisory only: it assumes every vertex of `B` has a parent, so when
/// `B ⊊ B_1` the largest applicable entry comes out one too large. Use
/// [`k_profile`] for ground truth and [`compare_closed_form`] to flag the gap.
pub fn quasi_ball_profile_closed_form(tree: &TreeParams, ball: &QuasiBall) -> Result<Vec<u64>> {
    let s = ball.size;
    if s <= 1 {
        return Err(Error::TooSmall(s));
    }
    let d = tree.degree() as u64;
    let shape = tree.quasi_ball_shape(s)?;
    let inner = tree.ball_size(shape.n - 1) + shape.a;
    let mut parts = vec![(d - 1) * s + 2, s];
    for i in 3..=d + 1 {
        parts.push(if i <= shape.c + 2 { inner + 1 } else { inner });
    }
    Ok(parts)
}

/// Closed-form `|K'_i(B)|` for a half-quasi-ball with `|B| > 1`; advisory,
/// with the same caveat near the root as the lazy version.
///
/// With `B'_n ⊆ B ⊊ B'_{n+2}`, every opposite-parity vertex of depth below
/// `n` has all its neighbors in `B`, so the inner term is `|B'_{n-1}|`.
pub fn half_quasi_ball_profile_closed_form(tree: &TreeParams, ball: &HalfQuasiBall) -> Result<Vec<u64>> {
    let s = ball.size;
    if s <= 1 {
        return Err(Error::TooSmall(s));
    }
    let d = tree.degree() as u64;
    let shape = tree.half_quasi_ball_shape(s, ball.parity)?;
    let inner = tree.half_ball_size(shape.n - 1) + shape.a;
    let mut parts = vec![(d - 1) * s + 1];
    for i in 2..=d {
        parts.push(if i <= shape.c + 1 { inner + 1 } else { inner });
    }
    Ok(parts)
}

/// Closed form next to the counted profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFormCheck {
    pub closed_form: Vec<u64>,
    pub counted: Partition,
}

impl ClosedFormCheck {
    pub fn agrees(&self) -> bool {
        self.closed_form == self.counted.parts()
    }
}

pub fn compare_closed_form(tree: &TreeParams, ball: &QuasiBall) -> Result<ClosedFormCheck> {
    Ok(ClosedFormCheck {
        closed_form: quasi_ball_profile_closed_form(tree, ball)?,
        counted: k_profile(tree, &ball.members(), WalkKind::Lazy)?.parts,
    })
}

pub fn compare_half_closed_form(tree: &TreeParams, ball: &HalfQuasiBall) -> Result<ClosedFormCheck> {
    Ok(ClosedFormCheck {
        closed_form: half_quasi_ball_profile_closed_form(tree, ball)?,
        counted: k_profile(tree, &ball.members(tree)?, WalkKind::Simple)?.parts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(d: u32, cap: u32) -> TreeParams {
        TreeParams::new(d, cap).unwrap()
    }

    fn set(v: &[u64]) -> VertexSet {
        v.iter().copied().map(VertexId).collect()
    }

    fn parts(tree: &TreeParams, j: &[u64], kind: WalkKind) -> Vec<u64> {
        k_profile(tree, &set(j), kind).unwrap().parts.parts().to_vec()
    }

    #[test]
    fn k_profile_examples() {
        let t = tree(3, 4);
        assert_eq!(parts(&t, &[0, 1, 2, 3, 4], WalkKind::Lazy), vec![12, 5, 2, 1]);
        assert_eq!(parts(&t, &[0, 4], WalkKind::Lazy), vec![7, 1, 0, 0]);
        assert_eq!(parts(&t, &[0, 4], WalkKind::Simple), vec![5, 1, 0]);
        assert_eq!(parts(&t, &[0, 1], WalkKind::Lazy), vec![6, 2, 0, 0]);
        let ks = k_sets(&t, &set(&[0, 4]), WalkKind::Lazy).unwrap();
        assert_eq!(ks[1], set(&[1]));
    }

    #[test]
    fn kappa_and_iso_examples() {
        let t = tree(3, 4);
        assert_eq!((kappa1(&t, &set(&[0])).unwrap(), kappa2(&t, &set(&[0])).unwrap()), (1, 1));
        assert_eq!((kappa1(&t, &set(&[0, 4])).unwrap(), kappa2(&t, &set(&[0, 4])).unwrap()), (2, 1));
        assert_eq!((kappa1(&t, &set(&[0, 1])).unwrap(), kappa2(&t, &set(&[0, 1])).unwrap()), (1, 1));
        assert_eq!(kappa1(&t, &set(&[])).unwrap(), 0);

        assert_eq!(iso_con(&t, &set(&[0])).unwrap(), (set(&[0]), set(&[])));
        assert_eq!(iso_con(&t, &set(&[0, 1])).unwrap(), (set(&[]), set(&[0, 1])));
        assert_eq!(iso_con(&t, &set(&[0, 4])).unwrap(), (set(&[0, 4]), set(&[])));

        assert_eq!(iso_exact(&t, &set(&[0])).unwrap(), Flagged { value: 4, degenerate: false });
        assert_eq!(iso_exact(&t, &set(&[0, 4])).unwrap().value, 7);
        assert_eq!(iso_exact(&t, &set(&[0, 1, 2, 3])).unwrap().value, 10);
        assert!(check_iso_exact(&t, &set(&[0, 1, 2, 3])).unwrap());
        assert_eq!(iso_exact(&t, &set(&[])).unwrap(), Flagged { value: 0, degenerate: true });
        assert!(check_iso_exact(&t, &set(&[])).unwrap());
    }

    #[test]
    fn lower_bound_examples() {
        let t = tree(3, 4);
        assert_eq!(iso_lower_bound(&t, &set(&[0]), WalkKind::Lazy).unwrap(), 4);
        assert_eq!(iso_lower_bound(&t, &set(&[0, 1]), WalkKind::Lazy).unwrap(), 6);
        assert_eq!(iso_lower_bound(&t, &set(&[0, 4]), WalkKind::Simple).unwrap(), 5);
        assert_eq!(neighborhood(&t, &set(&[0, 4]), WalkKind::Simple).unwrap().len(), 5);
        assert_eq!(iso_lower_bound(&t, &set(&[]), WalkKind::Lazy), Err(Error::EmptySet));
    }

    #[test]
    fn closed_form_examples() {
        let t = tree(3, 4);
        let five = compare_closed_form(&t, &t.quasi_ball(5).unwrap()).unwrap();
        assert_eq!(five.closed_form, vec![12, 5, 2, 1]);
        assert!(five.agrees());
        let four = compare_closed_form(&t, &t.quasi_ball(4).unwrap()).unwrap();
        assert_eq!(four.closed_form, vec![10, 4, 1, 1]);
        assert!(four.agrees());
        // Root has no parent: the formula overshoots by one at n = 0.
        let three = compare_closed_form(&t, &t.quasi_ball(3).unwrap()).unwrap();
        assert_eq!(three.closed_form, vec![8, 3, 1, 1]);
        assert_eq!(three.counted.parts(), &[8, 3, 1, 0]);
        assert!(!three.agrees());
        assert_eq!(quasi_ball_profile_closed_form(&t, &t.quasi_ball(1).unwrap()), Err(Error::TooSmall(1)));
    }

    #[test]
    fn closed_form_agrees_away_from_the_root() {
        for d in [3u32, 4, 5] {
            let t = tree(d, 5);
            for s in t.ball_size(1)..=t.ball_size(3) {
                let check = compare_closed_form(&t, &t.quasi_ball(s).unwrap()).unwrap();
                assert!(check.agrees(), "d={d} s={s}: {:?} vs {}", check.closed_form, check.counted);
            }
            for parity in [Parity::Even, Parity::Odd] {
                for s in t.half_ball_size(2)..=t.half_ball_size(3).min(40) {
                    let ball = t.half_quasi_ball(s, parity).unwrap();
                    let check = compare_half_closed_form(&t, &ball).unwrap();
                    if t.half_quasi_ball_shape(s, parity).unwrap().n >= 2 {
                        assert!(check.agrees(), "d={d} s={s} {parity:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn quasi_balls_have_k2_equal_to_themselves() {
        let t = tree(3, 5);
        for s in 2..=t.ball_size(3) {
            let ball = t.quasi_ball(s).unwrap();
            let ks = k_sets(&t, &ball.members(), WalkKind::Lazy).unwrap();
            assert_eq!(ks[1], ball.members());
        }
    }
}
