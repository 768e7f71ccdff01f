use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use permwalk::measure::verify::{mixture_identity_holds, proof_chain};
use permwalk::schedule::random_bijection;
use permwalk::{
    Distribution, ExactDistribution, FloatDistribution, Laziness, Parity, TreeParams, VertexId, VertexSet,
};

/// Random atoms on the first `inner` vertices.
fn atoms(inner: u64) -> impl Strategy<Value = Vec<(u64, u128)>> {
    proptest::collection::vec((0..inner, 1u128..50), 1..16)
}

fn exact(tree: TreeParams, atoms: &[(u64, u128)]) -> ExactDistribution {
    Distribution::from_weights(tree, atoms.iter().map(|&(v, w)| (VertexId(v), w))).unwrap()
}

/// The same weights placed in canonical order, or along one parity class.
fn arranged(q: &ExactDistribution, parity: Option<Parity>) -> ExactDistribution {
    let tree = *q.tree();
    let mut weights: Vec<u128> = q.atoms().map(|(_, w)| w).collect();
    weights.sort_unstable_by(|a, b| b.cmp(a));
    let place = |i: u64| match parity {
        None => VertexId(i),
        Some(p) => tree.vertex_at_parity_rank(p, i).unwrap(),
    };
    Distribution::from_weights(tree, weights.into_iter().enumerate().map(|(i, w)| (place(i as u64), w))).unwrap()
}

proptest! {
    #[test]
    fn permutations_preserve_the_rearrangement(a in atoms(22), seed in 0u64..1000) {
        let tree = TreeParams::new(3, 6).unwrap();
        let q = exact(tree, &a);
        let pi = random_bijection(3, 3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let moved = q.permute(&pi).unwrap();
        prop_assert!(q.same_rearrangement(&moved).unwrap());
        prop_assert!(q.majorizes(&moved).unwrap() && moved.majorizes(&q).unwrap());
        prop_assert_eq!(q.shannon_entropy(), moved.shannon_entropy());
    }

    #[test]
    fn greedy_arrangement_is_preserved_by_lazy_steps(a in atoms(22), half in any::<bool>(), seed in 0u64..1000) {
        let tree = TreeParams::new(3, 7).unwrap();
        let gamma = if half { Laziness::new(1, 2).unwrap() } else { Laziness::uniform(3) };
        let pi = random_bijection(3, 3, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let q = exact(tree, &a).permute(&pi).unwrap();
        let p = arranged(&q, None);
        prop_assert!(p.is_greedily_arranged() && p.majorizes(&q).unwrap());
        let (p1, q1) = (p.lazy_step(gamma).unwrap(), q.lazy_step(gamma).unwrap());
        prop_assert!(p1.is_greedily_arranged());
        prop_assert!(p1.majorizes(&q1).unwrap());
    }

    #[test]
    fn half_greedy_arrangement_is_preserved_by_simple_steps(a in atoms(22), odd in any::<bool>(), d in 3u32..5) {
        let tree = TreeParams::new(d, 8).unwrap();
        let q = exact(tree, &a);
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let p = arranged(&q, Some(parity));
        prop_assert!(p.is_half_greedily_arranged() && p.majorizes(&q).unwrap());
        let (p1, q1) = (p.simple_step().unwrap(), q.simple_step().unwrap());
        prop_assert!(p1.is_half_greedily_arranged());
        prop_assert!(p1.majorizes(&q1).unwrap());
    }

    #[test]
    fn proof_chain_holds(a in atoms(22), set in proptest::collection::btree_set(0u64..22, 1..22), d in 3u32..5) {
        let tree = TreeParams::new(d, 5).unwrap();
        let q = exact(tree, &a);
        let set: VertexSet = set.into_iter().map(VertexId).collect();
        prop_assert!(proof_chain(&q, &set).unwrap().holds().unwrap());
    }

    #[test]
    fn steps_conserve_mass(a in atoms(22), num in 3u64..10) {
        let tree = TreeParams::new(3, 6).unwrap();
        let q = exact(tree, &a);
        let gamma = Laziness::new(num, 10).unwrap();
        for next in [q.lazy_step(gamma).unwrap(), q.simple_step().unwrap()] {
            prop_assert!(next.is_normalized().unwrap());
            let float = FloatDistribution::from_exact(&next);
            prop_assert!(float.is_normalized().unwrap());
        }
        prop_assert!(mixture_identity_holds(&q, gamma).unwrap());
    }

    #[test]
    fn float_and_exact_agree(a in atoms(22)) {
        let tree = TreeParams::new(3, 6).unwrap();
        let q = exact(tree, &a);
        let p = arranged(&q, None);
        let (pf, qf) = (FloatDistribution::from_exact(&p), FloatDistribution::from_exact(&q));
        let (p2, q2) = (p.lazy_step(Laziness::uniform(3)).unwrap(), q.lazy_step(Laziness::uniform(3)).unwrap());
        let (pf2, qf2) = (pf.lazy_step(Laziness::uniform(3)).unwrap(), qf.lazy_step(Laziness::uniform(3)).unwrap());
        prop_assert_eq!(p2.majorizes(&q2).unwrap(), pf2.majorizes(&qf2).unwrap());
        prop_assert!((p2.shannon_entropy() - pf2.shannon_entropy()).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip(a in atoms(22)) {
        let tree = TreeParams::new(3, 6).unwrap();
        let q = exact(tree, &a);
        prop_assert_eq!(&ExactDistribution::from_json(tree, &q.to_json()).unwrap(), &q);
    }
}
