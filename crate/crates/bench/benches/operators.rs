use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use permwalk::measure::{ExactDistribution, Laziness};
use permwalk::rng::stream;
use permwalk::schedule::random_bijection_schedule;
use permwalk::sets::k_profile;
use permwalk::walks::{simulate, SimConfig};
use permwalk::{TreeParams, VertexId, VertexSet, WalkKind};

fn k_profiles(c: &mut Criterion) {
    let tree = TreeParams::new(3, 3).unwrap();
    let ball: Vec<VertexId> = (0..10).map(VertexId).collect();
    c.bench_function("k_profile/all subsets of B2, d=3", |b| {
        b.iter(|| {
            for mask in 1u32..1 << 10 {
                let set: VertexSet = ball.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
                black_box(k_profile(&tree, &set, WalkKind::Lazy).unwrap());
            }
        })
    });
}

fn exact_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact lazy chain");
    for horizon in [4usize, 8] {
        let mut rng = stream(1, 0);
        let schedule = random_bijection_schedule(3, 10, horizon, &mut rng).unwrap();
        let tree = TreeParams::new(3, schedule.required_depth_cap(horizon).unwrap()).unwrap();
        let gamma = Laziness::uniform(3);
        group.bench_with_input(BenchmarkId::from_parameter(horizon), &horizon, |b, &h| {
            b.iter(|| {
                let mut q = ExactDistribution::point(tree, VertexId::ROOT).unwrap();
                for t in 1..=h {
                    q = q.lazy_step(gamma).unwrap().permute(schedule.get(t)).unwrap();
                }
                black_box(q.support_size())
            })
        });
    }
    group.finish();
}

fn walks(c: &mut Criterion) {
    let config = SimConfig {
        d: 3,
        kind: WalkKind::Lazy,
        gamma: Laziness::uniform(3),
        horizon: 100_000,
        record_positions: None,
    };
    c.bench_function("simulate lazy d=3, 1e5 steps", |b| {
        b.iter(|| black_box(simulate(&config, None, 7, 0).unwrap().speed()))
    });
}

criterion_group!(benches, k_profiles, exact_steps, walks);
criterion_main!(benches);
