use std::hint::black_box;

use capsac_core::geometry::{enumerate_rectangles_with, CoordinateAxes};
use capsac_core::instance::{generate_grid_instance, random_tree, GridSpec, StoragePolicy};
use capsac_core::network::{mmf_allocate, Demand, DroneTree};
use capsac_core::oracle::{brute_force_optimum_with, OracleLimits};
use capsac_core::par::{self, Execution};
use capsac_core::Instance;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn grid(rows: usize, cols: usize, drones: usize, sigma: usize) -> Instance {
    generate_grid_instance(&GridSpec {
        rows,
        cols,
        drones,
        capable_count: drones,
        storage: StoragePolicy::Random,
        sigma,
        seed: 11,
        ..GridSpec::default()
    })
    .unwrap()
}

fn bench_oracle(c: &mut Criterion) {
    let inst = grid(2, 3, 3, 2);
    let limits = OracleLimits::default();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "2x3-m3-s2"), |b| {
            b.iter(|| brute_force_optimum_with(black_box(&inst), &limits, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_rectangles(c: &mut Criterion) {
    let inst = grid(24, 24, 2, 1);
    let axes = CoordinateAxes::build(&inst.photos).unwrap();
    let mut g = c.benchmark_group("rectangles");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "24x24"), |b| {
            b.iter(|| enumerate_rectangles_with(black_box(&inst.photos), &axes, true, exec).unwrap())
        });
    }
    g.finish();
}

fn mmf_cases(count: usize) -> Vec<(DroneTree, Vec<Demand>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..count)
        .map(|_| {
            let n = rng.random_range(8..40);
            let links = random_tree(n, &mut rng).into_iter().map(|(a, b)| (a, b, rng.random_range(1.0..10.0))).collect();
            let tree = DroneTree::new(n, links).unwrap();
            let demands = (0..n * 2)
                .filter_map(|_| {
                    let (source, target) = (rng.random_range(0..n), rng.random_range(0..n));
                    (source != target).then(|| Demand { source, target, volume: rng.random_range(1.0..50.0) })
                })
                .collect();
            (tree, demands)
        })
        .collect()
}

fn bench_mmf(c: &mut Criterion) {
    let cases = mmf_cases(400);
    let mut g = c.benchmark_group("mmf_batch");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, cases.len()), |b| {
            b.iter(|| par::map(exec, black_box(&cases), |(t, d)| mmf_allocate(t, d).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_oracle, bench_rectangles, bench_mmf);
criterion_main!(benches);
