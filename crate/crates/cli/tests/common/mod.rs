//! Instance suites and backends shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use capsac_core::instance::{generate_grid_instance, GridSpec, StoragePolicy};
use capsac_core::milp::ExternalSolver;
use capsac_core::{Deadline, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-6;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// The file-based driver running the bundled HiGHS adapter.
pub fn external_highs() -> ExternalSolver {
    let template = format!("{} {{model}} {{solution}} {{time_limit}}", env!("CARGO_BIN_EXE_capsac-highs-lp"));
    ExternalSolver::new(&template).expect("valid template")
}

/// Random grids of at most 3x3 photos with 1 to 3 capable drones, random
/// storage, capacities and half-integer processing times.
pub fn random_suite(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let rows = rng.random_range(1..=3);
            let cols = rng.random_range(1..=3);
            let m = rng.random_range(1..=3);
            let drones = m + rng.random_range(0..=1);
            let spec = GridSpec {
                rows,
                cols,
                drones,
                capable_count: m,
                capacity: [1.0, 2.0, 10.0][rng.random_range(0..3)],
                storage: StoragePolicy::Random,
                lambda: 1.0,
                mu: 1.0,
                sigma: 1,
                t_hat: Deadline::Unbounded,
                seed: rng.random(),
                name: Some(format!("s{i}-{rows}x{cols}-m{m}")),
                ..GridSpec::default()
            };
            let mut inst = generate_grid_instance(&spec).expect("valid spec");
            for p in &mut inst.photos {
                p.lambda = f64::from(rng.random_range(2..=8u32)) / 2.0;
                p.mu = f64::from(rng.random_range(1..=3u32));
            }
            inst
        })
        .collect()
}

/// True when some region could be empty in the photo-based model, i.e. the
/// photos span more than one coordinate on some axis.
pub fn has_two_coordinates(inst: &Instance) -> bool {
    let first = &inst.photos[0].location;
    inst.photos.iter().any(|p| p.location.lng != first.lng || p.location.lat != first.lat)
}
