//! Small reference instances used by tests, docs and the CLI.

use crate::instance::{generate_grid_instance, Deadline, GridSpec, Instance};

/// The 2x2 grid with two capable drones: unit processing times, unit photo
/// sizes, unit link capacity, left column stored on `d1`, right on `d2`.
pub fn t4() -> Instance {
    generate_grid_instance(&GridSpec {
        rows: 2,
        cols: 2,
        spacing: 1.0,
        drones: 2,
        capable_count: 2,
        capacity: 1.0,
        lambda: 1.0,
        mu: 1.0,
        sigma: 1,
        t_hat: Deadline::Unbounded,
        seed: 7,
        name: Some("T4".into()),
        ..GridSpec::default()
    })
    .expect("T4 spec is valid")
}
