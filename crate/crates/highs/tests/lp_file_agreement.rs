use capsac_core::instance::{generate_grid_instance, GridSpec, StoragePolicy};
use capsac_core::milp::{write_lp, MilpBackend, SolveStatus};
use capsac_core::pcapsac::PcapsacConfig;
use capsac_core::solver::{build_model, Formulation};
use capsac_core::Deadline;
use capsac_highs::{solve_lp_file, HighsBackend};

#[test]
fn in_memory_and_lp_file_solves_agree() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..4u64 {
        let inst = generate_grid_instance(&GridSpec {
            rows: 2,
            cols: 2 + seed as usize % 2,
            drones: 3,
            capable_count: 2,
            storage: StoragePolicy::Random,
            sigma: 1 + seed as usize % 2,
            t_hat: if seed == 3 { Deadline::Seconds(20.0) } else { Deadline::Unbounded },
            seed,
            ..GridSpec::default()
        })
        .unwrap();
        let mut pcfg = PcapsacConfig::for_instance(&inst);
        if inst.t_hat.is_bounded() {
            pcfg.symmetry_breaking = false;
        }
        for form in [Formulation::Pcapsac(pcfg), Formulation::Rcapsac { empty_subset: true }] {
            let built = build_model(&inst, &form).unwrap();
            let mem = HighsBackend::default().solve(&built.model, Some(60.0)).unwrap();
            assert_eq!(mem.status, SolveStatus::Optimal, "seed {seed} {}", form.tag());

            let path = dir.path().join(format!("m{seed}-{}.lp", form.tag()));
            std::fs::write(&path, write_lp(&built.model)).unwrap();
            let raw = solve_lp_file(&path, Some(60.0)).unwrap();
            assert_eq!(raw.status, SolveStatus::Optimal);
            let (a, b) = (mem.objective.unwrap(), raw.objective.unwrap());
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "seed {seed} {}: {a} vs {b}", form.tag());

            // the file solution, mapped back by name, scores the same objective
            let mut values = vec![0.0; built.model.vars().len()];
            for (name, v) in &raw.values {
                values[built.model.var_id(name).expect("known variable").0] = *v;
            }
            assert!((built.model.evaluate(&values) - b).abs() <= 1e-6 * b.abs().max(1.0));
        }
    }
}
