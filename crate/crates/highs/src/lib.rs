//! HiGHS as a capsac MILP backend.
//!
//! [`HighsBackend`] solves a [`LinearModel`] in memory. [`solve_lp_file`]
//! reads a model from an LP file instead; the `capsac-highs-lp` adapter
//! uses it so the file-based driver can be exercised with a real solver.

use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::time::Instant;

use capsac_core::error::{Error, Result};
use capsac_core::milp::{LinearModel, MilpBackend, ModelSolution, RawSolution, Sense, SolveStats, SolveStatus, VarKind};
use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem};

/// Tolerances tight enough that small makespan differences are not rounded away.
const FEAS_TOL: f64 = 1e-9;
const GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default)]
pub struct HighsBackend {
    /// Solver threads; `None` leaves the HiGHS default.
    pub threads: Option<u32>,
}

fn map_status(status: HighsModelStatus, has_point: bool) -> SolveStatus {
    use HighsModelStatus as H;
    match status {
        H::Optimal | H::ModelEmpty => SolveStatus::Optimal,
        H::Infeasible | H::UnboundedOrInfeasible => SolveStatus::Infeasible,
        H::ReachedTimeLimit => SolveStatus::TimeLimit,
        H::ReachedIterationLimit | H::ReachedSolutionLimit | H::ReachedInterrupt | H::ReachedMemoryLimit
            if has_point =>
        {
            SolveStatus::Feasible
        }
        _ => SolveStatus::Error,
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl MilpBackend for HighsBackend {
    fn name(&self) -> String {
        "highs".into()
    }

    fn solve(&self, model: &LinearModel, time_limit: Option<f64>) -> Result<ModelSolution> {
        let mut pb = RowProblem::default();
        let mut cost = vec![0.0; model.vars().len()];
        for &(v, c) in model.objective() {
            cost[v.0] += c;
        }
        let cols: Vec<_> = model
            .vars()
            .iter()
            .zip(&cost)
            .map(|(v, &c)| match v.kind {
                VarKind::Binary => pb.add_integer_column(c, v.lower..=v.upper),
                VarKind::Continuous => pb.add_column(c, v.lower..=v.upper),
            })
            .collect();
        for row in model.constraints() {
            let terms: Vec<_> = row.terms.iter().map(|&(v, a)| (cols[v.0], a)).collect();
            match row.sense {
                Sense::Le => pb.add_row(..=row.rhs, &terms),
                Sense::Ge => pb.add_row(row.rhs.., &terms),
                Sense::Eq => pb.add_row(row.rhs..=row.rhs, &terms),
            }
        }

        let mut m = pb.optimise(highs::Sense::Minimise);
        m.make_quiet();
        m.set_option("mip_feasibility_tolerance", FEAS_TOL);
        m.set_option("primal_feasibility_tolerance", FEAS_TOL);
        m.set_option("mip_rel_gap", GAP_TOL);
        m.set_option("mip_abs_gap", GAP_TOL);
        if let Some(t) = time_limit {
            m.set_option("time_limit", t);
        }
        if let Some(n) = self.threads.and_then(std::num::NonZeroU32::new) {
            m.set_threads(n);
        }
        let start = Instant::now();
        let mut solved = m.try_solve().map_err(|e| backend_error(format!("run failed: {e:?}")))?;
        let wall_seconds = start.elapsed().as_secs_f64();

        let has_point = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
        let status = map_status(solved.status(), has_point);
        let point = has_point && matches!(status, SolveStatus::Optimal | SolveStatus::Feasible | SolveStatus::TimeLimit);
        let values = point.then(|| solved.get_solution().columns().to_vec());
        let objective = if point { Some(solved.objective_value()) } else { None };
        let nodes = node_count(solved.as_mut_ptr());
        let best_bound = if model.num_binaries() > 0 {
            solved.double_info_value(c"mip_dual_bound").ok().and_then(finite)
        } else {
            objective.filter(|_| status == SolveStatus::Optimal)
        };
        Ok(ModelSolution { status, objective, values, stats: SolveStats { wall_seconds, nodes, best_bound } })
    }
}

fn backend_error(message: String) -> Error {
    Error::Backend { command: "highs".into(), message, output: String::new() }
}

fn node_count(ptr: *mut std::ffi::c_void) -> Option<u64> {
    let mut n: i64 = -1;
    // SAFETY: `ptr` is a live Highs instance and the key names an int64 info value.
    let rc = unsafe { highs_sys::Highs_getInt64InfoValue(ptr, c"mip_node_count".as_ptr(), &mut n) };
    (rc == highs_sys::STATUS_OK && n >= 0).then_some(n as u64)
}

/// Owns a raw Highs instance for the LP-file path.
struct RawHighs(*mut std::ffi::c_void);

impl Drop for RawHighs {
    fn drop(&mut self) {
        // SAFETY: created by Highs_create and dropped once.
        unsafe { highs_sys::Highs_destroy(self.0) };
    }
}

/// Reads and solves an LP file, returning variables by name.
pub fn solve_lp_file(path: &Path, time_limit: Option<f64>) -> Result<RawSolution> {
    let cpath = CString::new(path.to_string_lossy().as_bytes())
        .map_err(|_| backend_error(format!("path {} contains NUL", path.display())))?;
    // SAFETY: every call below receives the live pointer held by `h` and
    // NUL-terminated strings that outlive the call.
    unsafe {
        let h = RawHighs(highs_sys::Highs_create());
        let set_bool = |k: &CStr, v: bool| highs_sys::Highs_setBoolOptionValue(h.0, k.as_ptr(), v as _);
        let set_double = |k: &CStr, v: f64| highs_sys::Highs_setDoubleOptionValue(h.0, k.as_ptr(), v);
        set_bool(c"output_flag", false);
        set_double(c"mip_feasibility_tolerance", FEAS_TOL);
        set_double(c"primal_feasibility_tolerance", FEAS_TOL);
        set_double(c"mip_rel_gap", GAP_TOL);
        set_double(c"mip_abs_gap", GAP_TOL);
        if let Some(t) = time_limit {
            set_double(c"time_limit", t);
        }
        if highs_sys::Highs_readModel(h.0, cpath.as_ptr()) == highs_sys::STATUS_ERROR {
            return Err(backend_error(format!("cannot read {}", path.display())));
        }
        if highs_sys::Highs_run(h.0) == highs_sys::STATUS_ERROR {
            return Err(backend_error("run failed".into()));
        }
        let raw_status = highs_sys::Highs_getModelStatus(h.0);
        let model_status = HighsModelStatus::try_from(raw_status)
            .map_err(|_| backend_error(format!("unknown model status {raw_status}")))?;
        let mut sol_status: highs_sys::HighsInt = 0;
        highs_sys::Highs_getIntInfoValue(h.0, c"primal_solution_status".as_ptr(), &mut sol_status);
        let has_point = sol_status == highs_sys::SOLUTION_STATUS_FEASIBLE as highs_sys::HighsInt;
        let status = map_status(model_status, has_point);
        let point = has_point && matches!(status, SolveStatus::Optimal | SolveStatus::Feasible | SolveStatus::TimeLimit);

        let mut values = Vec::new();
        let mut objective = None;
        if point {
            let n = highs_sys::Highs_getNumCol(h.0) as usize;
            let m = highs_sys::Highs_getNumRow(h.0) as usize;
            let mut col_value = vec![0.0; n];
            let mut col_dual = vec![0.0; n];
            let mut row_value = vec![0.0; m];
            let mut row_dual = vec![0.0; m];
            highs_sys::Highs_getSolution(
                h.0,
                col_value.as_mut_ptr(),
                col_dual.as_mut_ptr(),
                row_value.as_mut_ptr(),
                row_dual.as_mut_ptr(),
            );
            let mut buf = vec![0 as c_char; 1024];
            for (j, v) in col_value.into_iter().enumerate() {
                highs_sys::Highs_getColName(h.0, j as highs_sys::HighsInt, buf.as_mut_ptr());
                let name = CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned();
                values.push((name, v));
            }
            objective = Some(highs_sys::Highs_getObjectiveValue(h.0));
        }
        let nodes = node_count(h.0);
        let mut bound = f64::NAN;
        highs_sys::Highs_getDoubleInfoValue(h.0, c"mip_dual_bound".as_ptr(), &mut bound);
        Ok(RawSolution { status, objective, values, nodes, best_bound: finite(bound) })
    }
}

/// Writes a solution in the native text format read by the file-based driver.
pub fn format_native_solution(raw: &RawSolution) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let obj = raw.objective.map_or("-".to_string(), |o| format!("{o:.17e}"));
    let _ = writeln!(s, "{} {obj}", raw.status);
    if let Some(n) = raw.nodes {
        let _ = writeln!(s, "# nodes {n}");
    }
    if let Some(b) = raw.best_bound {
        let _ = writeln!(s, "# bound {b:.17e}");
    }
    for (name, v) in &raw.values {
        let _ = writeln!(s, "{name} {v:.17e}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use capsac_core::milp::{parse_native_solution, write_lp};

    fn knapsack() -> LinearModel {
        // max 5a + 4b + 3c st 2a + 3b + c <= 5, as a minimisation
        let mut m = LinearModel::new();
        let a = m.add_binary("a").unwrap();
        let b = m.add_binary("b").unwrap();
        let c = m.add_binary("c").unwrap();
        m.add_constraint("w", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Sense::Le, 5.0).unwrap();
        m.set_objective(vec![(a, -5.0), (b, -4.0), (c, -3.0)]);
        m
    }

    #[test]
    fn in_memory_knapsack() {
        let sol = HighsBackend::default().solve(&knapsack(), Some(10.0)).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective.unwrap() + 9.0).abs() < 1e-9);
        assert_eq!(sol.values.unwrap().iter().map(|v| v.round() as i32).collect::<Vec<_>>(), vec![1, 1, 0]);
    }

    #[test]
    fn infeasible_model() {
        let mut m = LinearModel::new();
        let x = m.add_binary("x").unwrap();
        m.add_constraint("c", vec![(x, 1.0)], Sense::Ge, 2.0).unwrap();
        let sol = HighsBackend::default().solve(&m, None).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
        assert!(sol.values.is_none());
    }

    #[test]
    fn lp_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.lp");
        std::fs::write(&path, write_lp(&knapsack())).unwrap();
        let raw = solve_lp_file(&path, Some(10.0)).unwrap();
        assert_eq!(raw.status, SolveStatus::Optimal);
        assert!((raw.objective.unwrap() + 9.0).abs() < 1e-9);
        let back = parse_native_solution(&format_native_solution(&raw)).unwrap();
        assert_eq!(back.status, raw.status);
        let get = |n: &str| back.values.iter().find(|(k, _)| k == n).unwrap().1;
        assert_eq!((get("a").round(), get("b").round(), get("c").round()), (1.0, 1.0, 0.0));
    }
}
