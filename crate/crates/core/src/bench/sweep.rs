//! Sensitivity sweeps over the reliability factor and the transfer deadline.

use serde::{Deserialize, Serialize};

use super::{csv_string, read_csv};
use crate::error::{Error, Result};
use crate::eval::validate;
use crate::instance::{Deadline, Instance};
use crate::milp::SolveStatus;
use crate::solver::CapsacSolver;

/// Deadline decrement used in the sensitivity study.
pub const DEFAULT_T_HAT_STEP: f64 = 0.5;

const MONOTONE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Sigma,
    THat,
}

impl SweepKind {
    pub fn schema(self) -> &'static str {
        match self {
            SweepKind::Sigma => "capsac-sweep-sigma v1",
            SweepKind::THat => "capsac-sweep-that v1",
        }
    }

    pub fn param_name(self) -> &'static str {
        match self {
            SweepKind::Sigma => "sigma",
            SweepKind::THat => "t_hat",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Sigma or deadline seconds.
    pub param: f64,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
    /// Broken shape expectations, one line each.
    pub warnings: Vec<String>,
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let text = csv_string(self.kind.schema(), &self.rows)?;
        // first column carries the swept parameter's name
        Ok(text.replacen("\nparam,", &format!("\n{},", self.kind.param_name()), 1))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let kind = match super::csv_schema(text) {
            Some(s) if s == SweepKind::Sigma.schema() => SweepKind::Sigma,
            Some(s) if s == SweepKind::THat.schema() => SweepKind::THat,
            other => return Err(Error::Bench(format!("not a sweep CSV (schema {other:?})"))),
        };
        let normalised = text.replacen(&format!("\n{},", kind.param_name()), "\nparam,", 1);
        let rows = read_csv(kind.schema(), &normalised)?;
        Ok(SweepTable { kind, rows, warnings: vec![] })
    }

    pub fn feasible(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.objective.is_some())
    }
}

fn check_non_decreasing(rows: &[SweepRow], what: &str) -> Vec<String> {
    let feasible: Vec<&SweepRow> = rows.iter().filter(|r| r.objective.is_some()).collect();
    feasible
        .windows(2)
        .filter(|w| w[1].objective.unwrap() < w[0].objective.unwrap() - MONOTONE_TOL)
        .map(|w| {
            format!(
                "objective decreased from {} to {} between {what} {} and {}",
                w[0].objective.unwrap(),
                w[1].objective.unwrap(),
                w[0].param,
                w[1].param
            )
        })
        .collect()
}

fn row(param: f64, out: &crate::solver::SolveOutcome) -> SweepRow {
    SweepRow { param, status: out.status, objective: out.objective(), bound: out.stats.best_bound }
}

/// One solve per sigma. Objectives should not decrease as sigma grows.
pub fn sigma_sweep(inst: &Instance, solver: &dyn CapsacSolver, sigmas: &[usize]) -> Result<SweepTable> {
    let m = inst.m();
    let mut rows = Vec::with_capacity(sigmas.len());
    for &s in sigmas {
        if s == 0 || s > m {
            return Err(Error::Bench(format!("sigma {s} outside 1..={m}")));
        }
        rows.push(row(s as f64, &solver.solve(&inst.with_sigma(s))?));
    }
    let warnings = check_non_decreasing(&rows, "sigma");
    Ok(SweepTable { kind: SweepKind::Sigma, rows, warnings })
}

/// Deadline sweep. The first row is the unconstrained optimum placed at its
/// own largest transfer time; the deadline then drops by `step` until the
/// instance becomes infeasible or the deadline reaches zero.
pub fn t_hat_sweep(inst: &Instance, solver: &dyn CapsacSolver, step: f64) -> Result<SweepTable> {
    if !(step > 0.0) {
        return Err(Error::Bench(format!("step must be positive, got {step}")));
    }
    let free = inst.with_t_hat(Deadline::Unbounded);
    let first = solver.solve(&free)?;
    let Some(sol) = &first.solution else {
        let rows = vec![SweepRow { param: f64::INFINITY, status: first.status, objective: None, bound: None }];
        return Ok(SweepTable { kind: SweepKind::THat, rows, warnings: vec![] });
    };
    let start = validate(&free, sol)?.max_transmission_time();
    let mut rows = vec![row(start, &first)];
    let mut k = 1u32;
    loop {
        let t = start - f64::from(k) * step;
        if t <= 0.0 {
            break;
        }
        let out = solver.solve(&inst.with_t_hat(Deadline::Seconds(t)))?;
        let r = row(t, &out);
        let stop = r.objective.is_none();
        rows.push(r);
        if stop {
            break;
        }
        k += 1;
    }
    let warnings = check_non_decreasing(&rows, "t_hat");
    Ok(SweepTable { kind: SweepKind::THat, rows, warnings })
}
