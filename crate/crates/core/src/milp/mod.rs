//! Solver-agnostic MILP models.
//!
//! A [`LinearModel`] is a minimisation problem over named binary and
//! continuous variables. Models are handed to a [`MilpBackend`]: either an
//! external command-line solver driven through files ([`ExternalSolver`]) or
//! any in-process implementation.

mod external;
mod lp;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

pub use external::{parse_cbc_solution, parse_native_solution, ExternalSolver, RawSolution, SolutionDialect, SOLVER_CMD_ENV};
pub use lp::{write_lp, write_priorities};

/// Longest variable or constraint name accepted by the LP writer.
pub const MAX_NAME_LEN: usize = 255;
/// Binaries further than this from 0 or 1 are treated as a solver fault.
pub const INTEGRALITY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    /// `f64::INFINITY` for no upper bound.
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Minimisation MILP with unique, LP-safe names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearModel {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(VarId, f64)>,
    priorities: BTreeMap<VarId, i32>,
    var_names: HashMap<String, VarId>,
    row_names: HashMap<String, usize>,
}

fn check_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.len() <= MAX_NAME_LEN
        && name.starts_with(|c: char| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::Model(format!(
            "invalid name `{name}` (need 1-{MAX_NAME_LEN} chars of [A-Za-z0-9_], starting with a letter)"
        )))
    }
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> Result<VarId> {
        let name = name.into();
        check_name(&name)?;
        if self.var_names.contains_key(&name) {
            return Err(Error::Model(format!("duplicate variable `{name}`")));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::Model(format!("bad bounds [{lower}, {upper}] for `{name}`")));
        }
        let id = VarId(self.vars.len());
        self.var_names.insert(name.clone(), id);
        self.vars.push(Variable { name, kind, lower, upper });
        Ok(id)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId> {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VarId> {
        self.add_var(name, VarKind::Continuous, lower, upper)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<()> {
        let name = name.into();
        check_name(&name)?;
        if self.row_names.contains_key(&name) {
            return Err(Error::Model(format!("duplicate constraint `{name}`")));
        }
        if let Some((v, _)) = terms.iter().find(|(v, _)| v.0 >= self.vars.len()) {
            return Err(Error::Model(format!("constraint `{name}` references undeclared variable #{}", v.0)));
        }
        if !rhs.is_finite() || terms.iter().any(|(_, c)| !c.is_finite()) {
            return Err(Error::Model(format!("constraint `{name}` has a non-finite coefficient")));
        }
        self.row_names.insert(name.clone(), self.constraints.len());
        self.constraints.push(Constraint { name, terms, sense, rhs });
        Ok(())
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, f64)>) {
        self.objective = terms;
    }

    pub fn set_priority(&mut self, var: VarId, priority: i32) {
        self.priorities.insert(var, priority);
    }

    /// Pins a variable to `value` by collapsing its bounds.
    pub fn fix(&mut self, var: VarId, value: f64) {
        let v = &mut self.vars[var.0];
        v.lower = value;
        v.upper = value;
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.row_names.get(name).map(|&i| &self.constraints[i])
    }

    pub fn objective(&self) -> &[(VarId, f64)] {
        &self.objective
    }

    pub fn priorities(&self) -> &BTreeMap<VarId, i32> {
        &self.priorities
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    /// Number of variables whose name starts with `prefix`.
    pub fn count_vars(&self, prefix: &str) -> usize {
        self.vars.iter().filter(|v| v.name.starts_with(prefix)).count()
    }

    /// Number of constraints whose name starts with `prefix`.
    pub fn count_rows(&self, prefix: &str) -> usize {
        self.constraints.iter().filter(|c| c.name.starts_with(prefix)).count()
    }

    /// Objective value of a point.
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|(v, c)| c * values[v.0]).sum()
    }

    /// Largest bound or row violation of a point, 0 when feasible.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &x) in self.vars.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|(v, a)| a * values[v.0]).sum();
            let gap = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }
}

/// The same model with every binary relaxed to a continuous variable in its bounds.
pub fn lp_relaxation(model: &LinearModel) -> LinearModel {
    let mut out = model.clone();
    for v in &mut out.vars {
        v.kind = VarKind::Continuous;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// Stopped with an incumbent that is not proven optimal.
    Feasible,
    Infeasible,
    /// Hit the time limit; values are present only if an incumbent exists.
    TimeLimit,
    Error,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::Error => "error",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolveStatus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "optimal" => SolveStatus::Optimal,
            "feasible" => SolveStatus::Feasible,
            "infeasible" => SolveStatus::Infeasible,
            "time_limit" => SolveStatus::TimeLimit,
            "error" => SolveStatus::Error,
            other => return Err(Error::Model(format!("unknown solve status `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub wall_seconds: f64,
    pub nodes: Option<u64>,
    pub best_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSolution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    /// Aligned with the model's variables; `None` when no point is available.
    pub values: Option<Vec<f64>>,
    pub stats: SolveStats,
}

impl ModelSolution {
    pub fn has_point(&self) -> bool {
        self.values.is_some()
    }

    pub fn value(&self, var: VarId) -> Option<f64> {
        self.values.as_ref().map(|v| v[var.0])
    }
}

/// Anything that can solve a [`LinearModel`].
pub trait MilpBackend: Send + Sync {
    /// Short identifier for records and logs.
    fn name(&self) -> String;

    /// Solves `model`, stopping after `time_limit` seconds when given.
    fn solve(&self, model: &LinearModel, time_limit: Option<f64>) -> Result<ModelSolution>;
}

impl<B: MilpBackend + ?Sized> MilpBackend for Box<B> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn solve(&self, model: &LinearModel, time_limit: Option<f64>) -> Result<ModelSolution> {
        (**self).solve(model, time_limit)
    }
}

impl<B: MilpBackend + ?Sized> MilpBackend for std::sync::Arc<B> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn solve(&self, model: &LinearModel, time_limit: Option<f64>) -> Result<ModelSolution> {
        (**self).solve(model, time_limit)
    }
}
