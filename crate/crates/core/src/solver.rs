//! End-to-end solvers: build a formulation, solve it, decode the result.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use crate::error::Result;
use crate::instance::Instance;
use crate::milp::{LinearModel, MilpBackend, ModelSolution, SolveStats, SolveStatus};
use crate::oracle::{brute_force_optimum_with, OracleLimits};
use crate::par::Execution;
use crate::pcapsac::{build_pcapsac, decode_pcapsac, PcapsacConfig, PcapsacIndex};
use crate::rcapsac::{build_rcapsac, decode_rcapsac, RcapsacConfig, RcapsacIndex, SubsetCatalog};
use crate::solution::CapsacSolution;

/// A formulation and its switches. Sigma and the deadline always come from
/// the instance being solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Formulation {
    Pcapsac(PcapsacConfig),
    Rcapsac { empty_subset: bool },
}

impl Formulation {
    pub fn tag(&self) -> String {
        match self {
            Formulation::Pcapsac(cfg) => cfg.tag(),
            Formulation::Rcapsac { empty_subset: true } => "rb".into(),
            Formulation::Rcapsac { empty_subset: false } => "rb-noempty".into(),
        }
    }
}

impl std::str::FromStr for Formulation {
    type Err = crate::error::Error;

    /// Inverse of [`Formulation::tag`]. Sigma and deadline are left at 1 and
    /// unbounded; [`build_model`] replaces them with the instance's.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || crate::error::Error::Model(format!("unknown formulation tag `{s}`"));
        match s {
            "rb" => return Ok(Formulation::Rcapsac { empty_subset: true }),
            "rb-noempty" => return Ok(Formulation::Rcapsac { empty_subset: false }),
            _ => {}
        }
        let rest = s.strip_prefix("pb-").ok_or_else(bad)?;
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let mut cfg = PcapsacConfig {
            bc_variant: rest[..end].parse()?,
            ordering_cuts: false,
            symmetry_breaking: true,
            branch_priority: Default::default(),
            sigma: 1,
            t_hat: crate::instance::Deadline::Unbounded,
        };
        let mut tail = &rest[end..];
        if let Some(t) = tail.strip_prefix("+ord") {
            cfg.ordering_cuts = true;
            tail = t;
        }
        if let Some(t) = tail.strip_prefix("-nosym") {
            cfg.symmetry_breaking = false;
            tail = t;
        }
        if let Some(p) = tail.strip_prefix('+') {
            cfg.branch_priority = p.parse().map_err(|_| bad())?;
            if cfg.branch_priority == Default::default() {
                return Err(bad());
            }
        } else if !tail.is_empty() {
            return Err(bad());
        }
        Ok(Formulation::Pcapsac(cfg))
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelIndex {
    Pcapsac(PcapsacIndex),
    Rcapsac { index: RcapsacIndex, catalog: SubsetCatalog },
}

/// A built model together with what is needed to decode its solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltModel {
    pub model: LinearModel,
    pub index: ModelIndex,
}

impl BuiltModel {
    pub fn decode(&self, sol: &ModelSolution, inst: &Instance) -> Result<CapsacSolution> {
        match &self.index {
            ModelIndex::Pcapsac(idx) => decode_pcapsac(sol, idx, inst),
            ModelIndex::Rcapsac { index, catalog } => decode_rcapsac(sol, index, catalog),
        }
    }

    pub fn transfer(&self) -> Option<&crate::transfer::TransferIndex> {
        match &self.index {
            ModelIndex::Pcapsac(idx) => idx.transfer.as_ref(),
            ModelIndex::Rcapsac { index, .. } => index.transfer.as_ref(),
        }
    }
}

pub fn build_model(inst: &Instance, formulation: &Formulation) -> Result<BuiltModel> {
    match formulation {
        Formulation::Pcapsac(cfg) => {
            let cfg = PcapsacConfig { sigma: inst.sigma, t_hat: inst.t_hat, ..*cfg };
            let (model, idx) = build_pcapsac(inst, &cfg)?;
            Ok(BuiltModel { model, index: ModelIndex::Pcapsac(idx) })
        }
        Formulation::Rcapsac { empty_subset } => {
            let catalog = SubsetCatalog::build(inst, *empty_subset)?;
            let (model, index) = build_rcapsac(inst, &catalog, &RcapsacConfig::for_instance(inst))?;
            Ok(BuiltModel { model, index: ModelIndex::Rcapsac { index, catalog } })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub solution: Option<CapsacSolution>,
    pub stats: SolveStats,
}

impl SolveOutcome {
    pub fn objective(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.objective)
    }
}

pub trait CapsacSolver: Send + Sync {
    fn name(&self) -> String;
    fn solve(&self, inst: &Instance) -> Result<SolveOutcome>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleSolver {
    pub limits: OracleLimits,
    pub exec: Execution,
}

impl CapsacSolver for OracleSolver {
    fn name(&self) -> String {
        "oracle".into()
    }

    fn solve(&self, inst: &Instance) -> Result<SolveOutcome> {
        let start = Instant::now();
        let solution = brute_force_optimum_with(inst, &self.limits, self.exec)?;
        let status = if solution.is_some() { SolveStatus::Optimal } else { SolveStatus::Infeasible };
        let stats = SolveStats {
            wall_seconds: start.elapsed().as_secs_f64(),
            nodes: None,
            best_bound: solution.as_ref().map(|s| s.objective),
        };
        Ok(SolveOutcome { status, solution, stats })
    }
}

#[derive(Clone)]
pub struct MilpSolver {
    pub formulation: Formulation,
    pub backend: Arc<dyn MilpBackend>,
    pub time_limit: Option<f64>,
}

impl MilpSolver {
    /// Solves and also returns the built model and the raw backend answer.
    pub fn solve_detailed(&self, inst: &Instance) -> Result<(BuiltModel, ModelSolution, Option<CapsacSolution>)> {
        let built = build_model(inst, &self.formulation)?;
        let raw = self.backend.solve(&built.model, self.time_limit)?;
        let decoded = if raw.has_point() { Some(built.decode(&raw, inst)?) } else { None };
        Ok((built, raw, decoded))
    }
}

impl CapsacSolver for MilpSolver {
    fn name(&self) -> String {
        format!("{}@{}", self.formulation.tag(), self.backend.name())
    }

    fn solve(&self, inst: &Instance) -> Result<SolveOutcome> {
        let (_, raw, solution) = self.solve_detailed(inst)?;
        Ok(SolveOutcome { status: raw.status, solution, stats: raw.stats })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::t4;

    #[test]
    fn oracle_solver() {
        let out = OracleSolver::default().solve(&t4()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective(), Some(2.0));
    }

    #[test]
    fn built_models_follow_instance_sigma() {
        let inst = t4().with_sigma(2);
        let f = Formulation::Pcapsac(PcapsacConfig::for_instance(&t4()));
        let built = build_model(&inst, &f).unwrap();
        assert_eq!(built.model.constraint("rel_r0").unwrap().rhs, 2.0);
        assert_eq!(f.tag(), "pb-bc0bar");
        let r = build_model(&inst, &Formulation::Rcapsac { empty_subset: true }).unwrap();
        assert!(matches!(r.index, ModelIndex::Rcapsac { .. }));
    }

    #[test]
    fn tags_parse_back() {
        for tag in ["rb", "rb-noempty", "pb-bc0", "pb-bc0bar+ord", "pb-bc0-nosym", "pb-bc0bar+ord-nosym+by", "pb-bc0+yb"] {
            let f: Formulation = tag.parse().unwrap();
            assert_eq!(f.tag(), tag);
        }
        for bad in ["pb", "pb-bc1", "pb-bc0+default", "pb-bc0-nosym+ord", "rb+ord", "pb-bc0+ordx"] {
            assert!(bad.parse::<Formulation>().is_err(), "{bad}");
        }
    }
}
