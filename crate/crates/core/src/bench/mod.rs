//! Benchmark runs, performance profiles, sensitivity sweeps and plot output.
//!
//! Every CSV starts with a `# capsac-<kind> v<N>` comment line naming its
//! schema; readers skip `#` lines.

mod plot;
mod profile;
mod sweep;

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

pub use plot::{plot_document, profile_svg, sweep_svg, PlotData};
pub use profile::{performance_profile, profile_ratios, ProfileTable};
pub use sweep::{sigma_sweep, t_hat_sweep, SweepKind, SweepRow, SweepTable, DEFAULT_T_HAT_STEP};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::milp::{lp_relaxation, MilpBackend, SolveStatus};
use crate::par;
use crate::solver::{build_model, Formulation};

pub const RUNS_SCHEMA: &str = "capsac-runs v1";

/// One (instance, formulation) benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub formulation: String,
    pub config: String,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub lp_bound: Option<f64>,
    /// Percent, `(objective - LP bound) / objective`.
    pub gap0: Option<f64>,
    /// Percent at termination.
    pub gap: Option<f64>,
    pub root_seconds: f64,
    pub total_seconds: f64,
    pub nodes: Option<u64>,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

fn relative_gap(objective: f64, bound: f64) -> f64 {
    if objective.abs() <= f64::EPSILON {
        0.0
    } else {
        ((objective - bound) / objective.abs() * 100.0).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub time_limit: Option<f64>,
    /// Concurrent runs; 1 runs sequentially.
    pub workers: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { time_limit: None, workers: 1 }
    }
}

fn instance_label(inst: &Instance, i: usize) -> String {
    inst.name.clone().unwrap_or_else(|| format!("instance{}", i + 1))
}

fn run_one(inst: &Instance, label: &str, f: &Formulation, backend: &dyn MilpBackend, opts: &BenchOptions) -> RunRecord {
    let config = format!(
        "sigma={};t_hat={};time_limit={}",
        inst.sigma,
        inst.t_hat,
        opts.time_limit.map_or("none".to_string(), |t| t.to_string())
    );
    let mut rec = RunRecord {
        instance: label.to_string(),
        formulation: f.tag(),
        config,
        status: SolveStatus::Error,
        objective: None,
        lp_bound: None,
        gap0: None,
        gap: None,
        root_seconds: 0.0,
        total_seconds: 0.0,
        nodes: None,
    };
    let built = match build_model(inst, f) {
        Ok(b) => b,
        Err(_) => return rec,
    };
    let start = Instant::now();
    if let Ok(lp) = backend.solve(&lp_relaxation(&built.model), opts.time_limit) {
        if lp.status == SolveStatus::Optimal {
            rec.lp_bound = lp.objective;
        }
    }
    rec.root_seconds = start.elapsed().as_secs_f64();
    let Ok(sol) = backend.solve(&built.model, opts.time_limit) else {
        return rec;
    };
    rec.status = sol.status;
    rec.total_seconds = sol.stats.wall_seconds;
    rec.nodes = sol.stats.nodes;
    rec.objective = sol.objective;
    if let Some(obj) = sol.objective {
        let lp = rec.lp_bound;
        rec.gap0 = lp.map(|b| relative_gap(obj, b));
        let bound = match (sol.status, sol.stats.best_bound) {
            (SolveStatus::Optimal, _) => Some(obj),
            (_, Some(b)) => Some(lp.map_or(b, |l| b.max(l))),
            (_, None) => lp,
        };
        rec.gap = bound.map(|b| relative_gap(obj, b));
    }
    rec
}

/// Runs every formulation on every instance. Failures become records with
/// status `error`. Output is sorted by instance label, then formulation tag.
pub fn run_benchmark(
    instances: &[Instance],
    formulations: &[Formulation],
    backend: Arc<dyn MilpBackend>,
    opts: &BenchOptions,
) -> Vec<RunRecord> {
    let jobs: Vec<(usize, Formulation)> = (0..instances.len())
        .flat_map(|i| formulations.iter().map(move |f| (i, *f)))
        .collect();
    let mut records = par::map_with_workers(opts.workers.max(1), &jobs, |(i, f)| {
        let inst = &instances[*i];
        run_one(inst, &instance_label(inst, *i), f, backend.as_ref(), opts)
    });
    records.sort_by(|a, b| (&a.instance, &a.formulation).cmp(&(&b.instance, &b.formulation)));
    records
}

/// Writes rows as CSV under a schema comment line.
pub fn write_csv<T: Serialize, W: Write>(schema: &str, rows: &[T], out: W) -> Result<()> {
    let mut out = out;
    writeln!(out, "# {schema}").map_err(|e| Error::io("<csv>", e))?;
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn csv_string<T: Serialize>(schema: &str, rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(schema, rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Schema name from the leading comment line, if any.
pub fn csv_schema(text: &str) -> Option<&str> {
    text.lines().next()?.strip_prefix("# ").map(str::trim)
}

/// Reads rows, checking the schema line when present.
pub fn read_csv<T: DeserializeOwned>(schema: &str, text: &str) -> Result<Vec<T>> {
    if let Some(found) = csv_schema(text) {
        if found != schema {
            return Err(Error::Bench(format!("expected CSV schema `{schema}`, found `{found}`")));
        }
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
