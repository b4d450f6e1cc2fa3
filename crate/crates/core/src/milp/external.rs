//! File-based driver for command-line MILP solvers.
//!
//! The model is written as an LP file into a fresh temporary directory, the
//! backend command is run, and the solution file it leaves behind is parsed.
//! The command is a template whose whitespace-separated tokens may contain
//! the placeholders `{model}`, `{solution}`, `{time_limit}` and `{priorities}`.
//!
//! The native solution format is
//!
//! ```text
//! <status> <objective|->
//! # nodes <n>          (optional)
//! # bound <value>      (optional)
//! <name> <value>
//! ...
//! ```
//!
//! with status one of `optimal`, `feasible`, `infeasible`, `time_limit`,
//! `error`. A template prefixed with `cbc:` is read in CBC's own solution
//! format instead.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use super::{write_lp, write_priorities, LinearModel, MilpBackend, ModelSolution, SolveStats, SolveStatus};
use crate::error::{Error, Result};

/// Environment variable holding the default backend command template.
pub const SOLVER_CMD_ENV: &str = "CAPSAC_SOLVER_CMD";

/// Stand-in for "no limit" when a template needs a number.
const NO_LIMIT_SECONDS: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionDialect {
    Native,
    Cbc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalSolver {
    template: String,
    dialect: SolutionDialect,
}

/// Solution file contents before names are resolved against a model.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSolution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: Vec<(String, f64)>,
    pub nodes: Option<u64>,
    pub best_bound: Option<f64>,
}

impl ExternalSolver {
    pub fn new(template: &str) -> Result<Self> {
        let (dialect, body) = match template.trim().strip_prefix("cbc:") {
            Some(rest) => (SolutionDialect::Cbc, rest.trim()),
            None => (SolutionDialect::Native, template.trim()),
        };
        if body.is_empty() {
            return Err(Error::Model("empty solver command template".into()));
        }
        if !body.contains("{model}") || !body.contains("{solution}") {
            return Err(Error::Model(format!(
                "solver template `{body}` must mention {{model}} and {{solution}}"
            )));
        }
        Ok(ExternalSolver { template: body.to_string(), dialect })
    }

    /// Backend from `CAPSAC_SOLVER_CMD`, if set.
    pub fn from_env() -> Option<Result<Self>> {
        std::env::var(SOLVER_CMD_ENV).ok().map(|t| ExternalSolver::new(&t))
    }

    pub fn template(&self) -> &str {
        &self.template
    }

    fn command_line(&self, dir: &Path, time_limit: Option<f64>) -> Vec<String> {
        let limit = time_limit.unwrap_or(NO_LIMIT_SECONDS);
        let path = |f: &str| dir.join(f).to_string_lossy().into_owned();
        self.template
            .split_whitespace()
            .map(|tok| {
                tok.replace("{model}", &path("model.lp"))
                    .replace("{solution}", &path("solution.txt"))
                    .replace("{priorities}", &path("model.ord"))
                    .replace("{time_limit}", &limit.to_string())
            })
            .collect()
    }
}

impl MilpBackend for ExternalSolver {
    fn name(&self) -> String {
        self.template.split_whitespace().next().unwrap_or("external").to_string()
    }

    fn solve(&self, model: &LinearModel, time_limit: Option<f64>) -> Result<ModelSolution> {
        let dir = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
        let lp_path = dir.path().join("model.lp");
        std::fs::write(&lp_path, write_lp(model)).map_err(|e| Error::io(&lp_path, e))?;
        if self.template.contains("{priorities}") {
            let ord = dir.path().join("model.ord");
            std::fs::write(&ord, write_priorities(model)).map_err(|e| Error::io(&ord, e))?;
        }
        let argv = self.command_line(dir.path(), time_limit);
        let backend_err = |message: String, output: String| Error::Backend {
            command: argv.join(" "),
            message,
            output,
        };

        let start = Instant::now();
        let output = Command::new(&argv[0])
            .args(&argv[1..])
            .current_dir(dir.path())
            .output()
            .map_err(|e| backend_err(format!("cannot run `{}`: {e}", argv[0]), String::new()))?;
        let wall_seconds = start.elapsed().as_secs_f64();
        let captured = format!(
            "{}{}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        );
        if !output.status.success() {
            return Err(backend_err(format!("exited with {}", output.status), captured));
        }
        let sol_path = dir.path().join("solution.txt");
        let text = std::fs::read_to_string(&sol_path)
            .map_err(|e| backend_err(format!("no solution file: {e}"), captured.clone()))?;
        let raw = match self.dialect {
            SolutionDialect::Native => parse_native_solution(&text),
            SolutionDialect::Cbc => parse_cbc_solution(&text),
        }
        .map_err(|e| backend_err(e.to_string(), captured.clone()))?;
        resolve(model, raw, wall_seconds).map_err(|e| backend_err(e.to_string(), captured))
    }
}

fn resolve(model: &LinearModel, raw: RawSolution, wall_seconds: f64) -> Result<ModelSolution> {
    let has_point = match raw.status {
        SolveStatus::Optimal | SolveStatus::Feasible => true,
        SolveStatus::TimeLimit => !raw.values.is_empty(),
        SolveStatus::Infeasible | SolveStatus::Error => false,
    };
    let values = if has_point {
        let mut values: Vec<f64> = vec![0.0; model.vars().len()];
        for (name, v) in &raw.values {
            let id = model
                .var_id(name)
                .ok_or_else(|| Error::Model(format!("solution mentions unknown variable `{name}`")))?;
            values[id.0] = *v;
        }
        Some(values)
    } else {
        None
    };
    let objective = match (&values, raw.objective) {
        (Some(vals), None) => Some(model.evaluate(vals)),
        (Some(_), obj) => obj,
        (None, _) => None,
    };
    Ok(ModelSolution {
        status: raw.status,
        objective,
        values,
        stats: SolveStats { wall_seconds, nodes: raw.nodes, best_bound: raw.best_bound },
    })
}

fn parse_number(tok: &str, what: &str) -> Result<f64> {
    match tok {
        "-" | "none" => Ok(f64::NAN),
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| Error::Model(format!("bad {what} `{t}`"))),
    }
}

pub fn parse_native_solution(text: &str) -> Result<RawSolution> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Model("empty solution file".into()))?;
    let mut head = header.split_whitespace();
    let status: SolveStatus = head.next().unwrap_or_default().parse()?;
    let objective = match head.next() {
        Some(t) => Some(parse_number(t, "objective")?).filter(|v| !v.is_nan()),
        None => None,
    };
    let mut raw = RawSolution { status, objective, values: Vec::new(), nodes: None, best_bound: None };
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["#", "nodes", n] => raw.nodes = n.parse().ok(),
            ["#", "bound", b] => raw.best_bound = Some(parse_number(b, "bound")?).filter(|v| v.is_finite()),
            ["#", ..] => {}
            [name, value] => raw.values.push((name.to_string(), parse_number(value, "value")?)),
            _ => return Err(Error::Model(format!("unparsable solution line `{line}`"))),
        }
    }
    Ok(raw)
}

/// Reads a CBC `solu` file.
pub fn parse_cbc_solution(text: &str) -> Result<RawSolution> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Model("empty CBC solution file".into()))?;
    let lower = header.to_ascii_lowercase();
    let objective = lower
        .rsplit_once("objective value")
        .and_then(|(_, v)| v.trim().parse::<f64>().ok());
    let no_incumbent = lower.contains("no integer solution");
    let status = if lower.starts_with("optimal") {
        SolveStatus::Optimal
    } else if lower.contains("infeasible") && !lower.starts_with("stopped") {
        SolveStatus::Infeasible
    } else if lower.contains("stopped on time") {
        SolveStatus::TimeLimit
    } else if lower.starts_with("stopped") {
        if no_incumbent { SolveStatus::Error } else { SolveStatus::Feasible }
    } else {
        SolveStatus::Error
    };
    let mut values = Vec::new();
    if !no_incumbent {
        for line in lines {
            let mut toks: Vec<&str> = line.split_whitespace().collect();
            if toks.first() == Some(&"**") {
                toks.remove(0);
            }
            if toks.len() < 3 {
                return Err(Error::Model(format!("unparsable CBC line `{line}`")));
            }
            let value = parse_number(toks[2], "value")?;
            values.push((toks[1].to_string(), value));
        }
    }
    Ok(RawSolution {
        status,
        objective: if status == SolveStatus::Infeasible { None } else { objective },
        values,
        nodes: None,
        best_bound: None,
    })
}
