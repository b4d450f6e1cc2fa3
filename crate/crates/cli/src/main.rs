//! `capsac`: generate, build, solve and benchmark covering-assignment instances.
//!
//! Exit codes: 0 on success, 2 when the answer is an expected negative
//! (no feasible covering, a violated solution, a "no" set-cover answer),
//! 1 on errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use capsac_core::bench::{
    csv_string, performance_profile, plot_document, read_csv, run_benchmark, sigma_sweep, t_hat_sweep, BenchOptions,
    RunRecord, SweepTable, DEFAULT_T_HAT_STEP, RUNS_SCHEMA,
};
use capsac_core::eval::{makespan, validate};
use capsac_core::gscp::{answer_gscp, parse_gscp, reduce_to_capsac, GscpMethod};
use capsac_core::instance::{
    apply_weighted_recipe, generate_grid_instance, parse_instance, write_instance, GridSpec, StoragePolicy,
    DEFAULT_WEIGHT_STDDEV,
};
use capsac_core::milp::{write_lp, write_priorities, ExternalSolver, MilpBackend, SolveStatus, SOLVER_CMD_ENV};
use capsac_core::oracle::OracleLimits;
use capsac_core::pcapsac::{BcVariant, BranchPriority, PcapsacConfig};
use capsac_core::solver::{build_model, CapsacSolver, Formulation, MilpSolver, OracleSolver};
use capsac_core::{CapsacSolution, Deadline, Error, Instance, Result};
use capsac_highs::HighsBackend;
use clap::{Args, Parser, Subcommand, ValueEnum};

const ORD_UNDER_DEADLINE: &str = "ordering cuts forbid empty regions and may cut off the optimum under a deadline";

#[derive(Parser, Debug)]
#[command(name = "capsac", version, about = "Covering-assignment problems for swarm-powered ad-hoc clouds")]
struct Cli {
    /// Seed for generators and random trees.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Per-solve time limit in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,

    /// MILP backend command template; overrides CAPSAC_SOLVER_CMD. `highs` selects the built-in solver.
    #[arg(long, global = true)]
    solver_cmd: Option<String>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a grid instance, from a family name like u-P9D3%D100 or explicit sizes.
    Gen(GenArgs),
    /// Apply the weighted recipe to an instance.
    Weight {
        instance: PathBuf,
        /// Mean processing time of a weighted block (defaults to the instance's mean lambda).
        #[arg(long)]
        mean: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_WEIGHT_STDDEV)]
        stddev: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the MILP of an instance as an LP file.
    Build {
        instance: PathBuf,
        #[command(flatten)]
        form: FormArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write branching priorities here.
        #[arg(long)]
        priorities: Option<PathBuf>,
    },
    /// Solve an instance with the MILP backend and print the solution document.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        form: FormArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact optimum by enumeration (small instances only).
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        sigma: Option<usize>,
        #[arg(long, value_name = "X|inf")]
        t_hat: Option<String>,
        /// Largest number of (multiset, assignment) combinations to enumerate.
        #[arg(long)]
        limit: Option<u128>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a solution document against an instance.
    Validate { instance: PathBuf, solution: PathBuf },
    /// Translate a geometric set-cover instance into a covering-assignment one.
    Reduce {
        gscp: PathBuf,
        #[arg(long)]
        side: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        /// Decide the set-cover instance instead of printing the reduction.
        #[arg(long)]
        answer: bool,
        /// Solve the reduced model with the MILP backend rather than the oracle.
        #[arg(long)]
        milp: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run formulations over instances and write a runs CSV.
    Bench {
        /// Instance files, or family names generated with --seed.
        #[arg(required = true)]
        instances: Vec<String>,
        /// Formulation tags, e.g. pb-bc0bar, pb-bc0+ord-nosym+by, rb.
        #[arg(long, value_delimiter = ',', default_value = "pb-bc0bar,rb")]
        configs: Vec<String>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Performance profile of a runs CSV.
    Profile {
        runs: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Objective against the reliability factor.
    SweepSigma {
        instance: PathBuf,
        /// Defaults to 1..=m.
        #[arg(long, value_delimiter = ',')]
        sigmas: Vec<usize>,
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        form: FormArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Objective against a shrinking transfer deadline.
    SweepThat {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_T_HAT_STEP)]
        step: f64,
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        form: FormArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render a profile or sweep CSV as SVG.
    Plot {
        csv: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Family name `{u|w}-P<photos>D<drones>%D<percent>`.
    name: Option<String>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    drones: Option<usize>,
    #[arg(long)]
    capable: Option<usize>,
    #[arg(long)]
    capacity: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_parser = ["sweep", "random"])]
    storage: Option<String>,
    #[arg(long)]
    sigma: Option<usize>,
    #[arg(long, value_name = "X|inf")]
    t_hat: Option<String>,
    /// Instance name stored in the document.
    #[arg(long)]
    label: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormulationKind {
    Pcapsac,
    Rcapsac,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OnOff {
    On,
    Off,
}

#[derive(Args, Debug)]
struct FormArgs {
    #[arg(long, value_enum, default_value_t = FormulationKind::Pcapsac)]
    formulation: FormulationKind,
    #[arg(long, default_value = "bc0bar", value_parser = ["bc0", "bc0bar"])]
    bc: String,
    /// Add ordering cuts.
    #[arg(long)]
    ord: bool,
    /// Drop symmetry breaking.
    #[arg(long)]
    no_sym: bool,
    #[arg(long, default_value = "default", value_parser = ["default", "by", "yb"])]
    branch: String,
    #[arg(long)]
    sigma: Option<usize>,
    #[arg(long, value_name = "X|inf")]
    t_hat: Option<String>,
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    empty_subset: OnOff,
}

impl FormArgs {
    fn formulation(&self) -> Result<Formulation> {
        Ok(match self.formulation {
            FormulationKind::Rcapsac => Formulation::Rcapsac { empty_subset: self.empty_subset == OnOff::On },
            FormulationKind::Pcapsac => Formulation::Pcapsac(PcapsacConfig {
                bc_variant: self.bc.parse::<BcVariant>()?,
                ordering_cuts: self.ord,
                symmetry_breaking: !self.no_sym,
                branch_priority: self.branch.parse::<BranchPriority>()?,
                sigma: 1,
                t_hat: Deadline::Unbounded,
            }),
        })
    }

    fn apply(&self, inst: Instance) -> Result<Instance> {
        let inst = override_params(inst, self.sigma, self.t_hat.as_deref())?;
        if self.ord && self.formulation == FormulationKind::Pcapsac && inst.t_hat.is_bounded() {
            eprintln!("warning: {ORD_UNDER_DEADLINE}");
        }
        Ok(inst)
    }
}

fn override_params(mut inst: Instance, sigma: Option<usize>, t_hat: Option<&str>) -> Result<Instance> {
    if let Some(s) = sigma {
        inst.sigma = s;
    }
    if let Some(t) = t_hat {
        inst.t_hat = Deadline::parse(t)?;
    }
    inst.validate()?;
    Ok(inst)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).map_err(|e| Error::Bench(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn backend(cli_cmd: Option<&str>) -> Result<Arc<dyn MilpBackend>> {
    let template = cli_cmd.map(str::to_string).or_else(|| std::env::var(SOLVER_CMD_ENV).ok());
    match template.as_deref().map(str::trim) {
        None | Some("") | Some("highs") => Ok(Arc::new(HighsBackend::default())),
        Some(t) => Ok(Arc::new(ExternalSolver::new(t)?)),
    }
}

fn print_solution(inst: &Instance, sol: &CapsacSolution, output: Option<&Path>) -> Result<()> {
    eprintln!("objective {}", sol.objective);
    emit(output, &sol.to_json(inst)?)
}

enum Outcome {
    Done,
    Negative,
}

fn run(cli: Cli) -> Result<Outcome> {
    let seed = cli.seed;
    let limit = cli.time_limit;
    let backend = || backend(cli.solver_cmd.as_deref());
    match cli.cmd {
        Cmd::Gen(g) => {
            let mut spec = match &g.name {
                Some(n) => GridSpec::from_name(n, seed)?,
                None => GridSpec { seed, ..GridSpec::default() },
            };
            if let Some(v) = g.rows {
                spec.rows = v;
            }
            if let Some(v) = g.cols {
                spec.cols = v;
            }
            if let Some(v) = g.drones {
                spec.drones = v;
                spec.capable_count = spec.capable_count.min(v);
            }
            if let Some(v) = g.capable {
                spec.capable_count = v;
            }
            if let Some(v) = g.capacity {
                spec.capacity = v;
            }
            if let Some(v) = g.lambda {
                spec.lambda = v;
            }
            if let Some(v) = g.mu {
                spec.mu = v;
            }
            if let Some(v) = &g.storage {
                spec.storage = v.parse::<StoragePolicy>()?;
            }
            if let Some(v) = g.sigma {
                spec.sigma = v;
            }
            if let Some(v) = &g.t_hat {
                spec.t_hat = Deadline::parse(v)?;
            }
            if let Some(v) = &g.label {
                spec.name = Some(v.clone());
            }
            let weighted = g.name.as_deref().is_some_and(|n| n.starts_with("w-"));
            let mut inst = generate_grid_instance(&spec)?;
            if weighted {
                inst = apply_weighted_recipe(&inst, spec.lambda, DEFAULT_WEIGHT_STDDEV, seed)?;
            }
            emit(g.output.as_deref(), &write_instance(&inst))?;
        }
        Cmd::Weight { instance, mean, stddev, output } => {
            let inst = load_instance(&instance)?;
            let mean = mean.unwrap_or(inst.total_lambda() / inst.photos.len() as f64);
            emit(output.as_deref(), &write_instance(&apply_weighted_recipe(&inst, mean, stddev, seed)?))?;
        }
        Cmd::Build { instance, form, output, priorities } => {
            let inst = form.apply(load_instance(&instance)?)?;
            let built = build_model(&inst, &form.formulation()?)?;
            if let Some(p) = priorities {
                std::fs::write(&p, write_priorities(&built.model)).map_err(|e| Error::io(&p, e))?;
            }
            emit(output.as_deref(), &write_lp(&built.model))?;
        }
        Cmd::Solve { instance, form, output } => {
            let inst = form.apply(load_instance(&instance)?)?;
            let solver = MilpSolver { formulation: form.formulation()?, backend: backend()?, time_limit: limit };
            let out = solver.solve(&inst)?;
            eprintln!("status {} ({:.3}s)", out.status, out.stats.wall_seconds);
            match (&out.solution, out.status) {
                (Some(sol), _) => print_solution(&inst, sol, output.as_deref())?,
                (None, SolveStatus::Infeasible) => return Ok(Outcome::Negative),
                (None, s) => return Err(Error::Bench(format!("no solution (status {s})"))),
            }
        }
        Cmd::Oracle { instance, sigma, t_hat, limit: max, output } => {
            let inst = override_params(load_instance(&instance)?, sigma, t_hat.as_deref())?;
            let mut limits = OracleLimits::default();
            if let Some(n) = max {
                limits.max_combinations = n;
            }
            let out = OracleSolver { limits, ..OracleSolver::default() }.solve(&inst)?;
            match &out.solution {
                Some(sol) => print_solution(&inst, sol, output.as_deref())?,
                None => {
                    eprintln!("status infeasible");
                    return Ok(Outcome::Negative);
                }
            }
        }
        Cmd::Validate { instance, solution } => {
            let inst = load_instance(&instance)?;
            let sol = CapsacSolution::from_json(&read(&solution)?, &inst)?;
            let report = validate(&inst, &sol)?;
            println!("coverage {}", ok(report.coverage_ok));
            println!("sigma {}", ok(report.sigma_ok));
            println!("convexity {}", ok(report.convexity_ok));
            println!("transmission {}", ok(report.transmission_ok));
            println!("makespan {}", makespan(&inst, &sol));
            if !report.per_demand_times.is_empty() {
                println!("max_transmission_time {}", report.max_transmission_time());
            }
            for v in &report.violations {
                println!("violation: {v}");
            }
            if !report.is_feasible() {
                return Ok(Outcome::Negative);
            }
        }
        Cmd::Reduce { gscp, side, k, answer, milp, output } => {
            let mut g = parse_gscp(&read(&gscp)?)?;
            if let Some(s) = side {
                g.side = s;
            }
            if let Some(k) = k {
                g.k = k;
            }
            g.validate()?;
            if answer {
                let yes = if milp {
                    let b = backend()?;
                    answer_gscp(&g, &GscpMethod::Milp { backend: b.as_ref(), time_limit: limit })?
                } else {
                    answer_gscp(&g, &GscpMethod::Oracle(OracleLimits::default()))?
                };
                emit(output.as_deref(), if yes { "yes\n" } else { "no\n" })?;
                return Ok(if yes { Outcome::Done } else { Outcome::Negative });
            }
            let red = reduce_to_capsac(&g, seed)?;
            let id = |p: &usize| red.instance.photos[*p].id.clone();
            let doc = serde_json::json!({
                "instance": serde_json::to_value(&red.instance)?,
                "catalog": red.catalog.entries.iter().map(|e| serde_json::json!({
                    "photos": e.members.iter().map(id).collect::<Vec<_>>(),
                    "t": e.t,
                })).collect::<Vec<_>>(),
                "induced": red.induced.iter().map(|s| s.iter().map(id).collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            emit(output.as_deref(), &text)?;
        }
        Cmd::Bench { instances, configs, workers, output } => {
            let insts = instances
                .iter()
                .map(|s| {
                    let p = Path::new(s);
                    if p.exists() {
                        load_instance(p)
                    } else {
                        let spec = GridSpec::from_name(s, seed)?;
                        let inst = generate_grid_instance(&spec)?;
                        if s.starts_with("w-") {
                            apply_weighted_recipe(&inst, spec.lambda, DEFAULT_WEIGHT_STDDEV, seed)
                        } else {
                            Ok(inst)
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let forms = configs.iter().map(|c| c.parse::<Formulation>()).collect::<Result<Vec<_>>>()?;
            let recs = run_benchmark(&insts, &forms, backend()?, &BenchOptions { time_limit: limit, workers });
            emit(output.as_deref(), &csv_string(RUNS_SCHEMA, &recs)?)?;
        }
        Cmd::Profile { runs, output } => {
            let recs: Vec<RunRecord> = read_csv(RUNS_SCHEMA, &read(&runs)?)?;
            let cap = limit.unwrap_or_else(|| recs.iter().map(|r| r.total_seconds).fold(0.0, f64::max));
            emit(output.as_deref(), &performance_profile(&recs, cap)?.to_csv()?)?;
        }
        Cmd::SweepSigma { instance, sigmas, oracle, form, output } => {
            let inst = form.apply(load_instance(&instance)?)?;
            let sigmas = if sigmas.is_empty() { (1..=inst.m()).collect() } else { sigmas };
            let solver = sweep_solver(oracle, &form, limit, &backend)?;
            finish_sweep(sigma_sweep(&inst, solver.as_ref(), &sigmas)?, output.as_deref())?;
        }
        Cmd::SweepThat { instance, step, oracle, form, output } => {
            let inst = form.apply(load_instance(&instance)?)?;
            if form.ord && !oracle && !inst.t_hat.is_bounded() {
                eprintln!("warning: {ORD_UNDER_DEADLINE}");
            }
            let solver = sweep_solver(oracle, &form, limit, &backend)?;
            finish_sweep(t_hat_sweep(&inst, solver.as_ref(), step)?, output.as_deref())?;
        }
        Cmd::Plot { csv, output } => emit(output.as_deref(), &plot_document(&read(&csv)?)?)?,
    }
    Ok(Outcome::Done)
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

fn sweep_solver(
    oracle: bool,
    form: &FormArgs,
    time_limit: Option<f64>,
    backend: &dyn Fn() -> Result<Arc<dyn MilpBackend>>,
) -> Result<Box<dyn CapsacSolver>> {
    if oracle {
        return Ok(Box::new(OracleSolver::default()));
    }
    Ok(Box::new(MilpSolver { formulation: form.formulation()?, backend: backend()?, time_limit }))
}

fn finish_sweep(table: SweepTable, output: Option<&Path>) -> Result<()> {
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    emit(output, &table.to_csv()?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
