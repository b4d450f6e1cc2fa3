//! Command-line adapter: `capsac-highs-lp <model.lp> <solution.txt> [time_limit]`.
//!
//! Solves an LP file with HiGHS and writes the native solution format, so
//! the file-based driver can run against a real solver:
//! `CAPSAC_SOLVER_CMD="capsac-highs-lp {model} {solution} {time_limit}"`.

use std::path::Path;
use std::process::ExitCode;

use capsac_highs::{format_native_solution, solve_lp_file};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 2 || args.len() > 3 {
        eprintln!("usage: capsac-highs-lp <model.lp> <solution.txt> [time_limit]");
        return ExitCode::FAILURE;
    }
    let limit = match args.get(2).map(|s| s.parse::<f64>()) {
        None => None,
        Some(Ok(t)) if t > 0.0 => Some(t),
        Some(_) => {
            eprintln!("time limit must be a positive number, got `{}`", args[2]);
            return ExitCode::FAILURE;
        }
    };
    let raw = match solve_lp_file(Path::new(&args[0]), limit) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = std::fs::write(&args[1], format_native_solution(&raw)) {
        eprintln!("{}: {e}", args[1]);
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
