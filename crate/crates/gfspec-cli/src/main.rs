//! Command-line driver: computes spectral invariants and barcodes of
//! grid-sampled generating functions, runs the inequality checkers, and
//! validates stored product systems.
//!
//! Output contract: a single JSON report on standard output.  Exit code 0
//! when every assertion holds, 1 when an assertion fails (the report carries
//! the machine-readable failure list), 2 on unusable input (message on
//! standard error).

mod commands;
mod expr;
mod fuzz;
mod input;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Globals;
use report::{Outcome, RunReport, SCHEMA};

#[derive(Parser)]
#[command(
    name = "gfspec",
    version,
    about = "Spectral invariants, barcodes, and inequality checks for grid-sampled generating functions"
)]
struct Cli {
    /// Seed for randomized batches.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Judge inequalities with zero tolerance (for exact cases: plain graph
    /// fields and stored algebraic systems).
    #[arg(long, global = true)]
    strict: bool,
    /// Directory for CSV side files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants of one field: c_plus, c_minus, gamma, beta.
    Spectral(commands::FieldArgs),
    /// Full barcode of one field, written as CSV.
    Barcode(commands::FieldArgs),
    /// Compare boundary depth against the invariant gap.
    KsCheck(commands::FieldArgs),
    /// Global invariants against slice invariants (upper bounds).
    ReduceDirect(commands::ReduceArgs),
    /// Global invariants against slice invariants (lower bounds).
    ReduceInverse(commands::ReduceArgs),
    /// Region bounds: arc pairs or a glued cover chain.
    MvGlue(commands::MvArgs),
    /// Invariants of a field pulled back along a torus map.
    Pullback(commands::PullArgs),
    /// Sweep rotations of a circle-based field.
    ShiftTest(commands::FieldArgs),
    /// Validate a stored product system and run its exact checks.
    AlgebraCheck(commands::AlgebraArgs),
    /// Seeded random-trial batches for any check.
    Fuzz(fuzz::FuzzArgs),
}

fn main() {
    let started = Instant::now();
    let cli = Cli::parse();
    let globals = Globals {
        seed: cli.seed,
        strict: cli.strict,
        out_dir: cli.out_dir.clone(),
    };
    let (name, run): (&str, Result<(serde_json::Value, Outcome), input::InputError>) =
        match &cli.cmd {
            Cmd::Spectral(a) => ("spectral", commands::spectral(a, &globals)),
            Cmd::Barcode(a) => ("barcode", commands::barcode(a, &globals)),
            Cmd::KsCheck(a) => ("ks-check", commands::ks(a, &globals)),
            Cmd::ReduceDirect(a) => ("reduce-direct", commands::reduce_direct(a, &globals)),
            Cmd::ReduceInverse(a) => ("reduce-inverse", commands::reduce_inverse(a, &globals)),
            Cmd::MvGlue(a) => ("mv-glue", commands::mv_glue(a, &globals)),
            Cmd::Pullback(a) => ("pullback", commands::pullback(a, &globals)),
            Cmd::ShiftTest(a) => ("shift-test", commands::shift(a, &globals)),
            Cmd::AlgebraCheck(a) => ("algebra-check", commands::algebra(a, &globals)),
            Cmd::Fuzz(a) => ("fuzz", fuzz::run(a, &globals)),
        };
    let (inputs, outcome) = match run {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("gfspec {name}: {e}");
            std::process::exit(2);
        }
    };
    let code = i32::from(!outcome.failures.is_empty());
    let report = RunReport {
        schema: SCHEMA,
        command: name.to_string(),
        inputs,
        seed: cli.seed,
        grid: outcome.grid,
        tolerance: outcome.tolerance,
        strict: cli.strict,
        results: outcome.results,
        trials: outcome.trials,
        failures: outcome.failures,
        verdict: if code == 0 { "pass" } else { "fail" },
        csv_files: outcome.csv_files,
        wall_ms: started.elapsed().as_millis(),
    };
    let text =
        serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
    // Tolerate a closed pipe (e.g. `gfspec ... | head`).
    use std::io::Write as _;
    let mut stdout = std::io::stdout();
    if let Err(e) = writeln!(stdout, "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("gfspec: cannot write the report: {e}");
            std::process::exit(2);
        }
    }
    std::process::exit(code);
}
