//! `caliber`: table verification, compliancy reports, comass searches and
//! immersion residual suites.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "caliber", version, about = "Verification toolkit for calibrated geometry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stabilizer dimensions and compliancy for every row of Table 1.
    Tables {
        /// Replace the associative 3-form by a form read from a JSON file.
        #[arg(long, value_name = "PATH")]
        assoc_form: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Compliancy report for one package.
    Compliancy {
        #[command(flatten)]
        package: PackageArgs,
        /// Columns of a calibrated plane as a JSON array of float arrays;
        /// switches to the floating-point pipeline.
        #[arg(long, value_name = "PATH")]
        plane: Option<PathBuf>,
        /// Singular value threshold for the floating-point pipeline.
        #[arg(long, default_value_t = 1e-8)]
        rank_tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Residual checks on a sampled submanifold.
    Immersion {
        /// plane, complex-graph, slag-graph, assoc-product, coassoc-product,
        /// cayley-product or noncalibrated-control.
        #[arg(long)]
        example: String,
        /// Package, for `plane`; other examples have a fixed package.
        #[arg(long)]
        package: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Grid points per parameter axis.
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value_t = 0.05)]
        spacing: f64,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol_deriv: f64,
        /// Calibration gate (default 1e-14 for planes, 1e-10 otherwise).
        #[arg(long)]
        gate_tol: Option<f64>,
        /// Run second-order checks even when the calibration gate fails.
        #[arg(long)]
        ungated: bool,
        /// Also rerun at half the step and report residual ratios.
        #[arg(long)]
        convergence: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Lower bound on the comass by gradient ascent from random planes.
    Comass {
        #[arg(long, conflicts_with = "form")]
        package: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Form JSON file instead of a package calibration.
        #[arg(long, value_name = "PATH")]
        form: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug)]
struct PackageArgs {
    /// kahler, slag, assoc, coassoc, cayley, double-point (or kahler-M-P,
    /// slag-M).
    #[arg(long)]
    package: String,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
}

#[derive(Args, Debug)]
struct Output {
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write to a file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
