//! `qconcept`: fits the two-concept superposition model, renders the
//! wave-packet interference field and evaluates conjunction/negation
//! predictions.
//!
//! Exit codes: 0 on success, 1 on I/O, parse or usage failure, 2 when the
//! model, solver or validation rejects the input. Every failure prints a
//! single diagnostic line on stderr.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use clap::{Args, Parser, Subcommand};
use commands::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "qconcept",
    version,
    about = "Quantum model of concept combination"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Tolerance on column sums when checking normalization.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_f64)]
    pub tol: f64,

    /// Keep the table as read instead of rescaling each column to sum to 1.
    #[arg(long, global = true)]
    pub no_renormalize: bool,

    /// Cell area of the midpoint rule (overrides the wave-field spec).
    #[arg(long, global = true, value_parser = positive_f64)]
    pub delta: Option<f64>,

    /// Solve the phase-field system in coordinates scaled to [-1, 1]².
    #[arg(long, global = true)]
    pub rescale_coords: bool,

    /// Raster size as WIDTHxHEIGHT (overrides the wave-field spec).
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,

    /// Raster extent as x0,y0,x1,y1 (overrides the wave-field spec).
    #[arg(long, global = true, value_parser = parse_extent, allow_hyphen_values = true)]
    pub extent: Option<[f64; 4]>,

    /// Offset of the quantum prediction for µ(A′ and B′).
    #[arg(long, global = true, default_value_t = concept_interference::predict::QUANTUM_CONSTANT)]
    pub quantum_constant: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the Hilbert-space model; writes report.json, report.txt, vectors.csv.
    Model {
        /// Membership table (.csv or .json).
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Render |ψ_A|², |ψ_B|² and the disjunction field; writes PGM and CSV
    /// rasters plus phase_solution.json.
    Wavefield {
        /// Wave-field spec (JSON).
        spec: PathBuf,
        /// Membership table (.csv or .json).
        data: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate classical and quantum predictions; writes predictions.json.
    Predict {
        /// CSV with header label,mu_ab,mu_ab_notb,mu_nota_b,mu_nota_notb.
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check a membership table for range and normalization violations.
    Validate {
        /// Membership table (.csv or .json).
        input: PathBuf,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("`{s}` is not WIDTHxHEIGHT"))?;
    let w: usize = w
        .trim()
        .parse()
        .map_err(|_| format!("bad width in `{s}`"))?;
    let h: usize = h
        .trim()
        .parse()
        .map_err(|_| format!("bad height in `{s}`"))?;
    if w == 0 || h == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok((w, h))
}

fn parse_extent(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number `{p}` in extent"))
        })
        .collect::<Result<_, _>>()?;
    let [x0, y0, x1, y1]: [f64; 4] = parts
        .try_into()
        .map_err(|_| "extent needs four values x0,y0,x1,y1".to_string())?;
    if !(x1 > x0 && y1 > y0) {
        return Err("extent must have x1 > x0 and y1 > y0".into());
    }
    Ok([x0, y0, x1, y1])
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match cli.command {
        Command::Model { input, out } => commands::model(g, &input, &out),
        Command::Wavefield { spec, data, out } => commands::wavefield(g, &spec, &data, &out),
        Command::Predict { input, out } => commands::predict(g, &input, &out),
        Command::Validate { input } => commands::validate(g, &input),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("{line}");
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code())
        }
    }
}
