use std::path::PathBuf;
use std::process::ExitCode;

use cifs::{execute, CliError, Command, RunOptions, DEFAULT_OUT_DIR, OUT_DIR_ENV};
use clap::{Args, Parser, Subcommand};

/// Hausdorff dimensions of limit sets of conformal iterated function systems.
///
/// Each run reads one TOML experiment config and writes `<command>.csv` and
/// `<command>.json` into the output directory. Exit status: 0 on success,
/// 2 for configuration or output errors, 3 for numeric failures.
#[derive(Debug, Parser)]
#[command(name = "cifs", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", env = OUT_DIR_ENV, default_value = DEFAULT_OUT_DIR)]
    out: PathBuf,
    /// Maximum number of worker threads.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Bisection tolerance of the Bowen solver (overrides params.tolerance).
    #[arg(long, value_name = "X")]
    tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Bowen dimension of a [system] or of the boundary system of a [group].
    #[command(after_help = "CSV columns: size, value, lower, upper, error \
        (one row per collocation size in params.sizes).")]
    Dim(Common),
    /// Pressure curve over params.sigma with params.sigma_steps points.
    #[command(after_help = "CSV columns: sigma, value, lower, upper (transfer operator), \
        direct_value, direct_lower, direct_upper (partition sums up to params.n_max). \
        Divergent tails are written as inf.")]
    Pressure(Common),
    /// Dimension curve of a [family] and its analyticity diagnostic.
    #[command(after_help = "CSV columns: t, dim, err (one row per Chebyshev node, params.m nodes).")]
    Curve(Common),
    /// Orbit of the basepoint under all reduced words up to params.max_len.
    #[command(after_help = "CSV columns: word (dot-separated letters, e for the identity), re, im, \
        rho (hyperbolic distance from 0). At most params.max_rows rows.")]
    Orbit(Common),
    /// Circle table and dimension of a Schottky or reflection [group].
    #[command(after_help = "CSV columns: letter, inverse, center_re, center_im, radius (target disk), \
        arc_lo, arc_hi (boundary arc in radians).")]
    Schottky(Common),
    /// The truncated parabolic-chain group.
    #[command(after_help = "CSV columns: n, center_re, center_im, radius, diam, diam_scaled (diam·2^n), \
        half_plane_lo, half_plane_hi (half-plane disk), class (trace class of generator n).")]
    Section5 {
        #[command(flatten)]
        common: Common,
        /// Number of disk pairs (1..=30).
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Shell sums of the Poincaré series at t = 1 and a convergence verdict.
    #[command(name = "probe-type", after_help = "CSV columns: length, shell_sum, partial_sum.")]
    ProbeType(Common),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (cmd, common, depth) = match cli.command {
        Sub::Dim(c) => (Command::Dim, c, None),
        Sub::Pressure(c) => (Command::Pressure, c, None),
        Sub::Curve(c) => (Command::Curve, c, None),
        Sub::Orbit(c) => (Command::Orbit, c, None),
        Sub::Schottky(c) => (Command::Schottky, c, None),
        Sub::Section5 { common, depth } => (Command::Section5, common, depth),
        Sub::ProbeType(c) => (Command::ProbeType, c, None),
    };
    let text = common
        .config
        .as_ref()
        .map(|p| std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))))
        .transpose()?;
    let opts = RunOptions { threads: common.threads, tolerance: common.tolerance, depth };
    let output = execute(cmd, text.as_deref(), &opts)?;
    let (csv, json) = output.write_to(&common.out)?;
    println!("{}", csv.display());
    println!("{}", json.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cifs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
