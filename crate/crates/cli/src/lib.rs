//! Command-line front end for `cifs-core`: reads an experiment config, runs
//! one experiment and renders a CSV table plus a JSON summary.
//!
//! [`execute`] does all the work in memory; the binary only parses flags and
//! writes the two files.

pub mod config;
pub mod error;
mod run;

use std::fmt;
use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::CliError;
pub use run::execute;

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "CIFS_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "cifs-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Dim,
    Pressure,
    Curve,
    Orbit,
    Schottky,
    Section5,
    ProbeType,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Dim,
        Command::Pressure,
        Command::Curve,
        Command::Orbit,
        Command::Schottky,
        Command::Section5,
        Command::ProbeType,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Dim => "dim",
            Command::Pressure => "pressure",
            Command::Curve => "curve",
            Command::Orbit => "orbit",
            Command::Schottky => "schottky",
            Command::Section5 => "section5",
            Command::ProbeType => "probe-type",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Header of the CSV written by this command.
    pub fn csv_columns(self) -> &'static [&'static str] {
        match self {
            Command::Dim => &["size", "value", "lower", "upper", "error"],
            Command::Pressure => &["sigma", "value", "lower", "upper", "direct_value", "direct_lower", "direct_upper"],
            Command::Curve => &["t", "dim", "err"],
            Command::Orbit => &["word", "re", "im", "rho"],
            Command::Schottky => &["letter", "inverse", "center_re", "center_im", "radius", "arc_lo", "arc_hi"],
            Command::Section5 => &[
                "n",
                "center_re",
                "center_im",
                "radius",
                "diam",
                "diam_scaled",
                "half_plane_lo",
                "half_plane_hi",
                "class",
            ],
            Command::ProbeType => &["length", "shell_sum", "partial_sum"],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Worker cap for parallel sections; `None` uses the rayon default.
    pub threads: Option<usize>,
    /// Overrides `params.tolerance`.
    pub tolerance: Option<f64>,
    /// Overrides `params.depth` (used by `section5`).
    pub depth: Option<usize>,
}

/// Rendered results of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub command: Command,
    pub csv: String,
    pub summary: serde_json::Value,
}

impl Output {
    pub fn summary_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary is valid JSON");
        s.push('\n');
        s
    }

    /// Writes `<command>.csv` and `<command>.json` into `dir`; returns both paths.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf), CliError> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.command));
        let json = dir.join(format!("{}.json", self.command));
        std::fs::write(&csv, &self.csv)?;
        std::fs::write(&json, self.summary_text())?;
        Ok((csv, json))
    }
}
