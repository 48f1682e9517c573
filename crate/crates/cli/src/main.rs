//! Command line front end.
//!
//! All lengths are in units of the transition wavelength, rates in units
//! of the single-atom rate `Gamma`, times in units of `1/Gamma`.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure
//! (partial results are suppressed).

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "subrad",
    version,
    about = "Collective decay of ring and chain atom arrays: spectra, beats, crossings, photon trapping",
    after_help = "Units: lengths in wavelengths, rates in units of the single-atom rate Gamma, \
                  times in 1/Gamma. A JSON --config file may supply any field; flags override it."
)]
struct Cli {
    /// JSON run-configuration file (fields overridden by flags)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Complete mode set of one configuration
    Modes(CommonArgs),
    /// Ring spectra as a function of the radius
    SweepRadius(CommonArgs),
    /// Minimal decay rate as a function of the atom number
    SweepN(CommonArgs),
    /// Zero-sector beat frequency (radius sweep) or transfer curve (time series)
    Beats(CommonArgs),
    /// Survival probability of an initial excitation
    Survival(CommonArgs),
    /// Level crossings of the zero-sector shifts over a radius window
    Crossings(CommonArgs),
    /// Fixed-radius ring sweep with the exponential-law fit
    Trapping(CommonArgs),
    /// Largest next-neighbour distances reaching a suppression target
    Compare(CommonArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Modes(_) => "modes",
            Cmd::SweepRadius(_) => "sweep-radius",
            Cmd::SweepN(_) => "sweep-n",
            Cmd::Beats(_) => "beats",
            Cmd::Survival(_) => "survival",
            Cmd::Crossings(_) => "crossings",
            Cmd::Trapping(_) => "trapping",
            Cmd::Compare(_) => "compare",
        }
    }

    fn args(self) -> CommonArgs {
        match self {
            Cmd::Modes(a)
            | Cmd::SweepRadius(a)
            | Cmd::SweepN(a)
            | Cmd::Beats(a)
            | Cmd::Survival(a)
            | Cmd::Crossings(a)
            | Cmd::Trapping(a)
            | Cmd::Compare(a) => a,
        }
    }
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Ring geometry; N = number of outer atoms (omit N when a sweep sets it)
    #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "0", conflicts_with = "chain")]
    ring: Option<usize>,
    /// Chain geometry; N = number of atoms (omit N when a sweep sets it)
    #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "0")]
    chain: Option<usize>,
    /// Include the central atom (rings)
    #[arg(long, conflicts_with = "no_center")]
    center: bool,
    /// Exclude the central atom (rings; the default)
    #[arg(long)]
    no_center: bool,
    /// Ring radius in wavelengths
    #[arg(long, value_name = "R")]
    radius: Option<f64>,
    /// Chain next-neighbour spacing in wavelengths
    #[arg(long, value_name = "D")]
    spacing: Option<f64>,
    /// Chain total length in wavelengths (fixed-length sweep-n)
    #[arg(long, value_name = "L")]
    length: Option<f64>,
    /// Shift function route: approximate (default) or exact
    #[arg(long, value_name = "MODE")]
    shift: Option<String>,
    /// Sweep start (wavelengths)
    #[arg(long, value_name = "R")]
    from: Option<f64>,
    /// Sweep end (wavelengths)
    #[arg(long, value_name = "R")]
    to: Option<f64>,
    /// Sweep step (wavelengths, default 0.01)
    #[arg(long, value_name = "DR")]
    step: Option<f64>,
    /// First atom number of a sweep
    #[arg(long, value_name = "N")]
    n_from: Option<usize>,
    /// Last atom number of a sweep
    #[arg(long, value_name = "N")]
    n_to: Option<usize>,
    /// End of the time grid (units of 1/Gamma)
    #[arg(long, value_name = "T")]
    t_max: Option<f64>,
    /// Number of time samples (default 201)
    #[arg(long, value_name = "K")]
    t_points: Option<usize>,
    /// Initial state: uniform, z, site:A, p:K or mode:K
    #[arg(long, value_name = "SPEC")]
    initial: Option<String>,
    /// Suppression target in e-folds (compare)
    #[arg(long, value_name = "NL")]
    target: Option<f64>,
    /// Output format: csv (default) or json
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// Output file (stdout when absent)
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
    /// Worker threads for sweeps (default 1)
    #[arg(long, value_name = "J")]
    jobs: Option<usize>,
}

impl CommonArgs {
    fn into_config(self, command: &str) -> RunConfig {
        let geometry = if self.ring.is_some() {
            Some("ring".to_string())
        } else if self.chain.is_some() {
            Some("chain".to_string())
        } else {
            None
        };
        // `--ring` / `--chain` without a count carry the marker value 0
        let n = match self.ring.or(self.chain) {
            Some(0) | None => None,
            Some(v) => Some(v),
        };
        RunConfig {
            schema_version: Some(config::SCHEMA_VERSION),
            command: Some(command.to_string()),
            geometry,
            n,
            center: if self.center {
                Some(true)
            } else if self.no_center {
                Some(false)
            } else {
                None
            },
            radius: self.radius,
            spacing: self.spacing,
            length: self.length,
            shift_mode: self.shift,
            from: self.from,
            to: self.to,
            step: self.step,
            n_from: self.n_from,
            n_to: self.n_to,
            t_max: self.t_max,
            t_points: self.t_points,
            initial: self.initial,
            target_neg_log: self.target,
            format: self.format,
            out: self.out,
            jobs: self.jobs,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let from_file = match &cli.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| CliError::Config(e.to_string()))?,
        None => RunConfig::default(),
    };
    let from_flags = match cli.command {
        Some(cmd) => {
            let name = cmd.name();
            cmd.args().into_config(name)
        }
        None => RunConfig::default(),
    };
    let merged = from_flags.merged_over(from_file);
    let plan = config::validate(&merged).map_err(|e| CliError::Config(e.to_string()))?;
    let artifact = commands::execute(&plan)?;
    match &plan.out {
        Some(path) => std::fs::write(path, artifact)
            .map_err(|e| CliError::Config(format!("cannot write {path}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(artifact.as_bytes())
                .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
