//! Run configuration: JSON schema, flag merging, validation.
//!
//! A run is defined either entirely on the command line, entirely by a
//! JSON file (`--config`), or by a file with individual fields overridden
//! by flags. Unknown JSON keys and unknown enum values are rejected.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use subrad::ShiftMode;

pub const SCHEMA_VERSION: u32 = 1;

/// Flat run configuration; every field optional so that file and flags
/// can be merged field-by-field (flags win).
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: Option<u32>,
    pub command: Option<String>,
    /// "ring" or "chain".
    pub geometry: Option<String>,
    /// Number of atoms (outer atoms for rings).
    pub n: Option<usize>,
    /// Ring: include the central atom.
    pub center: Option<bool>,
    /// Ring radius in wavelengths.
    pub radius: Option<f64>,
    /// Chain next-neighbour spacing in wavelengths.
    pub spacing: Option<f64>,
    /// Chain total length in wavelengths (fixed-length sweeps).
    pub length: Option<f64>,
    /// "approximate" (default) or "exact".
    pub shift_mode: Option<String>,
    /// Sweep bounds in wavelengths.
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub step: Option<f64>,
    /// Atom-number sweep bounds.
    pub n_from: Option<usize>,
    pub n_to: Option<usize>,
    /// Time grid: end time (units of 1/Gamma) and sample count.
    pub t_max: Option<f64>,
    pub t_points: Option<usize>,
    /// Initial state: "uniform", "z", "site:A", "p:K" or "mode:K".
    pub initial: Option<String>,
    /// Suppression target for the ring/chain comparison.
    pub target_neg_log: Option<f64>,
    /// "csv" (default) or "json".
    pub format: Option<String>,
    /// Output file; stdout when absent.
    pub out: Option<String>,
    /// Worker threads for sweeps.
    pub jobs: Option<usize>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| err(format!("invalid config {}: {e}", path.display())))?;
        match cfg.schema_version {
            Some(SCHEMA_VERSION) => Ok(cfg),
            Some(v) => Err(err(format!(
                "unsupported schema_version {v}, expected {SCHEMA_VERSION}"
            ))),
            None => Err(err("config file is missing schema_version")),
        }
    }

    /// Field-by-field merge; `self` (flags) wins over `file`.
    pub fn merged_over(self, file: RunConfig) -> RunConfig {
        macro_rules! take {
            ($field:ident) => {
                self.$field.or(file.$field)
            };
        }
        RunConfig {
            schema_version: Some(SCHEMA_VERSION),
            command: take!(command),
            geometry: take!(geometry),
            n: take!(n),
            center: take!(center),
            radius: take!(radius),
            spacing: take!(spacing),
            length: take!(length),
            shift_mode: take!(shift_mode),
            from: take!(from),
            to: take!(to),
            step: take!(step),
            n_from: take!(n_from),
            n_to: take!(n_to),
            t_max: take!(t_max),
            t_points: take!(t_points),
            initial: take!(initial),
            target_neg_log: take!(target_neg_log),
            format: take!(format),
            out: take!(out),
            jobs: take!(jobs),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Geometry {
    Ring { n: usize, radius: f64, center: bool },
    Chain { n: usize, spacing: f64 },
}

/// Initial state selector for `survival`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    Uniform,
    Center,
    Site(usize),
    RingMode(usize),
    SortedMode(usize),
}

/// A fully validated run.
#[derive(Clone, Debug)]
pub enum Run {
    Modes {
        geometry: Geometry,
    },
    SweepRadius {
        n: usize,
        center: bool,
        from: f64,
        to: f64,
        step: f64,
    },
    SweepN {
        kind: SweepNKind,
        n_from: usize,
        n_to: usize,
    },
    Beats {
        n: usize,
        kind: BeatsKind,
    },
    Survival {
        geometry: Geometry,
        initial: InitialState,
        t_max: f64,
        t_points: usize,
    },
    Crossings {
        n: usize,
        from: f64,
        to: f64,
        step: f64,
    },
    Trapping {
        radius: f64,
        n_from: usize,
        n_to: usize,
    },
    Compare {
        n: usize,
        target_neg_log: f64,
    },
}

#[derive(Clone, Copy, Debug)]
pub enum SweepNKind {
    Ring { radius: f64 },
    ChainSpacing { spacing: f64 },
    ChainLength { length: f64 },
}

#[derive(Clone, Copy, Debug)]
pub enum BeatsKind {
    FrequencySweep { from: f64, to: f64, step: f64 },
    TimeSeries { radius: f64, t_max: f64, t_points: usize },
}

/// Validated run plus output settings.
#[derive(Clone, Debug)]
pub struct Plan {
    pub run: Run,
    pub shift_mode: ShiftMode,
    pub format: OutputFormat,
    pub out: Option<String>,
    pub jobs: usize,
}

fn require<T: Copy>(v: Option<T>, what: &str, cmd: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| err(format!("`{cmd}` requires {what}")))
}

fn positive(v: f64, what: &str) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(err(format!("{what} must be positive and finite, got {v}")))
    }
}

fn parse_geometry(cfg: &RunConfig, cmd: &str) -> Result<Geometry, ConfigError> {
    let n = require(cfg.n, "an atom count `n`", cmd)?;
    if n < 2 {
        return Err(err("need at least 2 atoms"));
    }
    match cfg.geometry.as_deref() {
        Some("ring") => {
            let radius = positive(require(cfg.radius, "`radius`", cmd)?, "radius")?;
            Ok(Geometry::Ring {
                n,
                radius,
                center: cfg.center.unwrap_or(false),
            })
        }
        Some("chain") => {
            if cfg.center == Some(true) {
                return Err(err("a chain has no central atom"));
            }
            let spacing = positive(require(cfg.spacing, "`spacing`", cmd)?, "spacing")?;
            Ok(Geometry::Chain { n, spacing })
        }
        Some(other) => Err(err(format!("unknown geometry `{other}`"))),
        None => Err(err(format!("`{cmd}` requires a geometry (ring or chain)"))),
    }
}

fn parse_initial(spec: &str) -> Result<InitialState, ConfigError> {
    match spec {
        "uniform" => Ok(InitialState::Uniform),
        "z" => Ok(InitialState::Center),
        _ => {
            if let Some(rest) = spec.strip_prefix("site:") {
                let idx = rest
                    .parse()
                    .map_err(|_| err(format!("bad site index in `{spec}`")))?;
                Ok(InitialState::Site(idx))
            } else if let Some(rest) = spec.strip_prefix("p:") {
                let p = rest
                    .parse()
                    .map_err(|_| err(format!("bad mode number in `{spec}`")))?;
                Ok(InitialState::RingMode(p))
            } else if let Some(rest) = spec.strip_prefix("mode:") {
                let k = rest
                    .parse()
                    .map_err(|_| err(format!("bad mode index in `{spec}`")))?;
                Ok(InitialState::SortedMode(k))
            } else {
                Err(err(format!(
                    "unknown initial state `{spec}` (use uniform, z, site:A, p:K or mode:K)"
                )))
            }
        }
    }
}

/// Validates the merged configuration into an executable plan.
pub fn validate(cfg: &RunConfig) -> Result<Plan, ConfigError> {
    let command = cfg
        .command
        .as_deref()
        .ok_or_else(|| err("no command given (flags or config file)"))?;
    let shift_mode = match cfg.shift_mode.as_deref() {
        None | Some("approximate") => ShiftMode::Approximate,
        Some("exact") => ShiftMode::Exact,
        Some(other) => return Err(err(format!("unknown shift_mode `{other}`"))),
    };
    let format = match cfg.format.as_deref() {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => return Err(err(format!("unknown format `{other}`"))),
    };
    let jobs = cfg.jobs.unwrap_or(1).max(1);

    let sweep_bounds = |cmd: &str| -> Result<(f64, f64, f64), ConfigError> {
        let from = positive(require(cfg.from, "`from`", cmd)?, "from")?;
        let to = require(cfg.to, "`to`", cmd)?;
        if to <= from {
            return Err(err("`to` must exceed `from`"));
        }
        let step = positive(cfg.step.unwrap_or(0.01), "step")?;
        Ok((from, to, step))
    };
    let n_bounds = |cmd: &str| -> Result<(usize, usize), ConfigError> {
        let n_from = require(cfg.n_from, "`n_from`", cmd)?;
        let n_to = require(cfg.n_to, "`n_to`", cmd)?;
        if n_from < 2 || n_from > n_to || n_to > subrad::trapping::N_MAX {
            return Err(err(format!(
                "atom-number range must lie within [2, {}]",
                subrad::trapping::N_MAX
            )));
        }
        Ok((n_from, n_to))
    };
    let time_grid = |cmd: &str| -> Result<(f64, usize), ConfigError> {
        let t_max = positive(require(cfg.t_max, "`t_max`", cmd)?, "t_max")?;
        let t_points = cfg.t_points.unwrap_or(201);
        if t_points < 2 {
            return Err(err("need at least 2 time points"));
        }
        Ok((t_max, t_points))
    };

    let run = match command {
        "modes" => Run::Modes {
            geometry: parse_geometry(cfg, command)?,
        },
        "sweep-radius" => {
            let n = require(cfg.n, "an atom count `n`", command)?;
            let (from, to, step) = sweep_bounds(command)?;
            Run::SweepRadius {
                n,
                center: cfg.center.unwrap_or(false),
                from,
                to,
                step,
            }
        }
        "sweep-n" => {
            let (n_from, n_to) = n_bounds(command)?;
            let kind = match cfg.geometry.as_deref() {
                Some("ring") => SweepNKind::Ring {
                    radius: positive(require(cfg.radius, "`radius`", command)?, "radius")?,
                },
                Some("chain") => {
                    if let Some(l) = cfg.length {
                        if cfg.spacing.is_some() {
                            return Err(err("give either `spacing` or `length`, not both"));
                        }
                        SweepNKind::ChainLength {
                            length: positive(l, "length")?,
                        }
                    } else {
                        SweepNKind::ChainSpacing {
                            spacing: positive(
                                require(cfg.spacing, "`spacing` or `length`", command)?,
                                "spacing",
                            )?,
                        }
                    }
                }
                _ => return Err(err("`sweep-n` requires geometry ring or chain")),
            };
            Run::SweepN { kind, n_from, n_to }
        }
        "beats" => {
            let n = require(cfg.n, "an atom count `n`", command)?;
            let kind = if cfg.t_max.is_some() {
                let radius = positive(require(cfg.radius, "`radius`", command)?, "radius")?;
                let (t_max, t_points) = time_grid(command)?;
                BeatsKind::TimeSeries {
                    radius,
                    t_max,
                    t_points,
                }
            } else {
                let (from, to, step) = sweep_bounds(command)?;
                BeatsKind::FrequencySweep { from, to, step }
            };
            Run::Beats { n, kind }
        }
        "survival" => {
            let geometry = parse_geometry(cfg, command)?;
            let initial = parse_initial(cfg.initial.as_deref().unwrap_or("uniform"))?;
            let (t_max, t_points) = time_grid(command)?;
            Run::Survival {
                geometry,
                initial,
                t_max,
                t_points,
            }
        }
        "crossings" => {
            let n = require(cfg.n, "an atom count `n`", command)?;
            let (from, to, step) = sweep_bounds(command)?;
            Run::Crossings { n, from, to, step }
        }
        "trapping" => {
            let radius = positive(require(cfg.radius, "`radius`", command)?, "radius")?;
            let (n_from, n_to) = n_bounds(command)?;
            Run::Trapping {
                radius,
                n_from,
                n_to,
            }
        }
        "compare" => {
            let n = require(cfg.n, "an atom count `n`", command)?;
            if n < 3 {
                return Err(err("comparison needs at least 3 atoms"));
            }
            let target = positive(
                require(cfg.target_neg_log, "`target_neg_log`", command)?,
                "target_neg_log",
            )?;
            Run::Compare {
                n,
                target_neg_log: target,
            }
        }
        other => return Err(err(format!("unknown command `{other}`"))),
    };
    Ok(Plan {
        run,
        shift_mode,
        format,
        out: cfg.out.clone(),
        jobs,
    })
}
