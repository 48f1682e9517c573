//! Command execution and output rendering.
//!
//! Every command assembles its complete output in memory first and only
//! then writes it out, so a late numerical failure never leaves a partial
//! artifact behind. Floats are rendered with Rust's shortest round-trip
//! formatting, which makes reruns byte-identical.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use subrad::dynamics::{
    beat_frequency, find_crossings, survival_probability, transition_probability_z_to_0, TimeGrid,
};
use subrad::trapping::{
    chain_record_length, chain_record_spacing, compare_ring_chain, fit_trapping_law, ring_record,
    SweepRecord, TrappingError,
};
use subrad::dynamics::DynamicsError;
use subrad::{
    chain_modes, ring_modes_a, ring_modes_b, zero_sector, C64, Configuration, EigenMode,
    ModeLabel, ShiftMode, Spectrum, SpectrumError, ZeroBranchTracker,
};

use crate::config::{
    BeatsKind, Geometry, InitialState, OutputFormat, Plan, Run, SweepNKind, SCHEMA_VERSION,
};

pub enum CliError {
    Config(String),
    Numeric(String),
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        Self::Numeric(e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        Self::Numeric(e.to_string())
    }
}

impl From<TrappingError> for CliError {
    fn from(e: TrappingError) -> Self {
        Self::Numeric(e.to_string())
    }
}

fn json_error(e: serde_json::Error) -> CliError {
    CliError::Numeric(format!("serialization failed: {e}"))
}

// ---------------------------------------------------------------------
// JSON documents (round-trippable)
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct ModeRecord {
    pub label: String,
    pub re_mu: f64,
    pub im_mu: f64,
    pub shift_rel: f64,
    pub rate_rel: f64,
    pub coefficients: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct ModesDoc {
    pub schema_version: u32,
    pub modes: Vec<ModeRecord>,
    pub degeneracy_classes: Vec<Vec<String>>,
    pub min_rate_label: String,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SweepRadiusDoc {
    pub schema_version: u32,
    pub labels: Vec<String>,
    /// Per radius: `[shift_rel, rate_rel]` for each label.
    pub rows: Vec<SweepRadiusRow>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SweepRadiusRow {
    pub r: f64,
    pub values: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub gamma_min_rel: f64,
    pub neg_log: f64,
    pub nn_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nn_arc: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SweepNDoc {
    pub schema_version: u32,
    pub records: Vec<SweepRow>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct FitDoc {
    pub n_hat: f64,
    pub slope: f64,
    pub intercept: f64,
    pub fit_window: [usize; 2],
    pub residual: f64,
    pub empirical_onset: Option<usize>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct TrappingDoc {
    pub schema_version: u32,
    pub fit: FitDoc,
    pub records: Vec<SweepRow>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct BeatsSweepDoc {
    pub schema_version: u32,
    pub rows: Vec<BeatsSweepRow>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct BeatsSweepRow {
    pub r: f64,
    pub omega_r: f64,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct BeatsTimeDoc {
    pub schema_version: u32,
    pub omega_r: f64,
    pub prefactor: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// `[t, bracket]` rows; multiply by `prefactor` for the probability.
    pub p_transfer: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SurvivalDoc {
    pub schema_version: u32,
    pub rows: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CrossingsDoc {
    pub schema_version: u32,
    pub crossings: Vec<CrossingRow>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CrossingRow {
    pub radius: f64,
    pub bracket: [f64; 2],
    pub residual: f64,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CompareDoc {
    pub schema_version: u32,
    pub ring_nn: f64,
    pub ring_nn_chord: f64,
    pub ring_radius: f64,
    pub chain_nn: f64,
    pub ratio: f64,
}

// ---------------------------------------------------------------------
// execution
// ---------------------------------------------------------------------

/// Runs the plan and returns the rendered artifact.
pub fn execute(plan: &Plan) -> Result<String, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| dispatch(plan))
}

fn dispatch(plan: &Plan) -> Result<String, CliError> {
    let mode = plan.shift_mode;
    match &plan.run {
        Run::Modes { geometry } => run_modes(*geometry, mode, plan.format),
        Run::SweepRadius {
            n,
            center,
            from,
            to,
            step,
        } => run_sweep_radius(*n, *center, *from, *to, *step, mode, plan.format),
        Run::SweepN { kind, n_from, n_to } => run_sweep_n(*kind, *n_from, *n_to, mode, plan.format),
        Run::Beats { n, kind } => run_beats(*n, *kind, mode, plan.format),
        Run::Survival {
            geometry,
            initial,
            t_max,
            t_points,
        } => run_survival(*geometry, initial, *t_max, *t_points, mode, plan.format),
        Run::Crossings { n, from, to, step } => {
            run_crossings(*n, *from, *to, *step, mode, plan.format)
        }
        Run::Trapping {
            radius,
            n_from,
            n_to,
        } => run_trapping(*radius, *n_from, *n_to, mode, plan.format),
        Run::Compare { n, target_neg_log } => {
            run_compare(*n, *target_neg_log, mode, plan.format)
        }
    }
}

fn spectrum_for(geometry: Geometry, mode: ShiftMode) -> Result<Spectrum, SpectrumError> {
    match geometry {
        Geometry::Ring { n, radius, center } => {
            if center {
                ring_modes_a(n, radius, mode)
            } else {
                ring_modes_b(n, radius, mode)
            }
        }
        Geometry::Chain { n, spacing } => chain_modes(n, spacing, mode),
    }
}

fn mode_record(m: &EigenMode) -> ModeRecord {
    ModeRecord {
        label: m.label.to_string(),
        re_mu: m.mu.re,
        im_mu: m.mu.im,
        shift_rel: m.shift_rel,
        rate_rel: m.rate_rel,
        coefficients: m.right.iter().map(|z| [z.re, z.im]).collect(),
    }
}

fn run_modes(geometry: Geometry, mode: ShiftMode, format: OutputFormat) -> Result<String, CliError> {
    let sp = spectrum_for(geometry, mode)?;
    match format {
        OutputFormat::Json => {
            let doc = ModesDoc {
                schema_version: SCHEMA_VERSION,
                modes: sp.modes.iter().map(mode_record).collect(),
                degeneracy_classes: sp
                    .degeneracy_classes
                    .iter()
                    .map(|c| c.iter().map(|l| l.to_string()).collect())
                    .collect(),
                min_rate_label: sp.min_rate_mode().label.to_string(),
            };
            serde_json::to_string_pretty(&doc).map_err(json_error)
        }
        OutputFormat::Csv => {
            let mut out = String::from("label,re_mu,im_mu,shift_rel,rate_rel\n");
            for m in &sp.modes {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    m.label, m.mu.re, m.mu.im, m.shift_rel, m.rate_rel
                )
                .unwrap();
            }
            Ok(out)
        }
    }
}

fn radius_grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let count = ((to - from) / step).ceil() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|k| (from + k as f64 * step).min(to)).collect();
    grid.dedup_by(|a, b| a == b);
    grid
}

fn run_sweep_radius(
    n: usize,
    center: bool,
    from: f64,
    to: f64,
    step: f64,
    mode: ShiftMode,
    format: OutputFormat,
) -> Result<String, CliError> {
    let grid = radius_grid(from, to, step);
    let (labels, rows) = if center {
        // zero-sector branches, smooth-tracked, with the centerless p=0
        // mode for comparison
        let sectors: Vec<_> = grid
            .par_iter()
            .map(|&r| -> Result<_, SpectrumError> {
                let sector = zero_sector(n, r, mode)?;
                let b0 = ring_modes_b(n, r, mode)?;
                let m0 = b0.mode(ModeLabel::P(0)).expect("p=0 present").mu;
                Ok((sector, m0))
            })
            .collect::<Result<_, _>>()?;
        let mut tracker = ZeroBranchTracker::new(n, mode);
        let mut rows = Vec::with_capacity(grid.len());
        for (&r, (sector, m0)) in grid.iter().zip(sectors.iter()) {
            let pair = tracker.advance(r, sector)?;
            rows.push(SweepRadiusRow {
                r,
                values: vec![
                    [-0.5 * pair.mu_plus.re, pair.mu_plus.im],
                    [-0.5 * pair.mu_minus.re, pair.mu_minus.im],
                    [-0.5 * m0.re, m0.im],
                ],
            });
        }
        (
            vec!["0+".to_string(), "0-".to_string(), "p0_ring".to_string()],
            rows,
        )
    } else {
        let rows: Vec<SweepRadiusRow> = grid
            .par_iter()
            .map(|&r| -> Result<SweepRadiusRow, SpectrumError> {
                let sp = ring_modes_b(n, r, mode)?;
                let values = (0..n)
                    .map(|p| {
                        let m = sp.mode(ModeLabel::P(p)).expect("mode present");
                        [m.shift_rel, m.rate_rel]
                    })
                    .collect();
                Ok(SweepRadiusRow { r, values })
            })
            .collect::<Result<_, _>>()?;
        ((0..n).map(|p| format!("p{p}")).collect(), rows)
    };
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&SweepRadiusDoc {
            schema_version: SCHEMA_VERSION,
            labels,
            rows,
        })
        .map_err(json_error),
        OutputFormat::Csv => {
            let mut out = String::from("r");
            for l in &labels {
                write!(out, ",shift_{l},rate_{l}").unwrap();
            }
            out.push('\n');
            for row in &rows {
                write!(out, "{}", row.r).unwrap();
                for v in &row.values {
                    write!(out, ",{},{}", v[0], v[1]).unwrap();
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn sweep_rows(
    kind: SweepNKind,
    n_from: usize,
    n_to: usize,
    mode: ShiftMode,
) -> Result<Vec<SweepRow>, TrappingError> {
    let ns: Vec<usize> = (n_from..=n_to).collect();
    let records: Vec<SweepRecord> = ns
        .par_iter()
        .map(|&n| match kind {
            SweepNKind::Ring { radius } => ring_record(radius, n, mode),
            SweepNKind::ChainSpacing { spacing } => chain_record_spacing(spacing, n, mode),
            SweepNKind::ChainLength { length } => chain_record_length(length, n, mode),
        })
        .collect::<Result<_, _>>()?;
    Ok(records
        .iter()
        .map(|rec| SweepRow {
            n: rec.n,
            gamma_min_rel: rec.gamma_min_rel,
            neg_log: rec.neg_log,
            nn_distance: rec.nn_distance,
            nn_arc: match kind {
                SweepNKind::Ring { radius } => {
                    Some(core::f64::consts::TAU * radius / rec.n as f64)
                }
                _ => None,
            },
        })
        .collect())
}

fn render_sweep_rows(rows: &[SweepRow], format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&SweepNDoc {
            schema_version: SCHEMA_VERSION,
            records: rows.to_vec(),
        })
        .map_err(json_error),
        OutputFormat::Csv => {
            let arc = rows.iter().any(|r| r.nn_arc.is_some());
            let mut out = String::from("n,gamma_min_rel,neg_log,nn_distance");
            if arc {
                out.push_str(",nn_arc");
            }
            out.push('\n');
            for r in rows {
                write!(
                    out,
                    "{},{},{},{}",
                    r.n, r.gamma_min_rel, r.neg_log, r.nn_distance
                )
                .unwrap();
                if let Some(a) = r.nn_arc {
                    write!(out, ",{a}").unwrap();
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn run_sweep_n(
    kind: SweepNKind,
    n_from: usize,
    n_to: usize,
    mode: ShiftMode,
    format: OutputFormat,
) -> Result<String, CliError> {
    let rows = sweep_rows(kind, n_from, n_to, mode)?;
    render_sweep_rows(&rows, format)
}

fn run_trapping(
    radius: f64,
    n_from: usize,
    n_to: usize,
    mode: ShiftMode,
    format: OutputFormat,
) -> Result<String, CliError> {
    let rows = sweep_rows(SweepNKind::Ring { radius }, n_from, n_to, mode)?;
    let records: Vec<SweepRecord> = rows
        .iter()
        .map(|r| SweepRecord {
            n: r.n,
            gamma_min_rel: r.gamma_min_rel,
            neg_log: r.neg_log,
            nn_distance: r.nn_distance,
        })
        .collect();
    let fit = fit_trapping_law(&records, radius)?;
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&TrappingDoc {
            schema_version: SCHEMA_VERSION,
            fit: FitDoc {
                n_hat: fit.n_hat,
                slope: fit.slope,
                intercept: fit.intercept,
                fit_window: [fit.fit_window.0, fit.fit_window.1],
                residual: fit.residual,
                empirical_onset: fit.empirical_onset,
            },
            records: rows,
        })
        .map_err(json_error),
        OutputFormat::Csv => render_sweep_rows(&rows, OutputFormat::Csv),
    }
}

fn run_beats(
    n: usize,
    kind: BeatsKind,
    mode: ShiftMode,
    format: OutputFormat,
) -> Result<String, CliError> {
    match kind {
        BeatsKind::FrequencySweep { from, to, step } => {
            let grid = radius_grid(from, to, step);
            let rows: Vec<BeatsSweepRow> = grid
                .par_iter()
                .map(|&r| -> Result<_, DynamicsError> {
                    Ok(BeatsSweepRow {
                        r,
                        omega_r: beat_frequency(n, r, mode)?,
                    })
                })
                .collect::<Result<_, _>>()?;
            match format {
                OutputFormat::Json => serde_json::to_string_pretty(&BeatsSweepDoc {
                    schema_version: SCHEMA_VERSION,
                    rows,
                })
                .map_err(json_error),
                OutputFormat::Csv => {
                    let mut out = String::from("r,omega_r\n");
                    for row in &rows {
                        writeln!(out, "{},{}", row.r, row.omega_r).unwrap();
                    }
                    Ok(out)
                }
            }
        }
        BeatsKind::TimeSeries {
            radius,
            t_max,
            t_points,
        } => {
            let grid = TimeGrid::linear(t_max, t_points)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let res = transition_probability_z_to_0(n, radius, &grid, mode)?;
            match format {
                OutputFormat::Json => serde_json::to_string_pretty(&BeatsTimeDoc {
                    schema_version: SCHEMA_VERSION,
                    omega_r: res.omega_r,
                    prefactor: res.prefactor,
                    gamma_plus: res.gamma_plus,
                    gamma_minus: res.gamma_minus,
                    p_transfer: res.p_transfer.iter().map(|&(t, v)| [t, v]).collect(),
                })
                .map_err(json_error),
                OutputFormat::Csv => {
                    let mut out = String::from("t,p_transfer_normalized\n");
                    for &(t, v) in &res.p_transfer {
                        writeln!(out, "{t},{v}").unwrap();
                    }
                    Ok(out)
                }
            }
        }
    }
}

fn initial_vector(
    config: &Configuration,
    spectrum: &Spectrum,
    initial: &InitialState,
) -> Result<Vec<C64>, CliError> {
    let dim = config.dim();
    let offset = usize::from(config.with_center());
    let zero = C64::new(0.0, 0.0);
    let mut v = vec![zero; dim];
    match initial {
        InitialState::Uniform => {
            // uniform over the outer atoms (all atoms for a chain)
            let count = dim - offset;
            let amp = C64::new(1.0 / (count as f64).sqrt(), 0.0);
            for z in v.iter_mut().skip(offset) {
                *z = amp;
            }
        }
        InitialState::Center => {
            if !config.with_center() {
                return Err(CliError::Config(
                    "initial state `z` needs a ring with central atom".into(),
                ));
            }
            v[0] = C64::new(1.0, 0.0);
        }
        InitialState::Site(idx) => {
            if *idx >= dim {
                return Err(CliError::Config(format!(
                    "site index {idx} outside 0..{dim}"
                )));
            }
            v[*idx] = C64::new(1.0, 0.0);
        }
        InitialState::RingMode(p) => {
            let m = spectrum.mode(ModeLabel::P(*p)).ok_or_else(|| {
                CliError::Config(format!("mode p:{p} not present in this spectrum"))
            })?;
            v.copy_from_slice(&m.right);
        }
        InitialState::SortedMode(k) => {
            let m = spectrum.modes.get(*k).ok_or_else(|| {
                CliError::Config(format!("mode index {k} outside the spectrum"))
            })?;
            v.copy_from_slice(&m.right);
        }
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(CliError::Config("initial state is empty".into()));
    }
    for z in v.iter_mut() {
        *z /= norm;
    }
    Ok(v)
}

fn run_survival(
    geometry: Geometry,
    initial: &InitialState,
    t_max: f64,
    t_points: usize,
    mode: ShiftMode,
    format: OutputFormat,
) -> Result<String, CliError> {
    let sp = spectrum_for(geometry, mode)?;
    let c = initial_vector(&sp.config.clone(), &sp, initial)?;
    let grid =
        TimeGrid::linear(t_max, t_points).map_err(|e| CliError::Config(e.to_string()))?;
    let data = survival_probability(&sp, &c, &grid)?;
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&SurvivalDoc {
            schema_version: SCHEMA_VERSION,
            rows: data.iter().map(|&(t, p)| [t, p]).collect(),
        })
        .map_err(json_error),
        OutputFormat::Csv => {
            let mut out = String::from("t,p\n");
            for (t, p) in data {
                writeln!(out, "{t},{p}").unwrap();
            }
            Ok(out)
        }
    }
}

fn run_crossings(
    n: usize,
    from: f64,
    to: f64,
    step: f64,
    mode: ShiftMode,
    format: OutputFormat,
) -> Result<String, CliError> {
    let report = find_crossings(n, from, to, step, mode)?;
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&CrossingsDoc {
            schema_version: SCHEMA_VERSION,
            crossings: report
                .crossings
                .iter()
                .map(|c| CrossingRow {
                    radius: c.radius,
                    bracket: [c.bracket.0, c.bracket.1],
                    residual: c.residual,
                })
                .collect(),
        })
        .map_err(json_error),
        OutputFormat::Csv => {
            let mut out = String::from("radius,bracket_lo,bracket_hi,residual\n");
            for c in &report.crossings {
                writeln!(out, "{},{},{},{}", c.radius, c.bracket.0, c.bracket.1, c.residual)
                    .unwrap();
            }
            Ok(out)
        }
    }
}

fn run_compare(
    n: usize,
    target: f64,
    mode: ShiftMode,
    format: OutputFormat,
) -> Result<String, CliError> {
    let cmp = compare_ring_chain(n, target, mode)?;
    let doc = CompareDoc {
        schema_version: SCHEMA_VERSION,
        ring_nn: cmp.ring_nn,
        ring_nn_chord: cmp.ring_nn_chord,
        ring_radius: cmp.ring_radius,
        chain_nn: cmp.chain_nn,
        ratio: cmp.ratio,
    };
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&doc).map_err(json_error),
        OutputFormat::Csv => {
            let mut out = String::from("ring_nn,ring_nn_chord,ring_radius,chain_nn,ratio\n");
            writeln!(
                out,
                "{},{},{},{},{}",
                doc.ring_nn, doc.ring_nn_chord, doc.ring_radius, doc.chain_nn, doc.ratio
            )
            .unwrap();
            Ok(out)
        }
    }
}
