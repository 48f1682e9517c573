//! Time-domain quantities: survival probability in the radiationless
//! subspace, quantum beats of the two zero-sector branches, and level
//! crossings along radius sweeps.
//!
//! Times are measured in `1/Gamma`, frequencies in `Gamma`.

use alloc::vec::Vec;

use crate::correlation::ShiftMode;
use crate::eigen::principal_sqrt;
use crate::matrix::{dot_h, dot_t};
use crate::spectrum::{zero_pair, zero_sector, Spectrum, SpectrumError, ZeroBranchTracker};
use crate::C64;

/// Ascending nonnegative time samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvalidTimeGrid;

impl core::fmt::Display for InvalidTimeGrid {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "time grid must be nonnegative and strictly increasing")
    }
}

impl core::error::Error for InvalidTimeGrid {}

impl TimeGrid {
    pub fn from_values(values: Vec<f64>) -> Result<Self, InvalidTimeGrid> {
        if values.is_empty() || values[0] < 0.0 {
            return Err(InvalidTimeGrid);
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(InvalidTimeGrid);
        }
        Ok(Self { values })
    }

    /// `points` equidistant samples on `[0, t_max]`.
    pub fn linear(t_max: f64, points: usize) -> Result<Self, InvalidTimeGrid> {
        if points < 2 || !(t_max > 0.0) {
            return Err(InvalidTimeGrid);
        }
        let step = t_max / (points - 1) as f64;
        Self::from_values((0..points).map(|i| i as f64 * step).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DynamicsError {
    /// Initial coefficients not normalized.
    Normalization { deviation: f64 },
    Spectrum(SpectrumError),
}

impl core::fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::Normalization { deviation } => {
                write!(f, "initial coefficients deviate from unit norm by {deviation:e}")
            }
            Self::Spectrum(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<SpectrumError> for DynamicsError {
    fn from(e: SpectrumError) -> Self {
        Self::Spectrum(e)
    }
}

/// Probability that the excitation is still trapped in the atomic sample
/// at each grid time, for the normalized initial coefficients `c`.
pub fn survival_probability(
    spectrum: &Spectrum,
    c: &[C64],
    grid: &TimeGrid,
) -> Result<Vec<(f64, f64)>, DynamicsError> {
    assert_eq!(c.len(), spectrum.dim(), "coefficient dimension mismatch");
    let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let deviation = (norm - 1.0).abs();
    if deviation > 1e-8 {
        return Err(DynamicsError::Normalization { deviation });
    }
    let modes = &spectrum.modes;
    let np = modes.len();
    // mode amplitudes of the initial state and Hermitean mode overlaps
    let amps: Vec<C64> = modes.iter().map(|m| dot_t(&m.left, c)).collect();
    let mut overlaps = Vec::with_capacity(np * np);
    for m2 in modes {
        for m1 in modes {
            overlaps.push(dot_h(&m2.right, &m1.right));
        }
    }
    let mut out = Vec::with_capacity(grid.values.len());
    for &t in &grid.values {
        let phases: Vec<C64> = modes
            .iter()
            .zip(&amps)
            .map(|(m, a)| a * C64::new(-0.5 * m.rate_rel * t, -m.shift_rel * t).exp())
            .collect();
        let mut p = C64::new(0.0, 0.0);
        for i2 in 0..np {
            for i1 in 0..np {
                p += phases[i2].conj() * phases[i1] * overlaps[i2 * np + i1];
            }
        }
        debug_assert!(p.im.abs() < 1e-10, "imaginary residue {:e}", p.im);
        out.push((t, p.re));
    }
    Ok(out)
}

/// Beat frequency of the two zero-sector branches, in units of `Gamma`.
pub fn beat_frequency(n: usize, r: f64, mode: ShiftMode) -> Result<f64, DynamicsError> {
    let sector = zero_sector(n, r, mode)?;
    let alpha = sector.a - C64::new(0.0, 1.0);
    let s = principal_sqrt(alpha * alpha + 4.0 * sector.b * sector.b);
    Ok(0.5 * s.re)
}

/// Population transfer between the uniform ring state and the central
/// excitation, normalized by the mixing prefactor.
#[derive(Clone, Debug)]
pub struct BeatResult {
    /// Beat frequency in units of `Gamma`.
    pub omega_r: f64,
    /// `|sin(theta) cos(theta)|^2`; multiplies `p_transfer` to give the
    /// physical probability.
    pub prefactor: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// `(t, bracket)` with
    /// `bracket = e^{-G+ t} + e^{-G- t} - 2 e^{-(G+ + G-)t/2} cos(dw t)`.
    pub p_transfer: Vec<(f64, f64)>,
}

/// Transfer probability from the central excitation to the uniform ring
/// state over the grid.
pub fn transition_probability_z_to_0(
    n: usize,
    r: f64,
    grid: &TimeGrid,
    mode: ShiftMode,
) -> Result<BeatResult, DynamicsError> {
    let pair = zero_pair(n, r, mode)?;
    let sector = zero_sector(n, r, mode)?;
    let c = sector.vector_ratio();
    let one = C64::new(1.0, 0.0);
    let prefactor = (c / (one + c * c)).norm_sqr();
    let gamma_plus = pair.mu_plus.im;
    let gamma_minus = pair.mu_minus.im;
    let dw = -0.5 * (pair.mu_plus.re - pair.mu_minus.re);
    let p_transfer = grid
        .values()
        .iter()
        .map(|&t| {
            let bracket = libm::exp(-gamma_plus * t) + libm::exp(-gamma_minus * t)
                - 2.0 * libm::exp(-0.5 * (gamma_plus + gamma_minus) * t) * libm::cos(dw * t);
            (t, bracket)
        })
        .collect();
    Ok(BeatResult {
        omega_r: beat_frequency(n, r, mode)?,
        prefactor,
        gamma_plus,
        gamma_minus,
        p_transfer,
    })
}

/// One level crossing of the zero-sector shifts.
#[derive(Clone, Copy, Debug)]
pub struct Crossing {
    /// Radius of the crossing, in wavelengths.
    pub radius: f64,
    /// Bracketing interval from the scan.
    pub bracket: (f64, f64),
    /// `|shift_plus - shift_minus|` at the reported radius.
    pub residual: f64,
}

#[derive(Clone, Debug, Default)]
pub struct CrossingReport {
    pub crossings: Vec<Crossing>,
}

/// Radius tolerance of the crossing bisection, in wavelengths.
const CROSSING_TOL: f64 = 1e-8;

/// Scans `[r_min, r_max]` in steps of `step` for crossings of the smooth
/// zero-sector shift branches, bisecting each sign change.
pub fn find_crossings(
    n: usize,
    r_min: f64,
    r_max: f64,
    step: f64,
    mode: ShiftMode,
) -> Result<CrossingReport, DynamicsError> {
    assert!(r_min > 0.0 && r_max > r_min && step > 0.0, "bad scan range");
    let mut tracker = ZeroBranchTracker::new(n, mode);
    let shift_diff = |pair: &crate::spectrum::ZeroPair| -0.5 * (pair.mu_plus.re - pair.mu_minus.re);

    let mut report = CrossingReport::default();
    let mut r_prev = r_min;
    let mut pair_prev = tracker.eval(r_min)?;
    let mut d_prev = shift_diff(&pair_prev);
    let steps = libm::ceil((r_max - r_min) / step) as usize;
    for k in 1..=steps {
        let r = (r_min + k as f64 * step).min(r_max);
        let pair = tracker.eval(r)?;
        let d = shift_diff(&pair);
        if d_prev == 0.0 {
            report.crossings.push(Crossing {
                radius: r_prev,
                bracket: (r_prev, r_prev),
                residual: 0.0,
            });
        } else if d_prev.signum() != d.signum() && d != 0.0 {
            // bisect, continuing branches from the left endpoint values
            let (mut lo, mut hi) = (r_prev, r);
            let (mut state_lo, mut d_lo) = (pair_prev, d_prev);
            while hi - lo > CROSSING_TOL {
                let mid = 0.5 * (lo + hi);
                let sector = zero_sector(n, mid, mode)?;
                let (p1, p2) = (sector.mu_principal_plus, sector.mu_principal_minus);
                let keep = (p1 - state_lo.mu_plus).norm() + (p2 - state_lo.mu_minus).norm();
                let swap = (p2 - state_lo.mu_plus).norm() + (p1 - state_lo.mu_minus).norm();
                let pair_mid = if keep <= swap {
                    crate::spectrum::ZeroPair {
                        mu_plus: p1,
                        mu_minus: p2,
                        plus_is_principal: true,
                    }
                } else {
                    crate::spectrum::ZeroPair {
                        mu_plus: p2,
                        mu_minus: p1,
                        plus_is_principal: false,
                    }
                };
                let d_mid = shift_diff(&pair_mid);
                if d_mid == 0.0 || d_mid.signum() == d_lo.signum() {
                    lo = mid;
                    state_lo = pair_mid;
                    d_lo = d_mid;
                    if d_mid == 0.0 {
                        break;
                    }
                } else {
                    hi = mid;
                }
            }
            let radius = 0.5 * (lo + hi);
            let residual = {
                let sector = zero_sector(n, radius, mode)?;
                0.5 * (sector.mu_principal_plus.re - sector.mu_principal_minus.re).abs()
            };
            report.crossings.push(Crossing {
                radius,
                bracket: (r_prev, r),
                residual,
            });
        }
        r_prev = r;
        pair_prev = pair;
        d_prev = d;
        if r >= r_max {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{ring_modes_a, ring_modes_b, ModeLabel};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_state(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= norm;
        }
        v
    }

    #[test]
    fn time_grid_validation() {
        assert!(TimeGrid::linear(10.0, 5).is_ok());
        assert!(TimeGrid::linear(0.0, 5).is_err());
        assert!(TimeGrid::linear(1.0, 1).is_err());
        assert!(TimeGrid::from_values(vec![0.0, 0.0]).is_err());
        assert!(TimeGrid::from_values(vec![-1.0, 0.0]).is_err());
    }

    #[test]
    fn survival_starts_at_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let grid = TimeGrid::from_values(vec![0.0]).unwrap();
        for (sp, dim) in [
            (ring_modes_b(6, 0.8, ShiftMode::Approximate).unwrap(), 6),
            (ring_modes_a(5, 1.1, ShiftMode::Approximate).unwrap(), 6),
        ] {
            for _ in 0..25 {
                let c = random_state(dim, &mut rng);
                let p = survival_probability(&sp, &c, &grid).unwrap();
                assert!((p[0].1 - 1.0).abs() < 1e-10, "{}", p[0].1);
            }
        }
    }

    #[test]
    fn survival_rejects_unnormalized_state() {
        let sp = ring_modes_b(4, 0.5, ShiftMode::Approximate).unwrap();
        let c = vec![C64::new(0.9, 0.0); 4];
        assert!(matches!(
            survival_probability(&sp, &c, &TimeGrid::from_values(vec![0.0]).unwrap()),
            Err(DynamicsError::Normalization { .. })
        ));
    }

    #[test]
    fn eigenmode_decays_exponentially() {
        let sp = ring_modes_b(8, 0.9, ShiftMode::Approximate).unwrap();
        let grid = TimeGrid::linear(10.0, 101).unwrap();
        for p in [0usize, 3, 5] {
            let mode = sp.mode(ModeLabel::P(p)).unwrap();
            let data = survival_probability(&sp, &mode.right, &grid).unwrap();
            for (t, prob) in data {
                let expect = libm::exp(-mode.rate_rel * t);
                assert!((prob - expect).abs() < 1e-9, "p={p} t={t}: {prob} vs {expect}");
            }
        }
    }

    #[test]
    fn survival_stays_in_unit_interval_and_decays() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let sp = ring_modes_a(7, 0.6, ShiftMode::Approximate).unwrap();
        let grid = TimeGrid::linear(60.0, 121).unwrap();
        for _ in 0..10 {
            let c = random_state(8, &mut rng);
            let data = survival_probability(&sp, &c, &grid).unwrap();
            for &(_, p) in &data {
                assert!(p >= -1e-12 && p <= 1.0 + 1e-9, "{p}");
            }
            assert!(data.last().unwrap().1 < 1e-3);
        }
    }

    #[test]
    fn beat_frequency_equals_tracked_shift_difference() {
        for r in [0.3, 1.1, 2.4, 4.9] {
            let w = beat_frequency(10, r, ShiftMode::Approximate).unwrap();
            let pair = zero_pair(10, r, ShiftMode::Approximate).unwrap();
            let diff = 0.5 * (pair.mu_plus.re - pair.mu_minus.re).abs();
            assert!((w - diff).abs() < 1e-10, "r={r}: {w} vs {diff}");
            assert!(w >= 0.0);
        }
    }

    #[test]
    fn crossings_of_the_ten_atom_ring() {
        let report =
            find_crossings(10, 1.2, 5.2, 0.01, ShiftMode::Approximate).unwrap();
        assert_eq!(report.crossings.len(), 8, "crossings: {report:?}");
        for c in &report.crossings {
            assert!(c.bracket.0 <= c.radius && c.radius <= c.bracket.1);
            assert!(c.residual < 1e-6);
            let w = beat_frequency(10, c.radius, ShiftMode::Approximate).unwrap();
            assert!(w < 1e-6, "omega at crossing = {w:e}");
        }
        // no crossings at small radii
        let report =
            find_crossings(10, 0.05, 0.6, 0.01, ShiftMode::Approximate).unwrap();
        assert!(report.crossings.is_empty());
    }

    #[test]
    fn transfer_vanishes_at_t_zero_and_is_aperiodic_at_a_crossing() {
        let grid = TimeGrid::linear(8.0, 161).unwrap();
        let res = transition_probability_z_to_0(10, 2.0, &grid, ShiftMode::Approximate).unwrap();
        assert_eq!(res.p_transfer[0].1, 0.0);
        // at a crossing the bracket is a perfect square of exponentials
        let report = find_crossings(10, 1.2, 2.5, 0.01, ShiftMode::Approximate).unwrap();
        let rc = report.crossings[0].radius;
        let res = transition_probability_z_to_0(10, rc, &grid, ShiftMode::Approximate).unwrap();
        for &(t, b) in &res.p_transfer {
            let sq = libm::exp(-0.5 * res.gamma_plus * t) - libm::exp(-0.5 * res.gamma_minus * t);
            assert!((b - sq * sq).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn ten_atom_beats_are_practically_invisible() {
        // damping beats the beat period: a single significant local
        // maximum survives in the transfer curve
        let grid = TimeGrid::linear(40.0, 4001).unwrap();
        let res = transition_probability_z_to_0(10, 2.5, &grid, ShiftMode::Approximate).unwrap();
        let vals: Vec<f64> = res.p_transfer.iter().map(|&(_, b)| b).collect();
        let peak = vals.iter().cloned().fold(0.0f64, f64::max);
        let mut significant_maxima = 0;
        for w in vals.windows(3) {
            if w[1] > w[0] && w[1] > w[2] && w[1] > 0.01 * peak {
                significant_maxima += 1;
            }
        }
        assert_eq!(significant_maxima, 1, "beats visible at N=10");
    }
}
