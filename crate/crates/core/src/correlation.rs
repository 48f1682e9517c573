//! Scalar correlation functions coupling a pair of atoms at dimensionless
//! distance `X = k R = 2*pi*R/lambda`.
//!
//! Three functions fully encode the interaction for dipoles aligned
//! perpendicular to the plane of the configuration:
//!
//! * [`d1`] — the decay correlation, `(3/2)(sin X/X + cos X/X^2 - sin X/X^3)`,
//!   with `d1(0) = 1`;
//! * [`s_exact`] / [`s_approx`] — the level-shift correlation, either with
//!   its semi-infinite integral evaluated by adaptive quadrature or with
//!   the closed-form arctan/log approximation of that integral;
//! * [`m`] — the complex combination `S(X) + i D1(X)` that enters the
//!   channel matrix off-diagonals.
//!
//! The shift functions diverge to `-inf` at contact; distances below
//! [`X_MIN`] belong to the (renormalized) self-energy region and are
//! rejected.

use crate::quad;
use crate::C64;

/// Smallest admissible argument of the shift functions. Below this the
/// shift is dominated by the divergent self-energy, which is absorbed into
/// the renormalized transition energy rather than evaluated.
pub const X_MIN: f64 = 1e-6;

/// Crossover from the closed form of `D1` to its even Taylor series.
///
/// Below this point the three closed-form terms cancel to `O(1)` out of
/// `O(1/x^2)` magnitudes and the series is the accurate branch; at the
/// crossover both branches agree to better than 1e-13.
const D1_SERIES_CUTOFF: f64 = 0.1;

/// Default absolute tolerance for the shift-function quadrature.
const QUAD_ABS_TOL: f64 = 1e-10;

/// Upper limit of the truncated quadrature interval. The exponentially
/// damped tail beyond it is bounded by `exp(-U)(U^2+3U+4)/x^2` and is
/// folded into the error estimate.
const QUAD_UPPER: f64 = 40.0;

/// Coefficients of the even Taylor series of `D1`,
/// `(3/2) (-1)^j [1/(2j+1)! - 1/(2j+2)! + 1/(2j+3)!]`.
const D1_SERIES: [f64; 9] = [
    1.0,
    -0.2,
    1.0714285714285714e-2,
    -2.6455026455026455e-4,
    3.7578162578162578e-6,
    -3.4687534687534688e-8,
    2.2482661371550260e-10,
    -1.0795995856686800e-12,
    3.9952287298594242e-15,
];

/// Selects the evaluation route for the level-shift function `S`.
///
/// `Approximate` is the default; it replaces the quadrature by a closed
/// form and stays within 0.02 of the exact function for `X >= 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ShiftMode {
    Exact,
    #[default]
    Approximate,
}

/// Argument below the admissible domain of the shift functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainError {
    pub x: f64,
}

impl core::fmt::Display for DomainError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "distance argument {:e} below the shift-function cutoff {:e}",
            self.x, X_MIN
        )
    }
}

impl core::error::Error for DomainError {}

/// Decay correlation function `D1(X)`; total on `x >= 0`, `d1(0) = 1`.
pub fn d1(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "d1 takes a nonnegative distance");
    if x < D1_SERIES_CUTOFF {
        let x2 = x * x;
        let mut acc = 0.0;
        let mut pow = 1.0;
        for c in D1_SERIES {
            acc += c * pow;
            pow *= x2;
        }
        acc
    } else {
        let (s, c) = libm::sincos(x);
        1.5 * (s / x + c / (x * x) - s / (x * x * x))
    }
}

/// Shift correlation `S(X)` with the integral term evaluated by adaptive
/// quadrature to absolute tolerance `1e-10`.
pub fn s_exact(x: f64) -> Result<f64, DomainError> {
    s_exact_tol(x, QUAD_ABS_TOL)
}

/// [`s_exact`] with a caller-chosen quadrature tolerance, mainly for
/// convergence studies.
pub fn s_exact_tol(x: f64, abs_tol: f64) -> Result<f64, DomainError> {
    if !(x >= X_MIN) {
        return Err(DomainError { x });
    }
    let (integral, _err) = quad::integrate(
        |u| libm::exp(-u) * (1.0 + u + u * u) / (u * u + x * x),
        0.0,
        QUAD_UPPER,
        abs_tol,
        1e-13,
    );
    let (s, c) = libm::sincos(x);
    Ok(1.5 * (c / x - s / (x * x) - c / (x * x * x) + integral / (core::f64::consts::PI * x * x)))
}

/// Closed-form approximation of the shift correlation `S(X)`.
pub fn s_approx(x: f64) -> Result<f64, DomainError> {
    if !(x >= X_MIN) {
        return Err(DomainError { x });
    }
    let x2 = x * x;
    let bracket = (1.0 - x2) / x * libm::atan(1.0 / x) + 1.0 + 0.5 * libm::log1p(1.0 / x2);
    let (s, c) = libm::sincos(x);
    Ok(1.5 * (c / x - s / x2 - c / (x2 * x) + bracket / (core::f64::consts::PI * x2)))
}

/// Complex coupling `M(X) = S(X) + i D1(X)` with `S` chosen by `mode`.
pub fn m(x: f64, mode: ShiftMode) -> Result<C64, DomainError> {
    let shift = match mode {
        ShiftMode::Exact => s_exact(x)?,
        ShiftMode::Approximate => s_approx(x)?,
    };
    Ok(C64::new(shift, d1(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d1_at_zero_is_one_exactly() {
        assert_eq!(d1(0.0), 1.0);
    }

    #[test]
    fn d1_closed_form_values() {
        // high-precision evaluations of the closed form
        assert!((d1(core::f64::consts::PI) - (-0.15198177546350666)).abs() < 1e-15);
        assert!((d1(core::f64::consts::TAU) - 0.037995443865876664).abs() < 1e-15);
        assert!((d1(1.0) - 0.8104534588022096).abs() < 1e-15);
    }

    #[test]
    fn d1_decays_at_infinity() {
        for x in [50.0, 100.0, 500.0, 1e4] {
            assert!(d1(x).abs() < 1.6 / x);
        }
    }

    #[test]
    fn d1_bounded_by_one_on_dense_grid() {
        let mut max = 0.0f64;
        for k in 0..=10_000 {
            let x = k as f64 * 0.01;
            let v = d1(x).abs();
            if x > 0.0 {
                assert!(v < 1.0, "|d1({x})| = {v}");
            }
            max = max.max(v);
        }
        assert_eq!(max, 1.0); // attained only at x = 0
    }

    #[test]
    fn d1_series_matches_closed_form_at_cutoff() {
        let series = |x: f64| {
            let x2 = x * x;
            let mut acc = 0.0;
            let mut pow = 1.0;
            for c in D1_SERIES {
                acc += c * pow;
                pow *= x2;
            }
            acc
        };
        let closed = |x: f64| {
            let (s, c) = libm::sincos(x);
            1.5 * (s / x + c / (x * x) - s / (x * x * x))
        };
        for x in [0.05, 0.08, 0.0999, 0.1001, 0.12, 0.2] {
            assert!(
                (series(x) - closed(x)).abs() <= 1e-12,
                "series/closed mismatch at {x}: {:e}",
                (series(x) - closed(x)).abs()
            );
        }
    }

    #[test]
    fn shift_domain_is_guarded() {
        assert!(s_exact(1e-7).is_err());
        assert!(s_approx(0.0).is_err());
        assert!(s_approx(-1.0).is_err());
        assert!(m(1e-9, ShiftMode::Approximate).is_err());
        assert!(s_approx(X_MIN).is_ok());
    }

    #[test]
    fn s_exact_oracle_values() {
        // independent quadrature at 1e-12 tolerance (mpmath, 40 digits)
        assert!((s_exact_tol(0.1, 1e-12).unwrap() - (-745.46587093356120)).abs() < 1e-8);
        assert!((s_exact_tol(1.0, 1e-12).unwrap() - (-0.62079074814458625)).abs() < 1e-10);
        assert!((s_exact_tol(2.0, 1e-12).unwrap() - (-0.50989353176284771)).abs() < 1e-10);
        assert!(s_exact(0.1).unwrap() < -10.0);
    }

    #[test]
    fn s_approx_oracle_values() {
        // term-by-term high-precision evaluation of the closed form
        assert!((s_approx(core::f64::consts::TAU).unwrap() - 0.23324091843883583).abs() < 1e-12);
        assert!((s_approx(1.0).unwrap() - (-0.61926494782167006)).abs() < 1e-12);
        assert!((s_approx(core::f64::consts::PI).unwrap() - (-0.42046636158881981)).abs() < 1e-12);
        assert!((s_approx(0.1).unwrap() - (-639.24422190867955)).abs() < 1e-9);
    }

    #[test]
    fn shift_functions_vanish_at_infinity() {
        for x in [100.0, 500.0, 2000.0] {
            assert!(s_exact(x).unwrap().abs() < 2.0 / x);
            assert!(s_approx(x).unwrap().abs() < 2.0 / x);
        }
    }

    #[test]
    fn exact_and_approx_agree_within_band() {
        // quantification of the near-coincidence for X >= 2
        let mut worst = 0.0f64;
        for k in 0..=960 {
            let x = 2.0 + 0.05 * k as f64;
            let diff = (s_exact(x).unwrap() - s_approx(x).unwrap()).abs();
            worst = worst.max(diff);
        }
        assert!(worst < 0.02, "max |S - S_approx| = {worst}");
        assert!(worst > 0.01, "band unexpectedly tight: {worst}");
    }

    #[test]
    fn quadrature_tolerance_convergence() {
        // the quadrature tolerance applies to the integral; through the
        // 3/(2 pi x^2) prefactor it propagates to S, on top of the plain
        // rounding of a possibly huge function value
        for x in [0.01, 0.5, 3.0, 17.0] {
            let coarse = s_exact_tol(x, 1e-10).unwrap();
            let fine = s_exact_tol(x, 5e-11).unwrap();
            let budget =
                1e-10 * 1.5 / (core::f64::consts::PI * x * x) + 8.0 * f64::EPSILON * coarse.abs();
            assert!(
                (coarse - fine).abs() <= budget.max(1e-10),
                "x={x}: {coarse} vs {fine}"
            );
        }
    }

    #[test]
    fn m_composes_shift_and_decay() {
        let x = core::f64::consts::PI;
        let v = m(x, ShiftMode::Approximate).unwrap();
        assert_eq!(v.im, d1(x));
        assert_eq!(v.re, s_approx(x).unwrap());
        let v = m(2.0, ShiftMode::Exact).unwrap();
        assert_eq!(v.re, s_exact(2.0).unwrap());
        // decay at large argument
        let far = m(300.0, ShiftMode::Approximate).unwrap();
        assert!(far.norm() < 1e-2);
    }
}
