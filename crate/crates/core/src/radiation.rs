//! Ring decay rates from the angular spectrum of the emitted radiation.
//!
//! The rate of the ring mode `p` admits the manifestly positive form
//!
//! ```text
//! rate_p = (3 N / 4) * sum_{m = p mod N} Int_0^pi sin^3(th) J_m(X_r sin th)^2 dth,
//! ```
//!
//! with `X_r = 2 pi r / lambda` and the sum over all integer orders
//! congruent to `p` modulo `N` (Jacobi-Anger expansion of the far-field
//! mode amplitude, integrated over emission directions; `sin^3` is the
//! dipole pattern for moments normal to the ring plane).
//!
//! Every term is a square, so this resolves rates far below the
//! cancellation floor (~1e-14) of the cosine-weighted mode sums, which
//! the photon-trapping sweeps require.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::quad;

const RESCALE_LIMIT: f64 = 1e250;

/// `J_m(x)` for `m = 0..=m_max` by Miller's downward recurrence,
/// normalized through `J_0 + 2 J_2 + 2 J_4 + ... = 1`, with on-the-fly
/// rescaling against overflow.
fn bessel_j_sequence(x: f64, m_max: usize, out: &mut Vec<f64>) {
    out.clear();
    out.resize(m_max + 1, 0.0);
    if x <= 1e-280 {
        out[0] = 1.0;
        return;
    }
    let mut start = m_max + 16 + (1.5 * x) as usize + libm::sqrt(40.0 * x) as usize;
    if start % 2 != 0 {
        start += 1;
    }
    let mut upper = 0.0f64; // J~_{k+1}
    let mut cur = 1e-300f64; // J~_k
    let mut norm = 0.0f64;
    let mut k = start;
    while k >= 1 {
        if k <= m_max {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let lower = (2.0 * k as f64 / x) * cur - upper;
        upper = cur;
        cur = lower;
        if cur.abs() > RESCALE_LIMIT {
            let inv = 1.0 / RESCALE_LIMIT;
            cur *= inv;
            upper *= inv;
            norm *= inv;
            for v in out.iter_mut() {
                *v *= inv;
            }
        }
        k -= 1;
    }
    out[0] = cur;
    norm += cur;
    if norm == 0.0 || !norm.is_finite() {
        for v in out.iter_mut() {
            *v = 0.0;
        }
        return;
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
}

/// `J_m(x)` for a single order.
#[cfg(test)]
pub(crate) fn bessel_j(m: usize, x: f64) -> f64 {
    let mut buf = Vec::new();
    bessel_j_sequence(x, m, &mut buf);
    buf[m]
}

/// `Int_0^pi sin^3(th) J_m(xr sin th)^2 dth`, symmetric about `pi/2`.
fn angular_integral(m: usize, xr: f64) -> f64 {
    let mut buf = Vec::new();
    let f = move |th: f64| {
        let s = libm::sin(th);
        bessel_j_sequence(xr * s, m, &mut buf);
        let j = buf[m];
        s * s * s * j * j
    };
    let (half, _) = quad::integrate(f, 0.0, core::f64::consts::FRAC_PI_2, 0.0, 1e-13);
    2.0 * half
}

/// Relative decay rate of ring mode `p` (`N` outer atoms, radius in
/// wavelengths) from the angular radiation integral.
pub(crate) fn ring_mode_rate(n: usize, p: usize, r_over_lambda: f64) -> f64 {
    let xr = TAU * r_over_lambda;
    let p = p % n;
    let mut total = 0.0f64;
    for shell in 0usize.. {
        let mut shell_sum = 0.0;
        if shell == 0 {
            shell_sum += angular_integral(p, xr);
        } else {
            // orders p + shell*N and |p - shell*N|
            shell_sum += angular_integral(p + shell * n, xr);
            shell_sum += angular_integral(shell * n - p, xr);
        }
        total += shell_sum;
        if shell > 0 && shell_sum <= total * 1e-18 {
            break;
        }
        if (shell + 1) * n > (3.0 * xr) as usize + 240 {
            break;
        }
    }
    0.75 * n as f64 * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_matches_reference_values() {
        // scipy.special.jv reference points
        let cases = [
            (0usize, 1.0, 0.7651976865579666),
            (1, 1.0, 0.44005058574493355),
            (2, 6.8, -0.3122775629282979),
            (10, 5.0, 0.0014678026473104737),
            (30, 6.283185307179586, 2.2483869311751556e-18),
            (0, 15.7, -0.14007021182904855),
        ];
        for (m, x, expect) in cases {
            let got = bessel_j(m, x);
            assert!(
                (got - expect).abs() <= 1e-12 * expect.abs().max(1e-9),
                "J_{m}({x}) = {got:e}, expected {expect:e}"
            );
        }
    }

    #[test]
    fn bessel_sum_rule() {
        // J_0^2 + 2 sum_{m>=1} J_m^2 = 1
        for x in [0.3, 2.0, 9.4, 18.0] {
            let mut buf = Vec::new();
            bessel_j_sequence(x, 80, &mut buf);
            let total = buf[0] * buf[0] + 2.0 * buf[1..].iter().map(|j| j * j).sum::<f64>();
            assert!((total - 1.0).abs() < 1e-12, "x={x}: {total}");
        }
    }

    #[test]
    fn tiny_argument_limits() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(5, 0.0), 0.0);
        // J_1(x) ~ x/2 for small x
        let x = 1e-8;
        assert!((bessel_j(1, x) / (x / 2.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_atom_rate_is_unity() {
        // N=1, p=0 reduces to the dipole pattern normalization
        let rate = ring_mode_rate(1, 0, 1e-9);
        assert!((rate - 1.0).abs() < 1e-12, "{rate}");
    }

    #[test]
    fn uniform_mode_superradiance_at_small_radius() {
        for n in [2usize, 7, 12] {
            let rate = ring_mode_rate(n, 0, 1e-6);
            assert!((rate - n as f64).abs() < 1e-8, "N={n}: {rate}");
        }
    }

    #[test]
    fn deep_subradiant_reference_value() {
        // frozen from a 50-digit computation of the same quantity
        let rate = ring_mode_rate(40, 20, 1.0);
        assert!(
            (rate / 1.170793385144e-16 - 1.0).abs() < 1e-9,
            "rate = {rate:e}"
        );
    }
}
