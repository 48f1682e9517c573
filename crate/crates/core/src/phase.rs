//! Canonical evaluation of roots of unity.
//!
//! The mode sums and eigenvector coefficients rely on exact symmetries of
//! `exp(2*pi*i*k/n)` under `k -> n - k`. Reducing the index before calling
//! the trig kernels makes those symmetries hold bitwise: `cos_2pi(k, n)`
//! returns identical values for `k` and `n - k`, and `unit_root(n - k, n)`
//! is the exact conjugate of `unit_root(k, n)`.

use core::f64::consts::TAU;

/// `cos(2*pi*k/n)` with the index reduced to `[0, n/2]`.
pub fn cos_2pi(k: usize, n: usize) -> f64 {
    let k = k % n;
    let k = k.min(n - k);
    if k == 0 {
        return 1.0;
    }
    if 2 * k == n {
        return -1.0;
    }
    if 4 * k == n {
        return 0.0;
    }
    libm::cos(TAU * k as f64 / n as f64)
}

/// `sin(2*pi*k/n)`, odd under `k -> n - k` by construction.
pub fn sin_2pi(k: usize, n: usize) -> f64 {
    let k = k % n;
    if k == 0 || 2 * k == n {
        return 0.0;
    }
    if k > n - k {
        return -sin_2pi(n - k, n);
    }
    if 4 * k == n {
        return 1.0;
    }
    libm::sin(TAU * k as f64 / n as f64)
}

/// `exp(2*pi*i*k/n)` as `(cos, sin)`.
pub fn unit_root(k: usize, n: usize) -> (f64, f64) {
    (cos_2pi(k, n), sin_2pi(k, n))
}
