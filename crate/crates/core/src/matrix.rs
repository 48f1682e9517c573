//! Minimal dense complex matrix used by the channel-matrix construction
//! and the eigensolver. Row-major storage.

use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `u^T M` for a row vector `u` (no conjugation).
    pub fn vec_mul(&self, u: &[C64]) -> Vec<C64> {
        assert_eq!(u.len(), self.n);
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let ui = u[i];
            if ui == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..self.n {
                out[j] += ui * self[(i, j)];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// Plain (transpose, unconjugated) dot product `u . v`.
pub fn dot_t(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Hermitean dot product `conj(u) . v`.
pub fn dot_h(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_against_hand_computed() {
        let a = CMatrix::from_fn(2, |i, j| C64::new((i + 1) as f64, j as f64));
        let b = CMatrix::identity(2);
        assert_eq!(a.mul(&b), a);
        let v = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let av = a.mul_vec(&v);
        // row 0: (1,0i)*(1) + (1,1i)*(i) = 1 + (i - 1) = (0, 1i)... explicitly:
        assert_eq!(av[0], C64::new(1.0, 0.0) + C64::new(1.0, 1.0) * C64::new(0.0, 1.0));
    }

    #[test]
    fn row_times_matrix_matches_transpose_route() {
        let a = CMatrix::from_fn(3, |i, j| C64::new(i as f64 - j as f64, (i * j) as f64));
        let u = [C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, 1.0)];
        let left = a.vec_mul(&u);
        let right = a.transpose().mul_vec(&u);
        for (x, y) in left.iter().zip(right.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
    }
}
