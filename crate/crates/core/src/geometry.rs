//! Atomic configurations and the cyclic-symmetry machinery of the ring:
//! site coordinates, dimensionless distance matrices, the shift operator
//! `T` generating `Z_N`, and the projectors onto its irreducible carrier
//! spaces.
//!
//! Site indexing follows the block layout of the channel matrix: for a
//! ring with central atom the center has index 0 and the outer atoms are
//! `1..=N`; without a center the outer atoms occupy `0..N` directly.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::matrix::CMatrix;
use crate::phase;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConfigKind {
    RingWithCenter,
    Ring,
    Chain,
}

/// A planar arrangement of atoms, coordinates in wavelength units.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub kind: ConfigKind,
    /// Number of outer atoms (total count for a chain).
    pub n_outer: usize,
    /// Ring radius or chain spacing, in wavelengths.
    pub scale: f64,
    /// Site coordinates; center first for `RingWithCenter`.
    pub sites: Vec<[f64; 2]>,
}

impl Configuration {
    /// Total number of atoms (matrix dimension).
    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    pub fn with_center(&self) -> bool {
        self.kind == ConfigKind::RingWithCenter
    }
}

/// Pairwise dimensionless distances `X_AB = 2 pi R_AB / lambda`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }
}

impl core::ops::Index<(usize, usize)> for DistanceMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

/// Invalid geometry parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InvalidConfig {
    TooFewAtoms { n: usize },
    NonPositiveScale { scale: f64 },
}

impl core::fmt::Display for InvalidConfig {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::TooFewAtoms { n } => write!(f, "need at least 2 atoms, got {n}"),
            Self::NonPositiveScale { scale } => {
                write!(f, "ring radius / chain spacing must be positive, got {scale}")
            }
        }
    }
}

impl core::error::Error for InvalidConfig {}

/// Requested representation index outside `0..N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexError {
    pub p: usize,
    pub n: usize,
}

impl core::fmt::Display for IndexError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "representation index {} outside 0..{}", self.p, self.n)
    }
}

impl core::error::Error for IndexError {}

fn check(n: usize, scale: f64) -> Result<(), InvalidConfig> {
    if n < 2 {
        return Err(InvalidConfig::TooFewAtoms { n });
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(InvalidConfig::NonPositiveScale { scale });
    }
    Ok(())
}

/// `N` atoms on a circle of radius `r_over_lambda`, optionally with one
/// more at the center. Outer atom `A` sits at angle `2 pi (A-1)/N`.
pub fn build_ring(
    n: usize,
    r_over_lambda: f64,
    with_center: bool,
) -> Result<Configuration, InvalidConfig> {
    check(n, r_over_lambda)?;
    let mut sites = Vec::with_capacity(n + usize::from(with_center));
    if with_center {
        sites.push([0.0, 0.0]);
    }
    for a in 0..n {
        let (c, s) = phase::unit_root(a, n);
        sites.push([r_over_lambda * c, r_over_lambda * s]);
    }
    Ok(Configuration {
        kind: if with_center {
            ConfigKind::RingWithCenter
        } else {
            ConfigKind::Ring
        },
        n_outer: n,
        scale: r_over_lambda,
        sites,
    })
}

/// `N` atoms on a line with next-neighbour spacing `d_over_lambda`.
pub fn build_chain(n: usize, d_over_lambda: f64) -> Result<Configuration, InvalidConfig> {
    check(n, d_over_lambda)?;
    let sites = (0..n).map(|a| [a as f64 * d_over_lambda, 0.0]).collect();
    Ok(Configuration {
        kind: ConfigKind::Chain,
        n_outer: n,
        scale: d_over_lambda,
        sites,
    })
}

/// Dimensionless distance matrix of a configuration.
pub fn distances(config: &Configuration) -> DistanceMatrix {
    let n = config.dim();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = config.sites[i][0] - config.sites[j][0];
            let dy = config.sites[i][1] - config.sites[j][1];
            let x = TAU * libm::hypot(dx, dy);
            data[i * n + j] = x;
            data[j * n + i] = x;
        }
    }
    DistanceMatrix { n, data }
}

/// Dimensionless first-row ring chords `X_{1A} = 2 pi * 2 r sin(pi(A-1)/N)`
/// for `A = 2..=N`, evaluated symmetrically so that `X_{1A} = X_{1,N-A+2}`
/// holds bitwise.
pub(crate) fn ring_first_row_x(n: usize, r_over_lambda: f64) -> Vec<f64> {
    (1..n)
        .map(|a| {
            let a_red = a.min(n - a);
            TAU * 2.0 * r_over_lambda * phase::sin_2pi(a_red, 2 * n)
        })
        .collect()
}

/// The cyclic shift `T` with `T|A> = |A-1>` on the outer atoms and
/// `T|z> = |z>` on the center, as a permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftOperator {
    pub n_outer: usize,
    pub with_center: bool,
    /// `col[i] = j` means `T[i, j] = 1`, i.e. `(T v)_i = v_j`.
    col: Vec<usize>,
}

/// Builds the shift operator for `N` outer atoms.
pub fn shift_operator(n: usize, with_center: bool) -> ShiftOperator {
    let offset = usize::from(with_center);
    let dim = n + offset;
    let mut col = vec![0usize; dim];
    for a in 0..n {
        // row (offset + a) carries its unit entry at column (offset + a + 1 mod n)
        col[offset + a] = offset + (a + 1) % n;
    }
    if with_center {
        col[0] = 0;
    }
    ShiftOperator {
        n_outer: n,
        with_center,
        col,
    }
}

impl ShiftOperator {
    pub fn dim(&self) -> usize {
        self.col.len()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim());
        for (i, &j) in self.col.iter().enumerate() {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// `T v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.col.iter().map(|&j| v[j]).collect()
    }

    /// `T^-1 M T` (pure index permutation, exact).
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.dim(), |i, j| m[(self.col[i], self.col[j])])
    }

    /// Composition `self^k` as a fresh permutation.
    pub fn power(&self, k: usize) -> ShiftOperator {
        let dim = self.dim();
        let mut col: Vec<usize> = (0..dim).collect();
        for _ in 0..k {
            col = col.iter().map(|&j| self.col[j]).collect();
        }
        ShiftOperator {
            n_outer: self.n_outer,
            with_center: self.with_center,
            col,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.col.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// Projector onto the carrier space of the representation `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    pub p: usize,
    pub matrix: CMatrix,
}

/// `P^p = (1/N) sum_A exp(-2 pi i p A / N) T^A`.
pub fn projector(p: usize, n: usize, with_center: bool) -> Result<Projector, IndexError> {
    if p >= n {
        return Err(IndexError { p, n });
    }
    let offset = usize::from(with_center);
    let dim = n + offset;
    let inv_n = 1.0 / n as f64;
    let mut matrix = CMatrix::zeros(dim);
    if with_center {
        matrix[(0, 0)] = if p == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        };
    }
    for b in 0..n {
        for c in 0..n {
            // sum over A of exp(-2 pi i p A/N) delta_{b, c-A} collapses to
            // the single term A = (c - b) mod N
            let k = (p * ((c + n - b) % n)) % n;
            let (re, im) = phase::unit_root(k, n);
            matrix[(offset + b, offset + c)] = C64::new(re * inv_n, -im * inv_n);
        }
    }
    Ok(Projector { p, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::vec_norm;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ring_rejects_bad_parameters() {
        assert!(build_ring(1, 1.0, false).is_err());
        assert!(build_ring(4, 0.0, false).is_err());
        assert!(build_ring(4, -2.0, true).is_err());
        assert!(build_chain(2, f64::NAN).is_err());
    }

    #[test]
    fn square_ring_distances() {
        let cfg = build_ring(4, 1.0, false).unwrap();
        let x = distances(&cfg);
        let r12 = x[(0, 1)] / TAU;
        let r13 = x[(0, 2)] / TAU;
        let r14 = x[(0, 3)] / TAU;
        assert!((r12 - core::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((r13 - 2.0).abs() < 1e-14);
        assert!((r14 - core::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn triangle_chord() {
        let cfg = build_ring(3, 0.5, false).unwrap();
        let x = distances(&cfg);
        // 2 r sin(pi/3) = sqrt(3)/2
        assert!((x[(0, 1)] / TAU - 3.0f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn center_distances_all_equal_radius() {
        for n in [3, 5, 8] {
            let cfg = build_ring(n, 0.73, true).unwrap();
            let x = distances(&cfg);
            for a in 1..=n {
                assert!((x[(0, a)] / TAU - 0.73).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn chain_distances() {
        let cfg = build_chain(3, 0.25).unwrap();
        let x = distances(&cfg);
        assert!((x[(0, 2)] / TAU - 0.5).abs() < 1e-15);
        let cfg = build_chain(2, 0.5).unwrap();
        let x = distances(&cfg);
        assert!((x[(0, 1)] - core::f64::consts::PI).abs() < 1e-15);
        for i in 0..2 {
            assert_eq!(x[(i, i)], 0.0);
        }
    }

    #[test]
    fn ring_distance_matrix_is_circulant() {
        let n = 7;
        let cfg = build_ring(n, 1.3, false).unwrap();
        let x = distances(&cfg);
        for a in 0..n {
            for b in 0..n {
                let k = (b + n - a) % n;
                assert!((x[(a, b)] - x[(0, k)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn first_row_chords_match_coordinates() {
        let n = 9;
        let cfg = build_ring(n, 0.8, false).unwrap();
        let x = distances(&cfg);
        let row = ring_first_row_x(n, 0.8);
        for a in 1..n {
            assert!((row[a - 1] - x[(0, a)]).abs() < 1e-12);
            // exact mirror symmetry
            assert_eq!(row[a - 1], row[n - a - 1]);
        }
    }

    #[test]
    fn shift_operator_is_a_cyclic_unitary_permutation() {
        for (n, wc) in [(3, false), (3, true), (6, false), (6, true)] {
            let t = shift_operator(n, wc);
            let tm = t.to_matrix();
            // T^T T = 1 exactly (integer entries)
            assert_eq!(tm.transpose().mul(&tm), CMatrix::identity(t.dim()));
            assert!(t.power(n).is_identity());
            assert!(!t.power(n - 1).is_identity());
        }
    }

    #[test]
    fn shift_moves_basis_vectors_down() {
        // T e_2 = e_1 (atom labels), i.e. indices 1 -> 0 without center
        let t = shift_operator(3, false);
        let mut e2 = vec![C64::new(0.0, 0.0); 3];
        e2[1] = C64::new(1.0, 0.0);
        let te2 = t.apply(&e2);
        assert_eq!(te2[0], C64::new(1.0, 0.0));
        assert_eq!(te2[1], C64::new(0.0, 0.0));
        // with center: T e_z = e_z
        let t = shift_operator(4, true);
        let mut ez = vec![C64::new(0.0, 0.0); 5];
        ez[0] = C64::new(1.0, 0.0);
        assert_eq!(t.apply(&ez), ez);
    }

    #[test]
    fn projector_algebra() {
        for wc in [false, true] {
            for n in 2..=8usize {
                let projs: Vec<_> = (0..n).map(|p| projector(p, n, wc).unwrap()).collect();
                let dim = projs[0].matrix.dim();
                let mut sum = CMatrix::zeros(dim);
                for pr in &projs {
                    for q in &projs {
                        let prod = pr.matrix.mul(&q.matrix);
                        let expect = if pr.p == q.p {
                            pr.matrix.clone()
                        } else {
                            CMatrix::zeros(dim)
                        };
                        assert!(
                            prod.max_abs_diff(&expect) < 1e-13,
                            "P^{} P^{} for n={n} wc={wc}",
                            pr.p,
                            q.p
                        );
                    }
                    for i in 0..dim {
                        for j in 0..dim {
                            sum[(i, j)] += pr.matrix[(i, j)];
                            // Hermitean
                            let h = pr.matrix[(j, i)].conj();
                            assert!((pr.matrix[(i, j)] - h).norm() < 1e-15);
                        }
                    }
                }
                assert!(sum.max_abs_diff(&CMatrix::identity(dim)) < 1e-13);
            }
        }
        assert!(projector(5, 5, false).is_err());
    }

    #[test]
    fn projector_matches_matrix_sum_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, wc) in [(5usize, false), (6, true), (8, false)] {
            let t = shift_operator(n, wc);
            let dim = t.dim();
            for p in 0..n {
                // direct sum over powers of T
                let mut oracle = CMatrix::zeros(dim);
                for a in 0..n {
                    let ta = t.power(a).to_matrix();
                    let k = (p * a) % n;
                    let (re, im) = phase::unit_root(k, n);
                    let w = C64::new(re / n as f64, -im / n as f64);
                    for i in 0..dim {
                        for j in 0..dim {
                            oracle[(i, j)] += w * ta[(i, j)];
                        }
                    }
                }
                let pr = projector(p, n, wc).unwrap();
                assert!(pr.matrix.max_abs_diff(&oracle) < 1e-14);

                // images transform like the representation: T (P v) = w^p (P v)
                let v: Vec<C64> = (0..dim)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let pv = pr.matrix.mul_vec(&v);
                let tpv = t.apply(&pv);
                let (re, im) = phase::unit_root(p, n);
                let w = C64::new(re, im);
                let diff: f64 = tpv
                    .iter()
                    .zip(pv.iter())
                    .map(|(a, b)| (a - w * b).norm())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-12, "p={p} n={n} wc={wc}: {diff}");
            }
        }
    }

    #[test]
    fn projector_zero_mode_gives_uniform_image() {
        let n = 6;
        let pr = projector(0, n, false).unwrap();
        let mut e1 = vec![C64::new(0.0, 0.0); n];
        e1[0] = C64::new(1.0, 0.0);
        let img = pr.matrix.mul_vec(&e1);
        for z in img {
            assert!((z - C64::new(1.0 / n as f64, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn sine_weighted_sums_of_chord_functions_vanish() {
        // for any F of the first-row distances, the p-th sine sum is zero
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 3..=12usize {
            let row = ring_first_row_x(n, 0.9);
            for p in 0..n {
                for _ in 0..20 {
                    let (c0, c1, c2, c3) = (
                        rng.gen_range(-1.0..1.0f64),
                        rng.gen_range(-1.0..1.0f64),
                        rng.gen_range(-1.0..1.0f64),
                        rng.gen_range(-1.0..1.0f64),
                    );
                    let f = |x: f64| c0 + c1 * x + c2 * (1.3 * x).sin() + c3 / (1.0 + x * x);
                    let mut sum = 0.0;
                    for a in 1..n {
                        sum += f(row[a - 1]) * phase::sin_2pi(p * a, n);
                    }
                    assert!(sum.abs() < 1e-12, "n={n} p={p}: {sum}");
                }
            }
        }
    }

    #[test]
    fn random_vector_norm_helper() {
        let v = [C64::new(3.0, 0.0), C64::new(0.0, 4.0)];
        assert!((vec_norm(&v) - 5.0).abs() < 1e-15);
    }
}
