//! Dense complex non-Hermitean eigendecomposition.
//!
//! The route is the classical one: diagonal balancing, reduction to upper
//! Hessenberg form by Givens similarity transformations, shifted QR
//! iteration to a (unitary) Schur form `M = Z T Z^H`, then right and left
//! eigenvectors by back/forward substitution in `T`. Right and left
//! vectors of each eigenvalue cluster are biorthonormalized against each
//! other, so that `left . right = 1` across the returned set.
//!
//! The channel matrices handled here are complex symmetric, for which the
//! left eigenvector of a simple eigenvalue is the plain transpose of the
//! right one; the returned vectors are scaled to `v^T v = 1` whenever that
//! product is not degenerate, which reproduces exactly that convention.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{dot_t, vec_norm, CMatrix};
use crate::C64;

/// Default residual tolerance (relative to the Frobenius norm).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative distance below which two eigenvalues are treated as one
/// cluster for biorthonormalization.
const CLUSTER_TOL: f64 = 1e-10;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 40;

/// Solver could not reach the requested residual tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenFailure {
    /// Best residual achieved, relative to the matrix norm.
    pub residual: f64,
    pub tol: f64,
}

impl core::fmt::Display for EigenFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "eigendecomposition residual {:e} exceeds tolerance {:e}",
            self.residual, self.tol
        )
    }
}

impl core::error::Error for EigenFailure {}

/// Full spectral data of one matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<C64>,
    /// Right eigenvectors, one per eigenvalue.
    pub right: Vec<Vec<C64>>,
    /// Left (row) eigenvectors, biorthonormal against `right`.
    pub left: Vec<Vec<C64>>,
    /// Largest right/left residual relative to the matrix norm.
    pub residual_norm: f64,
}

/// Complex Givens pair `(c, s)` with `c` real such that
/// `[c s; -conj(s) c] [f; g] = [r; 0]`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let zero = C64::new(0.0, 0.0);
    if g == zero {
        return (1.0, zero);
    }
    if f == zero {
        let ag = g.norm();
        return (0.0, g.conj() / ag);
    }
    let af = f.norm();
    let d = libm::sqrt(af * af + g.norm_sqr());
    let c = af / d;
    let s = (f / af) * (g.conj() / d);
    (c, s)
}

/// Left-multiplication of rows `(i, j)` over columns `cols`.
fn rot_rows(m: &mut CMatrix, i: usize, j: usize, c: f64, s: C64, cols: core::ops::Range<usize>) {
    for k in cols {
        let a = m[(i, k)];
        let b = m[(j, k)];
        m[(i, k)] = c * a + s * b;
        m[(j, k)] = -s.conj() * a + c * b;
    }
}

/// Right-multiplication by the adjoint rotation on columns `(i, j)` over rows `rows`.
fn rot_cols(m: &mut CMatrix, i: usize, j: usize, c: f64, s: C64, rows: core::ops::Range<usize>) {
    for k in rows {
        let a = m[(k, i)];
        let b = m[(k, j)];
        m[(k, i)] = c * a + s.conj() * b;
        m[(k, j)] = -s * a + c * b;
    }
}

/// Parlett-Reinsch balancing with powers of two; returns the diagonal scale.
fn balance(m: &mut CMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut scale = vec![1.0f64; n];
    let radix: f64 = 2.0;
    let sqr = radix * radix;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = c + r;
            let mut cc = c;
            while cc < r / radix {
                f *= radix;
                cc *= sqr;
            }
            while cc > r * radix {
                f /= radix;
                cc /= sqr;
            }
            if f != 1.0 && (cc + r) / f < 0.95 * s {
                // apply D^-1 M D with D_ii = f
                scale[i] *= f;
                let inv = 1.0 / f;
                for j in 0..n {
                    let v = m[(i, j)] * inv;
                    m[(i, j)] = v;
                }
                for j in 0..n {
                    let v = m[(j, i)] * f;
                    m[(j, i)] = v;
                }
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    scale
}

/// Reduce to upper Hessenberg form, accumulating the transform into `z`.
fn hessenberg(t: &mut CMatrix, z: &mut CMatrix) {
    let n = t.dim();
    for k in 0..n.saturating_sub(2) {
        for i in (k + 2)..n {
            let f = t[(k + 1, k)];
            let g = t[(i, k)];
            if g == C64::new(0.0, 0.0) {
                continue;
            }
            let (c, s) = givens(f, g);
            rot_rows(t, k + 1, i, c, s, k..n);
            t[(i, k)] = C64::new(0.0, 0.0);
            rot_cols(t, k + 1, i, c, s, 0..n);
            rot_cols(z, k + 1, i, c, s, 0..n);
        }
    }
}

/// Eigenvalues of the trailing 2x2 block; returns the one closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let root = disc.sqrt();
    let l1 = half + root;
    let l2 = half - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Shifted QR iteration on a Hessenberg matrix, in place.
fn qr_to_triangular(t: &mut CMatrix, z: &mut CMatrix) -> Result<(), ()> {
    let n = t.dim();
    if n <= 1 {
        return Ok(());
    }
    let norm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut stalled = 0usize;
    let mut budget = MAX_SWEEPS_PER_EIGENVALUE * n;
    loop {
        // deflate converged subdiagonals
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let local = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            let thresh = if local > 0.0 { eps * local } else { eps * norm };
            if sub <= thresh {
                t[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            // 1x1 block converged
            if hi == 0 {
                return Ok(());
            }
            hi -= 1;
            stalled = 0;
            continue;
        }
        if budget == 0 {
            return Err(());
        }
        budget -= 1;
        stalled += 1;
        let sigma = if stalled % 12 == 0 {
            // exceptional shift to break limit cycles
            t[(hi, hi)] + C64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };
        for k in lo..=hi {
            t[(k, k)] -= sigma;
        }
        // QR factorization pass
        let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            rot_rows(t, k, k + 1, c, s, k..n);
            t[(k + 1, k)] = C64::new(0.0, 0.0);
            rots.push((c, s));
        }
        // RQ pass
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            rot_cols(t, k, k + 1, c, s, 0..(k + 2).min(n));
            rot_cols(z, k, k + 1, c, s, 0..n);
        }
        for k in lo..=hi {
            t[(k, k)] += sigma;
        }
    }
}

/// Right eigenvector of the triangular factor for eigenvalue at index `k`.
fn triangular_right(t: &CMatrix, k: usize, tnorm: f64) -> Vec<C64> {
    let lambda = t[(k, k)];
    let mut y = vec![C64::new(0.0, 0.0); t.dim()];
    y[k] = C64::new(1.0, 0.0);
    for j in (0..k).rev() {
        let mut acc = C64::new(0.0, 0.0);
        for m in (j + 1)..=k {
            acc += t[(j, m)] * y[m];
        }
        let mut denom = t[(j, j)] - lambda;
        if denom.norm() < f64::EPSILON * tnorm {
            denom = C64::new(f64::EPSILON * tnorm, 0.0);
        }
        y[j] = -acc / denom;
    }
    y
}

/// Left (row) eigenvector of the triangular factor for index `k`.
fn triangular_left(t: &CMatrix, k: usize, tnorm: f64) -> Vec<C64> {
    let n = t.dim();
    let lambda = t[(k, k)];
    let mut y = vec![C64::new(0.0, 0.0); n];
    y[k] = C64::new(1.0, 0.0);
    for j in (k + 1)..n {
        let mut acc = C64::new(0.0, 0.0);
        for m in k..j {
            acc += y[m] * t[(m, j)];
        }
        let mut denom = t[(j, j)] - lambda;
        if denom.norm() < f64::EPSILON * tnorm {
            denom = C64::new(f64::EPSILON * tnorm, 0.0);
        }
        y[j] = -acc / denom;
    }
    y
}

/// Group eigenvalue indices into clusters of relative distance `CLUSTER_TOL`.
fn clusters(eigenvalues: &[C64], scale: f64) -> Vec<Vec<usize>> {
    let n = eigenvalues.len();
    let mut assigned = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        let id = groups.len();
        assigned[i] = id;
        let mut members = vec![i];
        let mut cursor = 0;
        while cursor < members.len() {
            let a = members[cursor];
            cursor += 1;
            for j in 0..n {
                if assigned[j] != usize::MAX {
                    continue;
                }
                let gap = (eigenvalues[a] - eigenvalues[j]).norm();
                let tol = CLUSTER_TOL * eigenvalues[a].norm().max(eigenvalues[j].norm()).max(scale * 1e-3);
                if gap <= tol {
                    assigned[j] = id;
                    members.push(j);
                }
            }
        }
        groups.push(members);
    }
    groups
}

/// Invert a small complex matrix by Gauss-Jordan with partial pivoting.
/// Returns `None` if a pivot degenerates (defective cluster).
fn invert_small(w: &CMatrix) -> Option<CMatrix> {
    let m = w.dim();
    let mut a = w.clone();
    let mut inv = CMatrix::identity(m);
    for col in 0..m {
        let (mut pivot_row, mut best) = (col, a[(col, col)].norm());
        for r in (col + 1)..m {
            if a[(r, col)].norm() > best {
                best = a[(r, col)].norm();
                pivot_row = r;
            }
        }
        if best < 1e-8 {
            return None;
        }
        if pivot_row != col {
            for j in 0..m {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
                let tmp = inv[(col, j)];
                inv[(col, j)] = inv[(pivot_row, j)];
                inv[(pivot_row, j)] = tmp;
            }
        }
        let p = a[(col, col)];
        for j in 0..m {
            a[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                let acj = a[(col, j)];
                let icj = inv[(col, j)];
                a[(r, j)] -= f * acj;
                inv[(r, j)] -= f * icj;
            }
        }
    }
    Some(inv)
}

/// Full eigendecomposition of a complex square matrix.
///
/// Eigenvalues are returned in no particular order; the caller sorts.
pub fn decompose(m: &CMatrix, tol: f64) -> Result<EigenDecomposition, EigenFailure> {
    let n = m.dim();
    assert!(tol > 0.0, "tolerance must be positive");
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            right: Vec::new(),
            left: Vec::new(),
            residual_norm: 0.0,
        });
    }
    let mnorm = m.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut t = m.clone();
    let scale = balance(&mut t);
    let mut z = CMatrix::identity(n);
    hessenberg(&mut t, &mut z);
    qr_to_triangular(&mut t, &mut z).map_err(|()| EigenFailure {
        residual: f64::INFINITY,
        tol,
    })?;

    let eigenvalues: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for k in 0..n {
        let y = triangular_right(&t, k, tnorm);
        let mut v = z.mul_vec(&y);
        // undo balancing: v -> D v
        for (vi, s) in v.iter_mut().zip(scale.iter()) {
            *vi *= *s;
        }
        // prefer the transpose normalization v^T v = 1 (natural for the
        // complex symmetric matrices used here), fall back to unit length
        let nrm = vec_norm(&v).max(f64::MIN_POSITIVE);
        for vi in v.iter_mut() {
            *vi /= nrm;
        }
        let tt = dot_t(&v, &v);
        if tt.norm() > 1e-3 {
            let root = principal_sqrt(tt);
            for vi in v.iter_mut() {
                *vi /= root;
            }
        }
        right.push(v);

        let yl = triangular_left(&t, k, tnorm);
        let mut u = vec![C64::new(0.0, 0.0); n];
        // u = y_l Z^H
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for mrow in 0..n {
                acc += yl[mrow] * z[(j, mrow)].conj();
            }
            u[j] = acc;
        }
        for (ui, s) in u.iter_mut().zip(scale.iter()) {
            *ui /= *s;
        }
        let nrm = vec_norm(&u).max(f64::MIN_POSITIVE);
        for ui in u.iter_mut() {
            *ui /= nrm;
        }
        left.push(u);
    }

    // blockwise biorthonormalization: left . right = identity
    for group in clusters(&eigenvalues, tnorm) {
        let mdim = group.len();
        let mut w = CMatrix::zeros(mdim);
        for (a, &ia) in group.iter().enumerate() {
            for (b, &ib) in group.iter().enumerate() {
                w[(a, b)] = dot_t(&left[ia], &right[ib]);
            }
        }
        let winv = invert_small(&w).ok_or(EigenFailure {
            residual: f64::INFINITY,
            tol,
        })?;
        let old: Vec<Vec<C64>> = group.iter().map(|&i| left[i].clone()).collect();
        for (a, &ia) in group.iter().enumerate() {
            let mut fresh = vec![C64::new(0.0, 0.0); n];
            for (b, rowb) in old.iter().enumerate() {
                let f = winv[(a, b)];
                for (fj, oj) in fresh.iter_mut().zip(rowb.iter()) {
                    *fj += f * oj;
                }
            }
            left[ia] = fresh;
        }
    }

    // residuals against the original matrix
    let mut residual: f64 = 0.0;
    for k in 0..n {
        let mv = m.mul_vec(&right[k]);
        let r: f64 = mv
            .iter()
            .zip(right[k].iter())
            .map(|(a, b)| (a - eigenvalues[k] * b).norm_sqr())
            .sum::<f64>();
        residual = residual.max(libm::sqrt(r) / (mnorm * vec_norm(&right[k]).max(1e-300)));
        let um = m.vec_mul(&left[k]);
        let r: f64 = um
            .iter()
            .zip(left[k].iter())
            .map(|(a, b)| (a - eigenvalues[k] * b).norm_sqr())
            .sum::<f64>();
        residual = residual.max(libm::sqrt(r) / (mnorm * vec_norm(&left[k]).max(1e-300)));
    }
    if residual > tol {
        return Err(EigenFailure { residual, tol });
    }
    Ok(EigenDecomposition {
        eigenvalues,
        right,
        left,
        residual_norm: residual,
    })
}

/// Principal complex square root: `Re >= 0`, and `Im >= 0` on the cut.
pub(crate) fn principal_sqrt(z: C64) -> C64 {
    let s = z.sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        -s
    } else {
        s
    }
}
