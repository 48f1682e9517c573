//! Channel matrix and complete complex spectra.
//!
//! The channel matrix has `i` on the diagonal and `M(X_AB)` off it. Ring
//! spectra come out analytically: the plane-wave modes `p = 0..N-1` carry
//! the cyclic quantum number, and a ring with central atom adds a
//! two-dimensional `p = 0` sector mixing the uniform ring state with the
//! central excitation. Chains are handled by the dense eigensolver.
//!
//! Eigenvalue conventions: `shift/Gamma = -Re(mu)/2`, `rate/Gamma = Im(mu)`.
//!
//! For deeply subradiant ring modes the cosine-weighted rate sum loses to
//! cancellation around `1e-14`; those rates are re-evaluated through the
//! positive-definite radiation integral (see `radiation`), which is the
//! same quantity in a cancellation-free form.

use alloc::vec;
use alloc::vec::Vec;

use crate::correlation::{m, DomainError, ShiftMode, X_MIN};
use crate::eigen::{self, principal_sqrt, EigenFailure};
use crate::geometry::{self, build_chain, build_ring, distances, Configuration};
use crate::matrix::CMatrix;
use crate::phase;
use crate::radiation;
use crate::C64;

/// Below this relative rate the cosine-sum imaginary part is rounding
/// noise and the radiation-integral route takes over.
const RATE_SWITCH: f64 = 1e-10;

/// Anchor radius for the zero-sector branch labeling: small enough that
/// the two branches are far apart and identifiable by their shift signs.
const ZERO_ANCHOR_RADIUS: f64 = 0.05;

/// Internal step of the anchoring walk.
const ZERO_TRACK_STEP: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumError {
    /// Two atoms closer than the renormalization cutoff.
    DegenerateGeometry { x: f64 },
    Domain(DomainError),
    Eigen(EigenFailure),
}

impl core::fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::DegenerateGeometry { x } => write!(
                f,
                "atoms coincide within the renormalization cutoff (X = {x:e})"
            ),
            Self::Domain(e) => write!(f, "{e}"),
            Self::Eigen(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SpectrumError {}

impl From<DomainError> for SpectrumError {
    fn from(e: DomainError) -> Self {
        Self::Domain(e)
    }
}

impl From<EigenFailure> for SpectrumError {
    fn from(e: EigenFailure) -> Self {
        Self::Eigen(e)
    }
}

/// Collective-mode label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    /// Cyclic quantum number of a ring mode.
    P(usize),
    /// Superradiant zero-sector branch (shift -> +inf as r -> 0).
    ZeroPlus,
    /// Subradiant zero-sector branch (shift -> -inf as r -> 0).
    ZeroMinus,
    /// Position in the rate-sorted numerical spectrum of a chain.
    Numeric(usize),
}

impl ModeLabel {
    /// Deterministic tie-break ordering.
    pub fn order_key(&self) -> (u8, usize) {
        match self {
            Self::ZeroPlus => (0, 0),
            Self::ZeroMinus => (0, 1),
            Self::P(p) => (1, *p),
            Self::Numeric(k) => (2, *k),
        }
    }
}

impl core::fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::P(p) => write!(f, "p{p}"),
            Self::ZeroPlus => write!(f, "0+"),
            Self::ZeroMinus => write!(f, "0-"),
            Self::Numeric(k) => write!(f, "n{k}"),
        }
    }
}

/// One collective eigenmode.
#[derive(Clone, Debug)]
pub struct EigenMode {
    pub label: ModeLabel,
    /// Eigenvalue of the channel matrix.
    pub mu: C64,
    /// Level shift in units of `Gamma`: `-Re(mu)/2`.
    pub shift_rel: f64,
    /// Decay rate in units of `Gamma`: `Im(mu)`.
    pub rate_rel: f64,
    /// Right coefficient vector in the site basis.
    pub right: Vec<C64>,
    /// Left (dual) vector; `left . right = 1` without conjugation.
    pub left: Vec<C64>,
}

impl EigenMode {
    fn new(label: ModeLabel, mu: C64, right: Vec<C64>, left: Vec<C64>) -> Self {
        Self {
            label,
            mu,
            shift_rel: -0.5 * mu.re,
            rate_rel: mu.im,
            right,
            left,
        }
    }
}

/// Complete mode set of one configuration, rate-sorted.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub config: Configuration,
    pub shift_mode: ShiftMode,
    /// Modes in ascending `rate_rel`, ties broken by label.
    pub modes: Vec<EigenMode>,
    pub degeneracy_classes: Vec<Vec<ModeLabel>>,
    min_rate_index: usize,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    /// The mode with the smallest decay rate.
    pub fn min_rate_mode(&self) -> &EigenMode {
        &self.modes[self.min_rate_index]
    }

    pub fn mode(&self, label: ModeLabel) -> Option<&EigenMode> {
        self.modes.iter().find(|m| m.label == label)
    }

    fn from_modes(
        config: Configuration,
        shift_mode: ShiftMode,
        mut modes: Vec<EigenMode>,
        degeneracy_classes: Vec<Vec<ModeLabel>>,
    ) -> Self {
        modes.sort_by(|a, b| {
            a.rate_rel
                .total_cmp(&b.rate_rel)
                .then_with(|| a.label.order_key().cmp(&b.label.order_key()))
        });
        Spectrum {
            config,
            shift_mode,
            modes,
            degeneracy_classes,
            min_rate_index: 0,
        }
    }
}

/// The channel matrix: complex symmetric, diagonal `i`, off-diagonal
/// `M(X_AB)`.
#[derive(Clone, Debug)]
pub struct ChannelMatrix {
    pub matrix: CMatrix,
    pub shift_mode: ShiftMode,
}

/// Builds the channel matrix of an arbitrary configuration.
pub fn build_channel_matrix(
    config: &Configuration,
    shift_mode: ShiftMode,
) -> Result<ChannelMatrix, SpectrumError> {
    let x = distances(config);
    let n = config.dim();
    let mut matrix = CMatrix::zeros(n);
    for i in 0..n {
        matrix[(i, i)] = C64::new(0.0, 1.0);
        for j in (i + 1)..n {
            let xij = x[(i, j)];
            if xij < X_MIN {
                return Err(SpectrumError::DegenerateGeometry { x: xij });
            }
            let v = m(xij, shift_mode)?;
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    Ok(ChannelMatrix {
        matrix,
        shift_mode,
    })
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Default)]
struct CompensatedC64 {
    sum_re: f64,
    sum_im: f64,
    c_re: f64,
    c_im: f64,
}

impl CompensatedC64 {
    fn add(&mut self, z: C64) {
        let t = self.sum_re + z.re;
        self.c_re += if self.sum_re.abs() >= z.re.abs() {
            (self.sum_re - t) + z.re
        } else {
            (z.re - t) + self.sum_re
        };
        self.sum_re = t;
        let t = self.sum_im + z.im;
        self.c_im += if self.sum_im.abs() >= z.im.abs() {
            (self.sum_im - t) + z.im
        } else {
            (z.im - t) + self.sum_im
        };
        self.sum_im = t;
    }

    fn value(&self) -> C64 {
        C64::new(self.sum_re + self.c_re, self.sum_im + self.c_im)
    }
}

/// First-row couplings `M(X_{1A})`, `A = 2..=N`, shared by both ring
/// configurations.
fn ring_couplings(n: usize, r: f64, mode: ShiftMode) -> Result<Vec<C64>, SpectrumError> {
    let row = geometry::ring_first_row_x(n, r);
    if let Some(&x) = row
        .iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal))
    {
        if x < X_MIN {
            return Err(SpectrumError::DegenerateGeometry { x });
        }
    }
    row.iter().map(|&x| Ok(m(x, mode)?)).collect()
}

/// Analytic eigenvalue of ring mode `p` from the first-row couplings.
fn ring_mu(couplings: &[C64], p: usize, n: usize) -> C64 {
    let mut acc = CompensatedC64::default();
    for (a, cpl) in couplings.iter().enumerate() {
        let cosv = phase::cos_2pi(p * (a + 1), n);
        acc.add(cpl * cosv);
    }
    C64::new(0.0, 1.0) + acc.value()
}

/// Plane-wave coefficients `c_A = exp(2 pi i p A / N)/sqrt(N)` embedded in
/// a vector of dimension `dim` starting at `offset`.
fn plane_wave(p: usize, n: usize, dim: usize, offset: usize) -> (Vec<C64>, Vec<C64>) {
    let inv = 1.0 / libm::sqrt(n as f64);
    let mut right = vec![C64::new(0.0, 0.0); dim];
    let mut left = vec![C64::new(0.0, 0.0); dim];
    for a in 1..=n {
        let (re, im) = phase::unit_root(p * a, n);
        right[offset + a - 1] = C64::new(re * inv, im * inv);
        left[offset + a - 1] = C64::new(re * inv, -im * inv);
    }
    (right, left)
}

fn ring_p_mode(
    couplings: &[C64],
    p: usize,
    n: usize,
    r: f64,
    dim: usize,
    offset: usize,
) -> EigenMode {
    let mut mu = ring_mu(couplings, p, n);
    if mu.im < RATE_SWITCH {
        mu = C64::new(mu.re, radiation::ring_mode_rate(n, p, r));
    }
    let (right, left) = plane_wave(p, n, dim, offset);
    EigenMode::new(ModeLabel::P(p), mu, right, left)
}

/// Degeneracy classes of the ring spectra, in the order: degenerate pairs
/// by ascending `p`, then the zero sector, then (even `N`) the lone
/// alternating mode.
pub fn degeneracy_table(n: usize, with_center: bool) -> Vec<Vec<ModeLabel>> {
    let mut classes = Vec::new();
    let half = n / 2;
    let upper = if n % 2 == 0 { half - 1 } else { half };
    for p in 1..=upper {
        classes.push(vec![ModeLabel::P(p), ModeLabel::P(n - p)]);
    }
    if with_center {
        classes.push(vec![ModeLabel::ZeroPlus]);
        classes.push(vec![ModeLabel::ZeroMinus]);
    } else {
        classes.push(vec![ModeLabel::P(0)]);
    }
    if n % 2 == 0 {
        classes.push(vec![ModeLabel::P(half)]);
    }
    classes
}

/// Full spectrum of the ring without central atom: `N` plane-wave modes.
pub fn ring_modes_b(n: usize, r: f64, mode: ShiftMode) -> Result<Spectrum, SpectrumError> {
    let config = build_ring(n, r, false).map_err(|_| SpectrumError::DegenerateGeometry { x: 0.0 })?;
    let couplings = ring_couplings(n, r, mode)?;
    let modes: Vec<EigenMode> = (0..n)
        .map(|p| ring_p_mode(&couplings, p, n, r, n, 0))
        .collect();
    Ok(Spectrum::from_modes(
        config,
        mode,
        modes,
        degeneracy_table(n, false),
    ))
}

/// Raw zero-sector data of the ring with central atom.
#[derive(Clone, Copy, Debug)]
pub struct ZeroSector {
    /// Top-left element of the 2x2 block: `i + sum_A M(X_1A)`.
    pub a: C64,
    /// Off-diagonal element: `sqrt(N) M(2 pi r)`.
    pub b: C64,
    /// Eigenvalue on the principal-plus branch of the square root.
    pub mu_principal_plus: C64,
    /// Eigenvalue on the principal-minus branch.
    pub mu_principal_minus: C64,
}

impl ZeroSector {
    /// Eigenvector coefficient ratio `c = tan(theta)` of the
    /// principal-plus eigenvector `(1, c)/sqrt(1+c^2)`.
    pub fn vector_ratio(&self) -> C64 {
        let alpha = self.a - C64::new(0.0, 1.0);
        let s = principal_sqrt(alpha * alpha + 4.0 * self.b * self.b);
        let den = alpha + s;
        if self.b.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if den.norm() > 1e-8 * self.b.norm() {
            2.0 * self.b / den
        } else {
            (self.mu_principal_plus - self.a) / self.b
        }
    }

    /// Complex mixing angle `theta = (i/2) ln((i+c)/(i-c))` for a given
    /// coefficient ratio (principal logarithm; defined up to `pi`).
    pub fn mixing_angle_of(c: C64) -> C64 {
        let i = C64::new(0.0, 1.0);
        C64::new(0.0, 0.5) * ((i + c) / (i - c)).ln()
    }
}

/// Computes the zero-sector 2x2 data at one radius.
pub fn zero_sector(n: usize, r: f64, mode: ShiftMode) -> Result<ZeroSector, SpectrumError> {
    let couplings = ring_couplings(n, r, mode)?;
    let x_center = core::f64::consts::TAU * r;
    if x_center < X_MIN {
        return Err(SpectrumError::DegenerateGeometry { x: x_center });
    }
    let mut acc = CompensatedC64::default();
    for cpl in &couplings {
        acc.add(*cpl);
    }
    let a = C64::new(0.0, 1.0) + acc.value();
    let b = libm::sqrt(n as f64) * m(x_center, mode)?;
    let i = C64::new(0.0, 1.0);
    let alpha = a - i;
    let s = principal_sqrt(alpha * alpha + 4.0 * b * b);
    let tr = a + i;
    let det = i * a - b * b;
    // quadratic roots, stable form: divide the determinant by the larger root
    let (mu_pp, mu_pm) = if (tr + s).norm() >= (tr - s).norm() {
        let big = (tr + s) * 0.5;
        (big, det / big)
    } else {
        let big = (tr - s) * 0.5;
        (det / big, big)
    };
    Ok(ZeroSector {
        a,
        b,
        mu_principal_plus: mu_pp,
        mu_principal_minus: mu_pm,
    })
}

/// Labeled zero-sector pair.
#[derive(Clone, Copy, Debug)]
pub struct ZeroPair {
    /// Branch whose level shift tends to `+inf` as `r -> 0`.
    pub mu_plus: C64,
    /// The complementary branch.
    pub mu_minus: C64,
    /// Whether `mu_plus` sits on the principal-plus branch of the root.
    pub plus_is_principal: bool,
}

/// Tracks the smooth zero-sector branches along a radius path by nearest
/// continuation in the complex plane, anchored at small radius where the
/// labels follow the diverging level shifts.
pub struct ZeroBranchTracker {
    n: usize,
    mode: ShiftMode,
    prev: Option<(f64, C64, C64, bool)>,
}

impl ZeroBranchTracker {
    pub fn new(n: usize, mode: ShiftMode) -> Self {
        Self {
            n,
            mode,
            prev: None,
        }
    }

    fn continue_from(
        state: (C64, C64, bool),
        sector: &ZeroSector,
    ) -> (C64, C64, bool) {
        let (zp, zm, _) = state;
        let (p1, p2) = (sector.mu_principal_plus, sector.mu_principal_minus);
        let keep = (p1 - zp).norm() + (p2 - zm).norm();
        let swap = (p2 - zp).norm() + (p1 - zm).norm();
        if keep <= swap {
            (p1, p2, true)
        } else {
            (p2, p1, false)
        }
    }

    /// Continues the labeling onto an already-computed sector at radius
    /// `r`; anchors first if there is no previous state. Lets callers
    /// evaluate sectors in parallel and label them in a cheap ordered
    /// pass.
    pub fn advance(&mut self, r: f64, sector: &ZeroSector) -> Result<ZeroPair, SpectrumError> {
        let state = match self.prev {
            Some((_, zp, zm, pp)) => Self::continue_from((zp, zm, pp), sector),
            None => self.anchor_walk(r)?,
        };
        self.prev = Some((r, state.0, state.1, state.2));
        Ok(ZeroPair {
            mu_plus: state.0,
            mu_minus: state.1,
            plus_is_principal: state.2,
        })
    }

    /// Labeled pair at radius `r`. Consecutive calls continue from the
    /// previous radius; the first call anchors through an internal walk.
    pub fn eval(&mut self, r: f64) -> Result<ZeroPair, SpectrumError> {
        let state = match self.prev {
            Some((r_prev, zp, zm, pp)) if (r - r_prev).abs() <= 4.0 * ZERO_TRACK_STEP => {
                Self::continue_from((zp, zm, pp), &zero_sector(self.n, r, self.mode)?)
            }
            _ => self.anchor_walk(r)?,
        };
        self.prev = Some((r, state.0, state.1, state.2));
        Ok(ZeroPair {
            mu_plus: state.0,
            mu_minus: state.1,
            plus_is_principal: state.2,
        })
    }

    /// Walk from the anchor radius up (or down) to `r`.
    fn anchor_walk(&self, r: f64) -> Result<(C64, C64, bool), SpectrumError> {
        let r0 = r.min(ZERO_ANCHOR_RADIUS);
        let sector = zero_sector(self.n, r0, self.mode)?;
        // at the anchor, the superradiant branch is the one with the more
        // negative real part (level shift -> +inf)
        let (p1, p2) = (sector.mu_principal_plus, sector.mu_principal_minus);
        let mut state = if p1.re < p2.re {
            (p1, p2, true)
        } else {
            (p2, p1, false)
        };
        let mut cur = r0;
        while cur < r {
            cur = (cur + ZERO_TRACK_STEP).min(r);
            state = Self::continue_from(state, &zero_sector(self.n, cur, self.mode)?);
        }
        Ok(state)
    }
}

/// Labeled zero-sector pair at a single radius.
pub fn zero_pair(n: usize, r: f64, mode: ShiftMode) -> Result<ZeroPair, SpectrumError> {
    ZeroBranchTracker::new(n, mode).eval(r)
}

/// Full spectrum of the ring with central atom: `N - 1` plane-wave modes
/// (the central atom stays unoccupied) plus the two zero-sector branches.
pub fn ring_modes_a(n: usize, r: f64, mode: ShiftMode) -> Result<Spectrum, SpectrumError> {
    let config = build_ring(n, r, true).map_err(|_| SpectrumError::DegenerateGeometry { x: 0.0 })?;
    let couplings = ring_couplings(n, r, mode)?;
    let dim = n + 1;
    let mut modes: Vec<EigenMode> = (1..n)
        .map(|p| ring_p_mode(&couplings, p, n, r, dim, 1))
        .collect();

    let sector = zero_sector(n, r, mode)?;
    let pair = zero_pair(n, r, mode)?;
    let c = sector.vector_ratio();
    let root = principal_sqrt(C64::new(1.0, 0.0) + c * c);
    let cos_t = 1.0 / root;
    let sin_t = c / root;
    let inv_sqrt_n = 1.0 / libm::sqrt(n as f64);

    // principal-plus eigenvector (cos, sin) over (uniform ring, center);
    // principal-minus is (-sin, cos)
    let build_vec = |ring_coeff: C64, center_coeff: C64| -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[0] = center_coeff;
        for a in 1..=n {
            v[a] = ring_coeff * inv_sqrt_n;
        }
        v
    };
    let v_pp = build_vec(cos_t, sin_t);
    let v_pm = build_vec(-sin_t, cos_t);
    let (v_plus, v_minus) = if pair.plus_is_principal {
        (v_pp, v_pm)
    } else {
        (v_pm, v_pp)
    };
    // duals carry the same coefficients over the transposed carrier basis
    modes.push(EigenMode::new(
        ModeLabel::ZeroPlus,
        pair.mu_plus,
        v_plus.clone(),
        v_plus,
    ));
    modes.push(EigenMode::new(
        ModeLabel::ZeroMinus,
        pair.mu_minus,
        v_minus.clone(),
        v_minus,
    ));

    Ok(Spectrum::from_modes(
        config,
        mode,
        modes,
        degeneracy_table(n, true),
    ))
}

/// Numerical spectrum of the linear chain.
pub fn chain_modes(n: usize, d: f64, mode: ShiftMode) -> Result<Spectrum, SpectrumError> {
    let config = build_chain(n, d).map_err(|_| SpectrumError::DegenerateGeometry { x: 0.0 })?;
    let channel = build_channel_matrix(&config, mode)?;
    let decomp = eigen::decompose(&channel.matrix, eigen::DEFAULT_TOL)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomp.eigenvalues[a].im.total_cmp(&decomp.eigenvalues[b].im));
    let modes: Vec<EigenMode> = order
        .iter()
        .enumerate()
        .map(|(k, &idx)| {
            EigenMode::new(
                ModeLabel::Numeric(k),
                decomp.eigenvalues[idx],
                decomp.right[idx].clone(),
                decomp.left[idx].clone(),
            )
        })
        .collect();
    Ok(Spectrum::from_modes(config, mode, modes, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::d1;
    use crate::geometry::shift_operator;
    use crate::matrix::dot_t;
    use core::f64::consts::TAU;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn two_atom_channel_matrix() {
        let config = build_chain(2, 0.5).unwrap();
        let ch = build_channel_matrix(&config, ShiftMode::Approximate).unwrap();
        let mx = m(core::f64::consts::PI, ShiftMode::Approximate).unwrap();
        assert_eq!(ch.matrix[(0, 0)], C64::new(0.0, 1.0));
        assert_eq!(ch.matrix[(0, 1)], mx);
        assert_eq!(ch.matrix[(1, 0)], mx);
    }

    #[test]
    fn coincident_atoms_are_rejected() {
        let err = build_channel_matrix(
            &build_chain(3, 1e-9).unwrap(),
            ShiftMode::Approximate,
        )
        .unwrap_err();
        assert!(matches!(err, SpectrumError::DegenerateGeometry { .. }));
    }

    #[test]
    fn channel_matrix_commutes_with_shift() {
        for (n, wc) in [(6usize, false), (5, true)] {
            let config = build_ring(n, 0.9, wc).unwrap();
            let ch = build_channel_matrix(&config, ShiftMode::Approximate).unwrap();
            let t = shift_operator(n, wc);
            let conj = t.conjugate(&ch.matrix);
            assert!(conj.max_abs_diff(&ch.matrix) < 1e-12);
        }
    }

    #[test]
    fn with_center_first_row_is_constant() {
        let config = build_ring(8, 1.1, true).unwrap();
        let ch = build_channel_matrix(&config, ShiftMode::Approximate).unwrap();
        let first = ch.matrix[(0, 1)];
        for a in 2..=8 {
            assert!(close(ch.matrix[(0, a)], first, 1e-12));
        }
    }

    #[test]
    fn two_atom_ring_closed_form() {
        // N=2: mu_{0,1} = i +/- M(X_12)
        let r = 0.31;
        let sp = ring_modes_b(2, r, ShiftMode::Approximate).unwrap();
        let x12 = TAU * 2.0 * r;
        let mx = m(x12, ShiftMode::Approximate).unwrap();
        let mu0 = sp.mode(ModeLabel::P(0)).unwrap().mu;
        let mu1 = sp.mode(ModeLabel::P(1)).unwrap().mu;
        assert!(close(mu0, C64::new(0.0, 1.0) + mx, 1e-14));
        assert!(close(mu1, C64::new(0.0, 1.0) - mx, 1e-14));
        // rates 1 +/- D1
        assert!((sp.mode(ModeLabel::P(0)).unwrap().rate_rel - (1.0 + d1(x12))).abs() < 1e-14);
        assert!((sp.mode(ModeLabel::P(1)).unwrap().rate_rel - (1.0 - d1(x12))).abs() < 1e-14);
    }

    #[test]
    fn degeneracy_is_bitwise_exact() {
        for n in [5usize, 6, 7, 10] {
            let sp = ring_modes_b(n, 0.8, ShiftMode::Approximate).unwrap();
            for p in 1..n {
                let a = sp.mode(ModeLabel::P(p)).unwrap().mu;
                let b = sp.mode(ModeLabel::P(n - p)).unwrap().mu;
                assert_eq!(a, b, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn degeneracy_table_matches_reference() {
        use ModeLabel::*;
        assert_eq!(
            degeneracy_table(7, false),
            vec![
                vec![P(1), P(6)],
                vec![P(2), P(5)],
                vec![P(3), P(4)],
                vec![P(0)]
            ]
        );
        assert_eq!(
            degeneracy_table(6, false),
            vec![vec![P(1), P(5)], vec![P(2), P(4)], vec![P(0)], vec![P(3)]]
        );
        assert_eq!(degeneracy_table(2, false), vec![vec![P(0)], vec![P(1)]]);
        assert_eq!(
            degeneracy_table(4, true),
            vec![
                vec![P(1), P(3)],
                vec![ZeroPlus],
                vec![ZeroMinus],
                vec![P(2)]
            ]
        );
    }

    #[test]
    fn plane_wave_coefficients_conjugate_under_p_reflection() {
        let n = 9;
        let sp = ring_modes_b(n, 1.2, ShiftMode::Approximate).unwrap();
        for p in 1..n {
            let cp = &sp.mode(ModeLabel::P(p)).unwrap().right;
            let cq = &sp.mode(ModeLabel::P(n - p)).unwrap().right;
            for (a, b) in cp.iter().zip(cq.iter()) {
                assert_eq!(a.re, b.re);
                assert_eq!(a.im, -b.im);
            }
        }
    }

    #[test]
    fn analytic_matches_dense_solver_ring_b() {
        for n in [3usize, 8, 13] {
            for r in [0.4, 1.7] {
                let sp = ring_modes_b(n, r, ShiftMode::Approximate).unwrap();
                let ch = build_channel_matrix(&sp.config, ShiftMode::Approximate).unwrap();
                let dec = eigen::decompose(&ch.matrix, 1e-8).unwrap();
                assert_multiset_close(
                    &sp.modes.iter().map(|m| m.mu).collect::<Vec<_>>(),
                    &dec.eigenvalues,
                    1e-8,
                );
            }
        }
    }

    #[test]
    fn analytic_matches_dense_solver_ring_a() {
        for n in [3usize, 6, 11] {
            for r in [0.35, 1.3] {
                let sp = ring_modes_a(n, r, ShiftMode::Approximate).unwrap();
                let ch = build_channel_matrix(&sp.config, ShiftMode::Approximate).unwrap();
                let dec = eigen::decompose(&ch.matrix, 1e-8).unwrap();
                assert_multiset_close(
                    &sp.modes.iter().map(|m| m.mu).collect::<Vec<_>>(),
                    &dec.eigenvalues,
                    1e-8,
                );
            }
        }
    }

    pub(crate) fn assert_multiset_close(a: &[C64], b: &[C64], rel: f64) {
        assert_eq!(a.len(), b.len());
        let scale = b.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1e-30);
        let mut used = vec![false; b.len()];
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, za) in a.iter().enumerate() {
            for (j, zb) in b.iter().enumerate() {
                pairs.push(((za - zb).norm(), i, j));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut taken_a = vec![false; a.len()];
        let mut worst = 0.0f64;
        let mut matched = 0;
        for (d, i, j) in pairs {
            if taken_a[i] || used[j] {
                continue;
            }
            taken_a[i] = true;
            used[j] = true;
            worst = worst.max(d);
            matched += 1;
            if matched == a.len() {
                break;
            }
        }
        assert!(
            worst <= rel * scale,
            "multiset mismatch: worst pair distance {worst:e} vs {:e}",
            rel * scale
        );
    }

    #[test]
    fn trace_identity() {
        let sp = ring_modes_b(9, 0.6, ShiftMode::Approximate).unwrap();
        let total: f64 = sp.modes.iter().map(|m| m.rate_rel).sum();
        assert!((total - 9.0).abs() < 1e-10);
        let sp = ring_modes_a(7, 1.4, ShiftMode::Approximate).unwrap();
        let total: f64 = sp.modes.iter().map(|m| m.rate_rel).sum();
        assert!((total - 8.0).abs() < 1e-10);
    }

    #[test]
    fn zero_sector_sum_rule_and_orthonormality() {
        let n = 10;
        let r = 0.9;
        let sector = zero_sector(n, r, ShiftMode::Approximate).unwrap();
        let sum = sector.mu_principal_plus + sector.mu_principal_minus;
        assert!(close(sum, sector.a + C64::new(0.0, 1.0), 1e-10));

        let sp = ring_modes_a(n, r, ShiftMode::Approximate).unwrap();
        // full left x right Gram close to identity
        for mi in &sp.modes {
            for mj in &sp.modes {
                let g = dot_t(&mi.left, &mj.right);
                let expect = if mi.label == mj.label { 1.0 } else { 0.0 };
                assert!(
                    (g - C64::new(expect, 0.0)).norm() < 1e-10,
                    "{} {}: {g}",
                    mi.label,
                    mj.label
                );
            }
        }
    }

    #[test]
    fn p_modes_unaffected_by_central_atom() {
        let (n, r) = (8, 0.75);
        let sa = ring_modes_a(n, r, ShiftMode::Approximate).unwrap();
        let sb = ring_modes_b(n, r, ShiftMode::Approximate).unwrap();
        for p in 1..n {
            assert_eq!(
                sa.mode(ModeLabel::P(p)).unwrap().mu,
                sb.mode(ModeLabel::P(p)).unwrap().mu
            );
            // central component vanishes
            assert_eq!(sa.mode(ModeLabel::P(p)).unwrap().right[0], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn small_radius_limits() {
        // uniform mode superradiant, alternating modes dark
        let sp = ring_modes_b(7, 1e-3, ShiftMode::Approximate).unwrap();
        let r0 = sp.mode(ModeLabel::P(0)).unwrap().rate_rel;
        assert!((r0 - 7.0).abs() < 1e-3, "{r0}");
        for p in 1..7 {
            assert!(sp.mode(ModeLabel::P(p)).unwrap().rate_rel < 1e-3);
        }
        // zero sector: plus branch superradiant, labels via tracking
        let pair = zero_pair(10, 1e-3, ShiftMode::Approximate).unwrap();
        assert!(pair.mu_plus.im > 10.5, "rate+ = {}", pair.mu_plus.im);
        assert!(pair.mu_minus.im < 0.05, "rate- = {}", pair.mu_minus.im);
        assert!(-0.5 * pair.mu_plus.re > 0.0);
        assert!(-0.5 * pair.mu_minus.re < 0.0);
    }

    #[test]
    fn chain_matches_closed_form_for_two_atoms() {
        let d = 0.37;
        let sp = chain_modes(2, d, ShiftMode::Approximate).unwrap();
        let mx = m(TAU * d, ShiftMode::Approximate).unwrap();
        let expect = [C64::new(0.0, 1.0) + mx, C64::new(0.0, 1.0) - mx];
        assert_multiset_close(
            &sp.modes.iter().map(|m| m.mu).collect::<Vec<_>>(),
            &expect,
            1e-10,
        );
    }

    #[test]
    fn chain_modes_sorted_with_positive_rates() {
        let sp = chain_modes(5, 0.25, ShiftMode::Approximate).unwrap();
        assert_eq!(sp.modes[0].label, ModeLabel::Numeric(0));
        for w in sp.modes.windows(2) {
            assert!(w[0].rate_rel <= w[1].rate_rel);
        }
        for m in &sp.modes {
            assert!(m.rate_rel > 0.0);
        }
        // order of magnitude of the minimal rate at quarter-wavelength spacing
        let g = sp.min_rate_mode().rate_rel;
        assert!(g > 1e-3 && g < 1e-1, "{g}");
    }

    #[test]
    fn rate_switch_consistency() {
        // where both routes are trustworthy they agree tightly
        for (n, r, p) in [(8usize, 0.4, 4usize), (12, 0.8, 6), (10, 1.1, 5)] {
            let couplings = ring_couplings(n, r, ShiftMode::Approximate).unwrap();
            let cosine = ring_mu(&couplings, p, n).im;
            let integral = radiation_rate_for_test(n, p, r);
            assert!(
                (cosine - integral).abs() <= 1e-11 * cosine.abs().max(1e-6),
                "n={n} p={p}: {cosine:e} vs {integral:e}"
            );
        }
    }

    fn radiation_rate_for_test(n: usize, p: usize, r: f64) -> f64 {
        crate::radiation::ring_mode_rate(n, p, r)
    }
}
