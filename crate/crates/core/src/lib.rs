//! Collective single-excitation states of `N` identical two-level atoms
//! arranged on a circle (with or without a central atom) or on a linear
//! chain.
//!
//! The radiationless dynamics is governed by a complex symmetric matrix
//! whose off-diagonal entries are the distance-dependent coupling
//! `M(X) = S(X) + i D1(X)` and whose diagonal entries are `i`. Its
//! eigenvalues `mu` encode the observable level shift and decay rate of
//! each collective mode,
//!
//! ```text
//! shift / Gamma = -Re(mu) / 2,      rate / Gamma = Im(mu),
//! ```
//!
//! in units of the single-atom spontaneous rate `Gamma`. Circular
//! configurations are diagonalized analytically through their cyclic
//! symmetry; chains fall back to a dense non-Hermitean eigensolver.
//!
//! All lengths are measured in units of the transition wavelength, rates
//! in units of `Gamma`, and times in units of `1/Gamma`.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line front end live in the companion `subrad-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod correlation;
pub mod dynamics;
pub mod eigen;
pub mod geometry;
pub mod matrix;
pub mod spectrum;
pub mod trapping;

mod phase;
mod quad;
mod radiation;

pub use correlation::{d1, m, s_approx, s_exact, DomainError, ShiftMode};
pub use eigen::{decompose, EigenDecomposition, EigenFailure};
pub use geometry::{
    build_chain, build_ring, distances, projector, shift_operator, ConfigKind, Configuration,
    DistanceMatrix, InvalidConfig, Projector, ShiftOperator,
};
pub use matrix::CMatrix;
pub use spectrum::{
    build_channel_matrix, chain_modes, degeneracy_table, ring_modes_a, ring_modes_b, zero_pair,
    zero_sector, ChannelMatrix, EigenMode, ModeLabel, Spectrum, SpectrumError, ZeroBranchTracker,
    ZeroPair, ZeroSector,
};

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex64;
