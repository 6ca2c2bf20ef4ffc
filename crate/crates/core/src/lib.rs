//! Topology-preserving level-set segmentation.
//!
//! The crate implements the self-repelling snake: a geodesic active contour
//! with a non-local repulsion term that keeps the zero level line from
//! splitting or merging. Two solvers are provided:
//!
//! * [`solver::splitbregman`], an alternating scheme with an auxiliary unit
//!   vector field `w ≈ ∇φ`, a Bregman variable `b`, an FFT screened-Poisson
//!   solve for `φ` and a shrink-and-project update for `w`;
//! * [`solver::aos`], the additive operator splitting baseline with
//!   harmonic-average tridiagonal line systems and Hamilton–Jacobi
//!   re-initialization.
//!
//! Everything here is `no_std` with `alloc`. IO, configuration files and the
//! command line live in the `toposnake` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod contour;
pub mod energy;
mod error;
pub mod fft;
pub mod grid;
pub mod levelset;
mod par;
pub mod regularize;
pub mod repulsion;
pub mod solver;
pub mod synth;
pub mod topology;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{GridDims, ScalarField, VectorField2};
