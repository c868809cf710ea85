//! Quantum-field mode dynamics for finite-velocity sweeps through a
//! zero-temperature phase transition.
//!
//! Near the critical point the low-energy excitations obey
//! `L = (Φ̇²/α − β(∇Φ)²)/2` with power-law coefficients `α ∝ |t|^a`,
//! `β ∝ |t|^b`. This crate integrates the Fourier modes of that field
//! from an adiabatic vacuum up to a time just before the transition,
//! compares them with the closed-form Hankel-function solutions, and fits
//! the power-law indices of the frozen two-point spectra.
//!
//! Module map:
//! - [`specfun`]: Bessel and Hankel functions of real order.
//! - [`model`]: sweep scenarios, presets, predicted exponents, horizon geometry.
//! - [`dynamics`]: adaptive integration of the canonical mode equations.
//! - [`analytic`]: conformal time and the exact mode solutions.
//! - [`spectrum`]: frozen spectra and log-log index fits.
//! - [`lattice`]: 1+1 dimensional leapfrog lattice used as a brute-force cross-check.
//! - [`pipeline`]: evolve, assemble, fit; the end-to-end run used by the CLI.

pub mod analytic;
pub mod dynamics;
mod error;
pub mod lattice;
pub mod model;
pub mod pipeline;
pub mod spectrum;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
