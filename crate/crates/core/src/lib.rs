//! Coupled-oscillator modal analysis through a simulated hybrid NISQ
//! eigenvalue estimator.
//!
//! The pipeline mirrors the hybrid routine end to end:
//!
//! 1. [`oscillator`] builds chains and blade toy models and assembles the
//!    mass-normalised dynamical matrix, padded to a qubit dimension.
//! 2. [`pauli`] decomposes the padded matrix into weighted Pauli strings.
//! 3. [`circuit`] amplitude-encodes an eigenvector with multiplexed RY
//!    rotations, measures Pauli observables and applies global depolarizing
//!    noise.
//! 4. [`estimator`] reassembles the eigenvalue from the weighted
//!    expectations and drives plot-ready sweeps.
//!
//! [`qpi`] holds the hardware metric arithmetic and the suitability /
//! feasibility gate used to judge whether a workload fits a device.

pub mod circuit;
pub mod error;
pub mod estimator;
pub mod matrix;
pub mod oscillator;
pub mod pauli;
pub mod qpi;

pub use error::{Error, Result};
