//! Gauge-invariant projectors and evolution kernels for finite-dimensional
//! gauge models, computed without gauge fixing in a truncated holomorphic
//! Fock space.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`]: truncated number basis, ladder operators, holomorphic kernels.
//! * [`models`]: the SO(N) vector model and SU(2) Yang–Mills mechanics.
//! * [`projector`]: the projector onto gauge-invariant states.
//! * [`evolution`]: spectral and time-sliced projected evolution.
//! * [`cli`]: configuration, jobs and reports behind the `gaugefree` binary.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod models;
pub mod projector;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};
