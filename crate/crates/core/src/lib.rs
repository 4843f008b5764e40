//! Periodic traveling waves of generalized KdV, `u_t = u_xxx + f(u)_x − c u_x`,
//! and their spectral stability near the origin of the spectral plane.
//!
//! The pipeline runs `profile` (orbit, conserved quantities, gradients) →
//! `monodromy` (period map of the linearization) → `indices` (orientation
//! index and modulational discriminant) → `spectrum` (band tracing, real-axis
//! scans and a Fourier–Bloch oracle).

pub mod cli;
pub mod error;
pub mod numerics;
pub mod monodromy;
pub mod profile;
pub mod indices;
pub mod spectrum;

pub use error::{Error, Result};
