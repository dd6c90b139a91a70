//! Multimode squeezed light from type-I SPDC driven by a shaped pump pulse.
//!
//! The crate follows the physical pipeline: BiBO dispersion fixes the phase
//! matching, a sampled pump spectrum and the phase-matching function give the
//! joint spectral matrix `L`, its Takagi factorization gives the supermodes,
//! and the symplectic propagator built from them gives the output covariance
//! matrix. Detection-mode algebra (frexels, cluster nullifiers) and an
//! evolutionary optimizer over pulse-shaper settings sit on top.

pub mod analysis;
pub mod dispersion;
pub mod error;
pub mod gaussian_core;
pub mod jsa;
pub mod linalg;
pub mod modes;
pub mod optimizer;
pub mod pump;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
