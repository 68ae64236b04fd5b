//! Chains of hyperbolic dumbbells: warp profiles, curvature and volume
//! certification, and the small eigenvalues of the weighted Laplacian that
//! governs low-degree Hodge spectra on `S^p × chain`.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

// NaN must fail range checks, so `!(x > 0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Test oracles are pasted at full printed precision.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod error;
pub mod geometry;
pub mod harness;
pub mod profile;
pub mod quadrature;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use profile::{build_chain, build_chain_with, ChainProfile, DumbbellSpec, SmoothCutoff};
pub use scalar::Real;

pub type ChainProfile64 = ChainProfile<f64>;
pub type DumbbellSpec64 = DumbbellSpec<f64>;
pub type GeometryReport64 = geometry::GeometryReport<f64>;
pub type Spectrum64 = spectral::Spectrum<f64>;
