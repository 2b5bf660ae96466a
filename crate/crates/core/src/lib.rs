//! Sparse recovery under structured dictionary mismatch.
//!
//! Measurements follow `y = (A + B·diag(β))·s + w`, where every dictionary
//! column `aᵢ` may drift along a known direction `bᵢ` by an unknown amount
//! `βᵢ`. Substituting `p = β ⊙ s` gives the linear system `y = [A, B]·x + w`
//! with `x = [s; p]`, whose nonzeros come in `(sᵢ, pᵢ)` pairs. This crate
//! recovers `x` with group-sparse convex programs solved by FISTA, provides
//! tools to check the associated recovery guarantees, and builds off-grid
//! direction-of-arrival models for nested arrays and compressive MIMO radar.
//!
//! Module map:
//!
//! - [`model`]: problem types, the joint-vector layout and mixed norms.
//! - [`prox`]: group soft-thresholding, Moreau smoothing and cone projection.
//! - [`solvers`]: the FISTA engine and every solver built on it.
//! - [`analysis`]: J-RIP constants, error bounds and error metrics.
//! - [`doa`]: grids, Taylor mismatch models, merging and sensing models.
//! - [`experiments`]: seeded Monte-Carlo sweeps and their CSV/SVG output.
//! - [`io`]: matrix interchange files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod doa;
mod error;
pub mod experiments;
pub mod io;
pub mod model;
pub mod prox;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{build_phi, joint_norms, realify, JointNorms, JointVector, MismatchProblem, Scalar, StackedPhi};

/// Complex double used throughout the sensing models.
pub type C64 = nalgebra::Complex<f64>;
