//! rescat-core: a desk-scale workbench for robust catalysis and resource
//! broadcasting in quantum resource theories.
//!
//! The crate provides:
//!
//! - [`qmat`] — complex Hermitian matrix primitives, subsystem bookkeeping,
//!   partial traces and trace distances;
//! - [`channel`] — CPTP maps in Kraus form, Choi-matrix validation and the
//!   channel constructors used by the catalysis examples;
//! - [`freeset`] — structured free-state families, the minimal / separable /
//!   maximal / affine composition rules and membership tests;
//! - [`monotone`] — max-relative entropy of resource, relative entropy of
//!   resource, its reversed variant and a measured lower bound;
//! - [`catalysis`] — decision procedures for catalytic channels, robustness
//!   witnesses, broadcast converters and the built-in example suite;
//! - [`degrade`] — a repeated-round simulator quantifying catalyst
//!   degradation under preparation and channel noise.
//!
//! Conventions: trace distance is the unhalved trace norm ‖ρ−σ‖₁, all
//! entropic quantities are in bits (base-2 logarithms), and every tolerance
//! defaults to 1e-9.
//!
//! ```
//! # extern crate rescat_core;
//! use rescat_core::qmat::{DensityMatrix, Factorization, tensor, partial_trace};
//!
//! let rho = DensityMatrix::from_probs(&[0.7, 0.3], "S").unwrap();
//! let tau = DensityMatrix::from_probs(&[0.5, 0.5], "C").unwrap();
//! let joint = tensor(&rho, &tau).unwrap();
//! let back = partial_trace(&joint, &["S"]).unwrap();
//! assert!(back.mat.sub(&rho.mat).max_abs() < 1e-12);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod catalysis;
pub mod channel;
pub mod degrade;
pub mod error;
pub mod freeset;
pub mod monotone;
pub mod qmat;
pub mod sampling;
pub mod scan;
pub mod suite;

pub(crate) mod opt;
#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
