//! Numerical laboratory for critical-case fractional boundary Hardy
//! inequalities.
//!
//! The crate evaluates Gagliardo seminorms and logarithmically weighted
//! boundary functionals on slabs, exterior domains, Lipschitz epigraphs and
//! polygons, checks the supporting inequalities as slack functions, and runs
//! the constant-estimation, blow-up and telescoping experiments.
//!
//! Module map:
//!
//! - [`geometry`]: domains, exact boundary distance, graph flattening, dyadic layers, annuli.
//! - [`quadrature`]: grids, test functions, deterministic integration, the Gagliardo seminorm.
//! - [`hardy`]: exponent tables, weights, the Hardy functional and ratio.
//! - [`lemmas`]: slack functions for the supporting inequalities.
//! - [`experiments`]: constant estimation, blow-up probes, telescoping reconstruction.
//! - [`runner`]: experiment configs, dispatch and result records.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod hardy;
pub mod lemmas;
pub mod params;
pub mod quadrature;
pub mod runner;

pub use error::{Error, Result};
pub use params::{Criticality, FracParams, Rational};
