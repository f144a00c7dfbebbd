//! Quantum superposition model of two-concept combinations.
//!
//! - [`ingest`]: membership-probability tables and Likert conversion.
//! - [`scop`]: state-context-property systems and prototype distances.
//! - [`numerics`]: complex vectors and dense linear solves.
//! - [`hilbert`]: phases, sign assignment and the two state vectors.
//! - [`wavefield`]: Gaussian wave-packet interference fields and rasters.
//! - [`predict`]: classical versus quantum conjunction/negation predictions.
//! - [`corpus`]: the bundled Fruits/Vegetables data and reference values.

// Negated float comparisons are used on purpose so that NaN fails checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod format;
pub mod hilbert;
pub mod ingest;
pub mod numerics;
pub mod predict;
pub mod scop;
pub mod wavefield;
