//! Hölder parameterizations of attractors of iterated function systems.
//!
//! The crate builds explicit, finitely sampled curves that pass through
//! (or fill) the attractor of an IFS: paths between two points, whole
//! attractor parameterizations for any exponent above the similarity
//! dimension, arcs for non-branching systems, space-filling tours of
//! self-similar sets and of self-affine carpets and sponges. It also ships
//! dimension formulas and empirical Hölder estimators.

pub mod analysis;
pub mod arc;
pub mod carpets;
mod error;
pub mod gallery;
pub mod geometry;
pub mod holder;
pub mod ifs;
pub mod metric;
pub mod oracle;
pub mod remes;
pub mod spatial;
pub mod svg;
pub mod word;

pub use error::{Error, Result};
