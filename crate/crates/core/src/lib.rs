//! Computational core of the group-quantization workbench.
//!
//! Group laws are evaluated over [`jetcalc::Jet2`] to obtain invariant vector
//! fields, structure constants, the quantization form and its Noether
//! invariants. Dynamics, finite-dimensional quantum checks and lattice field
//! models are built on the same engine.

pub mod dynamics;
pub mod error;
pub mod field_lattice;
pub mod group_model;
pub mod grouplang;
pub mod jetcalc;
pub mod lie_engine;
pub mod quantum_gallery;
pub mod sampling;

pub use error::{Error, Result};
