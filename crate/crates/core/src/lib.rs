//! Entanglement dynamics of two rotating spheres coupled through the
//! frame-dragging interaction `H = −(αħ/2)(L_{A+}L_{B−} + L_{A−}L_{B+} − 4L_{Az}L_{Bz})`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amspace;
pub mod blackbody;
pub mod cli;
pub mod collisions;
pub mod config;
pub mod constants;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod feasibility;
pub mod linalg;
pub mod lindblad;
pub mod params;
pub mod statefile;
pub mod wigner;

pub use error::{Error, Result};
