//! Topological invariants of gapped free-fermion lattice models.
//!
//! The crate evaluates Bloch Hamiltonians on uniform momentum grids and
//! computes Chern numbers, winding numbers, Z2 indices, Green's-function
//! winding invariants and ribbon edge spectra, plus the symbolic tenfold-way
//! classification table.

pub mod edge;
pub mod error;
pub mod greens;
pub mod invariants;
pub mod io;
pub mod ktable;
pub mod linalg;
pub mod models;
pub mod symmetry;

pub mod cli;

pub use error::{Error, Result};
pub use invariants::InvariantResult;
pub use models::{build_model, BlochModel, DVectorFamily, DVectorModel, KPoint, ModelSpec};
