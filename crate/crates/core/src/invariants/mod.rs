//! Band-theory topological invariants.

use serde::{Deserialize, Serialize};

mod chern;
mod critical;
mod gauss;
mod phase;
mod winding;
mod z2;

pub use chern::{berry_phase_1d, chern_from_frames, chern_number_2d, occupied_frames, second_chern_4d};
pub use critical::{critical_points, CriticalPoint, NEWTON_MAX_ITER, SEEDS_PER_AXIS};
pub use gauss::{gauss_degree, orientation_factor, sphere_area};
pub use phase::{phase_diagram, PhaseInterval};
pub use winding::{chiral_block, winding_number_1d, winding_number_3d};
pub use z2::{z2_index_2d, z2_strong_3d, Z2Indices};

/// Acceptance bound on `|raw − value|` for quadrature-type invariants.
pub const RESIDUAL_TOL: f64 = 0.05;

/// A computed invariant: the raw floating value, its integer rounding and
/// the distance between the two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub name: String,
    pub raw: f64,
    pub value: i64,
    pub residual: f64,
    pub grid: usize,
}

impl InvariantResult {
    pub fn from_raw(name: &str, raw: f64, grid: usize) -> Self {
        let value = raw.round();
        InvariantResult {
            name: name.to_string(),
            raw,
            value: value as i64,
            residual: (raw - value).abs(),
            grid,
        }
    }

    /// A Z2 bit stored as `value ∈ {0, 1}` with `raw` the same number.
    pub fn bit(name: &str, bit: bool, grid: usize) -> Self {
        let v = bit as i64;
        InvariantResult {
            name: name.to_string(),
            raw: v as f64,
            value: v,
            residual: 0.0,
            grid,
        }
    }
}

/// Uniform grid step `2π/n`.
pub(crate) fn step(n: usize) -> f64 {
    crate::models::TWO_PI / n as f64
}

/// Fails with `GapClosed` unless the Fermi-level gap exceeds `tol` at `k`.
pub(crate) fn gapped_frame(
    model: &crate::models::BlochModel,
    k: &[f64],
    tol: f64,
) -> crate::Result<crate::linalg::CMatrix> {
    let es = model.eigensystem(k)?;
    let gap = es.gap_above(model.n_occ);
    if gap <= tol {
        return Err(crate::Error::GapClosed { gap, k: k.to_vec() });
    }
    Ok(es.lowest(model.n_occ))
}
