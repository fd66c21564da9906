use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gapped_frame, InvariantResult};
use crate::error::{Error, Result};
use crate::linalg::{antiunitary_apply, c, CMatrix};
use crate::models::{BlochModel, TWO_PI};
use crate::symmetry::{check_symmetry, SymmetryCandidate, SymmetryKind};

const Z2_GAP_TOL: f64 = 1e-6;

fn require_kramers(model: &BlochModel, tr: &SymmetryCandidate, grid: usize) -> Result<()> {
    if tr.kind != SymmetryKind::TimeReversal {
        return Err(Error::NoTimeReversal(format!("candidate is {}", tr.kind)));
    }
    let chk = check_symmetry(model, tr, grid.max(2))?;
    if !chk.holds {
        return Err(Error::NoTimeReversal(format!(
            "violation {:.3e} exceeds tolerance",
            chk.max_violation
        )));
    }
    if chk.square != Some(-1) {
        return Err(Error::NoTimeReversal(format!(
            "T² = {:?}, Kramers degeneracy requires −1",
            chk.square
        )));
    }
    if model.n_occ % 2 != 0 {
        return Err(Error::OddOccupation(model.n_occ));
    }
    if grid < 2 || grid % 2 != 0 {
        return Err(Error::InconsistentInput(format!("grid {grid} must be even")));
    }
    Ok(())
}

/// Occupied frame at a TRIM whose columns come in pairs `(a, Θa)`.
fn kramers_frame(model: &BlochModel, tr: &SymmetryCandidate, k: &[f64]) -> Result<CMatrix> {
    let v = gapped_frame(model, k, Z2_GAP_TOL)?;
    let (n_orb, n_occ) = (v.nrows(), v.ncols());
    let mut out = CMatrix::zeros(n_orb, n_occ);
    let mut filled = 0;
    for col in 0..n_occ {
        if filled == n_occ {
            break;
        }
        let mut a = v.column(col).into_owned();
        for j in 0..filled {
            let bj = out.column(j).into_owned();
            let proj = bj.dotc(&a);
            a -= bj * proj;
        }
        let norm = a.norm();
        if norm < 1e-6 {
            continue;
        }
        a /= c(norm, 0.0);
        let a_mat = CMatrix::from_column_slice(n_orb, 1, a.as_slice());
        let ta = antiunitary_apply(&tr.unitary, &a_mat);
        out.set_column(filled, &a);
        out.set_column(filled + 1, &ta.column(0));
        filled += 2;
    }
    if filled != n_occ {
        return Err(Error::InconsistentInput(
            "could not build a Kramers-paired frame at a TRIM".into(),
        ));
    }
    Ok(out)
}

/// Frame at `−k` fixed by the frame at `k`:
/// `u_{2s}(−k) = −Θ u_{2s+1}(k)`, `u_{2s+1}(−k) = Θ u_{2s}(k)`.
fn reversed_frame(tr: &SymmetryCandidate, frame: &CMatrix) -> CMatrix {
    let t = antiunitary_apply(&tr.unitary, frame);
    let mut out = CMatrix::zeros(frame.nrows(), frame.ncols());
    for s in 0..frame.ncols() / 2 {
        out.set_column(2 * s, &(-t.column(2 * s + 1)));
        out.set_column(2 * s + 1, &t.column(2 * s));
    }
    out
}

fn link(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    let det = (a.adjoint() * b).determinant();
    if det.norm() < 1e-10 {
        return Err(Error::GridTooCoarse(format!(
            "occupied overlap determinant {:.3e}",
            det.norm()
        )));
    }
    Ok(det / det.norm())
}

/// Two-dimensional Z2 index by the half-zone lattice algorithm: link
/// variables over `k_y ∈ [0, π]`, with frames on the two time-reversal
/// invariant lines tied together by Θ, counting `(ΣA − F)/2π` per plaquette
/// modulo 2.
pub fn z2_index_2d(model: &BlochModel, tr: &SymmetryCandidate, grid: usize) -> Result<InvariantResult> {
    if model.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: model.dim,
        });
    }
    require_kramers(model, tr, grid)?;
    let n = grid;
    let half = n / 2;
    let rows = half + 1;
    let k_of = |i: usize, j: usize| vec![TWO_PI * i as f64 / n as f64, TWO_PI * j as f64 / n as f64];
    // Frames for kx ∈ [0, π] on every row; the rest of the invariant rows
    // follow from Θ.
    let mut frames: Vec<Option<CMatrix>> = vec![None; n * rows];
    let direct: Vec<((usize, usize), CMatrix)> = (0..n * rows)
        .into_par_iter()
        .filter_map(|idx| {
            let (j, i) = (idx / n, idx % n);
            let invariant_row = j == 0 || j == half;
            if invariant_row && i > half {
                return None;
            }
            let k = k_of(i, j);
            let frame = if invariant_row && (i == 0 || i == half) {
                kramers_frame(model, tr, &k)
            } else {
                gapped_frame(model, &k, Z2_GAP_TOL)
            };
            Some(frame.map(|f| ((i, j), f)))
        })
        .collect::<Result<_>>()?;
    for ((i, j), f) in direct {
        frames[j * n + i] = Some(f);
    }
    for j in [0, half] {
        for i in half + 1..n {
            let partner = frames[j * n + (n - i)].clone().expect("filled above");
            frames[j * n + i] = Some(reversed_frame(tr, &partner));
        }
    }
    let frames: Vec<CMatrix> = frames.into_iter().map(|f| f.expect("all frames set")).collect();
    let at = |i: usize, j: usize| &frames[j * n + (i % n)];
    let counts: Vec<i64> = (0..n * half)
        .into_par_iter()
        .map(|idx| {
            let (j, i) = (idx / n, idx % n);
            let ux = link(at(i, j), at(i + 1, j))?;
            let uy = link(at(i + 1, j), at(i + 1, j + 1))?;
            let ux2 = link(at(i, j + 1), at(i + 1, j + 1))?;
            let uy2 = link(at(i, j), at(i, j + 1))?;
            let f = (ux * uy * ux2.conj() * uy2.conj()).arg();
            let around = ux.arg() + uy.arg() - ux2.arg() - uy2.arg();
            Ok(((around - f) / (2.0 * PI)).round() as i64)
        })
        .collect::<Result<_>>()?;
    let total: i64 = counts.iter().sum();
    Ok(InvariantResult::bit("z2_2d", total.rem_euclid(2) == 1, n))
}

/// Strong and weak Z2 indices of a three-dimensional insulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Z2Indices {
    pub strong: bool,
    pub weak: [bool; 3],
    pub grid: usize,
}

/// The 2D model on the plane `k[axis] = value` of a 3D model, with the
/// remaining momenta in cyclic order after `axis`.
fn plane(model: &BlochModel, axis: usize, value: f64) -> Result<BlochModel> {
    let inner = model.clone();
    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
    BlochModel::from_fn(&model.name, 2, model.n_orb, model.n_occ, move |q: &[f64]| {
        let mut k = [0.0; 3];
        k[axis] = value;
        k[u] = q[0];
        k[v] = q[1];
        inner.hamiltonian(&k)
    })
}

/// Strong index as the sum of the 2D indices of the `k_z = 0` and
/// `k_z = π` planes (which together contain the eight TRIMs), and weak
/// index `j` as the 2D index of the `k_j = π` plane.
pub fn z2_strong_3d(model: &BlochModel, tr: &SymmetryCandidate, grid: usize) -> Result<Z2Indices> {
    if model.dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: model.dim,
        });
    }
    require_kramers(model, tr, grid)?;
    let mut weak = [false; 3];
    for (axis, slot) in weak.iter_mut().enumerate() {
        *slot = z2_index_2d(&plane(model, axis, PI)?, tr, grid)?.value == 1;
    }
    let kz0 = z2_index_2d(&plane(model, 2, 0.0)?, tr, grid)?.value == 1;
    Ok(Z2Indices {
        strong: kz0 != weak[2],
        weak,
        grid,
    })
}
