use std::f64::consts::PI;

use rayon::prelude::*;

use super::{step, InvariantResult, RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{eigensystem, CMatrix};
use crate::models::{grid_point, BlochModel};
use crate::symmetry::{check_symmetry, SymmetryCandidate, SymmetryKind};

const DET_TOL: f64 = 1e-10;
const DIFF_STEP: f64 = 1e-3;

/// Off-diagonal block `q(k) = V+† H(k) V−` in the eigenbasis of the chiral
/// operator, with `V±` its ±1 eigenvectors.
pub fn chiral_block<'a>(model: &'a BlochModel, chiral: &SymmetryCandidate, grid: usize) -> Result<impl Fn(&[f64]) -> CMatrix + Sync + 'a> {
    if chiral.kind != SymmetryKind::Chiral {
        return Err(Error::InconsistentInput(format!(
            "expected a chiral candidate, got {}",
            chiral.kind
        )));
    }
    let chk = check_symmetry(model, chiral, grid)?;
    if !chk.holds {
        return Err(Error::NoChiralSymmetry(chk.max_violation));
    }
    let s = &chiral.unitary;
    let herm = (s + s.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    let es = eigensystem(&herm)?;
    let n = model.n_orb;
    let n_minus = es.values.iter().filter(|&&v| v < 0.0).count();
    if n_minus * 2 != n || es.values.iter().any(|v| (v.abs() - 1.0).abs() > 1e-8) {
        return Err(Error::InconsistentInput(
            "chiral operator must be Hermitian with balanced ±1 eigenvalues".into(),
        ));
    }
    let v_minus = es.vectors.columns(0, n_minus).into_owned();
    let v_plus = es.vectors.columns(n_minus, n - n_minus).into_owned();
    Ok(move |k: &[f64]| v_plus.adjoint() * model.hamiltonian(k) * &v_minus)
}

/// Winding number of `det q(k)` around the origin along the 1D Brillouin
/// zone, summed from principal-branch phase increments.
pub fn winding_number_1d(model: &BlochModel, chiral: &SymmetryCandidate, grid: usize) -> Result<InvariantResult> {
    if model.dim != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: model.dim,
        });
    }
    let q = chiral_block(model, chiral, grid)?;
    let dets = (0..grid)
        .map(|j| {
            let k = grid_point(1, grid, j);
            let det = q(&k).determinant();
            if det.norm() < DET_TOL {
                return Err(Error::GapClosed { gap: det.norm(), k });
            }
            Ok(det)
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = (0..grid).map(|j| (dets[(j + 1) % grid] / dets[j]).arg()).sum();
    Ok(InvariantResult::from_raw("winding1", total / (2.0 * PI), grid))
}

/// Winding number of `q: T³ → GL(n)`,
/// `W₃ = 1/(24π²) ∫ ε^{abc} tr(q⁻¹∂_a q q⁻¹∂_b q q⁻¹∂_c q)`, by uniform
/// (trapezoidal) sampling with fourth-order central differences.
pub fn winding_number_3d(model: &BlochModel, chiral: &SymmetryCandidate, grid: usize) -> Result<InvariantResult> {
    if model.dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: model.dim,
        });
    }
    let q = chiral_block(model, chiral, grid)?;
    let n = grid;
    let h = DIFF_STEP;
    let density: Vec<f64> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let k = grid_point(3, n, idx);
            let qk = q(&k);
            if qk.clone().determinant().norm() < DET_TOL {
                return Err(Error::GapClosed {
                    gap: qk.determinant().norm(),
                    k,
                });
            }
            let qinv = qk.try_inverse().ok_or_else(|| Error::GapClosed { gap: 0.0, k: k.clone() })?;
            let a: Vec<CMatrix> = (0..3)
                .map(|axis| {
                    let at = |dx: f64| {
                        let mut kk = k.clone();
                        kk[axis] += dx;
                        q(&kk)
                    };
                    let dq = (at(-2.0 * h) - at(2.0 * h) + (at(h) - at(-h)) * num_complex::Complex64::new(8.0, 0.0))
                        / num_complex::Complex64::new(12.0 * h, 0.0);
                    &qinv * dq
                })
                .collect();
            let t = (&a[0] * &a[1] * &a[2]).trace() - (&a[0] * &a[2] * &a[1]).trace();
            Ok(3.0 * t.re)
        })
        .collect::<Result<_>>()?;
    let sum: f64 = density.iter().sum();
    let raw = sum * step(n).powi(3) / (24.0 * PI * PI);
    let res = InvariantResult::from_raw("winding3", raw, n);
    if res.residual >= RESIDUAL_TOL {
        return Err(Error::NotConverged {
            what: "winding3".into(),
            raw,
            residual: res.residual,
        });
    }
    Ok(res)
}
