use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::InvariantResult;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::models::{grid_point, DVectorModel};

const FIELD_TOL: f64 = 1e-8;
const GAUSS_RESIDUAL_TOL: f64 = 0.02;

/// Area of the unit sphere `S^d`.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        3 => 2.0 * PI * PI,
        4 => 8.0 * PI * PI / 3.0,
        _ => {
            // A(S^d) = 2π/(d−1) · A(S^{d−2})
            2.0 * PI / (d as f64 - 1.0) * sphere_area(d - 2)
        }
    }
}

/// Sign relating the orientation of `d̂` to the lower-band curvature of
/// `Σ d_a Γ^a`. For an odd set it is the sign of
/// `tr(Γ1⋯Γ_{2n+1}) / (−2i)^n`, which is −1 for the Pauli matrices.
/// Even sets (chiral models) give −1, with the chiral operator taken as
/// `(−i)^n Γ1⋯Γ_{2n}`, so that the degree equals the 3D winding number of
/// the off-diagonal block.
pub fn orientation_factor(gammas: &[CMatrix]) -> f64 {
    let count = gammas.len();
    if count == 0 {
        return 1.0;
    }
    if count % 2 == 0 {
        return -1.0;
    }
    let n = (count - 1) / 2;
    let prod = gammas.iter().skip(1).fold(gammas[0].clone(), |acc, g| acc * g);
    let norm = num_complex::Complex64::new(0.0, -2.0).powi(n as i32);
    let ratio = prod.trace() / norm;
    if ratio.re >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

// Every permutation of 0..d with its parity sign.
fn permutations(d: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if left.is_empty() {
            let mut inversions = 0;
            for i in 0..prefix.len() {
                for j in i + 1..prefix.len() {
                    if prefix[i] > prefix[j] {
                        inversions += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inversions % 2 == 0 { 1.0 } else { -1.0 }));
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            prefix.push(v);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..d).collect(), &mut out);
    out
}

// Solid angle subtended by the flat simplex with vertices `p` (unit
// vectors in R^{d+1}), signed by the orientation of the vertex order.
fn signed_solid_angle(p: &[Vec<f64>]) -> f64 {
    let m = p.len();
    let det = DMatrix::from_fn(m, m, |r, c| p[c][r]).determinant();
    let dim = m - 1;
    let fact: f64 = (1..=dim).map(|x| x as f64).product();
    // degree-2 rule on the simplex: one vertex weight a, the others b
    let nn = dim as f64;
    let b = (nn + 2.0 - (nn + 2.0).sqrt()) / ((nn + 1.0) * (nn + 2.0));
    let a = 1.0 - nn * b;
    let mut avg = 0.0;
    for i in 0..m {
        let mut x = vec![0.0; m];
        for (j, pj) in p.iter().enumerate() {
            let w = if i == j { a } else { b };
            for r in 0..m {
                x[r] += w * pj[r];
            }
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        avg += r2.powf(-(m as f64) / 2.0);
    }
    avg /= m as f64;
    det / fact * avg
}

/// Brouwer degree of `d̂ = d/|d|` from the torus `T^dim` to `S^dim`, by
/// summing signed spherical volumes of the images of a Kuhn triangulation
/// of every grid cell. The result carries [`orientation_factor`].
pub fn gauss_degree(model: &DVectorModel, grid: usize) -> Result<InvariantResult> {
    let dim = model.dim;
    if model.count() != dim + 1 {
        return Err(Error::DimensionMismatch {
            expected: dim + 1,
            got: model.count(),
        });
    }
    let n = grid;
    if n < 2 {
        return Err(Error::GridTooCoarse(format!("grid {n} < 2")));
    }
    let total = n.pow(dim as u32);
    let dhat: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let k = grid_point(dim, n, idx);
            let d = model.d(&k);
            let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= FIELD_TOL {
                return Err(Error::VanishingField { norm, k });
            }
            Ok(d.iter().map(|x| x / norm).collect())
        })
        .collect::<Result<_>>()?;
    let perms = permutations(dim);
    let index = |x: &[usize]| x.iter().fold(0usize, |acc, &xi| acc * n + xi % n);
    let cells: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut corner = vec![0usize; dim];
            let mut r = idx;
            for axis in (0..dim).rev() {
                corner[axis] = r % n;
                r /= n;
            }
            let mut cell = 0.0;
            for (perm, sign) in &perms {
                let mut v = corner.clone();
                let mut pts = Vec::with_capacity(dim + 1);
                pts.push(dhat[index(&v)].clone());
                for &axis in perm {
                    v[axis] += 1;
                    pts.push(dhat[index(&v)].clone());
                }
                cell += sign * signed_solid_angle(&pts);
            }
            cell
        })
        .collect();
    let sum: f64 = cells.iter().sum();
    let raw = orientation_factor(&model.gammas) * sum / sphere_area(dim);
    let res = InvariantResult::from_raw("gauss_degree", raw, n);
    if res.residual >= GAUSS_RESIDUAL_TOL {
        return Err(Error::NotConverged {
            what: "gauss_degree".into(),
            raw,
            residual: res.residual,
        });
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{d_vector_model, gamma_matrices, ModelSpec};

    fn dv(s: &str) -> DVectorModel {
        d_vector_model(&s.parse::<ModelSpec>().unwrap()).unwrap()
    }

    #[test]
    fn orientation_of_standard_sets() {
        assert_eq!(orientation_factor(&gamma_matrices(3).unwrap()), -1.0);
        assert_eq!(orientation_factor(&gamma_matrices(5).unwrap()), 1.0);
    }

    #[test]
    fn qahe_degrees() {
        assert_eq!(gauss_degree(&dv("model=qahe2d m=1"), 24).unwrap().value, 1);
        assert_eq!(gauss_degree(&dv("model=qahe2d m=-1"), 24).unwrap().value, -1);
        assert_eq!(gauss_degree(&dv("model=qahe2d m=-3"), 24).unwrap().value, 0);
    }

    #[test]
    fn vanishing_field() {
        let r = gauss_degree(&dv("model=qahe2d m=2"), 24);
        assert!(matches!(r, Err(Error::VanishingField { .. })));
    }

    #[test]
    fn ssh_winding_as_circle_map() {
        let g = gamma_matrices(3).unwrap()[..2].to_vec();
        let m = DVectorModel::new("ring", 1, g, |k| vec![k[0].cos(), -k[0].sin()]);
        assert_eq!(gauss_degree(&m, 16).unwrap().value, 1);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!((sphere_area(5) - PI.powi(3)).abs() < 1e-12);
    }
}
