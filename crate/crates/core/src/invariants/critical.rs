use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gauss::orientation_factor;
use crate::models::{wrap_angle, DVectorFamily, TWO_PI};

pub const SEEDS_PER_AXIS: usize = 32;
pub const NEWTON_MAX_ITER: usize = 50;
const STEP_TOL: f64 = 1e-12;
const ZERO_TOL: f64 = 1e-10;
const MERGE_TOL: f64 = 1e-6;
const DEGENERATE_TOL: f64 = 1e-8;
const FD_STEP: f64 = 1e-6;

/// A zero of the extended map `(k, m) ↦ d(k, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    /// Momentum components followed by the parameter value.
    pub location: Vec<f64>,
    /// Brouwer degree ±1, or 0 when flagged degenerate.
    pub degree: i32,
    pub degenerate: bool,
    pub jacobian_det: f64,
    pub residual: f64,
}

impl CriticalPoint {
    pub fn m(&self) -> f64 {
        *self.location.last().expect("non-empty location")
    }
}

fn eval(family: &DVectorFamily, x: &[f64]) -> Vec<f64> {
    let dim = family.dim;
    family.d(&x[..dim], x[dim])
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn jacobian(family: &DVectorFamily, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[col] += FD_STEP;
        xm[col] -= FD_STEP;
        let (fp, fm) = (eval(family, &xp), eval(family, &xm));
        for row in 0..n {
            j[(row, col)] = (fp[row] - fm[row]) / (2.0 * FD_STEP);
        }
    }
    j
}

fn newton(family: &DVectorFamily, start: &[f64]) -> Option<Vec<f64>> {
    let mut x = start.to_vec();
    for _ in 0..NEWTON_MAX_ITER {
        let f = DVector::from_vec(eval(family, &x));
        let j = jacobian(family, &x);
        let dx = j.lu().solve(&f)?;
        for (xi, di) in x.iter_mut().zip(dx.iter()) {
            *xi -= di;
        }
        if dx.norm() < STEP_TOL {
            break;
        }
    }
    let r = norm(&eval(family, &x));
    if r < ZERO_TOL && x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

fn periodic_distance(a: &[f64], b: &[f64], dim: usize) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| {
            let d = (x - y).abs();
            if i < dim {
                d.min(TWO_PI - d)
            } else {
                d
            }
        })
        .fold(0.0, f64::max)
}

/// All zeros of `d(k, m)` with `k ∈ T^dim` and `m ∈ m_range`, found by
/// scoring a uniform seed grid and refining promising seeds with Newton's
/// method. Each point carries the sign of the Jacobian determinant of
/// `(m, k) ↦ d` (parameter column first) in the convention of the Gauss-map
/// degree, so the degrees at one critical value sum to the jump of the
/// degree as `m` increases through it.
pub fn critical_points(family: &DVectorFamily, m_range: (f64, f64), seeds_per_axis: usize) -> Vec<CriticalPoint> {
    let dim = family.dim;
    let n = seeds_per_axis.max(2);
    let (m_lo, m_hi) = if m_range.0 <= m_range.1 {
        m_range
    } else {
        (m_range.1, m_range.0)
    };
    let dm = (m_hi - m_lo) / (n - 1) as f64;
    let dk = TWO_PI / n as f64;
    let threshold = 2.0 * dk.max(dm) * ((dim + 1) as f64).sqrt();
    let total = n.pow(dim as u32 + 1);
    let seed = |idx: usize| {
        let mut x = vec![0.0; dim + 1];
        let mut r = idx;
        x[dim] = m_lo + dm * (r % n) as f64;
        r /= n;
        for axis in (0..dim).rev() {
            x[axis] = dk * (r % n) as f64;
            r /= n;
        }
        x
    };
    let refined: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let x = seed(idx);
            if norm(&eval(family, &x)) > threshold {
                return None;
            }
            newton(family, &x)
        })
        .collect();
    // Moving the parameter column in front of the momentum columns.
    let column_order = if dim % 2 == 0 { 1.0 } else { -1.0 };
    let chi = orientation_factor(&family.gammas) * column_order;
    let span = 1e-9 * (1.0 + m_hi.abs().max(m_lo.abs()));
    let mut found: Vec<CriticalPoint> = Vec::new();
    for mut x in refined {
        for xi in x.iter_mut().take(dim) {
            *xi = wrap_angle(*xi);
            if TWO_PI - *xi < MERGE_TOL {
                *xi = 0.0;
            }
        }
        let m = x[dim];
        if m < m_lo - span || m > m_hi + span {
            continue;
        }
        if found.iter().any(|p| periodic_distance(&p.location, &x, dim) < MERGE_TOL) {
            continue;
        }
        let det = jacobian(family, &x).determinant();
        let degenerate = det.abs() < DEGENERATE_TOL;
        let degree = if degenerate { 0 } else { (chi * det.signum()) as i32 };
        let residual = norm(&eval(family, &x));
        found.push(CriticalPoint {
            location: x,
            degree,
            degenerate,
            jacobian_det: det,
            residual,
        });
    }
    found.sort_by(|a, b| {
        a.location
            .iter()
            .rev()
            .zip(b.location.iter().rev())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn qahe_critical_points() {
        let fam = DVectorFamily::named("qahe2d").unwrap();
        let pts = critical_points(&fam, (-3.0, 3.0), SEEDS_PER_AXIS);
        let want = [[0.0, 0.0, -2.0], [0.0, PI, 0.0], [PI, 0.0, 0.0], [PI, PI, 2.0]];
        assert_eq!(pts.len(), 4, "{pts:?}");
        for w in want {
            let p = pts
                .iter()
                .find(|p| periodic_distance(&p.location, &w, 2) < 1e-8)
                .unwrap_or_else(|| panic!("missing {w:?} in {pts:?}"));
            assert!(p.residual < 1e-10);
            assert!(!p.degenerate);
        }
    }
}
