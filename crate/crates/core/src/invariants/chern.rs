use std::f64::consts::PI;

use rayon::prelude::*;

use super::{gapped_frame, InvariantResult, RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::models::{grid_point, BlochModel};

const CHERN_GAP_TOL: f64 = 1e-6;
const LINK_TOL: f64 = 1e-10;

fn check_dim(model: &BlochModel, dim: usize) -> Result<()> {
    if model.dim != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: model.dim,
        });
    }
    Ok(())
}

/// Occupied frames at every grid point, row-major.
fn frames(model: &BlochModel, n: usize) -> Result<Vec<CMatrix>> {
    let total = n.pow(model.dim as u32);
    (0..total)
        .into_par_iter()
        .map(|idx| gapped_frame(model, &grid_point(model.dim, n, idx), CHERN_GAP_TOL))
        .collect()
}

/// Normalized `U(1)` link `det(u_a† u_b) / |det(u_a† u_b)|`.
fn u1_link(a: &CMatrix, b: &CMatrix) -> Result<num_complex::Complex64> {
    let det = (a.adjoint() * b).determinant();
    let norm = det.norm();
    if norm < LINK_TOL {
        return Err(Error::GridTooCoarse(format!(
            "occupied overlap determinant {norm:.3e} between neighbouring grid points"
        )));
    }
    Ok(det / norm)
}

/// First Chern number of the occupied bundle by the plaquette link-variable
/// method. Each plaquette contributes the principal argument of its link
/// product, so the sum is an integer multiple of 2π up to rounding.
pub fn chern_number_2d(model: &BlochModel, grid: usize) -> Result<InvariantResult> {
    check_dim(model, 2)?;
    if grid < 2 {
        return Err(Error::GridTooCoarse(format!("grid {grid} < 2")));
    }
    chern_from_frames(&frames(model, grid)?, grid)
}

/// Plaquette Chern number from occupied frames supplied in row-major grid
/// order. The frames may be in any gauge.
pub fn chern_from_frames(u: &[CMatrix], n: usize) -> Result<InvariantResult> {
    if n < 2 || u.len() != n * n {
        return Err(Error::InconsistentInput(format!(
            "{} frames for a {n}×{n} grid",
            u.len()
        )));
    }
    let at = |i: usize, j: usize| &u[(i % n) * n + (j % n)];
    let flux: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let ux = u1_link(at(i, j), at(i + 1, j))?;
            let uy = u1_link(at(i + 1, j), at(i + 1, j + 1))?;
            let ux2 = u1_link(at(i, j + 1), at(i + 1, j + 1))?;
            let uy2 = u1_link(at(i, j), at(i, j + 1))?;
            let f = (ux * uy * ux2.conj() * uy2.conj()).arg();
            if f.abs() >= PI - 1e-9 {
                return Err(Error::GridTooCoarse(format!(
                    "plaquette flux {f:.6} at cell ({i}, {j}) reaches the branch cut"
                )));
            }
            Ok(f)
        })
        .collect::<Result<_>>()?;
    let total: f64 = flux.iter().sum();
    let raw = total / (2.0 * PI);
    Ok(InvariantResult::from_raw("chern1", raw, n))
}

/// Occupied frames of a 2D model on the uniform `grid × grid` mesh, in the
/// order expected by [`chern_from_frames`].
pub fn occupied_frames(model: &BlochModel, grid: usize) -> Result<Vec<CMatrix>> {
    check_dim(model, 2)?;
    frames(model, grid)
}

/// Berry (Zak) phase of the occupied bands along a 1D loop, in `(−π, π]`.
pub fn berry_phase_1d(model: &BlochModel, grid: usize) -> Result<f64> {
    check_dim(model, 1)?;
    let u = frames(model, grid)?;
    let mut w = c(1.0, 0.0);
    for j in 0..grid {
        w *= u1_link(&u[j], &u[(j + 1) % grid])?;
    }
    Ok(-w.arg())
}

// Signed unit step along axis `mu` (0-based), `forward` selecting the sign.
#[derive(Clone, Copy)]
struct Dir {
    mu: usize,
    forward: bool,
}

struct Lattice4 {
    n: usize,
    links: Vec<[CMatrix; 4]>,
}

impl Lattice4 {
    fn index(&self, x: [usize; 4]) -> usize {
        lat_index(self.n, x)
    }

    fn shift(&self, mut x: [usize; 4], d: Dir) -> [usize; 4] {
        x[d.mu] = if d.forward {
            (x[d.mu] + 1) % self.n
        } else {
            (x[d.mu] + self.n - 1) % self.n
        };
        x
    }

    fn link(&self, x: [usize; 4], d: Dir) -> CMatrix {
        if d.forward {
            self.links[self.index(x)][d.mu].clone()
        } else {
            let back = self.shift(x, d);
            self.links[self.index(back)][d.mu].adjoint()
        }
    }

    fn walk(&self, x: &mut [usize; 4], acc: &mut CMatrix, d: Dir, steps: usize) {
        for _ in 0..steps {
            *acc = &*acc * self.link(*x, d);
            *x = self.shift(*x, d);
        }
    }

    // Closed loop of `la` steps along `a` and `lb` steps along `b`, back to `x`.
    fn rectangle(&self, x: [usize; 4], a: Dir, la: usize, b: Dir, lb: usize) -> CMatrix {
        let neg = |d: Dir| Dir {
            mu: d.mu,
            forward: !d.forward,
        };
        let mut acc = CMatrix::identity(self.links[0][0].nrows(), self.links[0][0].ncols());
        let mut y = x;
        self.walk(&mut y, &mut acc, a, la);
        self.walk(&mut y, &mut acc, b, lb);
        self.walk(&mut y, &mut acc, neg(a), la);
        self.walk(&mut y, &mut acc, neg(b), lb);
        acc
    }

    // Clover sum of the logarithms of the four `lmu × lnu` loops around `x`
    // in the (mu, nu) plane.
    fn clover(&self, x: [usize; 4], mu: usize, nu: usize, lmu: usize, lnu: usize) -> CMatrix {
        let p = |m, f| Dir { mu: m, forward: f };
        linalg::unitary_log(&self.rectangle(x, p(mu, true), lmu, p(nu, true), lnu))
            + linalg::unitary_log(&self.rectangle(x, p(nu, true), lnu, p(mu, false), lmu))
            + linalg::unitary_log(&self.rectangle(x, p(mu, false), lmu, p(nu, false), lnu))
            + linalg::unitary_log(&self.rectangle(x, p(nu, false), lnu, p(mu, true), lmu))
    }

    // Clover field of `l1 × l2` loops symmetrized over the two orientations,
    // normalized to one cell.
    fn averaged(&self, x: [usize; 4], mu: usize, nu: usize, l1: usize, l2: usize) -> CMatrix {
        let norm = 1.0 / (4 * l1 * l2) as f64;
        if l1 == l2 {
            self.clover(x, mu, nu, l1, l1) * c(norm, 0.0)
        } else {
            (self.clover(x, mu, nu, l1, l2) + self.clover(x, mu, nu, l2, l1)) * c(0.5 * norm, 0.0)
        }
    }

    // Antihermitian field strength times the cell area. Loops of four
    // shapes are combined so that the a² and a⁴ lattice artefacts of a
    // smooth field cancel.
    fn field(&self, x: [usize; 4], mu: usize, nu: usize) -> CMatrix {
        const SHAPES: [(usize, usize, f64); 4] = [
            (1, 1, 19.0 / 9.0),
            (1, 2, -64.0 / 45.0),
            (2, 2, 1.0 / 9.0),
            (1, 3, 1.0 / 5.0),
        ];
        SHAPES
            .iter()
            .map(|&(l1, l2, w)| self.averaged(x, mu, nu, l1, l2) * c(w, 0.0))
            .fold(CMatrix::zeros(self.links[0][0].nrows(), self.links[0][0].ncols()), |acc, f| acc + f)
    }
}

/// Second Chern number of the occupied bundle from clover-averaged lattice
/// field strengths built on unitarized overlap links.
pub fn second_chern_4d(model: &BlochModel, grid: usize) -> Result<InvariantResult> {
    check_dim(model, 4)?;
    let n = grid;
    if n < 2 {
        return Err(Error::GridTooCoarse(format!("grid {n} < 2")));
    }
    let u = frames(model, n)?;
    let total = n.pow(4);
    let unflatten = |idx: usize| {
        let mut x = [0usize; 4];
        let mut r = idx;
        for axis in (0..4).rev() {
            x[axis] = r % n;
            r /= n;
        }
        x
    };
    let mut lat = Lattice4 { n, links: Vec::new() };
    lat.links = (0..total)
        .into_par_iter()
        .map(|idx| {
            let x = unflatten(idx);
            let mut out: [CMatrix; 4] = Default::default();
            for (mu, slot) in out.iter_mut().enumerate() {
                let mut y = x;
                y[mu] = (y[mu] + 1) % n;
                let overlap = u[idx].adjoint() * &u[lat_index(n, y)];
                let (lo, _) = linalg::singular_range(&overlap);
                if lo < LINK_TOL {
                    return Err(Error::GridTooCoarse(format!(
                        "singular occupied overlap {lo:.3e} at grid point {x:?}"
                    )));
                }
                *slot = linalg::unitary_part(&overlap);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let density: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let x = unflatten(idx);
            let f = |a, b| lat.field(x, a, b);
            let (f01, f02, f03, f12, f13, f23) = (f(0, 1), f(0, 2), f(0, 3), f(1, 2), f(1, 3), f(2, 3));
            let eps = (&f01 * &f23).trace() - (&f02 * &f13).trace() + (&f03 * &f12).trace();
            8.0 * eps.re
        })
        .collect();
    let sum: f64 = density.iter().sum();
    let raw = sum / (32.0 * PI * PI);
    let res = InvariantResult::from_raw("chern2", raw, n);
    if res.residual >= RESIDUAL_TOL {
        return Err(Error::NotConverged {
            what: "chern2".into(),
            raw,
            residual: res.residual,
        });
    }
    Ok(res)
}

fn lat_index(n: usize, x: [usize; 4]) -> usize {
    ((x[0] * n + x[1]) * n + x[2]) * n + x[3]
}
