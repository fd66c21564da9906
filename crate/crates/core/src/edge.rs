//! Strip geometry: open boundaries along y, Bloch momentum along x.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigensystem, CMatrix, ZERO};
use crate::models::{minimum_gap, BlochModel, GAP_TOL, TWO_PI};

/// Samples along k_y used to extract the real-space hopping blocks.
const KY_SAMPLES: usize = 8;
const RANGE_TOL: f64 = 1e-10;
pub const MIN_COUNT_WIDTH: usize = 4;
pub const DEFAULT_K_GRID: usize = 201;
pub const LOCALIZATION_THRESHOLD: f64 = 0.6;
pub const HYBRIDIZATION_TOL: f64 = 1e-3;
const BULK_GAP_GRID: usize = 32;

/// Which edge's crossings make up `n_plus` and `n_minus`.
pub const CHOSEN_EDGE: Edge = Edge::Left;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Left,
    Right,
}

/// Fourier harmonic `h_n(k_x)` of `H(k_x, k_y) = Σ_n h_n e^{i n k_y}`.
fn harmonic(model: &BlochModel, kx: f64, n: i64) -> CMatrix {
    let n_orb = model.n_orb;
    let mut acc = CMatrix::zeros(n_orb, n_orb);
    for j in 0..KY_SAMPLES {
        let ky = TWO_PI * j as f64 / KY_SAMPLES as f64;
        let phase = Complex64::from_polar(1.0 / KY_SAMPLES as f64, -(n as f64) * ky);
        acc += model.hamiltonian(&[kx, ky]) * phase;
    }
    acc
}

fn require_2d(model: &BlochModel) -> Result<()> {
    if model.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: model.dim,
        });
    }
    Ok(())
}

/// Block-tridiagonal strip Hamiltonian of `width` cells at momentum `k_par`.
pub fn ribbon_hamiltonian(model: &BlochModel, width: usize, k_par: f64) -> Result<CMatrix> {
    require_2d(model)?;
    if width == 0 {
        return Err(Error::WidthTooSmall(width, 1));
    }
    for n in 2..=(KY_SAMPLES as i64 / 2) {
        for s in [n, -n] {
            let norm = harmonic(model, k_par, s).norm();
            if norm > RANGE_TOL {
                return Err(Error::LongRangeModel {
                    harmonic: n as usize,
                    norm,
                });
            }
        }
    }
    let h0 = harmonic(model, k_par, 0);
    let h1 = harmonic(model, k_par, 1);
    let h1_dag = h1.adjoint();
    let n_orb = model.n_orb;
    let size = width * n_orb;
    let mut h = DMatrix::from_element(size, size, ZERO);
    for y in 0..width {
        h.view_mut((y * n_orb, y * n_orb), (n_orb, n_orb)).copy_from(&h0);
        if y + 1 < width {
            h.view_mut((y * n_orb, (y + 1) * n_orb), (n_orb, n_orb)).copy_from(&h1);
            h.view_mut(((y + 1) * n_orb, y * n_orb), (n_orb, n_orb)).copy_from(&h1_dag);
        }
    }
    Ok((&h + h.adjoint()) * Complex64::new(0.5, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RibbonSpectrum {
    pub width: usize,
    pub n_orb: usize,
    pub k: Vec<f64>,
    /// `energies[j]` ascending at `k[j]`.
    pub energies: Vec<Vec<f64>>,
    /// Weight of each state in the outer quarter at y = 0.
    pub left_weight: Vec<Vec<f64>>,
    /// Weight of each state in the outer quarter at y = W − 1.
    pub right_weight: Vec<Vec<f64>>,
}

struct Slice {
    energies: Vec<f64>,
    vectors: CMatrix,
    left: Vec<f64>,
    right: Vec<f64>,
}

fn quarter(width: usize) -> usize {
    (width / 4).max(1)
}

fn solve_slice(model: &BlochModel, width: usize, k: f64) -> Result<Slice> {
    let h = ribbon_hamiltonian(model, width, k)?;
    let es = eigensystem(&h)?;
    let n_orb = model.n_orb;
    let q = quarter(width) * n_orb;
    let size = width * n_orb;
    let cols = es.vectors.ncols();
    let mut left = Vec::with_capacity(cols);
    let mut right = Vec::with_capacity(cols);
    for s in 0..cols {
        let col = es.vectors.column(s);
        left.push(col.rows(0, q).norm_squared());
        right.push(col.rows(size - q, q).norm_squared());
    }
    Ok(Slice {
        energies: es.values,
        vectors: es.vectors,
        left,
        right,
    })
}

/// Sample points shifted by a quarter step so that no sample sits on a
/// time-reversal-invariant momentum.
pub fn k_samples(k_grid: usize) -> Vec<f64> {
    (0..k_grid)
        .map(|j| -PI + TWO_PI * (j as f64 + 0.25) / k_grid as f64)
        .collect()
}

fn slices(model: &BlochModel, width: usize, ks: &[f64]) -> Result<Vec<Slice>> {
    ks.par_iter().map(|&k| solve_slice(model, width, k)).collect()
}

pub fn ribbon_spectrum(model: &BlochModel, width: usize, k_grid: usize) -> Result<RibbonSpectrum> {
    if k_grid == 0 {
        return Err(Error::InconsistentInput("k_grid must be positive".into()));
    }
    let ks = k_samples(k_grid);
    let sl = slices(model, width, &ks)?;
    Ok(RibbonSpectrum {
        width,
        n_orb: model.n_orb,
        k: ks,
        energies: sl.iter().map(|s| s.energies.clone()).collect(),
        left_weight: sl.iter().map(|s| s.left.clone()).collect(),
        right_weight: sl.iter().map(|s| s.right.clone()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCount {
    pub n_plus: i64,
    pub n_minus: i64,
    /// Signed counts `n₊ − n₋` for the left and right edge.
    pub per_edge: [i64; 2],
    /// Both orientations present on the chosen edge.
    pub helical: bool,
}

impl EdgeCount {
    pub fn signed(&self) -> i64 {
        self.n_plus - self.n_minus
    }
}

/// Signed number of zero-energy crossings by edge-localized states.
///
/// States at neighbouring samples are matched by maximal overlap; a matched
/// pair whose energies change sign counts +1 for an upward and −1 for a
/// downward crossing.
pub fn edge_mode_count(model: &BlochModel, width: usize, k_grid: usize) -> Result<EdgeCount> {
    require_2d(model)?;
    if width < MIN_COUNT_WIDTH {
        return Err(Error::WidthTooSmall(width, MIN_COUNT_WIDTH));
    }
    if k_grid < 3 {
        return Err(Error::InconsistentInput("k_grid must be at least 3".into()));
    }
    let gap = minimum_gap(model, BULK_GAP_GRID);
    if gap <= GAP_TOL {
        return Err(Error::GapClosed { gap, k: vec![] });
    }
    let ks = k_samples(k_grid);
    let sl = slices(model, width, &ks)?;
    let mut up = [0i64; 2];
    let mut down = [0i64; 2];
    for j in 0..k_grid {
        let (a, b) = (&sl[j], &sl[(j + 1) % k_grid]);
        let overlaps = a.vectors.adjoint() * &b.vectors;
        for s in 0..a.energies.len() {
            let (ea, wl, wr) = (a.energies[s], a.left[s], a.right[s]);
            let edge = if wl > LOCALIZATION_THRESHOLD {
                0
            } else if wr > LOCALIZATION_THRESHOLD {
                1
            } else {
                continue;
            };
            let t = (0..b.energies.len())
                .max_by(|&x, &y| overlaps[(s, x)].norm().total_cmp(&overlaps[(s, y)].norm()))
                .expect("non-empty spectrum");
            let eb = b.energies[t];
            if (ea < 0.0) == (eb < 0.0) {
                continue;
            }
            let opposite = if edge == 0 { wr.max(b.right[t]) } else { wl.max(b.left[t]) };
            if opposite >= HYBRIDIZATION_TOL {
                return Err(Error::EdgesHybridized(opposite));
            }
            if eb > ea {
                up[edge] += 1;
            } else {
                down[edge] += 1;
            }
        }
    }
    let e = match CHOSEN_EDGE {
        Edge::Left => 0,
        Edge::Right => 1,
    };
    Ok(EdgeCount {
        n_plus: up[e],
        n_minus: down[e],
        per_edge: [up[0] - down[0], up[1] - down[1]],
        helical: up[e] > 0 && down[e] > 0,
    })
}
