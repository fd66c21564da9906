//! Single-particle Green's functions and their frequency-momentum winding.

use std::f64::consts::{FRAC_PI_2, PI};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{chern_number_2d, InvariantResult};
use crate::linalg::{self, c, eigensystem, CMatrix};
use crate::models::{grid_point, BlochModel};

pub const DEFAULT_WQUAD: usize = 200;
pub const DEFAULT_KGRID: usize = 24;
const N3_RESIDUAL_TOL: f64 = 0.02;
const INVERTIBLE_TOL: f64 = 1e-8;
const SMOOTH_TOL: f64 = 1e-6;

/// `G(iω, k) = (iω − H(k) − Σ)⁻¹` with a static self-energy `Σ`.
#[derive(Debug, Clone)]
pub struct GreenFunction {
    pub model: BlochModel,
    pub self_energy: CMatrix,
    pub self_energy_tag: String,
}

impl GreenFunction {
    pub fn dim(&self) -> usize {
        self.model.dim
    }

    pub fn n_orb(&self) -> usize {
        self.model.n_orb
    }

    /// `G⁻¹(iω, k)`.
    pub fn inverse(&self, omega: f64, k: &[f64]) -> CMatrix {
        let n = self.n_orb();
        linalg::identity(n) * c(0.0, omega) - self.model.hamiltonian(k) - &self.self_energy
    }

    pub fn sample(&self, omega: f64, k: &[f64]) -> Result<CMatrix> {
        let inv = self.inverse(omega, k);
        let (lo, _) = linalg::singular_range(&inv);
        if lo < INVERTIBLE_TOL {
            return Err(Error::SingularGreen {
                sigma: lo,
                omega,
                k: k.to_vec(),
            });
        }
        inv.try_inverse().ok_or(Error::SingularGreen {
            sigma: 0.0,
            omega,
            k: k.to_vec(),
        })
    }

    /// Adds a static self-energy.
    pub fn with_self_energy(mut self, sigma: CMatrix, tag: &str) -> Result<Self> {
        if sigma.nrows() != self.n_orb() || sigma.ncols() != self.n_orb() {
            return Err(Error::DimensionMismatch {
                expected: self.n_orb(),
                got: sigma.nrows(),
            });
        }
        let dev = linalg::hermiticity_violation(&sigma);
        if dev > linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        self.self_energy = sigma;
        self.self_energy_tag = tag.to_string();
        Ok(self)
    }
}

/// The non-interacting Green's function of a gapped model.
pub fn g0_from_model(model: &BlochModel) -> Result<GreenFunction> {
    let gap = crate::models::minimum_gap(model, 16);
    if gap <= crate::models::GAP_TOL {
        // locate the offending point for the message
        let n: usize = 16;
        for idx in 0..n.pow(model.dim as u32) {
            let k = grid_point(model.dim, n, idx);
            if let Ok(es) = model.eigensystem(&k) {
                if es.gap_above(model.n_occ) <= crate::models::GAP_TOL {
                    return Err(Error::GapClosed {
                        gap: es.gap_above(model.n_occ),
                        k,
                    });
                }
            }
        }
        return Err(Error::GapClosed { gap, k: vec![] });
    }
    Ok(GreenFunction {
        model: model.clone(),
        self_energy: CMatrix::zeros(model.n_orb, model.n_orb),
        self_energy_tag: "none".into(),
    })
}

/// Scalar static self-energy `Σ = s·1`.
pub fn scalar_self_energy(n: usize, shift: f64) -> CMatrix {
    linalg::identity(n) * c(shift, 0.0)
}

fn legendre_on(n: usize, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
    let count = std::num::NonZeroUsize::new(n.max(1)).expect("n ≥ 1");
    let rule = GaussLegendre::new(count);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    Ok(rule.iter().map(|(x, w)| (mid + half * x, half * w)).collect())
}

/// `N₃[G] = −W₃[G⁻¹]` over `T² × ℝ`, with `ω = tan θ` and Gauss–Legendre
/// nodes in `θ`. Momentum derivatives of `G⁻¹` are central differences of
/// `−H` with step `2π/(8·kgrid)`; `∂_ω G⁻¹ = i`.
pub fn n3_invariant(g: &GreenFunction, kgrid: usize, wquad: usize) -> Result<InvariantResult> {
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: g.dim(),
        });
    }
    let nodes = legendre_on(wquad, -FRAC_PI_2, FRAC_PI_2)?;
    let n = kgrid;
    let h = 2.0 * PI / (8.0 * n as f64);
    let n_orb = g.n_orb();
    let i_unit = linalg::identity(n_orb) * c(0.0, 1.0);
    let per_k: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let k = grid_point(2, n, idx);
            let shifted = |axis: usize, dx: f64| {
                let mut kk = k.clone();
                kk[axis] += dx;
                g.model.hamiltonian(&kk)
            };
            let dh: Vec<CMatrix> = (0..2)
                .map(|axis| (shifted(axis, h) - shifted(axis, -h)) / Complex64::new(2.0 * h, 0.0))
                .collect();
            let mut acc = 0.0;
            for &(theta, w) in &nodes {
                let omega = theta.tan();
                let gm = g.sample(omega, &k)?;
                let ax = -(&gm * &dh[0]);
                let ay = -(&gm * &dh[1]);
                let aw = &gm * &i_unit;
                // ε^{abc} tr(A_a A_b A_c) over (kx, ky, ω)
                let t = (&ax * &ay * &aw).trace() - (&ax * &aw * &ay).trace();
                let sec2 = 1.0 + omega * omega;
                acc += w * sec2 * 3.0 * t.re;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let sum: f64 = per_k.iter().sum();
    let dk = 2.0 * PI / n as f64;
    let raw = sum * dk * dk / (24.0 * PI * PI);
    let res = InvariantResult::from_raw("n3", raw, n);
    if res.residual >= N3_RESIDUAL_TOL {
        return Err(Error::NotConverged {
            what: "n3".into(),
            raw,
            residual: res.residual,
        });
    }
    Ok(res)
}

/// `h_eff(k) = −G⁻¹(0, k)` as a model whose filling is the number of
/// negative eigenvalues, required to be the same at every grid point.
pub fn effective_hamiltonian(g: &GreenFunction, kgrid: usize) -> Result<BlochModel> {
    let n = kgrid.max(2);
    let total = n.pow(g.dim() as u32);
    let counts: Vec<usize> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let k = grid_point(g.dim(), n, idx);
            let heff = -g.inverse(0.0, &k);
            let es = eigensystem(&heff)?;
            if es.values.iter().any(|v| v.abs() < INVERTIBLE_TOL) {
                return Err(Error::SingularZeroFrequency(k));
            }
            Ok(es.values.iter().filter(|&&v| v < 0.0).count())
        })
        .collect::<Result<_>>()?;
    let first = counts[0];
    if let Some(idx) = counts.iter().position(|&c| c != first) {
        return Err(Error::NonUniformFilling(counts[idx], grid_point(g.dim(), n, idx), first));
    }
    if first == 0 || first == g.n_orb() {
        return Err(Error::InvalidOccupation {
            n_occ: first,
            n_orb: g.n_orb(),
        });
    }
    let gc = g.clone();
    BlochModel::from_fn(&format!("{}_heff", g.model.name), g.dim(), g.n_orb(), first, move |k| {
        -gc.inverse(0.0, k)
    })
    .map(|m| m.with_params(g.model.params.clone()))
}

/// Chern number of the zero-frequency effective Hamiltonian.
pub fn heff_invariant(g: &GreenFunction, kgrid: usize) -> Result<InvariantResult> {
    let heff = effective_hamiltonian(g, kgrid)?;
    let mut r = chern_number_2d(&heff, kgrid)?;
    r.name = "heff_chern1".into();
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeformationCheck {
    pub smooth: bool,
    pub min_singular: f64,
}

/// `G(iω, k, λ) = (1−λ) G + λ [iω + G⁻¹(0, k)]⁻¹`.
pub fn deformed(g: &GreenFunction, lambda: f64, omega: f64, k: &[f64]) -> Result<CMatrix> {
    let n = g.n_orb();
    let g_full = g.sample(omega, k)?;
    let endpoint_inv = linalg::identity(n) * c(0.0, omega) + g.inverse(0.0, k);
    let endpoint = endpoint_inv.try_inverse().ok_or(Error::SingularGreen {
        sigma: 0.0,
        omega,
        k: k.to_vec(),
    })?;
    Ok(g_full * c(1.0 - lambda, 0.0) + endpoint * c(lambda, 0.0))
}

/// Smallest singular value of `G(λ)⁻¹` over the sampling set; smooth iff it
/// stays above `1e−6`. A singular sample counts as a non-smooth finding.
pub fn deformation_gap_check(g: &GreenFunction, lambdas: &[f64], kgrid: usize, wquad: usize) -> DeformationCheck {
    let nodes = match legendre_on(wquad, -FRAC_PI_2, FRAC_PI_2) {
        Ok(n) => n,
        Err(_) => {
            return DeformationCheck {
                smooth: false,
                min_singular: 0.0,
            }
        }
    };
    let n = kgrid.max(1);
    let min_singular = (0..n.pow(g.dim() as u32))
        .into_par_iter()
        .map(|idx| {
            let k = grid_point(g.dim(), n, idx);
            let mut lo = f64::INFINITY;
            for &lambda in lambdas {
                for &(theta, _) in &nodes {
                    let s = match deformed(g, lambda, theta.tan(), &k) {
                        Ok(gl) => {
                            let (_, hi) = linalg::singular_range(&gl);
                            if hi > 0.0 {
                                1.0 / hi
                            } else {
                                0.0
                            }
                        }
                        Err(_) => 0.0,
                    };
                    lo = lo.min(s);
                }
            }
            lo
        })
        .reduce(|| f64::INFINITY, f64::min);
    DeformationCheck {
        smooth: min_singular > SMOOTH_TOL,
        min_singular,
    }
}
