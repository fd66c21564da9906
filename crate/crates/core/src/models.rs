//! Lattice model zoo and Bloch Hamiltonian sampling.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, c, eigensystem, kron, CMatrix, EigenSystem, Projector};

pub const TWO_PI: f64 = 2.0 * PI;

/// Minimum spectral gap at the Fermi division for an occupied frame.
pub const GAP_TOL: f64 = 1e-8;

/// Crystal momentum with components reduced to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KPoint {
    pub coords: Vec<f64>,
}

impl KPoint {
    pub fn new(coords: &[f64]) -> Self {
        KPoint {
            coords: coords.iter().map(|&x| wrap_angle(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn negated(&self) -> Self {
        KPoint::new(&self.coords.iter().map(|x| -x).collect::<Vec<_>>())
    }
}

pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// All points `2π j / n` of the uniform grid in `dim` dimensions, row-major
/// with the first axis varying slowest.
pub fn grid_points(dim: usize, n: usize) -> Vec<Vec<f64>> {
    let total = n.pow(dim as u32);
    (0..total).map(|idx| grid_point(dim, n, idx)).collect()
}

/// The `idx`-th point of [`grid_points`].
pub fn grid_point(dim: usize, n: usize, idx: usize) -> Vec<f64> {
    let mut k = vec![0.0; dim];
    let mut rest = idx;
    for axis in (0..dim).rev() {
        k[axis] = TWO_PI * (rest % n) as f64 / n as f64;
        rest /= n;
    }
    k
}

pub type Evaluator = Arc<dyn Fn(&[f64]) -> CMatrix + Send + Sync>;

/// A sampled Bloch Hamiltonian `H(k)` with band filling and metadata.
#[derive(Clone)]
pub struct BlochModel {
    pub name: String,
    pub dim: usize,
    pub n_orb: usize,
    pub n_occ: usize,
    pub params: BTreeMap<String, f64>,
    evaluator: Evaluator,
}

impl fmt::Debug for BlochModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlochModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("n_orb", &self.n_orb)
            .field("n_occ", &self.n_occ)
            .field("params", &self.params)
            .finish()
    }
}

impl BlochModel {
    /// Wraps an arbitrary sampler. The sampler must be pure and return an
    /// `n_orb × n_orb` Hermitian matrix; both are checked at `k = 0`.
    pub fn from_fn<F>(name: &str, dim: usize, n_orb: usize, n_occ: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
    {
        if n_occ == 0 || n_occ >= n_orb {
            return Err(Error::InvalidOccupation { n_occ, n_orb });
        }
        let h0 = f(&vec![0.0; dim]);
        if h0.nrows() != n_orb || h0.ncols() != n_orb {
            return Err(Error::DimensionMismatch {
                expected: n_orb,
                got: h0.nrows(),
            });
        }
        let dev = linalg::hermiticity_violation(&h0);
        if dev > 1e-12 * linalg::max_abs(&h0).max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(BlochModel {
            name: name.to_string(),
            dim,
            n_orb,
            n_occ,
            params: BTreeMap::new(),
            evaluator: Arc::new(f),
        })
    }

    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn with_n_occ(mut self, n_occ: usize) -> Result<Self> {
        if n_occ == 0 || n_occ >= self.n_orb {
            return Err(Error::InvalidOccupation {
                n_occ,
                n_orb: self.n_orb,
            });
        }
        self.n_occ = n_occ;
        Ok(self)
    }

    pub fn hamiltonian(&self, k: &[f64]) -> CMatrix {
        (self.evaluator)(k)
    }

    pub fn eigensystem(&self, k: &[f64]) -> Result<EigenSystem> {
        eigensystem(&self.hamiltonian(k))
    }

    /// Orthonormal frame of the `n_occ` lowest states at `k`.
    pub fn occupied_frame(&self, k: &[f64]) -> Result<CMatrix> {
        let es = self.eigensystem(k)?;
        let gap = es.gap_above(self.n_occ);
        if gap <= GAP_TOL {
            return Err(Error::GapClosed { gap, k: k.to_vec() });
        }
        Ok(es.lowest(self.n_occ))
    }

    pub fn occupied_projector(&self, k: &[f64]) -> Result<Projector> {
        Ok(Projector::from_frame(&self.occupied_frame(k)?))
    }

    /// Spectrally flattened copy: `H_flat = 1 − 2P` with `P` the occupied
    /// projector, so that occupied states sit at −1 and empty ones at +1.
    pub fn flattened(&self) -> BlochModel {
        let inner = self.clone();
        let n = self.n_orb;
        let n_occ = self.n_occ;
        let evaluator: Evaluator = Arc::new(move |k: &[f64]| {
            let es = inner
                .eigensystem(k)
                .expect("registered evaluators are Hermitian");
            let v = es.lowest(n_occ);
            linalg::identity(n) - (&v * v.adjoint()) * c(2.0, 0.0)
        });
        BlochModel {
            name: format!("{}_flat", self.name),
            dim: self.dim,
            n_orb: n,
            n_occ,
            params: self.params.clone(),
            evaluator,
        }
    }

    /// Applies a k-dependent unitary basis change `H → U(k) H U(k)†`.
    pub fn conjugated<F>(&self, u: F) -> BlochModel
    where
        F: Fn(&[f64]) -> CMatrix + Send + Sync + 'static,
    {
        let inner = self.clone();
        let evaluator: Evaluator = Arc::new(move |k: &[f64]| {
            let uk = u(k);
            &uk * inner.hamiltonian(k) * uk.adjoint()
        });
        BlochModel {
            evaluator,
            ..self.clone()
        }
    }
}

/// Smallest gap `λ_{n_occ+1} − λ_{n_occ}` over the uniform grid.
pub fn minimum_gap(model: &BlochModel, grid: usize) -> f64 {
    let n = grid.max(2);
    let total = n.pow(model.dim as u32);
    (0..total)
        .into_par_iter()
        .map(|idx| {
            let k = grid_point(model.dim, n, idx);
            match model.eigensystem(&k) {
                Ok(es) => es.gap_above(model.n_occ).max(0.0),
                Err(_) => 0.0,
            }
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Hermitian matrices `Γ^a` with `{Γa, Γb} = 2δ_ab`, for 3 or 5 generators.
///
/// The five-element set is built from the Pauli triple as
/// `σx⊗σ_a, σy⊗1, σz⊗1`.
pub fn gamma_matrices(count: usize) -> Result<Vec<CMatrix>> {
    let paulis = vec![linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
    match count {
        3 => Ok(paulis),
        5 => {
            let id = linalg::identity(2);
            let mut out: Vec<CMatrix> = paulis.iter().map(|s| kron(&paulis[0], s)).collect();
            out.push(kron(&paulis[1], &id));
            out.push(kron(&paulis[2], &id));
            Ok(out)
        }
        other => Err(Error::UnsupportedCount(other)),
    }
}

pub type DMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Dirac-type model `H(k) = Σ_a d_a(k) Γ^a`.
#[derive(Clone)]
pub struct DVectorModel {
    pub name: String,
    pub dim: usize,
    pub params: BTreeMap<String, f64>,
    pub gammas: Vec<CMatrix>,
    d_map: DMap,
}

impl fmt::Debug for DVectorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DVectorModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("count", &self.gammas.len())
            .field("params", &self.params)
            .finish()
    }
}

impl DVectorModel {
    pub fn new<F>(name: &str, dim: usize, gammas: Vec<CMatrix>, d_map: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        DVectorModel {
            name: name.to_string(),
            dim,
            params: BTreeMap::new(),
            gammas,
            d_map: Arc::new(d_map),
        }
    }

    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn count(&self) -> usize {
        self.gammas.len()
    }

    pub fn d(&self, k: &[f64]) -> Vec<f64> {
        (self.d_map)(k)
    }

    pub fn hamiltonian(&self, k: &[f64]) -> CMatrix {
        let d = self.d(k);
        let n = self.gammas[0].nrows();
        let mut h = CMatrix::zeros(n, n);
        for (da, g) in d.iter().zip(&self.gammas) {
            h += g * c(*da, 0.0);
        }
        h
    }

    /// The same model as a [`BlochModel`] at half filling.
    pub fn to_bloch(&self) -> BlochModel {
        let n = self.gammas[0].nrows();
        let inner = self.clone();
        BlochModel {
            name: self.name.clone(),
            dim: self.dim,
            n_orb: n,
            n_occ: n / 2,
            params: self.params.clone(),
            evaluator: Arc::new(move |k: &[f64]| inner.hamiltonian(k)),
        }
    }
}

pub type FamilyMap = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

/// One-parameter family `d(k, m)` of d-vector models.
#[derive(Clone)]
pub struct DVectorFamily {
    pub name: String,
    pub dim: usize,
    pub gammas: Vec<CMatrix>,
    d_map: FamilyMap,
}

impl fmt::Debug for DVectorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DVectorFamily")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish()
    }
}

impl DVectorFamily {
    pub fn new<F>(name: &str, dim: usize, gammas: Vec<CMatrix>, d_map: F) -> Self
    where
        F: Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
    {
        DVectorFamily {
            name: name.to_string(),
            dim,
            gammas,
            d_map: Arc::new(d_map),
        }
    }

    /// Registered family by model name.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "qahe2d" => Ok(DVectorFamily::new("qahe2d", 2, gamma_matrices(3)?, qahe_d)),
            "dirac3d_chiral" => {
                let g = gamma_matrices(5)?;
                Ok(DVectorFamily::new("dirac3d_chiral", 3, g[..4].to_vec(), dirac3d_d))
            }
            "dirac4d" => Ok(DVectorFamily::new("dirac4d", 4, gamma_matrices(5)?, dirac4d_d)),
            "ssh1d" | "doubled_qahe_trs" | "ti3d" => Err(Error::InconsistentInput(format!(
                "model `{name}` is not a one-parameter d-vector family"
            ))),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }

    pub fn d(&self, k: &[f64], m: f64) -> Vec<f64> {
        (self.d_map)(k, m)
    }

    pub fn at(&self, m: f64) -> DVectorModel {
        let map = self.d_map.clone();
        let mut params = BTreeMap::new();
        params.insert("m".to_string(), m);
        DVectorModel {
            name: self.name.clone(),
            dim: self.dim,
            params,
            gammas: self.gammas.clone(),
            d_map: Arc::new(move |k: &[f64]| map(k, m)),
        }
    }
}

fn qahe_d(k: &[f64], m: f64) -> Vec<f64> {
    vec![k[0].sin(), k[1].sin(), m + k[0].cos() + k[1].cos()]
}

// Wilson mass shifted so that m ∈ (0, 2) is the first inverted window.
fn dirac3d_d(k: &[f64], m: f64) -> Vec<f64> {
    vec![
        k[0].sin(),
        k[1].sin(),
        k[2].sin(),
        m - 3.0 + k[0].cos() + k[1].cos() + k[2].cos(),
    ]
}

fn dirac4d_d(k: &[f64], m: f64) -> Vec<f64> {
    let mut d: Vec<f64> = k.iter().take(4).map(|x| x.sin()).collect();
    d.push(m + k.iter().take(4).map(|x| x.cos()).sum::<f64>());
    d
}

fn ssh_d(k: &[f64], t1: f64, t2: f64) -> Vec<f64> {
    vec![t1 + t2 * k[0].cos(), t2 * k[0].sin(), 0.0]
}

/// Model name plus parameters, parsed from `model=qahe2d m=1.0 n_occ=1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub n_occ: Option<usize>,
}

impl ModelSpec {
    pub fn new(name: &str) -> Self {
        ModelSpec {
            name: name.to_string(),
            params: BTreeMap::new(),
            n_occ: None,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::MissingParameter {
                model: self.name.clone(),
                param: key.to_string(),
            })
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::UnknownParameter(format!("{key} (model {})", self.name)));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model={}", self.name)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        if let Some(n) = self.n_occ {
            write!(f, " n_occ={n}")?;
        }
        Ok(())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut name = None;
        let mut params = BTreeMap::new();
        let mut n_occ = None;
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{token}`")))?;
            match key {
                "model" => name = Some(value.to_string()),
                "n_occ" => {
                    n_occ = Some(value.parse::<usize>().map_err(|e| {
                        Error::Parse(format!("n_occ=`{value}`: {e}"))
                    })?)
                }
                _ => {
                    let v = value
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("{key}=`{value}`: {e}")))?;
                    params.insert(key.to_string(), v);
                }
            }
        }
        let name = name.ok_or_else(|| Error::Parse("missing `model=` entry".into()))?;
        Ok(ModelSpec {
            name,
            params,
            n_occ,
        })
    }
}

pub const REGISTERED_MODELS: &[&str] = &[
    "qahe2d",
    "ssh1d",
    "doubled_qahe_trs",
    "dirac3d_chiral",
    "dirac4d",
    "ti3d",
];

/// Builds a registered model from its spec.
pub fn build_model(spec: &ModelSpec) -> Result<BlochModel> {
    let model = match spec.name.as_str() {
        "qahe2d" | "dirac3d_chiral" | "dirac4d" | "ssh1d" => d_vector_model(spec)?.to_bloch(),
        "doubled_qahe_trs" => {
            spec.check_keys(&["m", "eps"])?;
            let m = spec.get("m")?;
            let eps = spec.params.get("eps").copied().unwrap_or(0.0);
            doubled_qahe_trs(m, eps)
        }
        "ti3d" => {
            spec.check_keys(&["m"])?;
            ti3d(spec.get("m")?)
        }
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    let mut model = model.with_params(spec.params.clone());
    if let Some(n) = spec.n_occ {
        model = model.with_n_occ(n)?;
    }
    Ok(model)
}

/// The d-vector form of a registered Dirac-type model.
pub fn d_vector_model(spec: &ModelSpec) -> Result<DVectorModel> {
    let model = match spec.name.as_str() {
        "ssh1d" => {
            spec.check_keys(&["t1", "t2"])?;
            let t1 = spec.get("t1")?;
            let t2 = spec.get("t2")?;
            DVectorModel::new("ssh1d", 1, gamma_matrices(3)?, move |k| ssh_d(k, t1, t2))
        }
        "qahe2d" | "dirac3d_chiral" | "dirac4d" => {
            spec.check_keys(&["m"])?;
            DVectorFamily::named(&spec.name)?.at(spec.get("m")?)
        }
        "doubled_qahe_trs" | "ti3d" => {
            return Err(Error::InconsistentInput(format!(
                "model `{}` has no d-vector form",
                spec.name
            )))
        }
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    Ok(model.with_params(spec.params.clone()))
}

fn qahe_block(k: &[f64], m: f64) -> CMatrix {
    let d = qahe_d(k, m);
    CMatrix::from_row_slice(
        2,
        2,
        &[c(d[2], 0.0), c(d[0], -d[1]), c(d[0], d[1]), c(-d[2], 0.0)],
    )
}

/// Two time-reversed copies of the QAHE model, spin block outermost:
/// `H = [[h(k), Δ], [Δ†, h*(−k)]]` with `Δ = ε iσ_y`, which keeps
/// `U_T = iσ_y ⊗ 1` a symmetry.
pub fn doubled_qahe_trs(m: f64, eps: f64) -> BlochModel {
    let f = move |k: &[f64]| {
        let up = qahe_block(k, m);
        let minus: Vec<f64> = k.iter().map(|x| -x).collect();
        let down = qahe_block(&minus, m).map(|z| z.conj());
        let delta = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(eps, 0.0), c(-eps, 0.0), c(0.0, 0.0)]);
        let mut h = CMatrix::zeros(4, 4);
        h.view_mut((0, 0), (2, 2)).copy_from(&up);
        h.view_mut((2, 2), (2, 2)).copy_from(&down);
        h.view_mut((0, 2), (2, 2)).copy_from(&delta);
        h.view_mut((2, 0), (2, 2)).copy_from(&delta.adjoint());
        h
    };
    BlochModel::from_fn("doubled_qahe_trs", 2, 4, 2, f).expect("static shape")
}

/// Time-reversal invariant 3D Dirac model with spin outermost:
/// `H = Σ sin k_i σ_i⊗τ_x + (m + Σ cos k_i) 1⊗τ_z`. Strong phase for 1 < |m| < 3.
pub fn ti3d(m: f64) -> BlochModel {
    let paulis = [linalg::pauli_x(), linalg::pauli_y(), linalg::pauli_z()];
    let id = linalg::identity(2);
    let spin_orbit: Vec<CMatrix> = paulis.iter().map(|s| kron(s, &paulis[0])).collect();
    let mass = kron(&id, &paulis[2]);
    let f = move |k: &[f64]| {
        let mut h = &mass * c(m + k[0].cos() + k[1].cos() + k[2].cos(), 0.0);
        for (g, ki) in spin_orbit.iter().zip(k) {
            h += g * c(ki.sin(), 0.0);
        }
        h
    };
    BlochModel::from_fn("ti3d", 3, 4, 2, f).expect("static shape")
}
