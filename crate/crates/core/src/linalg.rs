//! Small dense complex linear algebra used throughout the crate.
//!
//! Everything here works on [`CMatrix`] (a heap-allocated `nalgebra` matrix of
//! `Complex64`). Matrix sizes are desk scale: at most a few hundred rows for
//! ribbon Hamiltonians and 2..8 for Bloch Hamiltonians.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `H - H†`.
pub fn hermiticity_violation(h: &CMatrix) -> f64 {
    max_abs(&(h - h.adjoint()))
}

/// Largest entry of `U U† - 1`.
pub fn unitarity_violation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(u * u.adjoint() - identity(u.nrows())))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Real eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl EigenSystem {
    /// Columns `0..n` of the eigenvector matrix.
    pub fn lowest(&self, n: usize) -> CMatrix {
        self.vectors.columns(0, n).into_owned()
    }

    /// Gap between band `n-1` and band `n` (0-based), i.e. across the
    /// division after the `n` lowest states.
    pub fn gap_above(&self, n: usize) -> f64 {
        self.values[n] - self.values[n - 1]
    }
}

/// Diagonalizes a Hermitian matrix. Degenerate subspaces come back in
/// whatever orthonormal basis the solver produces.
pub fn eigensystem(h: &CMatrix) -> Result<EigenSystem> {
    let scale = max_abs(h).max(1.0);
    let dev = hermiticity_violation(h);
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenSystem { values, vectors })
}

/// Orthogonal projector onto a subspace spanned by orthonormal columns.
#[derive(Debug, Clone)]
pub struct Projector {
    pub matrix: CMatrix,
    pub rank: usize,
}

impl Projector {
    pub fn from_frame(frame: &CMatrix) -> Self {
        Projector {
            matrix: frame * frame.adjoint(),
            rank: frame.ncols(),
        }
    }

    /// Worst violation among `P² = P`, `P† = P` and `tr P = rank`.
    pub fn identity_violation(&self) -> f64 {
        let p = &self.matrix;
        let idem = max_abs(&(p * p - p));
        let herm = hermiticity_violation(p);
        let tr = (p.trace() - c(self.rank as f64, 0.0)).norm();
        idem.max(herm).max(tr)
    }
}

/// Unitary factor of the polar decomposition `M = U |M|`.
pub fn unitary_part(m: &CMatrix) -> CMatrix {
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    u * v_t
}

/// Smallest and largest singular values.
pub fn singular_range(m: &CMatrix) -> (f64, f64) {
    let s = m.singular_values();
    let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = s.iter().cloned().fold(0.0, f64::max);
    (lo, hi)
}

/// Principal logarithm of a unitary matrix, `log U = i K` with `K`
/// Hermitian and spectrum in `(-π, π]`.
///
/// A unitary matrix is normal, so its Schur form is diagonal up to rounding.
pub fn unitary_log(u: &CMatrix) -> CMatrix {
    let n = u.nrows();
    if n == 1 {
        let z = u[(0, 0)];
        return CMatrix::from_element(1, 1, c(0.0, z.arg()));
    }
    let schur = nalgebra::Schur::new(u.clone());
    let (q, t) = schur.unpack();
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = c(0.0, t[(i, i)].arg());
    }
    &q * d * q.adjoint()
}

/// Pfaffian of an even-dimensional antisymmetric matrix by recursive
/// expansion along the first row. Intended for `n ≤ 8`.
///
/// The input is antisymmetrized first; an odd size yields zero.
pub fn pfaffian(a: &CMatrix) -> Complex64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return ZERO;
    }
    let anti = (a - a.transpose()) * c(0.5, 0.0);
    let idx: Vec<usize> = (0..n).collect();
    pfaffian_rec(&anti, &idx)
}

fn pfaffian_rec(a: &CMatrix, idx: &[usize]) -> Complex64 {
    match idx.len() {
        0 => ONE,
        2 => a[(idx[0], idx[1])],
        _ => {
            let first = idx[0];
            let mut total = ZERO;
            for j in 1..idx.len() {
                let entry = a[(first, idx[j])];
                if entry == ZERO {
                    continue;
                }
                let rest: Vec<usize> = idx[1..]
                    .iter()
                    .enumerate()
                    .filter(|&(pos, _)| pos + 1 != j)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                total += entry * sign * pfaffian_rec(a, &rest);
            }
            total
        }
    }
}

/// `U ψ*`: the action of the antiunitary operator `U K` on a state.
pub fn antiunitary_apply(u: &CMatrix, psi: &CMatrix) -> CMatrix {
    u * psi.map(|z| z.conj())
}
