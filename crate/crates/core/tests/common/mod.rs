#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use topoband::linalg::{c, eigensystem, CMatrix};
use topoband::BlochModel;

fn occupied(model: &BlochModel, k: &[f64]) -> CMatrix {
    let es = eigensystem(&model.hamiltonian(k)).unwrap();
    es.lowest(model.n_occ)
}

fn polar(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

fn loop_point(base: &[f64], axis: usize, j: usize, n: usize) -> Vec<f64> {
    let mut k = base.to_vec();
    k[axis] = 2.0 * PI * j as f64 / n as f64;
    k
}

/// `arg det` of the Wilson loop along `axis` through `base`.
fn holonomy_phase(model: &BlochModel, base: &[f64], axis: usize, n: usize) -> f64 {
    let frames: Vec<CMatrix> = (0..n).map(|j| occupied(model, &loop_point(base, axis, j, n))).collect();
    let mut w = c(1.0, 0.0);
    for j in 0..n {
        w *= (frames[j].adjoint() * &frames[(j + 1) % n]).determinant();
    }
    w.arg()
}

/// Occupied frames on the closed loop `k(axis) = 2πj/n`, parallel
/// transported and then twisted so that frame `n` coincides with frame `0`.
/// The twist phases are shifted by multiples of 2π until they sum to
/// `total`.
fn smooth_loop(model: &BlochModel, base: &[f64], axis: usize, n: usize, total: f64) -> Vec<CMatrix> {
    let first = occupied(model, &loop_point(base, axis, 0, n));
    let mut frames = vec![first.clone()];
    for j in 1..=n {
        let v = if j == n { first.clone() } else { occupied(model, &loop_point(base, axis, j, n)) };
        let prev = frames.last().unwrap();
        let u = polar(&(v.adjoint() * prev));
        frames.push(v * u);
    }
    let hol = first.adjoint() * &frames[n];
    let (q, t) = hol.schur().unpack();
    let mut phases: Vec<f64> = (0..t.nrows()).map(|i| t[(i, i)].arg()).collect();
    let sum: f64 = phases.iter().sum();
    phases[0] += 2.0 * PI * ((total - sum) / (2.0 * PI)).round();
    for (j, f) in frames.iter_mut().enumerate() {
        let s = j as f64 / n as f64;
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            phases.len(),
            phases.iter().map(|p| Complex64::from_polar(1.0, -p * s)),
        ));
        *f = &*f * &q * diag * q.adjoint();
    }
    frames.truncate(n);
    frames
}

fn pf(a: &CMatrix) -> Complex64 {
    match a.nrows() {
        2 => a[(0, 1)],
        4 => a[(0, 1)] * a[(2, 3)] - a[(0, 2)] * a[(1, 3)] + a[(0, 3)] * a[(1, 2)],
        n => panic!("oracle handles 2 or 4 occupied bands, got {n}"),
    }
}

/// Fu-Kane factor of one loop through two TRIMs, `Π Pf w(Γ) / √det w(Γ)`,
/// with the square root continued along the loop from `k = 0` to `k = π`.
fn loop_sign(model: &BlochModel, tr: &CMatrix, base: &[f64], axis: usize, n: usize, total: f64) -> i32 {
    assert!(n % 2 == 0);
    let frames = smooth_loop(model, base, axis, n, total);
    let theta = |v: &CMatrix| tr * v.map(|z| z.conj());
    let mut root: Option<Complex64> = None;
    let mut product = c(1.0, 0.0);
    for j in 0..=n / 2 {
        let w = frames[(n - j) % n].adjoint() * theta(&frames[j]);
        let r = w.determinant().sqrt();
        let r = match root {
            Some(prev) if (r - prev).norm() > (-r - prev).norm() => -r,
            _ => r,
        };
        root = Some(r);
        if j == 0 || j == n / 2 {
            product *= pf(&w) / r;
        }
    }
    assert!(product.im.abs() < 1e-6 && (product.re.abs() - 1.0).abs() < 1e-6, "{product}");
    if product.re > 0.0 {
        1
    } else {
        -1
    }
}

/// Product of the Pfaffian factors at the four TRIMs of the plane spanned by
/// `axis` and `other` through `base` (where both coordinates are zero). The
/// two loops get gauges that are continuous across the plane by unwrapping
/// the Wilson-loop phase between them.
pub fn plane_sign(model: &BlochModel, tr: &CMatrix, base: &[f64], axis: usize, other: usize, n: usize) -> i32 {
    let steps = 24;
    let mut b = base.to_vec();
    let start = holonomy_phase(model, &b, axis, n);
    let mut phase = start;
    for s in 1..=steps {
        b[other] = base[other] + PI * s as f64 / steps as f64;
        let next = holonomy_phase(model, &b, axis, n);
        let mut d = next - phase.rem_euclid(2.0 * PI);
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        phase += d;
    }
    loop_sign(model, tr, base, axis, n, start) * loop_sign(model, tr, &b, axis, n, phase)
}

/// Z2 bit of a 2D model from the Pfaffians at its four TRIMs.
pub fn pfaffian_z2_2d(model: &BlochModel, tr: &CMatrix, n: usize) -> bool {
    plane_sign(model, tr, &[0.0, 0.0], 1, 0, n) < 0
}

/// Strong and weak bits of a 3D model from the Pfaffians at its eight TRIMs.
pub fn pfaffian_z2_3d(model: &BlochModel, tr: &CMatrix, n: usize) -> (bool, [bool; 3]) {
    let strong = plane_sign(model, tr, &[0.0, 0.0, 0.0], 2, 0, n) * plane_sign(model, tr, &[0.0, PI, 0.0], 2, 0, n) < 0;
    let weak = [
        plane_sign(model, tr, &[PI, 0.0, 0.0], 2, 1, n) < 0,
        plane_sign(model, tr, &[0.0, PI, 0.0], 2, 0, n) < 0,
        plane_sign(model, tr, &[0.0, 0.0, PI], 1, 0, n) < 0,
    ];
    (strong, weak)
}

/// Random smooth two-band d-vector on T²: a QAHE-type vector with mass in
/// `(−3, 3)` plus Fourier modes up to second harmonic. `None` when the
/// minimum of `|d|` over a 64×64 mesh falls below `min_gap`.
pub fn random_two_band(rng: &mut impl rand::Rng, min_gap: f64) -> Option<topoband::DVectorModel> {
    let m: f64 = rng.gen_range(-3.0..3.0);
    let amp: f64 = rng.gen_range(0.0..0.6);
    let mut modes = Vec::new();
    for a in 0..3 {
        for n1 in -2i32..=2 {
            for n2 in 0i32..=2 {
                if n2 == 0 && n1 < 0 {
                    continue;
                }
                let cc: f64 = rng.gen_range(-1.0..1.0) * amp / 6.0;
                let ss: f64 = rng.gen_range(-1.0..1.0) * amp / 6.0;
                modes.push((a, n1 as f64, n2 as f64, cc, ss));
            }
        }
    }
    let d = move |k: &[f64]| {
        let mut d = vec![k[0].sin(), k[1].sin(), m + k[0].cos() + k[1].cos()];
        for &(a, n1, n2, cc, ss) in &modes {
            let phase = n1 * k[0] + n2 * k[1];
            d[a] += cc * phase.cos() + ss * phase.sin();
        }
        d
    };
    let model = topoband::DVectorModel::new("random", 2, topoband::models::gamma_matrices(3).unwrap(), d);
    let n = 64;
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let k = [2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64];
            let v = model.d(&k);
            gap = gap.min(v.iter().map(|x| x * x).sum::<f64>().sqrt());
        }
    }
    (gap > min_gap).then_some(model)
}

/// Reference periodic table, rows A, AIII, AI, BDI, D, DIII, AII, CII, C, CI
/// over d = 0..7.
pub const PERIODIC_TABLE: [(&str, [&str; 8]); 10] = [
    ("A", ["Z", "0", "Z", "0", "Z", "0", "Z", "0"]),
    ("AIII", ["0", "Z", "0", "Z", "0", "Z", "0", "Z"]),
    ("AI", ["Z", "0", "0", "0", "Z", "0", "Z2", "Z2"]),
    ("BDI", ["Z2", "Z", "0", "0", "0", "Z", "0", "Z2"]),
    ("D", ["Z2", "Z2", "Z", "0", "0", "0", "Z", "0"]),
    ("DIII", ["0", "Z2", "Z2", "Z", "0", "0", "0", "Z"]),
    ("AII", ["Z", "0", "Z2", "Z2", "Z", "0", "0", "0"]),
    ("CII", ["0", "Z", "0", "Z2", "Z2", "Z", "0", "0"]),
    ("C", ["0", "0", "Z", "0", "Z2", "Z2", "Z", "0"]),
    ("CI", ["0", "0", "0", "Z", "0", "Z2", "Z2", "Z"]),
];
