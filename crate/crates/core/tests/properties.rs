mod common;

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use topoband::edge::ribbon_hamiltonian;
use topoband::invariants::{
    chern_from_frames, chern_number_2d, critical_points, gauss_degree, occupied_frames, winding_number_1d,
};
use topoband::io::to_json;
use topoband::ktable::{table_entry, AbelianGroupExpr};
use topoband::linalg::{c, hermiticity_violation, identity, kron, max_abs, pauli_x, pauli_z, pfaffian, CMatrix};
use topoband::models::{doubled_qahe_trs, gamma_matrices, REGISTERED_MODELS};
use topoband::symmetry::{
    antiunitary_square, check_symmetry, label_from_flags, preset_unitary, CartanLabel, SymmetryCandidate,
    SymmetryKind,
};
use topoband::{build_model, BlochModel, DVectorFamily, InvariantResult, ModelSpec};

fn registered(name: &str) -> BlochModel {
    let spec = match name {
        "ssh1d" => ModelSpec::new(name).param("t1", 0.4).param("t2", 1.0),
        "doubled_qahe_trs" => ModelSpec::new(name).param("m", 1.0).param("eps", 0.2),
        _ => ModelSpec::new(name).param("m", 1.0),
    };
    build_model(&spec).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    use rand::Rng;
    let a = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let qr = a.qr();
    qr.q()
}

fn k_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0f64..10.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluators_hermitian_and_periodic(idx in 0usize..REGISTERED_MODELS.len(), k in k_strategy(4), axis in 0usize..4) {
        let model = registered(REGISTERED_MODELS[idx]);
        let k = &k[..model.dim];
        let h = model.hamiltonian(k);
        prop_assert!(hermiticity_violation(&h) < 1e-12);
        let axis = axis % model.dim;
        let mut shifted = k.to_vec();
        shifted[axis] += 2.0 * PI;
        prop_assert!(max_abs(&(model.hamiltonian(&shifted) - &h)) < 1e-12);
        if model.eigensystem(k).unwrap().gap_above(model.n_occ) > 1e-6 {
            prop_assert!(model.occupied_projector(k).unwrap().identity_violation() < 1e-12);
        }
    }

    #[test]
    fn time_reversal_squares_to_sign(re in proptest::collection::vec(-1.0f64..1.0, 4), im in proptest::collection::vec(-1.0f64..1.0, 4)) {
        let u = preset_unitary("kramers", 4).unwrap();
        let s = antiunitary_square(&u).unwrap();
        let psi = DVector::from_iterator(4, re.iter().zip(&im).map(|(a, b)| c(*a, *b)));
        let once = &u * psi.map(|z| z.conj());
        let twice = &u * once.map(|z| z.conj());
        prop_assert!((twice - psi * c(s as f64, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pfaffian_squares_to_determinant(entries in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 15), half in 1usize..4) {
        let n = 2 * half;
        let mut a = CMatrix::zeros(n, n);
        let mut it = entries.iter();
        for i in 0..n {
            for j in i + 1..n {
                let &(re, im) = it.next().unwrap();
                a[(i, j)] = c(re, im);
                a[(j, i)] = -c(re, im);
            }
        }
        let pf = pfaffian(&a);
        prop_assert!((pf * pf - a.determinant()).norm() < 1e-12);
    }

    #[test]
    fn group_expressions_round_trip(z in 0usize..5, z2 in 0usize..5) {
        let g = AbelianGroupExpr { z, z2 };
        prop_assert_eq!(AbelianGroupExpr::parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn invariant_json_round_trips(raw in -1e6f64..1e6, residual in 0.0f64..1.0, grid in 1usize..1000) {
        let r = InvariantResult { name: "chern1".into(), raw, value: raw.round() as i64, residual, grid };
        let back: InvariantResult = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn chern_gauge_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = registered("qahe2d");
        let block = move |k: &[f64]| {
            let h = a.hamiltonian(k);
            kron(&identity(2), &h)
        };
        let model = BlochModel::from_fn("qahe_pair", 2, 4, 2, block).unwrap();
        let grid = 16;
        let frames = occupied_frames(&model, grid).unwrap();
        let base = chern_from_frames(&frames, grid).unwrap();
        let rotated: Vec<CMatrix> = frames.iter().map(|f| f * random_unitary(&mut rng, 2)).collect();
        let turned = chern_from_frames(&rotated, grid).unwrap();
        prop_assert_eq!(base.value, 2);
        prop_assert_eq!(turned.value, base.value);
        prop_assert!((turned.raw - base.raw).abs() < 1e-12);
    }

    #[test]
    fn time_reversal_forces_zero_chern(m in -3.5f64..3.5, eps in 0.0f64..0.4) {
        prop_assume!([-2.0f64, 0.0, 2.0].iter().all(|c| (m - c).abs() > 0.2));
        let model = doubled_qahe_trs(m, eps);
        let tr = SymmetryCandidate::new(SymmetryKind::TimeReversal, preset_unitary("kramers", 4).unwrap()).unwrap();
        prop_assert!(check_symmetry(&model, &tr, 8).unwrap().holds);
        prop_assert_eq!(chern_number_2d(&model, 16).unwrap().value, 0);
    }

    #[test]
    fn two_band_gauss_equals_chern(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = loop {
            if let Some(m) = common::random_two_band(&mut rng, 0.3) {
                break m;
            }
        };
        let ch = chern_number_2d(&model.to_bloch(), 32).unwrap();
        let g = gauss_degree(&model, 48).unwrap();
        prop_assert_eq!(ch.value, g.value);
        prop_assert!(ch.residual < 1e-9);
    }

    #[test]
    fn ribbon_hermitian(width in 1usize..12, k in -PI..PI, m in -3.0f64..3.0) {
        let model = build_model(&ModelSpec::new("qahe2d").param("m", m)).unwrap();
        let h = ribbon_hamiltonian(&model, width, k).unwrap();
        prop_assert!(hermiticity_violation(&h) < 1e-12);
    }

    #[test]
    fn particle_hole_ribbon_spectrum(width in 2usize..16, k in -PI..PI, m in -3.0f64..3.0) {
        let model = build_model(&ModelSpec::new("qahe2d").param("m", m)).unwrap();
        let ph = SymmetryCandidate::new(SymmetryKind::ParticleHole, preset_unitary("pauli_x", 2).unwrap()).unwrap();
        prop_assert!(check_symmetry(&model, &ph, 8).unwrap().holds);
        let spectrum = |k: f64| topoband::linalg::eigensystem(&ribbon_hamiltonian(&model, width, k).unwrap()).unwrap().values;
        let plus = spectrum(k);
        let minus = spectrum(-k);
        let n = plus.len();
        for i in 0..n {
            prop_assert!((plus[i] + minus[n - 1 - i]).abs() < 1e-10);
            prop_assert!((plus[i] + plus[n - 1 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn diii_chain_winding_is_even(t1 in 0.0f64..2.0, t2 in 0.3f64..2.0) {
        prop_assume!((t1 - t2).abs() > 0.1);
        let ssh = build_model(&ModelSpec::new("ssh1d").param("t1", t1).param("t2", t2)).unwrap();
        let single = SymmetryCandidate::new(SymmetryKind::Chiral, pauli_z()).unwrap();
        let block = winding_number_1d(&ssh, &single, 100).unwrap().value;
        let pair = BlochModel::from_fn("ssh_pair", 1, 4, 2, move |k: &[f64]| {
            let up = ssh.hamiltonian(k);
            let down = ssh.hamiltonian(&[-k[0]]).map(|z| z.conj());
            let mut h = CMatrix::zeros(4, 4);
            h.view_mut((0, 0), (2, 2)).copy_from(&up);
            h.view_mut((2, 2), (2, 2)).copy_from(&down);
            h
        }).unwrap();
        let chiral = SymmetryCandidate::new(SymmetryKind::Chiral, kron(&identity(2), &pauli_z())).unwrap();
        let total = winding_number_1d(&pair, &chiral, 100).unwrap().value;
        prop_assert_eq!(total, 2 * block);
        prop_assert_eq!(block.abs(), (t2 > t1) as i64);
    }
}

#[test]
fn bott_periodicity_all_labels() {
    for label in CartanLabel::ALL {
        let period = if label.is_complex() { 2 } else { 8 };
        for d in 0..=16 {
            assert_eq!(table_entry(label, d), table_entry(label, d + period), "{label:?} d={d}");
        }
    }
}

#[test]
fn real_columns_shift_by_one_clock_step() {
    let real: Vec<CartanLabel> = CartanLabel::ALL.into_iter().filter(|l| !l.is_complex()).collect();
    for d in 0..8 {
        for &label in &real {
            let q = label.real_index().unwrap() as i64;
            let next = CartanLabel::from_real_index(q + 1);
            assert_eq!(table_entry(label, d), table_entry(next, d + 1));
        }
    }
}

#[test]
fn label_function_total_on_consistent_flags() {
    let mut accepted = 0;
    for t in [None, Some(1), Some(-1)] {
        for c in [None, Some(1), Some(-1)] {
            for chiral in [false, true] {
                let consistent = match (t, c) {
                    (Some(_), Some(_)) => chiral,
                    (None, None) => true,
                    _ => !chiral,
                };
                let result = label_from_flags(t, c, chiral);
                assert_eq!(result.is_ok(), consistent, "{t:?} {c:?} {chiral}");
                accepted += result.is_ok() as usize;
            }
        }
    }
    assert_eq!(accepted, 10);
}

#[test]
fn symmetry_detection_grid_stable() {
    let model = registered("doubled_qahe_trs");
    let tr = SymmetryCandidate::new(SymmetryKind::TimeReversal, preset_unitary("kramers", 4).unwrap()).unwrap();
    let a = check_symmetry(&model, &tr, 8).unwrap();
    let b = check_symmetry(&model, &tr, 16).unwrap();
    assert!(a.holds && b.holds);
    assert!(b.max_violation <= 2.0 * a.max_violation.max(1e-15));
    let bad = SymmetryCandidate::new(SymmetryKind::TimeReversal, kron(&pauli_x(), &identity(2))).unwrap();
    let a = check_symmetry(&model, &bad, 8).unwrap();
    assert!(!a.holds);
}

#[test]
fn sum_rule_at_every_critical_value() {
    for (name, grid) in [("qahe2d", 24), ("dirac3d_chiral", 16)] {
        let family = DVectorFamily::named(name).unwrap();
        let points = critical_points(&family, (-6.0, 6.0), 16);
        let mut values: Vec<f64> = points.iter().map(|p| p.m()).collect();
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        assert!(!values.is_empty());
        for mc in values {
            let sum: i32 = points.iter().filter(|p| (p.m() - mc).abs() < 1e-6).map(|p| p.degree).sum();
            let below = gauss_degree(&family.at(mc - 0.3), grid).unwrap().value;
            let above = gauss_degree(&family.at(mc + 0.3), grid).unwrap().value;
            assert_eq!(sum as i64, above - below, "{name} at m={mc}");
        }
    }
}

#[test]
fn gamma_matrices_anticommute() {
    for count in [3, 5] {
        let g = gamma_matrices(count).unwrap();
        let n = g[0].nrows();
        for a in 0..count {
            for b in 0..count {
                let ac = &g[a] * &g[b] + &g[b] * &g[a];
                let expect = identity(n) * Complex64::new(if a == b { 2.0 } else { 0.0 }, 0.0);
                assert!(max_abs(&(ac - expect)) < 1e-15);
            }
        }
    }
}
