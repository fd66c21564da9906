mod common;

use topoband::invariants::{gauss_degree, second_chern_4d, winding_number_3d, z2_index_2d, z2_strong_3d};
use topoband::models::{doubled_qahe_trs, ti3d};
use topoband::symmetry::{preset_unitary, SymmetryCandidate, SymmetryKind};
use topoband::{build_model, DVectorFamily, ModelSpec};

fn kramers(n: usize) -> SymmetryCandidate {
    SymmetryCandidate::new(SymmetryKind::TimeReversal, preset_unitary("kramers", n).unwrap()).unwrap()
}

#[test]
fn z2_2d_matches_trim_pfaffians() {
    let tr = kramers(4);
    for (m, eps) in [(0.5, 0.1), (1.0, 0.1), (1.5, 0.3), (-1.0, 0.2), (2.5, 0.1), (3.0, 0.1)] {
        let model = doubled_qahe_trs(m, eps);
        let bit = z2_index_2d(&model, &tr, 16).unwrap().value == 1;
        assert_eq!(bit, common::pfaffian_z2_2d(&model, &tr.unitary, 64), "m={m} eps={eps}");
    }
}

#[test]
fn z2_3d_matches_trim_pfaffians() {
    let tr = kramers(4);
    for m in [-2.0, -0.5, 0.5, 2.0, 4.0] {
        let model = ti3d(m);
        let z = z2_strong_3d(&model, &tr, 12).unwrap();
        let (strong, weak) = common::pfaffian_z2_3d(&model, &tr.unitary, 48);
        assert_eq!((z.strong, z.weak), (strong, weak), "m={m}");
    }
}

#[test]
fn winding_3d_stable_under_refinement() {
    let chiral = SymmetryCandidate::new(SymmetryKind::Chiral, preset_unitary("pauli_z", 4).unwrap()).unwrap();
    for m in [1.0, 3.0, 5.0] {
        let model = build_model(&ModelSpec::new("dirac3d_chiral").param("m", m)).unwrap();
        let a = winding_number_3d(&model, &chiral, 20).unwrap();
        let b = winding_number_3d(&model, &chiral, 40).unwrap();
        assert_eq!(a.value, b.value, "m={m}");
        assert!(b.residual <= a.residual + 1e-3);
        let g = gauss_degree(&DVectorFamily::named("dirac3d_chiral").unwrap().at(m), 24).unwrap();
        assert_eq!(a.value, g.value, "m={m}");
    }
}

#[test]
fn second_chern_matches_gauss_degree() {
    let family = DVectorFamily::named("dirac4d").unwrap();
    for m in [-3.0, -1.0, 1.0, 3.0, 5.0] {
        let model = family.at(m);
        let ch2 = second_chern_4d(&model.to_bloch(), 12).unwrap();
        let g = gauss_degree(&model, 12).unwrap();
        assert_eq!(ch2.value, g.value, "m={m}");
        assert!(ch2.residual < 0.05, "m={m} residual {}", ch2.residual);
    }
}
