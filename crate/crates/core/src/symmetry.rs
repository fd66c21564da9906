//! Verification of time-reversal, particle-hole and chiral symmetries and
//! Altland–Zirnbauer classification.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, frobenius, kron, CMatrix};
use crate::models::{grid_point, BlochModel};

pub const SYMMETRY_TOL: f64 = 1e-8;
pub const DEFAULT_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryKind {
    #[serde(rename = "TR")]
    TimeReversal,
    #[serde(rename = "PH")]
    ParticleHole,
    #[serde(rename = "CHIRAL")]
    Chiral,
}

impl SymmetryKind {
    pub fn antiunitary(self) -> bool {
        !matches!(self, SymmetryKind::Chiral)
    }
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryKind::TimeReversal => "TR",
            SymmetryKind::ParticleHole => "PH",
            SymmetryKind::Chiral => "CHIRAL",
        })
    }
}

impl FromStr for SymmetryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TR" | "T" => Ok(SymmetryKind::TimeReversal),
            "PH" | "C" => Ok(SymmetryKind::ParticleHole),
            "CHIRAL" | "S" => Ok(SymmetryKind::Chiral),
            _ => Err(Error::Parse(format!("unknown symmetry kind `{s}`"))),
        }
    }
}

/// A symmetry operator `U` (times complex conjugation for TR/PH).
#[derive(Debug, Clone)]
pub struct SymmetryCandidate {
    pub kind: SymmetryKind,
    pub unitary: CMatrix,
}

impl SymmetryCandidate {
    pub fn new(kind: SymmetryKind, unitary: CMatrix) -> Result<Self> {
        let dev = linalg::unitarity_violation(&unitary);
        if dev > 1e-10 {
            return Err(Error::NotUnitary(dev));
        }
        Ok(SymmetryCandidate { kind, unitary })
    }

    pub fn antiunitary(&self) -> bool {
        self.kind.antiunitary()
    }

    /// `Θψ = Uψ*` for antiunitary kinds, `Uψ` otherwise.
    pub fn apply(&self, psi: &CMatrix) -> CMatrix {
        if self.antiunitary() {
            linalg::antiunitary_apply(&self.unitary, psi)
        } else {
            &self.unitary * psi
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryCheck {
    pub holds: bool,
    /// Sign `s` in `U U* = s·1`; `None` for chiral candidates or when `U U*`
    /// is not proportional to the identity.
    pub square: Option<i8>,
    pub max_violation: f64,
}

fn violation(model: &BlochModel, cand: &SymmetryCandidate, k: &[f64]) -> f64 {
    let u = &cand.unitary;
    let h = model.hamiltonian(k);
    match cand.kind {
        SymmetryKind::Chiral => frobenius(&(u * &h * u.adjoint() + &h)),
        kind => {
            let minus: Vec<f64> = k.iter().map(|x| -x).collect();
            let hm = model.hamiltonian(&minus);
            let t = u * h.map(|z| z.conj()) * u.adjoint();
            if kind == SymmetryKind::TimeReversal {
                frobenius(&(t - hm))
            } else {
                frobenius(&(t + hm))
            }
        }
    }
}

/// `s` with `U U* = s·1`, if such a sign exists.
pub fn antiunitary_square(u: &CMatrix) -> Option<i8> {
    let n = u.nrows();
    let sq = u * u.map(|z| z.conj());
    for s in [1i8, -1] {
        let dev = linalg::max_abs(&(&sq - linalg::identity(n) * c(s as f64, 0.0)));
        if dev < SYMMETRY_TOL {
            return Some(s);
        }
    }
    None
}

/// Largest symmetry violation over the uniform grid.
pub fn check_symmetry(model: &BlochModel, cand: &SymmetryCandidate, grid: usize) -> Result<SymmetryCheck> {
    if cand.unitary.nrows() != model.n_orb {
        return Err(Error::DimensionMismatch {
            expected: model.n_orb,
            got: cand.unitary.nrows(),
        });
    }
    let n = grid.max(1);
    let total = n.pow(model.dim as u32);
    let max_violation = (0..total)
        .into_par_iter()
        .map(|idx| violation(model, cand, &grid_point(model.dim, n, idx)))
        .reduce(|| 0.0, f64::max);
    let square = if cand.antiunitary() {
        antiunitary_square(&cand.unitary)
    } else {
        None
    };
    Ok(SymmetryCheck {
        holds: max_violation < SYMMETRY_TOL,
        square,
        max_violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CartanLabel {
    A,
    AIII,
    AI,
    BDI,
    D,
    DIII,
    AII,
    CII,
    C,
    CI,
}

impl CartanLabel {
    /// Row order used by the periodic table.
    pub const ALL: [CartanLabel; 10] = [
        CartanLabel::A,
        CartanLabel::AIII,
        CartanLabel::AI,
        CartanLabel::BDI,
        CartanLabel::D,
        CartanLabel::DIII,
        CartanLabel::AII,
        CartanLabel::CII,
        CartanLabel::C,
        CartanLabel::CI,
    ];

    /// Real classes in Bott-clock order, `q = 0..7`.
    pub const REAL: [CartanLabel; 8] = [
        CartanLabel::AI,
        CartanLabel::BDI,
        CartanLabel::D,
        CartanLabel::DIII,
        CartanLabel::AII,
        CartanLabel::CII,
        CartanLabel::C,
        CartanLabel::CI,
    ];

    pub fn is_complex(self) -> bool {
        matches!(self, CartanLabel::A | CartanLabel::AIII)
    }

    pub fn real_index(self) -> Option<u8> {
        CartanLabel::REAL.iter().position(|&l| l == self).map(|q| q as u8)
    }

    pub fn complex_index(self) -> Option<u8> {
        match self {
            CartanLabel::A => Some(0),
            CartanLabel::AIII => Some(1),
            _ => None,
        }
    }

    pub fn from_real_index(q: i64) -> CartanLabel {
        CartanLabel::REAL[q.rem_euclid(8) as usize]
    }

    pub fn name(self) -> &'static str {
        match self {
            CartanLabel::A => "A",
            CartanLabel::AIII => "AIII",
            CartanLabel::AI => "AI",
            CartanLabel::BDI => "BDI",
            CartanLabel::D => "D",
            CartanLabel::DIII => "DIII",
            CartanLabel::AII => "AII",
            CartanLabel::CII => "CII",
            CartanLabel::C => "C",
            CartanLabel::CI => "CI",
        }
    }
}

impl fmt::Display for CartanLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CartanLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CartanLabel::ALL
            .iter()
            .copied()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AZClassification {
    pub cartan_label: CartanLabel,
    pub t_square: Option<i8>,
    pub c_square: Option<i8>,
    pub has_chiral: bool,
    pub real_index_q: Option<u8>,
    pub complex_index: Option<u8>,
}

/// Cartan label for a flag combination. Exactly ten combinations are
/// consistent: both antiunitaries imply chirality, and a single antiunitary
/// together with chirality would imply the missing one.
pub fn label_from_flags(t: Option<i8>, c: Option<i8>, chiral: bool) -> Result<CartanLabel> {
    use CartanLabel::*;
    let label = match (t, c, chiral) {
        (None, None, false) => A,
        (None, None, true) => AIII,
        (Some(1), None, false) => AI,
        (Some(1), Some(1), true) => BDI,
        (None, Some(1), false) => D,
        (Some(-1), Some(1), true) => DIII,
        (Some(-1), None, false) => AII,
        (Some(-1), Some(-1), true) => CII,
        (None, Some(-1), false) => C,
        (Some(1), Some(-1), true) => CI,
        _ => {
            return Err(Error::InconsistentInput(format!(
                "no symmetry class with T²={t:?}, C²={c:?}, chiral={chiral}"
            )))
        }
    };
    Ok(label)
}

impl AZClassification {
    pub fn from_label(label: CartanLabel, t_square: Option<i8>, c_square: Option<i8>, has_chiral: bool) -> Self {
        AZClassification {
            cartan_label: label,
            t_square,
            c_square,
            has_chiral,
            real_index_q: label.real_index(),
            complex_index: label.complex_index(),
        }
    }
}

/// A candidate together with the result of checking it.
#[derive(Debug, Clone)]
pub struct Detected {
    pub candidate: SymmetryCandidate,
    pub check: SymmetryCheck,
}

pub fn detect(model: &BlochModel, cand: SymmetryCandidate, grid: usize) -> Result<Detected> {
    let check = check_symmetry(model, &cand, grid)?;
    Ok(Detected { candidate: cand, check })
}

/// Assigns the Cartan label from verified symmetries. When both TR and PH
/// hold, `S = U_T U_C*` is checked on the model as a chiral symmetry.
/// Commutation of T and C is not required.
pub fn az_class(model: &BlochModel, found: &[Detected], grid: usize) -> Result<AZClassification> {
    let mut by_kind: [Option<&Detected>; 3] = [None, None, None];
    for det in found.iter().filter(|d| d.check.holds) {
        let slot = match det.candidate.kind {
            SymmetryKind::TimeReversal => 0,
            SymmetryKind::ParticleHole => 1,
            SymmetryKind::Chiral => 2,
        };
        if by_kind[slot].is_some() {
            return Err(Error::InconsistentInput(format!(
                "more than one passing {} candidate",
                det.candidate.kind
            )));
        }
        by_kind[slot] = Some(det);
    }
    let square_of = |d: Option<&Detected>| -> Result<Option<i8>> {
        match d {
            None => Ok(None),
            Some(det) => det.check.square.map(Some).ok_or_else(|| {
                Error::InconsistentInput(format!("{} operator squares to no sign", det.candidate.kind))
            }),
        }
    };
    let t = square_of(by_kind[0])?;
    let cq = square_of(by_kind[1])?;
    let mut chiral = by_kind[2].is_some();
    if let (Some(tr), Some(ph)) = (by_kind[0], by_kind[1]) {
        let s = &tr.candidate.unitary * ph.candidate.unitary.map(|z| z.conj());
        let composed = SymmetryCandidate {
            kind: SymmetryKind::Chiral,
            unitary: s,
        };
        let chk = check_symmetry(model, &composed, grid)?;
        if !chk.holds {
            return Err(Error::InconsistentInput(format!(
                "TR·PH composition is not a chiral symmetry (violation {:.3e})",
                chk.max_violation
            )));
        }
        chiral = true;
    }
    let label = label_from_flags(t, cq, chiral)?;
    Ok(AZClassification::from_label(label, t, cq, chiral))
}

/// Named unitary for an `n`-orbital model: `identity`, `pauli_x|y|z`
/// (`σ ⊗ 1`, spin outermost) or `kramers` (`iσ_y ⊗ 1`).
pub fn preset_unitary(name: &str, n: usize) -> Result<CMatrix> {
    let half = || -> Result<CMatrix> {
        if n % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: n + 1, got: n });
        }
        Ok(linalg::identity(n / 2))
    };
    match name {
        "identity" => Ok(linalg::identity(n)),
        "pauli_x" => Ok(kron(&linalg::pauli_x(), &half()?)),
        "pauli_y" => Ok(kron(&linalg::pauli_y(), &half()?)),
        "pauli_z" => Ok(kron(&linalg::pauli_z(), &half()?)),
        "kramers" => Ok(kron(&(linalg::pauli_y() * c(0.0, 1.0)), &half()?)),
        _ => parse_inline_unitary(name, n),
    }
}

/// Row-major comma separated complex entries, e.g. `0,1,1,0` or `0,-1i,1i,0`.
pub fn parse_inline_unitary(text: &str, n: usize) -> Result<CMatrix> {
    let entries = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<Complex64>()
                .map_err(|_| Error::Parse(format!("not a preset or complex entry: `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if entries.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: entries.len(),
        });
    }
    Ok(CMatrix::from_row_slice(n, n, &entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, ModelSpec};

    fn model(s: &str) -> BlochModel {
        build_model(&s.parse::<ModelSpec>().unwrap()).unwrap()
    }

    fn cand(kind: SymmetryKind, preset: &str, n: usize) -> SymmetryCandidate {
        SymmetryCandidate::new(kind, preset_unitary(preset, n).unwrap()).unwrap()
    }

    #[test]
    fn qahe_has_no_plain_tr() {
        let m = model("model=qahe2d m=1");
        let chk = check_symmetry(&m, &cand(SymmetryKind::TimeReversal, "identity", 2), 16).unwrap();
        assert!(!chk.holds);
        assert!(chk.max_violation > 0.1);
    }

    #[test]
    fn doubled_qahe_kramers() {
        let m = model("model=doubled_qahe_trs m=1 eps=0.1");
        let chk = check_symmetry(&m, &cand(SymmetryKind::TimeReversal, "kramers", 4), 16).unwrap();
        assert!(chk.holds, "violation {}", chk.max_violation);
        assert_eq!(chk.square, Some(-1));
    }

    #[test]
    fn ssh_chiral() {
        let m = model("model=ssh1d t1=1 t2=0.5");
        let chk = check_symmetry(&m, &cand(SymmetryKind::Chiral, "pauli_z", 2), 16).unwrap();
        assert!(chk.holds);
        assert_eq!(chk.square, None);
    }

    #[test]
    fn dimension_mismatch() {
        let m = model("model=qahe2d m=1");
        let r = check_symmetry(&m, &cand(SymmetryKind::Chiral, "kramers", 4), 4);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn labels_from_flags() {
        assert_eq!(label_from_flags(None, None, false).unwrap(), CartanLabel::A);
        assert_eq!(label_from_flags(Some(-1), None, false).unwrap(), CartanLabel::AII);
        assert_eq!(label_from_flags(Some(1), Some(1), true).unwrap(), CartanLabel::BDI);
        assert!(label_from_flags(Some(1), None, true).is_err());
        assert!(label_from_flags(Some(1), Some(1), false).is_err());
        let valid = [None, Some(1), Some(-1)]
            .iter()
            .flat_map(|&t| [None, Some(1), Some(-1)].map(move |c| (t, c)))
            .flat_map(|(t, c)| [false, true].map(move |s| (t, c, s)))
            .filter(|&(t, c, s)| label_from_flags(t, c, s).is_ok())
            .count();
        assert_eq!(valid, 10);
    }

    #[test]
    fn indices() {
        assert_eq!(CartanLabel::AII.real_index(), Some(4));
        assert_eq!(CartanLabel::CI.real_index(), Some(7));
        assert_eq!(CartanLabel::AIII.complex_index(), Some(1));
        assert_eq!("diii".parse::<CartanLabel>().unwrap(), CartanLabel::DIII);
        assert!(matches!("Q".parse::<CartanLabel>(), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn classify_ssh_bdi() {
        // H = dx σx + dy σy with real dx and dy ∝ sin k: T = K, C = σz K.
        let m = model("model=ssh1d t1=1 t2=0.5");
        let found = vec![
            detect(&m, cand(SymmetryKind::TimeReversal, "identity", 2), 16).unwrap(),
            detect(&m, cand(SymmetryKind::ParticleHole, "pauli_z", 2), 16).unwrap(),
        ];
        let az = az_class(&m, &found, 16).unwrap();
        assert_eq!(az.cartan_label, CartanLabel::BDI);
        assert_eq!(az.real_index_q, Some(1));
        assert!(az.has_chiral);
    }

    #[test]
    fn classify_doubled_aii() {
        let m = model("model=doubled_qahe_trs m=1 eps=0.1");
        let found = vec![detect(&m, cand(SymmetryKind::TimeReversal, "kramers", 4), 16).unwrap()];
        let az = az_class(&m, &found, 16).unwrap();
        assert_eq!(az.cartan_label, CartanLabel::AII);
        assert_eq!(az.real_index_q, Some(4));
    }

    #[test]
    fn classify_nothing_is_a() {
        let m = model("model=qahe2d m=1");
        let az = az_class(&m, &[], 16).unwrap();
        assert_eq!(az.cartan_label, CartanLabel::A);
        assert_eq!(az.complex_index, Some(0));
    }

    #[test]
    fn inline_unitary() {
        let u = parse_inline_unitary("0,-1i,1i,0", 2).unwrap();
        assert!(linalg::max_abs(&(u - linalg::pauli_y())) < 1e-15);
        assert!(parse_inline_unitary("1,0,0", 2).is_err());
    }
}
