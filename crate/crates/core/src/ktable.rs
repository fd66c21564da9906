//! Classifying spaces, their π₀ groups, and the periodic table of
//! topological insulators and superconductors.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::symmetry::CartanLabel;

/// A group from {0, Z, Z2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pi0 {
    Trivial,
    Z,
    Z2,
}

/// Formal direct sum `a·Z ⊕ b·Z2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroupExpr {
    pub z: usize,
    pub z2: usize,
}

impl AbelianGroupExpr {
    pub const TRIVIAL: AbelianGroupExpr = AbelianGroupExpr { z: 0, z2: 0 };
    pub const Z: AbelianGroupExpr = AbelianGroupExpr { z: 1, z2: 0 };
    pub const Z2: AbelianGroupExpr = AbelianGroupExpr { z: 0, z2: 1 };

    pub fn from_pi0(g: Pi0) -> Self {
        match g {
            Pi0::Trivial => Self::TRIVIAL,
            Pi0::Z => Self::Z,
            Pi0::Z2 => Self::Z2,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.z == 0 && self.z2 == 0
    }

    pub fn plus(self, other: Self) -> Self {
        AbelianGroupExpr {
            z: self.z + other.z,
            z2: self.z2 + other.z2,
        }
    }

    pub fn times(self, k: usize) -> Self {
        AbelianGroupExpr {
            z: self.z * k,
            z2: self.z2 * k,
        }
    }

    /// Parses `0`, `Z`, `Z2`, `2Z`, `Z ⊕ 3Z2` (also `+` as separator).
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = Self::TRIVIAL;
        for part in s.split(['⊕', '+']).map(str::trim) {
            if part == "0" || part.is_empty() {
                continue;
            }
            let digits: String = part.chars().take_while(|c| c.is_ascii_digit()).collect();
            let rest = &part[digits.len()..];
            let mult = if digits.is_empty() {
                1
            } else {
                digits.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?
            };
            match rest {
                "Z" => out.z += mult,
                "Z2" => out.z2 += mult,
                _ => return Err(Error::Parse(format!("not a group summand: `{part}`"))),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for AbelianGroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.z {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("{n}Z")),
        }
        match self.z2 {
            0 => {}
            1 => parts.push("Z2".to_string()),
            n => parts.push(format!("{n}Z2")),
        }
        f.write_str(&parts.join(" ⊕ "))
    }
}

impl Serialize for AbelianGroupExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `R_q` (real) or `C_q` (complex); indices are reduced on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifyingSpace {
    Real(u8),
    Complex(u8),
}

impl ClassifyingSpace {
    pub fn real(q: i64) -> Self {
        ClassifyingSpace::Real(q.rem_euclid(8) as u8)
    }

    pub fn complex(q: i64) -> Self {
        ClassifyingSpace::Complex(q.rem_euclid(2) as u8)
    }

    pub fn of(label: CartanLabel) -> Self {
        match (label.real_index(), label.complex_index()) {
            (Some(q), _) => ClassifyingSpace::Real(q),
            (_, Some(q)) => ClassifyingSpace::Complex(q),
            _ => unreachable!("every label has one index"),
        }
    }

    pub fn cartan_label(self) -> CartanLabel {
        match self {
            ClassifyingSpace::Real(q) => CartanLabel::from_real_index(q as i64),
            ClassifyingSpace::Complex(0) => CartanLabel::A,
            ClassifyingSpace::Complex(_) => CartanLabel::AIII,
        }
    }
}

impl fmt::Display for ClassifyingSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyingSpace::Real(q) => write!(f, "R{q}"),
            ClassifyingSpace::Complex(q) => write!(f, "C{q}"),
        }
    }
}

const REAL_PI0: [Pi0; 8] = [
    Pi0::Z,
    Pi0::Z2,
    Pi0::Z2,
    Pi0::Trivial,
    Pi0::Z,
    Pi0::Trivial,
    Pi0::Trivial,
    Pi0::Trivial,
];

pub fn pi0(space: ClassifyingSpace) -> AbelianGroupExpr {
    let g = match space {
        ClassifyingSpace::Real(q) => REAL_PI0[(q % 8) as usize],
        ClassifyingSpace::Complex(q) if q % 2 == 0 => Pi0::Z,
        ClassifyingSpace::Complex(_) => Pi0::Trivial,
    };
    AbelianGroupExpr::from_pi0(g)
}

/// Classifying space whose π₀ classifies class `label` in `d` dimensions.
pub fn shifted_space(label: CartanLabel, d: i64) -> ClassifyingSpace {
    match ClassifyingSpace::of(label) {
        ClassifyingSpace::Real(q) => ClassifyingSpace::real(q as i64 - d),
        ClassifyingSpace::Complex(q) => ClassifyingSpace::complex(q as i64 - d),
    }
}

/// Sphere-model classification `π₀(R_{q−d})` or `π₀(C_{q−d})`.
pub fn table_entry(label: CartanLabel, d: usize) -> AbelianGroupExpr {
    pi0(shifted_space(label, d as i64))
}

/// Label-string variant of [`table_entry`].
pub fn table_entry_named(label: &str, d: usize) -> Result<AbelianGroupExpr> {
    Ok(table_entry(label.parse()?, d))
}

/// Entries with `q − d ≡ 4 (mod 8)` are Z groups whose invariant is always
/// even.
pub fn is_even_entry(label: CartanLabel, d: usize) -> bool {
    matches!(shifted_space(label, d as i64), ClassifyingSpace::Real(4))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub group: AbelianGroupExpr,
    pub even: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: CartanLabel,
    pub cells: Vec<TableCell>,
}

/// Rows in the order A, AIII, AI, BDI, D, DIII, AII, CII, C, CI over
/// `d = 0..d_max`.
pub fn generate_periodic_table(d_max: usize) -> Vec<TableRow> {
    CartanLabel::ALL
        .iter()
        .map(|&label| TableRow {
            label,
            cells: (0..d_max)
                .map(|d| TableCell {
                    group: table_entry(label, d),
                    even: is_even_entry(label, d),
                })
                .collect(),
        })
        .collect()
}

/// Aligned text rendering of a table. Even entries print as plain `Z`; the
/// flag is kept on [`TableCell`].
pub fn render_table(rows: &[TableRow]) -> String {
    let d_max = rows.first().map_or(0, |r| r.cells.len());
    let mut out = format!("{:<6}", "class");
    for d in 0..d_max {
        out.push_str(&format!("{:>5}", d));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!("{:<6}", row.label.name()));
        for cell in &row.cells {
            out.push_str(&format!("{:>5}", cell.group.to_string()));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusGroups {
    pub band_and_weak: AbelianGroupExpr,
    pub strong: AbelianGroupExpr,
}

/// `⊕_{s=0}^{d−1} C(d,s)·π₀(R_{q−s})` for the band and weak part, with the
/// strong part `π₀(R_{q−d})` reported separately.
pub fn ko_torus(label: CartanLabel, d: usize) -> Result<TorusGroups> {
    if label.is_complex() {
        return Err(Error::ComplexClassUnsupported(label.to_string()));
    }
    if d == 0 {
        return Err(Error::InconsistentInput("torus dimension must be at least 1".into()));
    }
    let mut band_and_weak = AbelianGroupExpr::TRIVIAL;
    for s in 0..d {
        band_and_weak = band_and_weak.plus(table_entry(label, s).times(binomial(d, s)));
    }
    Ok(TorusGroups {
        band_and_weak,
        strong: table_entry(label, d),
    })
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi0_values() {
        assert_eq!(pi0(ClassifyingSpace::real(0)), AbelianGroupExpr::Z);
        assert_eq!(pi0(ClassifyingSpace::real(3)), AbelianGroupExpr::TRIVIAL);
        assert_eq!(pi0(ClassifyingSpace::real(12)), AbelianGroupExpr::Z);
        assert_eq!(pi0(ClassifyingSpace::complex(1)), AbelianGroupExpr::TRIVIAL);
    }

    #[test]
    fn entries() {
        assert_eq!(table_entry(CartanLabel::AII, 3), AbelianGroupExpr::Z2);
        assert_eq!(table_entry(CartanLabel::A, 2), AbelianGroupExpr::Z);
        assert_eq!(table_entry(CartanLabel::C, 1), AbelianGroupExpr::TRIVIAL);
        assert!(matches!(table_entry_named("E", 1), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn torus() {
        let t = ko_torus(CartanLabel::AII, 3).unwrap();
        assert_eq!(t.band_and_weak, AbelianGroupExpr { z: 1, z2: 3 });
        assert_eq!(t.strong, AbelianGroupExpr::Z2);
        let t = ko_torus(CartanLabel::AII, 1).unwrap();
        assert_eq!(t.band_and_weak, AbelianGroupExpr::Z);
        assert_eq!(t.strong, AbelianGroupExpr::TRIVIAL);
        assert!(matches!(ko_torus(CartanLabel::A, 2), Err(Error::ComplexClassUnsupported(_))));
    }

    #[test]
    fn display_and_parse() {
        let g = AbelianGroupExpr { z: 1, z2: 3 };
        assert_eq!(g.to_string(), "Z ⊕ 3Z2");
        assert_eq!(AbelianGroupExpr::parse("Z ⊕ 3Z2").unwrap(), g);
        assert_eq!(AbelianGroupExpr::parse("0").unwrap(), AbelianGroupExpr::TRIVIAL);
    }

    #[test]
    fn even_flags() {
        assert!(is_even_entry(CartanLabel::AII, 0));
        assert!(is_even_entry(CartanLabel::AI, 4));
        assert!(!is_even_entry(CartanLabel::AII, 4));
        assert!(!is_even_entry(CartanLabel::A, 0));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 1), 3);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(2, 3), 0);
    }
}
