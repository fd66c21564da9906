use serde::{Deserialize, Serialize};

use super::{chern_number_2d, critical_points, gauss_degree};
use crate::error::{Error, Result};
use crate::models::DVectorFamily;

const SAMPLE_CLEARANCE: f64 = 1e-3;

/// Invariant value on the open parameter interval `(m_lo, m_hi)`;
/// `None` marks an unbounded end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseInterval {
    pub m_lo: Option<f64>,
    pub m_hi: Option<f64>,
    pub value: i64,
}

/// Invariant per interval between consecutive critical parameter values in
/// the sampled range. Two-dimensional families use the Chern number, other
/// dimensions the Gauss-map degree. Adjacent equal intervals are merged.
pub fn phase_diagram(family: &DVectorFamily, m_samples: &[f64], grid: usize, seeds: usize) -> Result<Vec<PhaseInterval>> {
    if m_samples.is_empty() {
        return Err(Error::InconsistentInput("no parameter samples".into()));
    }
    if m_samples.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InconsistentInput("m samples must be strictly increasing".into()));
    }
    let (lo, hi) = (m_samples[0], *m_samples.last().expect("non-empty"));
    let mut crit: Vec<f64> = Vec::new();
    for p in critical_points(family, (lo, hi), seeds) {
        let m = p.m();
        if !crit.iter().any(|c| (c - m).abs() < 1e-6) {
            crit.push(m);
        }
    }
    crit.sort_by(f64::total_cmp);
    for &m in m_samples {
        if let Some(&c) = crit.iter().find(|&&c| (c - m).abs() < SAMPLE_CLEARANCE) {
            return Err(Error::SampleOnCriticalPoint { sample: m, critical: c });
        }
    }
    let mut intervals: Vec<PhaseInterval> = Vec::new();
    for slot in 0..=crit.len() {
        let m_lo = if slot == 0 { None } else { Some(crit[slot - 1]) };
        let m_hi = crit.get(slot).copied();
        let inside: Vec<f64> = m_samples
            .iter()
            .copied()
            .filter(|&m| m_lo.map_or(true, |a| m > a) && m_hi.map_or(true, |b| m < b))
            .collect();
        if inside.is_empty() {
            return Err(Error::UnsampledInterval {
                lo: m_lo.unwrap_or(f64::NEG_INFINITY),
                hi: m_hi.unwrap_or(f64::INFINITY),
            });
        }
        let mut value = None;
        for m in inside {
            let v = invariant_at(family, m, grid)?;
            match value {
                None => value = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::InconsistentInput(format!(
                        "invariant changes inside ({m_lo:?}, {m_hi:?}) without a critical point"
                    )))
                }
                _ => {}
            }
        }
        let value = value.expect("at least one sample");
        match intervals.last_mut() {
            Some(last) if last.value == value => last.m_hi = m_hi,
            _ => intervals.push(PhaseInterval { m_lo, m_hi, value }),
        }
    }
    Ok(intervals)
}

fn invariant_at(family: &DVectorFamily, m: f64, grid: usize) -> Result<i64> {
    let model = family.at(m);
    if family.dim == 2 {
        Ok(chern_number_2d(&model.to_bloch(), grid)?.value)
    } else {
        Ok(gauss_degree(&model, grid)?.value)
    }
}
