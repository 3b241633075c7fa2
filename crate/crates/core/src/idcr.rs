//! Entropy-weighted improved combination.
//!
//! The pipeline averages the sources, scores each one by its Euclidean
//! closeness to the average, multiplies that support by the source's
//! weighted Deng entropy to get a credibility weight, forms the
//! credibility-weighted average BPA, and finally combines that modified BPA
//! with itself once per source.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::combination::{dcr_nary, same_focal_product};
use crate::entropy::weighted_deng_entropy;
use crate::error::{Error, Result};
use crate::evidence::{shared_frame, FocalSet, MassFunction};

/// How the modified BPA is combined with itself in the last step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CombinationMode {
    /// Multiply the masses on identical focal elements.
    #[default]
    SameFocal,
    /// Classical Dempster combination over all intersections.
    Intersection,
}

impl CombinationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CombinationMode::SameFocal => "same-focal",
            CombinationMode::Intersection => "intersection",
        }
    }

    /// Combines `n` copies of `m`.
    pub fn self_combine(self, m: &MassFunction, n: usize) -> Result<MassFunction> {
        let copies = vec![m.clone(); n];
        match self {
            CombinationMode::SameFocal => same_focal_product(&copies),
            CombinationMode::Intersection => dcr_nary(&copies),
        }
    }
}

impl fmt::Display for CombinationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CombinationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same-focal" => Ok(CombinationMode::SameFocal),
            "intersection" => Ok(CombinationMode::Intersection),
            other => Err(Error::Parse(format!(
                "unknown combination mode {other:?} (expected same-focal or intersection)"
            ))),
        }
    }
}

/// Every intermediate of one fusion run, in pipeline order.
#[derive(Debug, Clone)]
pub struct FusionReport {
    pub average: MassFunction,
    pub distances: Vec<f64>,
    pub similarities: Vec<f64>,
    pub supports: Vec<f64>,
    pub entropies: Vec<f64>,
    pub weights: Vec<f64>,
    pub modified: MassFunction,
    pub fused: MassFunction,
    pub mode: CombinationMode,
}

/// Coordinate-wise mean of the sources.
pub fn average_bpa(evidence: &[MassFunction]) -> Result<MassFunction> {
    let frame = shared_frame(evidence)?;
    let n = evidence.len() as f64;
    let mut sums: BTreeMap<FocalSet, f64> = BTreeMap::new();
    for m in evidence {
        for (set, mass) in m.iter() {
            *sums.entry(set).or_insert(0.0) += mass;
        }
    }
    MassFunction::new(frame, sums.into_iter().map(|(s, total)| (s, total / n)))
}

/// Euclidean distance between the dense coordinate vectors of `m` and `avg`.
pub fn distance_to_average(m: &MassFunction, avg: &MassFunction) -> Result<f64> {
    if !m.same_frame(avg) {
        return Err(Error::FrameMismatch);
    }
    // coordinates outside both supports are zero in both vectors
    let mut diffs: BTreeMap<FocalSet, f64> = m.iter().collect();
    for (set, mass) in avg.iter() {
        *diffs.entry(set).or_insert(0.0) -= mass;
    }
    Ok(diffs.values().map(|d| d * d).sum::<f64>().sqrt())
}

/// `1 - distance`, clamped at zero.
pub fn similarity(distance: f64) -> f64 {
    (1.0 - distance).clamp(0.0, 1.0)
}

/// Similarities normalized to sum to one. All-zero input falls back to
/// uniform supports.
pub fn support_degrees(similarities: &[f64]) -> Vec<f64> {
    let total: f64 = similarities.iter().sum();
    if total <= 0.0 {
        if !similarities.is_empty() {
            log::warn!("all similarities are zero, using uniform support degrees");
        }
        let n = similarities.len() as f64;
        return vec![1.0 / n; similarities.len()];
    }
    similarities.iter().map(|s| s / total).collect()
}

/// `w_i ∝ sup_i · E_i`. When every product is zero the supports are used.
pub fn credibility_weights(supports: &[f64], entropies: &[f64]) -> Result<Vec<f64>> {
    if supports.len() != entropies.len() {
        return Err(Error::LengthMismatch {
            expected: supports.len(),
            got: entropies.len(),
        });
    }
    let raw: Vec<f64> = supports.iter().zip(entropies).map(|(s, e)| s * e).collect();
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Ok(supports.to_vec());
    }
    Ok(raw.into_iter().map(|r| r / total).collect())
}

/// Weighted average `m'(F) = Σ_i w_i m_i(F)`.
pub fn modified_bpa(evidence: &[MassFunction], weights: &[f64]) -> Result<MassFunction> {
    let frame = shared_frame(evidence)?;
    if weights.len() != evidence.len() {
        return Err(Error::LengthMismatch {
            expected: evidence.len(),
            got: weights.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::WeightSum(total));
    }
    let mut sums: BTreeMap<FocalSet, f64> = BTreeMap::new();
    for (m, w) in evidence.iter().zip(weights) {
        for (set, mass) in m.iter() {
            *sums.entry(set).or_insert(0.0) += w * mass;
        }
    }
    MassFunction::new(frame, sums)
}

/// Runs the full pipeline on at least two sources.
pub fn idcr_fuse(evidence: &[MassFunction], mode: CombinationMode) -> Result<FusionReport> {
    shared_frame(evidence)?;
    if evidence.len() < 2 {
        return Err(Error::TooFewEvidences {
            what: "improved combination",
            needed: 2,
            got: evidence.len(),
        });
    }
    let average = average_bpa(evidence)?;
    let distances = evidence
        .iter()
        .map(|m| distance_to_average(m, &average))
        .collect::<Result<Vec<_>>>()?;
    let similarities: Vec<f64> = distances.iter().map(|&d| similarity(d)).collect();
    let supports = support_degrees(&similarities);
    let entropies: Vec<f64> = evidence.iter().map(|m| weighted_deng_entropy(m).value()).collect();
    let weights = credibility_weights(&supports, &entropies)?;
    let modified = modified_bpa(evidence, &weights)?;
    let fused = mode.self_combine(&modified, evidence.len())?;
    Ok(FusionReport {
        average,
        distances,
        similarities,
        supports,
        entropies,
        weights,
        modified,
        fused,
        mode,
    })
}
