//! Multisensor fault diagnosis on top of the improved combination.
//!
//! Each sensor's feature vector is compared with a per-fault reference
//! vector, the reciprocal distances are normalized into a singleton BPA, the
//! sensors are fused, and a two-threshold rule turns the fused BPA into a
//! verdict.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evidence::{EvidenceSet, FocalSet, Frame, MassFunction};
use crate::idcr::{idcr_fuse, CombinationMode, FusionReport};

/// Distances below this are treated as this before taking reciprocals.
pub const DISTANCE_FLOOR: f64 = 1e-9;

/// Default value of both decision thresholds.
pub const DEFAULT_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parse("feature vector is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("feature value {v} is not finite")));
        }
        Ok(FeatureVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Reference feature vector for every fault in the frame, in frame order.
#[derive(Debug, Clone)]
pub struct ReferenceLibrary {
    frame: Arc<Frame>,
    rows: Vec<FeatureVector>,
}

impl ReferenceLibrary {
    pub fn new(frame: Arc<Frame>, rows: Vec<FeatureVector>) -> Result<Self> {
        if rows.len() != frame.cardinality() {
            return Err(Error::LengthMismatch {
                expected: frame.cardinality(),
                got: rows.len(),
            });
        }
        let width = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != width) {
            return Err(Error::LengthMismatch {
                expected: width,
                got: bad.len(),
            });
        }
        Ok(ReferenceLibrary { frame, rows })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn rows(&self) -> &[FeatureVector] {
        &self.rows
    }

    pub fn feature_count(&self) -> usize {
        self.rows[0].len()
    }
}

/// Square root of the L1 distance between two feature vectors.
pub fn feature_distance(obs: &FeatureVector, reference: &FeatureVector) -> Result<f64> {
    if obs.len() != reference.len() {
        return Err(Error::LengthMismatch {
            expected: reference.len(),
            got: obs.len(),
        });
    }
    let l1: f64 = obs
        .values()
        .iter()
        .zip(reference.values())
        .map(|(o, r)| (o - r).abs())
        .sum();
    Ok(l1.sqrt())
}

/// Singleton BPA proportional to the reciprocal distance to each fault.
pub fn bpa_from_features(obs: &FeatureVector, lib: &ReferenceLibrary) -> Result<MassFunction> {
    let inverse = lib
        .rows()
        .iter()
        .map(|r| feature_distance(obs, r).map(|d| 1.0 / d.max(DISTANCE_FLOOR)))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = inverse.iter().sum();
    MassFunction::new(
        lib.frame(),
        inverse
            .into_iter()
            .enumerate()
            .map(|(i, s)| (FocalSet::singleton(i), s / total)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Fault(FocalSet),
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub outcome: Outcome,
    /// Focal element with the largest mass (whole frame excluded).
    pub top: Option<FocalSet>,
    pub runner_up: Option<FocalSet>,
    /// `m(top) - m(runner_up)`.
    pub margin: f64,
    /// Mass on the whole frame.
    pub ignorance: f64,
}

impl Decision {
    pub fn is_fault(&self) -> bool {
        matches!(self.outcome, Outcome::Fault(_))
    }

    pub fn describe(&self, frame: &Frame) -> String {
        match self.outcome {
            Outcome::Fault(set) if set.is_singleton() => {
                format!("Fault {}", frame.format_set(set).trim_matches(['{', '}']))
            }
            Outcome::Fault(set) => format!("Fault {}", frame.format_set(set)),
            Outcome::Undecided => "Undecided".to_string(),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Fault(set) => write!(f, "Fault({set})"),
            Outcome::Undecided => f.write_str("Undecided"),
        }
    }
}

/// Accepts the top focal element when it beats the runner-up by more than
/// `xi1`, the ignorance `m(χ)` is below `xi2`, and the top mass exceeds the
/// ignorance. Ties for the top go to the earlier set in canonical order, and
/// a zero margin never passes.
pub fn decide(m: &MassFunction, xi1: f64, xi2: f64) -> Decision {
    let full = m.frame().full();
    let ignorance = m.get(full);

    let mut top: Option<(FocalSet, f64)> = None;
    let mut runner_up: Option<(FocalSet, f64)> = None;
    for (set, mass) in m.iter().filter(|(s, _)| *s != full) {
        match top {
            Some((_, best)) if mass <= best => {
                if runner_up.is_none_or(|(_, r)| mass > r) {
                    runner_up = Some((set, mass));
                }
            }
            _ => {
                runner_up = top;
                top = Some((set, mass));
            }
        }
    }

    let top_mass = top.map_or(0.0, |(_, m)| m);
    let margin = top_mass - runner_up.map_or(0.0, |(_, m)| m);
    let outcome = match top {
        Some((set, _)) if margin > xi1 && ignorance < xi2 && top_mass > ignorance => Outcome::Fault(set),
        _ => Outcome::Undecided,
    };
    Decision {
        outcome,
        top: top.map(|(s, _)| s),
        runner_up: runner_up.map(|(s, _)| s),
        margin,
        ignorance,
    }
}

/// Result of running the whole diagnosis chain.
#[derive(Debug, Clone)]
pub struct Diagnosis {
    /// One singleton BPA per sensor.
    pub bpas: EvidenceSet,
    pub report: FusionReport,
    pub decision: Decision,
}

/// Features to BPAs, fusion, then decision.
pub fn diagnose(
    sensors: &[FeatureVector],
    lib: &ReferenceLibrary,
    xi1: f64,
    xi2: f64,
    mode: CombinationMode,
) -> Result<Diagnosis> {
    if sensors.len() < 2 {
        return Err(Error::TooFewEvidences {
            what: "diagnosis",
            needed: 2,
            got: sensors.len(),
        });
    }
    let bpas = sensors
        .iter()
        .map(|s| bpa_from_features(s, lib))
        .collect::<Result<Vec<_>>>()?;
    let bpas = EvidenceSet::new(bpas)?;
    let report = idcr_fuse(&bpas, mode)?;
    let decision = decide(&report.fused, xi1, xi2);
    Ok(Diagnosis { bpas, report, decision })
}
