//! Built-in evidence sets and feature tables for the worked examples.

use std::sync::Arc;

use crate::diagnosis::{FeatureVector, ReferenceLibrary};
use crate::error::Result;
use crate::evidence::{EvidenceSet, FocalSet, Frame, MassFunction, PRINTED_MASS_SUM_TOLERANCE};
use crate::io::DiagnosisDocument;

fn singleton_rows(frame: &Arc<Frame>, rows: &[&[f64]]) -> EvidenceSet {
    let items = rows
        .iter()
        .map(|row| {
            MassFunction::new(frame, row.iter().enumerate().map(|(i, &m)| (FocalSet::singleton(i), m)))
                .expect("built-in BPA is valid")
        })
        .collect();
    EvidenceSet::new(items).expect("built-in evidence shares a frame")
}

pub fn fault_frame(n: usize) -> Arc<Frame> {
    Frame::new((1..=n).map(|i| format!("F{i}"))).expect("fault labels are distinct")
}

/// Two sensors in near-total conflict over three faults.
pub fn conflicting_pair() -> EvidenceSet {
    singleton_rows(&fault_frame(3), &[&[0.99, 0.01, 0.0], &[0.0, 0.01, 0.99]])
}

/// Column order of [`composite_triple`]: singletons, then `{F1,F2}`,
/// `{F2,F3}`, `{F1,F3}`, and the whole frame.
pub fn composite_order() -> Vec<FocalSet> {
    let s = |idx: &[usize]| FocalSet::from_indices(idx.iter().copied());
    vec![
        s(&[0]),
        s(&[1]),
        s(&[2]),
        s(&[0, 1]),
        s(&[1, 2]),
        s(&[0, 2]),
        s(&[0, 1, 2]),
    ]
}

/// Three sensors with mass on composite focal elements.
pub fn composite_triple() -> EvidenceSet {
    let frame = fault_frame(3);
    let order = composite_order();
    let rows: [[f64; 7]; 3] = [
        [0.70, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05],
        [0.05, 0.70, 0.05, 0.05, 0.05, 0.05, 0.05],
        [0.75, 0.05, 0.0, 0.05, 0.05, 0.05, 0.05],
    ];
    let items = rows
        .iter()
        .map(|row| MassFunction::new(&frame, order.iter().copied().zip(row.iter().copied())).expect("valid BPA"))
        .collect();
    EvidenceSet::new(items).expect("shared frame")
}

/// Five sensors where the last one contradicts the first four.
pub fn five_sensor_conflict() -> EvidenceSet {
    singleton_rows(
        &fault_frame(3),
        &[
            &[0.70, 0.15, 0.15],
            &[0.40, 0.20, 0.40],
            &[0.65, 0.35, 0.0],
            &[0.75, 0.0, 0.25],
            &[0.0, 0.20, 0.80],
        ],
    )
}

pub const ROTOR_FEATURES: [&str; 4] = ["E1", "E2", "E3", "E4"];

/// Reference features of imbalance, shaft crack, misalignment and
/// bearing looseness.
pub const ROTOR_REFERENCES: [[f64; 4]; 4] = [
    [43.5828, 30.8859, 10.6806, 53.7373],
    [74.3605, 72.1393, 17.8107, 74.1857],
    [63.9286, 58.6064, 21.7660, 67.5529],
    [49.8858, 46.8183, 14.998, 52.6699],
];

pub const ROTOR_SENSORS: [[f64; 4]; 5] = [
    [66.2913, 57.3129, 22.8701, 65.0923],
    [62.3361, 55.3681, 22.8297, 66.1382],
    [73.4274, 69.8329, 16.5621, 72.5824],
    [65.8638, 61.5325, 24.2016, 69.2899],
    [51.4154, 48.3248, 15.4123, 50.3624],
];

pub fn rotor_library() -> ReferenceLibrary {
    let rows = ROTOR_REFERENCES
        .iter()
        .map(|r| FeatureVector::new(r.to_vec()).expect("finite"))
        .collect();
    ReferenceLibrary::new(fault_frame(4), rows).expect("consistent library")
}

pub fn rotor_sensors() -> Vec<FeatureVector> {
    ROTOR_SENSORS
        .iter()
        .map(|r| FeatureVector::new(r.to_vec()).expect("finite"))
        .collect()
}

/// The rotor tables as a diagnosis document with both thresholds at 0.1.
pub fn rotor_document() -> DiagnosisDocument {
    DiagnosisDocument {
        feature_names: ROTOR_FEATURES.iter().map(|s| s.to_string()).collect(),
        faults: (1..=4).map(|i| format!("F{i}")).collect(),
        references: ROTOR_REFERENCES.iter().map(|r| r.to_vec()).collect(),
        sensors: ROTOR_SENSORS
            .iter()
            .enumerate()
            .map(|(i, r)| (format!("S{}", i + 1), r.to_vec()))
            .collect(),
        xi1: Some(0.1),
        xi2: Some(0.1),
    }
}

/// Per-sensor BPAs as printed to four decimals (rows need not sum to 1).
pub const ROTOR_PRINTED_BPAS: [[f64; 4]; 5] = [
    [0.1469, 0.2057, 0.4660, 0.1813],
    [0.1521, 0.1935, 0.4631, 0.1914],
    [0.1278, 0.5008, 0.2221, 0.1493],
    [0.1459, 0.2396, 0.4395, 0.1750],
    [0.2068, 0.1399, 0.1755, 0.4777],
];

pub fn rotor_printed_evidence() -> Result<EvidenceSet> {
    let frame = fault_frame(4);
    let items = ROTOR_PRINTED_BPAS
        .iter()
        .map(|row| {
            let entries = row.iter().enumerate().map(|(i, &m)| (FocalSet::singleton(i), m));
            MassFunction::with_sum_tolerance(&frame, entries, PRINTED_MASS_SUM_TOLERANCE)
        })
        .collect::<Result<Vec<_>>>()?;
    EvidenceSet::new(items)
}
