//! Evidence (JSON) and diagnosis (CSV) documents.
//!
//! Evidence files list the frame labels and, per source, its focal elements
//! as label lists:
//!
//! ```json
//! {
//!   "frame": ["F1", "F2", "F3"],
//!   "evidences": [
//!     { "name": "m1", "masses": [ { "focal": ["F1"], "mass": 0.99 } ] }
//!   ]
//! }
//! ```
//!
//! Diagnosis files are CSV with a `kind,label,<feature...>` header. `kind`
//! is `reference` (one row per fault, in frame order), `sensor`, or
//! `threshold` (label `xi1`/`xi2`, value in the first feature column).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnosis::{FeatureVector, ReferenceLibrary};
use crate::error::{Error, Result};
use crate::evidence::{EvidenceSet, Frame, MassFunction, PRINTED_MASS_SUM_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceDocument {
    pub frame: Vec<String>,
    pub evidences: Vec<NamedBpa>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedBpa {
    pub name: String,
    pub masses: Vec<FocalMass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocalMass {
    pub focal: Vec<String>,
    pub mass: f64,
}

impl EvidenceDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed evidence document: {e}")))
    }

    /// Canonical rendering: two-space indented JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("evidence document serializes");
        out.push('\n');
        out
    }

    /// Validates every source and returns them with their names.
    pub fn to_evidence(&self) -> Result<(Vec<String>, EvidenceSet)> {
        let frame = Frame::new(self.frame.iter().cloned())?;
        let mut names = Vec::with_capacity(self.evidences.len());
        let mut items = Vec::with_capacity(self.evidences.len());
        for (i, ev) in self.evidences.iter().enumerate() {
            let entries: Vec<(&[String], f64)> = ev.masses.iter().map(|fm| (fm.focal.as_slice(), fm.mass)).collect();
            let m = MassFunction::from_labels_with_tolerance(&frame, &entries, PRINTED_MASS_SUM_TOLERANCE)
                .map_err(|e| Error::InvalidMass(format!("evidence {:?} (#{}): {e}", ev.name, i + 1)))?;
            names.push(ev.name.clone());
            items.push(m);
        }
        Ok((names, EvidenceSet::new(items)?))
    }

    /// Focal sets are written as label lists in frame order, sources in order.
    pub fn from_evidence(names: &[String], evidence: &EvidenceSet) -> Self {
        let frame = evidence.frame();
        EvidenceDocument {
            frame: frame.labels().to_vec(),
            evidences: evidence
                .iter()
                .enumerate()
                .map(|(i, m)| NamedBpa {
                    name: names.get(i).cloned().unwrap_or_else(|| format!("m{}", i + 1)),
                    masses: m
                        .iter()
                        .map(|(set, mass)| FocalMass {
                            focal: frame.set_labels(set).into_iter().map(String::from).collect(),
                            mass,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        Error::InvalidMass(msg) => Error::InvalidMass(format!("{}: {msg}", path.display())),
        Error::InvalidFrame(msg) => Error::InvalidFrame(format!("{}: {msg}", path.display())),
        other => other,
    }
}

pub fn load_evidence_document(path: impl AsRef<Path>) -> Result<EvidenceDocument> {
    let path = path.as_ref();
    EvidenceDocument::parse(&read(path)?).map_err(|e| with_path(path, e))
}

/// Reads and validates an evidence file.
pub fn load_evidence(path: impl AsRef<Path>) -> Result<EvidenceSet> {
    load_named_evidence(path).map(|(_, ev)| ev)
}

pub fn load_named_evidence(path: impl AsRef<Path>) -> Result<(Vec<String>, EvidenceSet)> {
    let path = path.as_ref();
    load_evidence_document(path)?
        .to_evidence()
        .map_err(|e| with_path(path, e))
}

/// Reference and sensor feature tables plus optional thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisDocument {
    pub feature_names: Vec<String>,
    pub faults: Vec<String>,
    pub references: Vec<Vec<f64>>,
    pub sensors: Vec<(String, Vec<f64>)>,
    pub xi1: Option<f64>,
    pub xi2: Option<f64>,
}

impl DiagnosisDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| Error::Parse(format!("diagnosis header: {e}")))?
            .clone();
        if header.len() < 3 || &header[0] != "kind" || &header[1] != "label" {
            return Err(Error::Parse(
                "diagnosis header must be kind,label followed by at least one feature name".into(),
            ));
        }
        let feature_names: Vec<String> = header.iter().skip(2).map(String::from).collect();
        let mut doc = DiagnosisDocument {
            feature_names,
            faults: Vec::new(),
            references: Vec::new(),
            sensors: Vec::new(),
            xi1: None,
            xi2: None,
        };
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(format!("diagnosis table: {e}")))?;
            let line = record.position().map_or(0, |p| p.line());
            let at = |msg: String| Error::Parse(format!("line {line}: {msg}"));
            let number = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| at(format!("{s:?} is not a finite number")))
            };
            let label = record[1].to_string();
            match &record[0] {
                "reference" | "sensor" => {
                    let values = record.iter().skip(2).map(number).collect::<Result<Vec<_>>>()?;
                    if record[0] == *"reference" {
                        doc.faults.push(label);
                        doc.references.push(values);
                    } else {
                        doc.sensors.push((label, values));
                    }
                }
                "threshold" => {
                    let value = number(&record[2])?;
                    if !(value > 0.0 && value < 1.0) {
                        return Err(at(format!("threshold {label} = {value} must lie in (0, 1)")));
                    }
                    if record.iter().skip(3).any(|f| !f.is_empty()) {
                        return Err(at("threshold rows carry a single value".into()));
                    }
                    match label.as_str() {
                        "xi1" => doc.xi1 = Some(value),
                        "xi2" => doc.xi2 = Some(value),
                        other => return Err(at(format!("unknown threshold {other:?}"))),
                    }
                }
                other => return Err(at(format!("unknown row kind {other:?}"))),
            }
        }
        if doc.references.is_empty() {
            return Err(Error::Parse("diagnosis document has no reference rows".into()));
        }
        Ok(doc)
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(false).from_writer(Vec::new());
        let width = self.feature_names.len();
        let mut row = |kind: &str, label: &str, values: Vec<String>| {
            let mut rec = vec![kind.to_string(), label.to_string()];
            rec.extend(values);
            w.write_record(&rec).expect("write to memory");
        };
        let mut header = vec!["kind".to_string(), "label".to_string()];
        header.extend(self.feature_names.iter().cloned());
        row(&header[0], &header[1], header[2..].to_vec());
        for (fault, values) in self.faults.iter().zip(&self.references) {
            row("reference", fault, values.iter().map(f64::to_string).collect());
        }
        for (name, values) in &self.sensors {
            row("sensor", name, values.iter().map(f64::to_string).collect());
        }
        for (name, value) in [("xi1", self.xi1), ("xi2", self.xi2)] {
            if let Some(v) = value {
                let mut cells = vec![v.to_string()];
                cells.resize(width, String::new());
                row("threshold", name, cells);
            }
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
    }

    pub fn library(&self) -> Result<ReferenceLibrary> {
        let frame = Frame::new(self.faults.iter().cloned())?;
        let rows = self
            .references
            .iter()
            .map(|r| FeatureVector::new(r.clone()))
            .collect::<Result<Vec<_>>>()?;
        ReferenceLibrary::new(frame, rows)
    }

    pub fn sensor_vectors(&self) -> Result<Vec<FeatureVector>> {
        self.sensors
            .iter()
            .map(|(_, v)| FeatureVector::new(v.clone()))
            .collect()
    }
}

pub fn load_diagnosis(path: impl AsRef<Path>) -> Result<DiagnosisDocument> {
    let path = path.as_ref();
    DiagnosisDocument::parse(&read(path)?).map_err(|e| with_path(path, e))
}
