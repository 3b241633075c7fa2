//! Frames of discernment, focal sets and validated mass functions.
//!
//! A [`FocalSet`] is a bit-set over the element indices of a [`Frame`]; bit
//! `i` stands for the `i`-th label. Ordering focal sets by their integer
//! value gives the canonical coordinate order used for dense vectors and
//! file output.

use std::fmt;
use std::ops::{BitAnd, BitOr, Deref};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported frame cardinality.
pub const MAX_FRAME_SIZE: usize = 20;

/// Construction rejects mass sums further than this from one.
pub const MASS_SUM_TOLERANCE: f64 = 1e-6;

/// Sum deviation attributed to floating-point rounding rather than input drift.
const ROUNDING_SLACK: f64 = 1e-12;

/// Sum tolerance for masses read from files, which are usually rounded to
/// four decimals (a row of rounded cells can drift by a few 1e-4).
pub const PRINTED_MASS_SUM_TOLERANCE: f64 = 5e-4;

/// Ordered, duplicate-free list of hypothesis labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    labels: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidFrame("frame needs at least one label".into()));
        }
        if labels.len() > MAX_FRAME_SIZE {
            return Err(Error::InvalidFrame(format!(
                "frame has {} labels, at most {MAX_FRAME_SIZE} supported",
                labels.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.trim().is_empty() {
                return Err(Error::InvalidFrame(format!("label {i} is blank")));
            }
            if labels[..i].contains(label) {
                return Err(Error::InvalidFrame(format!("duplicate label {label:?}")));
            }
        }
        Ok(Arc::new(Frame { labels }))
    }

    pub fn cardinality(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The whole frame as a focal set.
    pub fn full(&self) -> FocalSet {
        FocalSet(((1u64 << self.cardinality()) - 1) as u32)
    }

    pub fn contains_set(&self, set: FocalSet) -> bool {
        set.0 & !self.full().0 == 0
    }

    /// Builds a focal set from element labels.
    pub fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<FocalSet> {
        labels.iter().try_fold(FocalSet::EMPTY, |acc, label| {
            let label = label.as_ref();
            self.index_of(label)
                .map(|i| acc | FocalSet::singleton(i))
                .ok_or_else(|| Error::InvalidMass(format!("unknown label {label:?}")))
        })
    }

    /// Intersection of two focal sets, both of which must lie in this frame.
    pub fn intersect(&self, a: FocalSet, b: FocalSet) -> Result<FocalSet> {
        if !self.contains_set(a) || !self.contains_set(b) {
            return Err(Error::FrameMismatch);
        }
        Ok(a & b)
    }

    /// Every nonempty subset in ascending bit-set order.
    pub fn canonical_order(&self) -> Vec<FocalSet> {
        (1..=self.full().0).map(FocalSet).collect()
    }

    /// Every nonempty subset, smaller sets first, ties in canonical order.
    pub fn cardinality_order(&self) -> Vec<FocalSet> {
        let mut order = self.canonical_order();
        order.sort_by_key(|s| (s.cardinality(), s.0));
        order
    }

    pub fn set_labels(&self, set: FocalSet) -> Vec<&str> {
        set.indices().map(|i| self.label(i)).collect()
    }

    /// `{F1,F3}` style rendering.
    pub fn format_set(&self, set: FocalSet) -> String {
        format!("{{{}}}", self.set_labels(set).join(","))
    }
}

/// Subset of a frame, stored as a bit-set over element indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FocalSet(u32);

impl FocalSet {
    pub const EMPTY: FocalSet = FocalSet(0);

    pub fn from_bits(bits: u32) -> Self {
        FocalSet(bits)
    }

    pub fn singleton(index: usize) -> Self {
        assert!(index < MAX_FRAME_SIZE, "element index {index} out of range");
        FocalSet(1 << index)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices
            .into_iter()
            .fold(FocalSet::EMPTY, |acc, i| acc | FocalSet::singleton(i))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn cardinality(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_singleton(self) -> bool {
        self.cardinality() == 1
    }

    pub fn contains(self, index: usize) -> bool {
        index < 32 && self.0 & (1 << index) != 0
    }

    pub fn is_subset_of(self, other: FocalSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersect(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 & other.0)
    }

    pub fn union(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 | other.0)
    }

    /// Element indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }
}

impl BitAnd for FocalSet {
    type Output = FocalSet;
    fn bitand(self, rhs: FocalSet) -> FocalSet {
        self.intersect(rhs)
    }
}

impl BitOr for FocalSet {
    type Output = FocalSet;
    fn bitor(self, rhs: FocalSet) -> FocalSet {
        self.union(rhs)
    }
}

impl fmt::Display for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A basic probability assignment over a frame.
///
/// Only the support is stored: every entry has strictly positive mass, the
/// empty set never appears, and the masses sum to one.
#[derive(Debug, Clone)]
pub struct MassFunction {
    frame: Arc<Frame>,
    // sorted by focal set, masses > 0
    masses: Vec<(FocalSet, f64)>,
}

impl MassFunction {
    /// Validates `entries` and renormalizes when the sum is within
    /// [`MASS_SUM_TOLERANCE`] of one. Sums already equal to one up to
    /// floating-point rounding are kept verbatim, so stored values survive a
    /// save/load cycle unchanged. Repeated focal sets are summed and
    /// zero entries dropped.
    pub fn new<I>(frame: &Arc<Frame>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        Self::with_sum_tolerance(frame, entries, MASS_SUM_TOLERANCE)
    }

    /// Like [`MassFunction::new`] with a caller-chosen sum tolerance.
    pub fn with_sum_tolerance<I>(frame: &Arc<Frame>, entries: I, tolerance: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        let masses = collect_support(frame, entries)?;
        let total: f64 = masses.iter().map(|(_, m)| m).sum();
        if total.is_nan() || total <= 0.0 || (total - 1.0).abs() > tolerance {
            return Err(Error::InvalidMass(format!("masses sum to {total}, expected 1")));
        }
        let masses = if (total - 1.0).abs() <= ROUNDING_SLACK {
            masses
        } else {
            masses.into_iter().map(|(s, m)| (s, m / total)).collect()
        };
        Ok(MassFunction {
            frame: Arc::clone(frame),
            masses,
        })
    }

    /// Like [`MassFunction::new`], keyed by label lists.
    pub fn from_labels<S: AsRef<str>>(frame: &Arc<Frame>, entries: &[(&[S], f64)]) -> Result<Self> {
        Self::from_labels_with_tolerance(frame, entries, MASS_SUM_TOLERANCE)
    }

    pub fn from_labels_with_tolerance<S: AsRef<str>>(
        frame: &Arc<Frame>,
        entries: &[(&[S], f64)],
        tolerance: f64,
    ) -> Result<Self> {
        let entries = entries
            .iter()
            .map(|(labels, m)| Ok((frame.set_of(labels)?, *m)))
            .collect::<Result<Vec<_>>>()?;
        Self::with_sum_tolerance(frame, entries, tolerance)
    }

    /// Builds a mass function from masses that already sum to one (within
    /// 1e-9) without dividing by the total.
    pub(crate) fn from_exact<I>(frame: &Arc<Frame>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        let masses = collect_support(frame, entries)?;
        let total: f64 = masses.iter().map(|(_, m)| m).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMass(format!("masses sum to {total}, expected 1")));
        }
        Ok(MassFunction {
            frame: Arc::clone(frame),
            masses,
        })
    }

    /// Total ignorance: all mass on the whole frame.
    pub fn vacuous(frame: &Arc<Frame>) -> Self {
        MassFunction {
            frame: Arc::clone(frame),
            masses: vec![(frame.full(), 1.0)],
        }
    }

    /// Inverse of [`MassFunction::as_vector`].
    pub fn from_vector(frame: &Arc<Frame>, coords: &[f64]) -> Result<Self> {
        let order = frame.canonical_order();
        if coords.len() != order.len() {
            return Err(Error::LengthMismatch {
                expected: order.len(),
                got: coords.len(),
            });
        }
        Self::new(frame, order.into_iter().zip(coords.iter().copied()))
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn same_frame(&self, other: &MassFunction) -> bool {
        Arc::ptr_eq(&self.frame, &other.frame) || self.frame == other.frame
    }

    /// Mass of `set`, zero outside the support.
    pub fn get(&self, set: FocalSet) -> f64 {
        self.masses
            .binary_search_by_key(&set, |(s, _)| *s)
            .map(|i| self.masses[i].1)
            .unwrap_or(0.0)
    }

    /// Mass of the set named by `labels`; unknown labels read as zero.
    pub fn get_labels<S: AsRef<str>>(&self, labels: &[S]) -> f64 {
        self.frame.set_of(labels).map(|s| self.get(s)).unwrap_or(0.0)
    }

    /// Focal elements and their masses in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (FocalSet, f64)> + '_ {
        self.masses.iter().copied()
    }

    pub fn focal_sets(&self) -> impl Iterator<Item = FocalSet> + '_ {
        self.masses.iter().map(|(s, _)| *s)
    }

    pub fn support_len(&self) -> usize {
        self.masses.len()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().map(|(_, m)| m).sum()
    }

    /// True when every focal element is a single hypothesis.
    pub fn is_bayesian(&self) -> bool {
        self.masses.iter().all(|(s, _)| s.is_singleton())
    }

    /// Dense coordinates in canonical order (every nonempty subset).
    pub fn as_vector(&self) -> Vec<f64> {
        self.as_vector_in(&self.frame.canonical_order())
    }

    pub fn as_vector_in(&self, order: &[FocalSet]) -> Vec<f64> {
        order.iter().map(|s| self.get(*s)).collect()
    }
}

fn collect_support<I>(frame: &Frame, entries: I) -> Result<Vec<(FocalSet, f64)>>
where
    I: IntoIterator<Item = (FocalSet, f64)>,
{
    let mut masses: Vec<(FocalSet, f64)> = Vec::new();
    for (set, mass) in entries {
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::InvalidMass(format!(
                "mass {mass} on {set} is not a nonnegative number"
            )));
        }
        if !frame.contains_set(set) {
            return Err(Error::InvalidMass(format!(
                "focal set {set} is not a subset of the frame"
            )));
        }
        if set.is_empty() {
            if mass > 0.0 {
                return Err(Error::InvalidMass(format!("empty set carries mass {mass}")));
            }
            continue;
        }
        if mass == 0.0 {
            continue;
        }
        match masses.binary_search_by_key(&set, |(s, _)| *s) {
            Ok(i) => masses[i].1 += mass,
            Err(i) => masses.insert(i, (set, mass)),
        }
    }
    Ok(masses)
}

/// Ordered mass functions over one shared frame, one per source.
#[derive(Debug, Clone)]
pub struct EvidenceSet {
    frame: Arc<Frame>,
    items: Vec<MassFunction>,
}

impl EvidenceSet {
    pub fn new(items: Vec<MassFunction>) -> Result<Self> {
        let first = items.first().ok_or(Error::EmptyEvidence)?;
        let frame = Arc::clone(first.frame());
        if items.iter().any(|m| !m.same_frame(first)) {
            return Err(Error::FrameMismatch);
        }
        Ok(EvidenceSet { frame, items })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    /// The first `k` evidences.
    pub fn prefix(&self, k: usize) -> Result<EvidenceSet> {
        if k == 0 {
            return Err(Error::EmptyEvidence);
        }
        if k > self.items.len() {
            return Err(Error::TooFewEvidences {
                what: "prefix",
                needed: k,
                got: self.items.len(),
            });
        }
        Ok(EvidenceSet {
            frame: Arc::clone(&self.frame),
            items: self.items[..k].to_vec(),
        })
    }

    pub fn into_inner(self) -> Vec<MassFunction> {
        self.items
    }
}

impl Deref for EvidenceSet {
    type Target = [MassFunction];
    fn deref(&self) -> &[MassFunction] {
        &self.items
    }
}

/// Checks that `evidence` is nonempty and shares one frame.
pub(crate) fn shared_frame(evidence: &[MassFunction]) -> Result<&Arc<Frame>> {
    let first = evidence.first().ok_or(Error::EmptyEvidence)?;
    if evidence.iter().any(|m| !m.same_frame(first)) {
        return Err(Error::FrameMismatch);
    }
    Ok(first.frame())
}
