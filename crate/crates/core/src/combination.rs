//! Baseline combination rules and the conflict coefficient.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evidence::{shared_frame, FocalSet, Frame, MassFunction};

/// Combination fails when the surviving mass `1 - K` is at or below this.
pub const TOTAL_CONFLICT_EPS: f64 = 1e-12;

/// Product mass landing on empty intersections, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConflictCoefficient(f64);

impl ConflictCoefficient {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_total(self) -> bool {
        1.0 - self.0 <= TOTAL_CONFLICT_EPS
    }
}

/// `Σ m1(A) m2(B)` grouped by `A ∩ B`, the empty set included.
pub fn unnormalized_conjunction(m1: &MassFunction, m2: &MassFunction) -> Result<BTreeMap<FocalSet, f64>> {
    if !m1.same_frame(m2) {
        return Err(Error::FrameMismatch);
    }
    Ok(conjoin(&m1.iter().collect::<Vec<_>>(), m2))
}

fn conjoin(acc: &[(FocalSet, f64)], m: &MassFunction) -> BTreeMap<FocalSet, f64> {
    let mut out = BTreeMap::new();
    for &(a, x) in acc {
        for (b, y) in m.iter() {
            *out.entry(a & b).or_insert(0.0) += x * y;
        }
    }
    out
}

pub fn conflict(m1: &MassFunction, m2: &MassFunction) -> Result<ConflictCoefficient> {
    let k = unnormalized_conjunction(m1, m2)?
        .get(&FocalSet::EMPTY)
        .copied()
        .unwrap_or(0.0);
    Ok(ConflictCoefficient(k.clamp(0.0, 1.0)))
}

/// Normalizes the nonempty part of a conjunctive sum.
fn normalize(frame: &Arc<Frame>, mut sums: BTreeMap<FocalSet, f64>) -> Result<MassFunction> {
    let conflict = sums.remove(&FocalSet::EMPTY).unwrap_or(0.0);
    let kept: f64 = sums.values().sum();
    if kept <= TOTAL_CONFLICT_EPS {
        return Err(Error::TotalConflict { conflict });
    }
    MassFunction::from_exact(frame, sums.into_iter().map(|(s, m)| (s, m / kept)))
}

/// Dempster's rule for two sources.
pub fn dcr_pairwise(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    let sums = unnormalized_conjunction(m1, m2)?;
    normalize(m1.frame(), sums)
}

/// Dempster's rule folded left to right over all sources.
pub fn dcr_nary(evidence: &[MassFunction]) -> Result<MassFunction> {
    shared_frame(evidence)?;
    let (first, rest) = evidence.split_first().ok_or(Error::EmptyEvidence)?;
    rest.iter().try_fold(first.clone(), |acc, m| dcr_pairwise(&acc, m))
}

/// Product of the masses every source puts on the *same* focal element,
/// renormalized over the focal elements supported by all sources.
///
/// On singleton-only evidence this coincides with [`dcr_nary`], since every
/// cross intersection of distinct singletons is empty.
pub fn same_focal_product(evidence: &[MassFunction]) -> Result<MassFunction> {
    let frame = shared_frame(evidence)?;
    let (first, rest) = evidence.split_first().ok_or(Error::EmptyEvidence)?;
    let products: Vec<(FocalSet, f64)> = first
        .iter()
        .map(|(set, mass)| (set, rest.iter().fold(mass, |p, m| p * m.get(set))))
        .filter(|&(_, p)| p > 0.0)
        .collect();
    let kept: f64 = products.iter().map(|(_, p)| p).sum();
    if kept <= TOTAL_CONFLICT_EPS {
        return Err(Error::TotalConflict { conflict: 1.0 - kept });
    }
    MassFunction::from_exact(frame, products.into_iter().map(|(s, p)| (s, p / kept)))
}

/// Yager's rule over all sources at once: conjunctive products with the
/// conflicting mass moved onto the whole frame instead of normalized away.
pub fn yager_nary(evidence: &[MassFunction]) -> Result<MassFunction> {
    let frame = shared_frame(evidence)?;
    if evidence.len() < 2 {
        return Err(Error::TooFewEvidences {
            what: "Yager combination",
            needed: 2,
            got: evidence.len(),
        });
    }
    let (first, rest) = evidence.split_first().ok_or(Error::EmptyEvidence)?;
    let mut ground: Vec<(FocalSet, f64)> = first.iter().collect();
    for m in rest {
        ground = conjoin(&ground, m).into_iter().collect();
    }
    let full = frame.full();
    let conflict: f64 = ground.iter().filter(|(s, _)| s.is_empty()).map(|(_, q)| q).sum();
    let masses = ground
        .into_iter()
        .filter(|(s, _)| !s.is_empty())
        .chain(std::iter::once((full, conflict)));
    MassFunction::from_exact(frame, masses)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame3() -> Arc<Frame> {
        Frame::new(["F1", "F2", "F3"]).unwrap()
    }

    fn bpa(frame: &Arc<Frame>, row: [f64; 3]) -> MassFunction {
        MassFunction::new(frame, row.iter().enumerate().map(|(i, &m)| (FocalSet::singleton(i), m))).unwrap()
    }

    fn example3(frame: &Arc<Frame>) -> Vec<MassFunction> {
        [
            [0.70, 0.15, 0.15],
            [0.40, 0.20, 0.40],
            [0.65, 0.35, 0.0],
            [0.75, 0.0, 0.25],
            [0.0, 0.20, 0.80],
        ]
        .into_iter()
        .map(|row| bpa(frame, row))
        .collect()
    }

    #[test]
    fn conflict_values() {
        let frame = frame3();
        let m1 = bpa(&frame, [0.99, 0.01, 0.0]);
        let m2 = bpa(&frame, [0.0, 0.01, 0.99]);
        // 0.99*0.01 + 0.99*0.99 + 0.01*0.99
        let expected = 0.99 * 0.01 + 0.99 * 0.99 + 0.01 * 0.99;
        assert!((conflict(&m1, &m2).unwrap().value() - expected).abs() < 1e-15);

        let c = bpa(&frame, [1.0, 0.0, 0.0]);
        assert_eq!(conflict(&c, &c).unwrap().value(), 0.0);

        let ev = example3(&frame);
        assert!((conflict(&ev[3], &ev[4]).unwrap().value() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn frame_mismatch_is_rejected() {
        let a = frame3();
        let b = Frame::new(["x", "y", "z"]).unwrap();
        assert_eq!(
            conflict(&MassFunction::vacuous(&a), &MassFunction::vacuous(&b)),
            Err(Error::FrameMismatch)
        );
        assert!(dcr_pairwise(&MassFunction::vacuous(&a), &MassFunction::vacuous(&b)).is_err());
    }

    #[test]
    fn classical_paradox() {
        let frame = frame3();
        let m1 = bpa(&frame, [0.99, 0.01, 0.0]);
        let m2 = bpa(&frame, [0.0, 0.01, 0.99]);
        let fused = dcr_pairwise(&m1, &m2).unwrap();
        assert_eq!(fused.get(FocalSet::singleton(1)), 1.0);
        assert_eq!(fused.support_len(), 1);
    }

    #[test]
    fn vacuous_is_identity() {
        let frame = frame3();
        let m = MassFunction::from_labels(&frame, &[(&["F1"][..], 0.3), (&["F2", "F3"][..], 0.7)]).unwrap();
        let fused = dcr_pairwise(&MassFunction::vacuous(&frame), &m).unwrap();
        for (a, b) in fused.as_vector().iter().zip(m.as_vector()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn total_conflict_is_an_error() {
        let frame = frame3();
        let a = bpa(&frame, [1.0, 0.0, 0.0]);
        let b = bpa(&frame, [0.0, 1.0, 0.0]);
        assert!(dcr_pairwise(&a, &b).unwrap_err().is_total_conflict());
        assert!(same_focal_product(&[a, b]).unwrap_err().is_total_conflict());
    }

    #[test]
    fn nary_dempster_on_example3() {
        let frame = frame3();
        let ev = example3(&frame);
        let m12 = dcr_nary(&ev[..2]).unwrap();
        assert!((m12.get(FocalSet::singleton(0)) - 0.28 / 0.37).abs() < 1e-12);
        let m1234 = dcr_nary(&ev[..4]).unwrap();
        assert!((m1234.get(FocalSet::singleton(0)) - 1.0).abs() < 1e-12);
        assert!(dcr_nary(&ev).unwrap_err().is_total_conflict());
        let single = dcr_nary(&ev[..1]).unwrap();
        assert_eq!(single.as_vector(), ev[0].as_vector());
        assert_eq!(dcr_nary(&[]).unwrap_err(), Error::EmptyEvidence);
    }

    #[test]
    fn yager_on_example3() {
        let frame = frame3();
        let ev = example3(&frame);
        let full = frame.full();
        let y12 = yager_nary(&ev[..2]).unwrap();
        assert!((y12.get(FocalSet::singleton(0)) - 0.28).abs() < 1e-12);
        assert!((y12.get(full) - 0.63).abs() < 1e-12);
        let y123 = yager_nary(&ev[..3]).unwrap();
        assert!((y123.get(FocalSet::singleton(0)) - 0.182).abs() < 1e-12);
        assert_eq!(y123.get(FocalSet::singleton(2)), 0.0);
        let y = yager_nary(&ev).unwrap();
        assert!((y.get(full) - 1.0).abs() < 1e-12);
        assert!(yager_nary(&ev[..1]).is_err());
    }

    #[test]
    fn same_focal_matches_literal_product() {
        let frame = frame3();
        let order = frame.cardinality_order();
        let m = MassFunction::new(
            &frame,
            order.iter().copied().zip([0.375, 0.375, 0.05, 0.05, 0.05, 0.05, 0.05]),
        )
        .unwrap();
        let fused = same_focal_product(&[m.clone(), m.clone()]).unwrap();
        let z = 2.0 * 0.375f64.powi(2) + 5.0 * 0.05f64.powi(2);
        assert!((fused.get(order[0]) - 0.375f64.powi(2) / z).abs() < 1e-12);
        assert!((fused.get(frame.full()) - 0.0025 / z).abs() < 1e-12);
        let single = same_focal_product(std::slice::from_ref(&m)).unwrap();
        for (a, b) in single.as_vector().iter().zip(m.as_vector()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
