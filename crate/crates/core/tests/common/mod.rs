#![allow(dead_code)]

//! Shared generators, a dense brute-force oracle, and property checks.

use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use evidfuse::{
    conflict, credibility_weights, dcr_nary, dcr_pairwise, idcr_fuse, same_focal_product, support_degrees,
    unnormalized_conjunction, weighted_deng_entropy, weighted_deng_entropy_scaled, yager_nary, CombinationMode,
    FocalSet, Frame, MassFunction,
};

pub fn frame(n: usize) -> Arc<Frame> {
    Frame::new((1..=n).map(|i| format!("F{i}"))).unwrap()
}

pub fn bpa(frame: &Arc<Frame>, entries: &[(u32, f64)]) -> MassFunction {
    MassFunction::new(frame, entries.iter().map(|&(b, m)| (FocalSet::from_bits(b), m))).unwrap()
}

pub fn singletons(frame: &Arc<Frame>, row: &[f64]) -> MassFunction {
    MassFunction::new(frame, row.iter().enumerate().map(|(i, &m)| (FocalSet::singleton(i), m))).unwrap()
}

/// Raw nonnegative weights over every nonempty subset; at least one kept.
fn raw_weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    let len = (1usize << n) - 1;
    prop::collection::vec((any::<bool>(), 0.01f64..1.0), len)
        .prop_filter("need one focal element", |v| v.iter().any(|(keep, _)| *keep))
        .prop_map(|v| v.into_iter().map(|(keep, w)| if keep { w } else { 0.0 }).collect())
}

fn to_bpa(frame: &Arc<Frame>, weights: &[f64]) -> MassFunction {
    let total: f64 = weights.iter().sum();
    MassFunction::new(
        frame,
        weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (FocalSet::from_bits(i as u32 + 1), w / total)),
    )
    .unwrap()
}

/// `count` random mass functions over a frame of 2..=4 elements.
pub fn evidence(count: usize) -> impl Strategy<Value = Vec<MassFunction>> {
    (2usize..=4).prop_flat_map(move |n| {
        prop::collection::vec(raw_weights(n), count).prop_map(move |rows| {
            let f = frame(n);
            rows.iter().map(|w| to_bpa(&f, w)).collect()
        })
    })
}

pub fn evidence_between(min: usize, max: usize) -> impl Strategy<Value = Vec<MassFunction>> {
    (min..=max).prop_flat_map(evidence)
}

/// Singleton-only mass functions, `count` of them.
pub fn singleton_evidence(count: usize) -> impl Strategy<Value = Vec<MassFunction>> {
    (2usize..=4).prop_flat_map(move |n| {
        let row = prop::collection::vec((any::<bool>(), 0.01f64..1.0), n)
            .prop_filter("need one", |v| v.iter().any(|(k, _)| *k))
            .prop_map(|v| {
                v.into_iter()
                    .map(|(k, w)| if k { w } else { 0.0 })
                    .collect::<Vec<f64>>()
            });
        prop::collection::vec(row, count).prop_map(move |rows| {
            let f = frame(n);
            rows.iter()
                .map(|r| {
                    let t: f64 = r.iter().sum();
                    singletons(&f, &r.iter().map(|w| w / t).collect::<Vec<_>>())
                })
                .collect()
        })
    })
}

/// Brute-force reference over dense vectors indexed by bit value (index 0
/// is the empty set). Shares no code with the library's sparse paths.
pub mod oracle {
    use super::*;

    pub fn dense(m: &MassFunction) -> Vec<f64> {
        let n = m.frame().cardinality();
        (0..1u32 << n).map(|b| m.get(FocalSet::from_bits(b))).collect()
    }

    pub fn conjunctive(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len()];
        for i in 0..a.len() {
            for j in 0..b.len() {
                out[i & j] += a[i] * b[j];
            }
        }
        out
    }

    pub fn conflict(a: &[f64], b: &[f64]) -> f64 {
        conjunctive(a, b)[0]
    }

    pub fn dempster(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
        let mut q = conjunctive(a, b);
        let k = q[0];
        q[0] = 0.0;
        if 1.0 - k <= 1e-12 {
            return None;
        }
        Some(q.into_iter().map(|v| v / (1.0 - k)).collect())
    }

    pub fn entropy(v: &[f64], frame_size: usize) -> f64 {
        let mut e = 0.0;
        for (bits, &m) in v.iter().enumerate().skip(1) {
            if m > 0.0 {
                let card = (bits as u32).count_ones() as i32;
                e -= card as f64 * m / frame_size as f64 * (m / (2f64.powi(card) - 1.0)).log2();
            }
        }
        e
    }

    pub struct Pipeline {
        pub average: Vec<f64>,
        pub distances: Vec<f64>,
        pub supports: Vec<f64>,
        pub entropies: Vec<f64>,
        pub weights: Vec<f64>,
        pub modified: Vec<f64>,
        pub fused: Vec<f64>,
    }

    /// Straight-line evaluation of the weighted fusion over dense vectors.
    pub fn pipeline(ev: &[Vec<f64>], frame_size: usize, same_focal: bool) -> Pipeline {
        let n = ev.len() as f64;
        let len = ev[0].len();
        let average: Vec<f64> = (0..len).map(|j| ev.iter().map(|m| m[j]).sum::<f64>() / n).collect();
        let distances: Vec<f64> = ev
            .iter()
            .map(|m| (1..len).map(|j| (m[j] - average[j]).powi(2)).sum::<f64>().sqrt())
            .collect();
        let sims: Vec<f64> = distances.iter().map(|d| (1.0 - d).max(0.0)).collect();
        let st: f64 = sims.iter().sum();
        let supports: Vec<f64> = sims.iter().map(|s| s / st).collect();
        let entropies: Vec<f64> = ev.iter().map(|m| entropy(m, frame_size)).collect();
        let raw: Vec<f64> = supports.iter().zip(&entropies).map(|(s, e)| s * e).collect();
        let rt: f64 = raw.iter().sum();
        let weights: Vec<f64> = if rt > 0.0 {
            raw.iter().map(|r| r / rt).collect()
        } else {
            supports.clone()
        };
        let modified: Vec<f64> = (0..len)
            .map(|j| ev.iter().zip(&weights).map(|(m, w)| w * m[j]).sum())
            .collect();
        let fused = if same_focal {
            let p: Vec<f64> = modified.iter().map(|v| v.powi(ev.len() as i32)).collect();
            let t: f64 = p.iter().skip(1).sum();
            p.iter()
                .enumerate()
                .map(|(j, v)| if j == 0 { 0.0 } else { v / t })
                .collect()
        } else {
            let mut acc = modified.clone();
            for _ in 1..ev.len() {
                acc = dempster(&acc, &modified).expect("self-combination never totally conflicts");
            }
            acc
        };
        Pipeline {
            average,
            distances,
            supports,
            entropies,
            weights,
            modified,
            fused,
        }
    }
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.len(), b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        prop_assert!((x - y).abs() <= tol, "coordinate {}: {} vs {} (tol {})", i, x, y, tol);
    }
    Ok(())
}

/// The three stored-mass invariants.
pub fn valid(m: &MassFunction) -> Result<(), TestCaseError> {
    for (set, mass) in m.iter() {
        prop_assert!(!set.is_empty(), "mass on the empty set");
        prop_assert!(mass > 0.0 && mass <= 1.0 + 1e-12, "mass {} out of range", mass);
        prop_assert!(m.frame().contains_set(set));
    }
    prop_assert!((m.total() - 1.0).abs() <= 1e-9, "sum {}", m.total());
    Ok(())
}

fn not_near_total(a: &MassFunction, b: &MassFunction) -> bool {
    conflict(a, b).map(|k| 1.0 - k.value() > 1e-6).unwrap_or(false)
}

// ---- property checks shared by the proptest suite and the acceptance runner

pub fn check_outputs_valid(ev: &[MassFunction]) -> Result<(), TestCaseError> {
    if let Ok(m) = dcr_pairwise(&ev[0], &ev[1]) {
        valid(&m)?;
    }
    if let Ok(m) = dcr_nary(ev) {
        valid(&m)?;
    }
    if let Ok(m) = same_focal_product(ev) {
        valid(&m)?;
    }
    valid(&yager_nary(ev).unwrap())?;
    for mode in [CombinationMode::SameFocal, CombinationMode::Intersection] {
        let r = idcr_fuse(ev, mode).unwrap();
        valid(&r.average)?;
        valid(&r.modified)?;
        valid(&r.fused)?;
        prop_assert!((r.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!((r.supports.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(r.distances.iter().all(|d| *d >= 0.0));
        prop_assert!(r.similarities.iter().all(|s| (0.0..=1.0).contains(s)));
    }
    Ok(())
}

pub fn check_dcr_commutative_associative(ev: &[MassFunction]) -> Result<(), TestCaseError> {
    let (a, b, c) = (&ev[0], &ev[1], &ev[2]);
    if not_near_total(a, b) {
        let ab = dcr_pairwise(a, b).unwrap();
        let ba = dcr_pairwise(b, a).unwrap();
        close(&ab.as_vector(), &ba.as_vector(), 1e-9)?;
        if not_near_total(&ab, c) && not_near_total(b, c) {
            let bc = dcr_pairwise(b, c).unwrap();
            if not_near_total(a, &bc) {
                let left = dcr_pairwise(&ab, c).unwrap();
                let right = dcr_pairwise(a, &bc).unwrap();
                close(&left.as_vector(), &right.as_vector(), 1e-9)?;
            }
        }
    }
    Ok(())
}

pub fn check_vacuous_identity(m: &MassFunction) -> Result<(), TestCaseError> {
    let v = MassFunction::vacuous(m.frame());
    close(&dcr_pairwise(&v, m).unwrap().as_vector(), &m.as_vector(), 1e-12)?;
    close(&dcr_pairwise(m, &v).unwrap().as_vector(), &m.as_vector(), 1e-12)
}

pub fn check_idcr_permutation(ev: &[MassFunction], rotate: usize) -> Result<(), TestCaseError> {
    let mut permuted = ev.to_vec();
    permuted.rotate_left(rotate % ev.len());
    permuted.swap(0, ev.len() - 1);
    for mode in [CombinationMode::SameFocal, CombinationMode::Intersection] {
        let a = idcr_fuse(ev, mode).unwrap().fused;
        let b = idcr_fuse(&permuted, mode).unwrap().fused;
        close(&a.as_vector(), &b.as_vector(), 1e-12)?;
    }
    Ok(())
}

pub fn check_same_focal_equals_dcr(ev: &[MassFunction]) -> Result<(), TestCaseError> {
    match (same_focal_product(ev), dcr_nary(ev)) {
        (Ok(a), Ok(b)) => close(&a.as_vector(), &b.as_vector(), 1e-12),
        (Err(a), Err(b)) => {
            prop_assert!(a.is_total_conflict() && b.is_total_conflict());
            Ok(())
        }
        (a, b) => Err(TestCaseError::fail(format!("disagree: {a:?} vs {b:?}"))),
    }
}

pub fn check_entropy(m: &MassFunction) -> Result<(), TestCaseError> {
    let e = weighted_deng_entropy(m).value();
    prop_assert!(e >= 0.0 && e.is_finite());
    let oracle = oracle::entropy(&oracle::dense(m), m.frame().cardinality());
    prop_assert!((e - oracle).abs() <= 1e-12);
    Ok(())
}

pub fn check_frame_scale_weights(ev: &[MassFunction], other_size: usize) -> Result<(), TestCaseError> {
    let n = ev[0].frame().cardinality();
    let supports = support_degrees(&vec![1.0; ev.len()]);
    let e1: Vec<f64> = ev.iter().map(|m| weighted_deng_entropy_scaled(m, n).value()).collect();
    let e2: Vec<f64> = ev
        .iter()
        .map(|m| weighted_deng_entropy_scaled(m, other_size).value())
        .collect();
    for (a, b) in e1.iter().zip(&e2) {
        prop_assert!((a * n as f64 / other_size as f64 - b).abs() <= 1e-12);
    }
    let w1 = credibility_weights(&supports, &e1).unwrap();
    let w2 = credibility_weights(&supports, &e2).unwrap();
    close(&w1, &w2, 1e-12)
}

pub fn check_yager_conservation(ev: &[MassFunction]) -> Result<(), TestCaseError> {
    let y = yager_nary(ev).unwrap();
    valid(&y)?;
    prop_assert!((y.total() - 1.0).abs() <= 1e-12);
    // ground masses off the full frame equal the raw conjunctive products
    let mut q = oracle::dense(&ev[0]);
    for m in &ev[1..] {
        q = oracle::conjunctive(&q, &oracle::dense(m));
    }
    let full = y.frame().full();
    for (bits, &expected) in q.iter().enumerate().skip(1) {
        let set = FocalSet::from_bits(bits as u32);
        if set != full {
            prop_assert!((y.get(set) - expected).abs() <= 1e-12);
        }
    }
    prop_assert!((y.get(full) - q[full.bits() as usize] - q[0]).abs() <= 1e-12);
    Ok(())
}

pub fn check_conflict_conservation(a: &MassFunction, b: &MassFunction) -> Result<(), TestCaseError> {
    let k = conflict(a, b).unwrap().value();
    let sums = unnormalized_conjunction(a, b).unwrap();
    let numerators: f64 = sums.iter().filter(|(s, _)| !s.is_empty()).map(|(_, v)| v).sum();
    prop_assert!((k + numerators - 1.0).abs() <= 1e-12);
    prop_assert!((k - oracle::conflict(&oracle::dense(a), &oracle::dense(b))).abs() <= 1e-12);
    Ok(())
}
