//! Weighted Deng entropy.
//!
//! Each focal term is scaled by the relative size `|F| / |χ|` of the focal
//! element and its mass is spread over the `2^|F| - 1` nonempty subsets:
//!
//! ```text
//! E_wd(m) = -Σ_F (|F| m(F) / |χ|) log2(m(F) / (2^|F| - 1))
//! ```
//!
//! The sum runs over the support only, so `0 log 0` never arises.

use crate::evidence::MassFunction;

/// Entropy in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyValue(f64);

impl EntropyValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<EntropyValue> for f64 {
    fn from(e: EntropyValue) -> f64 {
        e.0
    }
}

pub fn weighted_deng_entropy(m: &MassFunction) -> EntropyValue {
    weighted_deng_entropy_scaled(m, m.frame().cardinality())
}

/// Same as [`weighted_deng_entropy`] with an explicit frame size `|χ|`.
pub fn weighted_deng_entropy_scaled(m: &MassFunction, frame_size: usize) -> EntropyValue {
    assert!(frame_size > 0, "frame size must be positive");
    let scale = frame_size as f64;
    let sum: f64 = m
        .iter()
        .map(|(set, mass)| {
            let card = set.cardinality();
            let spread = ((1u64 << card) - 1) as f64;
            -(card as f64 * mass / scale) * (mass / spread).log2()
        })
        .sum();
    // every term is >= 0; clamp the -0.0 of a categorical singleton
    EntropyValue(sum.max(0.0))
}
