//! Dempster–Shafer evidence fusion.
//!
//! The crate provides validated mass functions over small frames of
//! discernment, the classical Dempster and Yager combination rules, an
//! improved combination that weights each source by its agreement with the
//! others and its weighted Deng entropy, and a multisensor fault-diagnosis
//! chain built on top of it.
//!
//! ```
//! use evidfuse::{idcr_fuse, CombinationMode, EvidenceSet, FocalSet, Frame, MassFunction};
//!
//! let frame = Frame::new(["F1", "F2", "F3"]).unwrap();
//! let m1 = MassFunction::from_labels(&frame, &[(&["F1"][..], 0.99), (&["F2"][..], 0.01)]).unwrap();
//! let m2 = MassFunction::from_labels(&frame, &[(&["F2"][..], 0.01), (&["F3"][..], 0.99)]).unwrap();
//! let evidence = EvidenceSet::new(vec![m1, m2]).unwrap();
//!
//! let report = idcr_fuse(&evidence, CombinationMode::SameFocal).unwrap();
//! assert!((report.fused.get(FocalSet::singleton(0)) - 0.4999).abs() < 1e-4);
//! ```

pub mod combination;
pub mod datasets;
pub mod diagnosis;
pub mod entropy;
pub mod error;
pub mod evidence;
pub mod idcr;
pub mod io;
pub mod reproduce;

pub use combination::{
    conflict, dcr_nary, dcr_pairwise, same_focal_product, unnormalized_conjunction, yager_nary, ConflictCoefficient,
};
pub use diagnosis::{
    bpa_from_features, decide, diagnose, feature_distance, Decision, Diagnosis, FeatureVector, Outcome,
    ReferenceLibrary,
};
pub use entropy::{weighted_deng_entropy, weighted_deng_entropy_scaled, EntropyValue};
pub use error::{Error, Result};
pub use evidence::{EvidenceSet, FocalSet, Frame, MassFunction};
pub use idcr::{
    average_bpa, credibility_weights, distance_to_average, idcr_fuse, modified_bpa, similarity, support_degrees,
    CombinationMode, FusionReport,
};
