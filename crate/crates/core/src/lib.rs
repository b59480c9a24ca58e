//! Analytic core of push-grasp-suction picking in cluttered scenes.
//!
//! The crate covers bin-based pose encoding and the reference losses of the
//! prehensile and nonprehensile branches, suction seal scoring, Ferrari-Canny
//! grasp labeling, mean-shift instance clustering of center votes, rule-based
//! push planning, primitive-shape scene synthesis, and a clutter-clearing
//! episode simulator with SR/CR bookkeeping.
//!
//! Data-parallel loops (candidate scoring, mean-shift seeds, multi-seed
//! comparisons) run on rayon when the `parallel` feature is enabled and fall
//! back to plain iterators otherwise. Results never depend on the schedule.

pub mod annotation;
pub mod collision;
pub mod error;
pub mod geometry;
pub mod grasp;
pub mod par;
pub mod policy;
pub mod pose_codec;
pub mod push;
pub mod scene;
pub mod segmentation;
pub mod suction;

pub use error::{Error, Result};
