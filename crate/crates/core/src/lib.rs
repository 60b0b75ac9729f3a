//! Gait features from annotated walking videos and fall/no-fall
//! classification.
//!
//! [`geometry`] rectifies image points to a ground-plane top view and a
//! per-walk side view, [`signal`] smooths tracks, [`gait`] extracts average
//! stride length `L` and head-motion range `H`, [`classify`] evaluates
//! linear SVM and kNN by leave-one-out, and [`pipeline`] handles files.

pub mod classify;
pub mod gait;
pub mod geometry;
pub mod pipeline;
pub mod signal;
pub mod synth;
