//! Accessible HTML renders for scientific papers, plus the measurement
//! machinery around them: PDF accessibility-compliance analytics and the
//! render-quality evaluation harness.

pub mod anchors;
pub mod compliance;
pub mod diagnostics;
pub mod error;
pub mod evaluation;
pub mod html;
pub mod model;
pub mod pipeline;
pub mod stats;
pub mod stitch;

#[cfg(any(test, feature = "fixtures"))]
pub mod fixtures;
