//! Harmonic growth spectra, homogeneous harmonic functions and 1-forms, and
//! frequency-function experiments on Riemannian cones C(X) = (0,∞) × X with
//! metric dr² + r² g_X.
//!
//! Cross-sections are round spheres, free cyclic or antipodal sphere
//! quotients, or triangulated surfaces. Fields are finite sums of separable
//! modes, so every radial integral has a closed form.

pub mod corpus;
pub mod cross_section;
pub mod eigen;
pub mod fields;
pub mod frequency;
pub mod error;
pub mod harmonics;
pub mod mesh;
pub mod oracle;
pub mod poly;
pub mod radial;
pub mod realize;
pub mod sparse;
pub mod special;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
