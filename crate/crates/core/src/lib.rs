//! Flute surfaces from Fenchel-Nielsen data: patchwork shear series, divergence
//! criteria and an explicit universal-cover development used to check them.

pub mod criterion;
pub mod error;
pub mod families;
pub mod flute;
pub mod hyp;
pub mod oracle;
pub mod patchwork;
pub mod real;

pub use criterion::{classify, ClassifyOptions, Classification, CriterionReport, Verdict};
pub use error::{FluteError, Result};
pub use flute::{eta_length, FluteSurface, SequenceSpec, Tail};
pub use hyp::{BoundaryPoint, Geodesic, Isometry};
pub use patchwork::{Patchwork, RestrictedPatchwork, USequence};
