//! Core library (incremental build in progress).

pub mod distorder;
pub mod error;
pub mod rng;
pub mod specfun;
pub mod spectral;
pub mod subord;

mod accum;
mod quad;
mod relax;

pub use distorder::{DensityKind, EigenSolution, MeasureDiagnostics, OrderMeasure};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use specfun::MlQuery;
pub use spectral::{BoxDomain, InitialData, ModeIndex, SpectralCoefficients};
pub use subord::{SampleSummary, StableIndex};
