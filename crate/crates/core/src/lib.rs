//! Spectral Bochner-Riesz laboratory.
//!
//! Model self-adjoint operators with analytic eigendata, their functional
//! calculus, symbol decompositions and norm estimators.

pub mod calculus;
pub mod error;
pub mod estimators;
pub mod field;
pub mod models;
pub mod quadrature;
pub mod space;
pub mod stats;
pub mod symbols;

pub use error::{Error, Result};
pub use field::{CoefficientVector, Field};
pub use models::{ModelKind, ModelSpec, SpectralModel};
pub use space::{Ball, MetricKind, MetricMeasureSpace, Net};
pub use stats::SlopeFit;
pub use symbols::{ArgumentKind, Symbol};
