//! Optimal Campanato gauges for fractional Orlicz–Sobolev embeddings.
//!
//! Given a Young function `A`, the crate computes the gauges that govern
//! embeddings of fractional Orlicz–Sobolev spaces into Campanato spaces,
//! decides the integrability conditions behind them, and checks the
//! inequalities numerically on explicit extremal families.
//!
//! Modules:
//! - [`young`]: Young functions, conjugates, generalized inverses, indices.
//! - [`gauges`]: the gauges `φ_{s,A}`, `ψ_{s,A}`, `ψ^k_{s,A}` and verdicts.
//! - [`analysis`]: rearrangements, Luxemburg norms, dual pairings.
//! - [`seminorms`]: Gagliardo modulars and Campanato oscillations.
//! - [`extremals`]: the test families used in sharpness experiments.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod extremals;
pub mod gauges;
pub mod jet;
pub mod numeric;
pub mod poly;
pub mod quad;
pub mod seminorms;
pub mod young;

pub use analysis::{SampledFunction, StepFunction};
pub use error::{Error, Result};
pub use gauges::{ConvergenceVerdict, EmbeddingParams, Gauge, GaugeLabel, Verdict};
pub use seminorms::{BallFamily, ExperimentReport, TestFunction};
pub use young::{Ext, YoungFunction};
