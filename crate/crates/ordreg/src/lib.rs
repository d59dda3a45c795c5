//! Ordinal regression surrogate losses and their consistency machinery.
//!
//! The crate covers the pointwise theory end to end:
//!
//! - [`core`]: decision vectors on the monotone cone, simplex points, the
//!   prediction rule, base convex losses, admissible task losses and link
//!   functions.
//! - [`surrogates`]: the AT, IT, CL, LAD and GAT surrogate families with
//!   analytic gradients.
//! - [`risk`]: conditional risks, Bayes oracles, closed-form surrogate
//!   minimizers, the gamma-transform, excess-risk formulas and bounds,
//!   odds ratios and synthetic populations.
//! - [`optim`]: projection onto the monotone cone (pool adjacent
//!   violators), projected-gradient minimization of conditional risks, and
//!   trainers for linear threshold models and the least-squares baseline.
//! - [`consistency`]: exhaustive simplex-grid sweeps that measure the worst
//!   excess risk of a surrogate's minimizers.
//! - [`bench`](crate::bench): dataset ingestion, equal-frequency binning, seeded paired
//!   cross-validation, the Wilcoxon signed-rank test and CSV reports.
//!
//! Everything is a pure function over immutable values; all entry points
//! are safe for concurrent use.

pub mod bench;
pub mod consistency;
pub mod core;
mod error;
pub mod optim;
pub mod risk;
pub mod surrogates;

pub use error::{Error, Result};
