//! Domain types shared by every other module: decision vectors on the
//! monotone cone, points on the probability simplex, base convex losses,
//! admissible task losses and link functions.

pub mod link;
pub mod loss;
pub mod phi;

pub use link::LinkKind;
pub use loss::AdmissibleLoss;
pub use phi::{CustomPhi, PhiKind};

use crate::error::{Error, Result};

/// Absolute tolerance on the simplex sum check.
pub const SIMPLEX_SUM_TOLERANCE: f64 = 1e-12;

/// A point in the monotone cone S of R^{k-1}: components are nondecreasing.
///
/// This is the argument of every surrogate loss. Signed infinities are
/// accepted (they appear as boundary sentinels of closed-form optima);
/// NaN is rejected because it has no order.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector {
    values: Vec<f64>,
}

impl DecisionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDecisionVector);
        }
        for (i, v) in values.iter().enumerate() {
            if v.is_nan() {
                return Err(Error::NonFinite { index: i });
            }
        }
        for i in 0..values.len() - 1 {
            if values[i] > values[i + 1] {
                return Err(Error::NotMonotone {
                    index: i,
                    left: values[i],
                    right: values[i + 1],
                });
            }
        }
        Ok(Self { values })
    }

    /// Number of classes `k` (one more than the component count).
    pub fn k(&self) -> usize {
        self.values.len() + 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The predicted label: one plus the number of strictly negative
    /// components. Components exactly 0 count as nonnegative, so ties at 0
    /// predict the lower label.
    pub fn pred(&self) -> usize {
        1 + self.values.iter().filter(|v| **v < 0.0).count()
    }
}

/// The prediction rule as a free function.
pub fn pred(alpha: &DecisionVector) -> usize {
    alpha.pred()
}

/// A conditional label distribution p in the k-simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    probs: Vec<f64>,
}

impl SimplexPoint {
    /// Validates nonnegativity and that the entries sum to 1 within
    /// [`SIMPLEX_SUM_TOLERANCE`]. Inputs are never renormalized here.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::BadClassCount { k: probs.len() });
        }
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if *p < 0.0 {
                return Err(Error::NegativeProbability { index: i, value: *p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOLERANCE {
            return Err(Error::SimplexSum {
                sum,
                tolerance: SIMPLEX_SUM_TOLERANCE,
            });
        }
        Ok(Self { probs })
    }

    /// Explicit renormalization of a nonnegative vector with positive sum.
    pub fn normalized(mut probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::BadClassCount { k: probs.len() });
        }
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if *p < 0.0 {
                return Err(Error::NegativeProbability { index: i, value: *p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if sum <= 0.0 {
            return Err(Error::UnnormalizableSimplex { sum });
        }
        for p in probs.iter_mut() {
            *p /= sum;
        }
        Ok(Self { probs })
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}
