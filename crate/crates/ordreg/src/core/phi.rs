//! Base convex losses from binary classification.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A user-supplied convex loss with its (sub)derivative.
///
/// At a kink the derivative closure should return a chosen element of the
/// subdifferential; the rest of the crate uses the midpoint convention.
#[derive(Clone)]
pub struct CustomPhi {
    name: &'static str,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    grad: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CustomPhi {
    pub fn new(
        name: &'static str,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name,
            eval: Arc::new(eval),
            grad: Arc::new(grad),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }
}

impl fmt::Debug for CustomPhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPhi").field("name", &self.name).finish()
    }
}

/// The margin losses used as building blocks of the threshold surrogates.
#[derive(Debug, Clone)]
pub enum PhiKind {
    /// max(1 - t, 0)
    Hinge,
    /// max(1 - t, 0)^2
    SquaredHinge,
    /// log(1 + e^{-t})
    Logistic,
    /// e^{-t}
    Exponential,
    /// (1 - t)^2
    Squared,
    Custom(CustomPhi),
}

impl PhiKind {
    /// All five built-in variants, in a stable order.
    pub const BUILTINS: [PhiKind; 5] = [
        PhiKind::Hinge,
        PhiKind::SquaredHinge,
        PhiKind::Logistic,
        PhiKind::Exponential,
        PhiKind::Squared,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PhiKind::Hinge => "hinge",
            PhiKind::SquaredHinge => "squared_hinge",
            PhiKind::Logistic => "logistic",
            PhiKind::Exponential => "exponential",
            PhiKind::Squared => "squared",
            PhiKind::Custom(c) => c.name(),
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, PhiKind::Custom(_))
    }

    /// Whether the loss is differentiable everywhere. The hinge has a kink
    /// at t = 1; custom losses are conservatively treated as kinked.
    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            PhiKind::SquaredHinge | PhiKind::Logistic | PhiKind::Exponential | PhiKind::Squared
        )
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::NonFiniteInput { context: "phi_eval" });
        }
        Ok(match self {
            PhiKind::Hinge => (1.0 - t).max(0.0),
            PhiKind::SquaredHinge => {
                let m = (1.0 - t).max(0.0);
                m * m
            }
            PhiKind::Logistic => softplus(-t),
            PhiKind::Exponential => (-t).exp(),
            PhiKind::Squared => (1.0 - t) * (1.0 - t),
            PhiKind::Custom(c) => (c.eval)(t),
        })
    }

    /// Derivative of the loss. At the hinge kink t = 1 the left derivative
    /// -1 is returned by convention; the kink is never at 0, so consistency
    /// characterizations that look at the derivative at 0 are unaffected.
    pub fn grad(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::NonFiniteInput { context: "phi_grad" });
        }
        Ok(match self {
            PhiKind::Hinge => {
                if t <= 1.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            PhiKind::SquaredHinge => {
                if t < 1.0 {
                    2.0 * (t - 1.0)
                } else {
                    0.0
                }
            }
            PhiKind::Logistic => -sigmoid(-t),
            PhiKind::Exponential => -(-t).exp(),
            PhiKind::Squared => 2.0 * (t - 1.0),
            PhiKind::Custom(c) => (c.grad)(t),
        })
    }
}

/// log(1 + e^x) without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// 1 / (1 + e^{-x}) without overflow.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// The convexity/consistency counterexample phi(t) = max(1 - 2t, 1 - t):
/// convex but kinked at 0, hence inconsistent as a threshold surrogate base.
/// The derivative at the kink is the midpoint of the subdifferential
/// interval [-2, -1].
pub fn kinked_witness() -> PhiKind {
    PhiKind::Custom(CustomPhi::new(
        "kinked",
        |t| (1.0 - 2.0 * t).max(1.0 - t),
        |t| {
            if t < 0.0 {
                -2.0
            } else if t > 0.0 {
                -1.0
            } else {
                -1.5
            }
        },
    ))
}
