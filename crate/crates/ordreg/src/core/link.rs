//! Link functions for the cumulative link surrogate.

use super::phi::sigmoid;
use crate::error::{Error, Result};

/// A strictly increasing map from R onto (0, 1) with a known inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    /// sigma(t) = 1 / (1 + e^{-t})
    SigmoidLogit,
    /// The standard normal cumulative distribution.
    GaussianCdf,
}

impl LinkKind {
    pub fn name(&self) -> &'static str {
        match self {
            LinkKind::SigmoidLogit => "logit",
            LinkKind::GaussianCdf => "gaussian",
        }
    }

    /// Forward map sigma.
    pub fn forward(&self, t: f64) -> f64 {
        match self {
            LinkKind::SigmoidLogit => sigmoid(t),
            LinkKind::GaussianCdf => normal_cdf(t),
        }
    }

    /// Inverse map. Returns signed infinities at u = 0 and u = 1; callers
    /// that need finite values clamp their argument first.
    pub fn inverse(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::NonFiniteInput { context: "link_inverse" });
        }
        Ok(match self {
            LinkKind::SigmoidLogit => {
                if u == 0.0 {
                    f64::NEG_INFINITY
                } else if u == 1.0 {
                    f64::INFINITY
                } else {
                    (u / (1.0 - u)).ln()
                }
            }
            LinkKind::GaussianCdf => normal_quantile(u),
        })
    }

    /// Derivative of the forward map.
    pub fn density(&self, t: f64) -> f64 {
        match self {
            LinkKind::SigmoidLogit => {
                let s = sigmoid(t);
                s * (1.0 - s)
            }
            LinkKind::GaussianCdf => normal_pdf(t),
        }
    }

    /// log of the derivative, stable for large |t|.
    pub(crate) fn log_density(&self, t: f64) -> f64 {
        match self {
            LinkKind::SigmoidLogit => {
                // log sigma(t) + log sigma(-t)
                -(super::phi::softplus(-t) + super::phi::softplus(t))
            }
            LinkKind::GaussianCdf => -0.5 * t * t - 0.5 * (2.0 * std::f64::consts::PI).ln(),
        }
    }
}

pub(crate) fn normal_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Phi(t) = erfc(-t / sqrt(2)) / 2.
pub(crate) fn normal_cdf(t: f64) -> f64 {
    0.5 * libm::erfc(-t / std::f64::consts::SQRT_2)
}

/// Inverse standard normal CDF: Acklam's rational approximation (about
/// 1.15e-9 relative error) polished with two Newton steps against the exact
/// CDF, which brings the round-trip error well under 1e-12 on
/// [1e-6, 1 - 1e-6]. Only the sign of the result matters for the
/// consistency characterization of the Gaussian link; the extra accuracy is
/// for the numeric cross-checks.
pub(crate) fn normal_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }

    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const LOW: f64 = 0.02425;

    let mut x = if u < LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if u <= 1.0 - LOW {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - u).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    for _ in 0..2 {
        let err = normal_cdf(x) - u;
        let d = normal_pdf(x);
        if d <= f64::MIN_POSITIVE {
            break;
        }
        x -= err / d;
    }
    x
}
