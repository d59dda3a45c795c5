//! The five surrogate families: all threshold (AT), immediate threshold
//! (IT), cumulative link (CL), least absolute deviation (LAD) and the
//! generalized all threshold (GAT) built from an admissible loss.
//!
//! AT and IT are written out directly from their defining sums; GAT goes
//! through the increment coefficients. That the GAT reductions (absolute
//! increments -> AT, zero-one increments -> IT) coincide with the direct
//! forms is therefore a real test, not a tautology.

use crate::core::{AdmissibleLoss, DecisionVector, LinkKind, PhiKind};
use crate::error::{Error, Result};

/// Likelihood floor below which the cumulative link loss is treated as a
/// domain error rather than returning log of a denormal or of zero.
pub const CL_LIKELIHOOD_FLOOR: f64 = 1e-300;

/// Which surrogate family, with its base loss or link.
#[derive(Debug, Clone)]
pub enum Family {
    AllThreshold(PhiKind),
    ImmediateThreshold(PhiKind),
    CumulativeLink(LinkKind),
    LeastAbsoluteDeviation,
    GeneralizedAllThreshold(PhiKind, AdmissibleLoss),
}

/// A surrogate family instantiated for k classes.
#[derive(Debug, Clone)]
pub struct SurrogateSpec {
    family: Family,
    k: usize,
}

impl SurrogateSpec {
    pub fn new(family: Family, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadClassCount { k });
        }
        if let Family::GeneralizedAllThreshold(_, loss) = &family {
            if loss.k() != k {
                return Err(Error::DimensionMismatch {
                    context: "gat loss class count",
                    expected: k,
                    actual: loss.k(),
                });
            }
        }
        Ok(Self { family, k })
    }

    pub fn at(phi: PhiKind, k: usize) -> Result<Self> {
        Self::new(Family::AllThreshold(phi), k)
    }

    pub fn it(phi: PhiKind, k: usize) -> Result<Self> {
        Self::new(Family::ImmediateThreshold(phi), k)
    }

    pub fn cl(link: LinkKind, k: usize) -> Result<Self> {
        Self::new(Family::CumulativeLink(link), k)
    }

    pub fn lad(k: usize) -> Result<Self> {
        Self::new(Family::LeastAbsoluteDeviation, k)
    }

    pub fn gat(phi: PhiKind, loss: AdmissibleLoss) -> Result<Self> {
        let k = loss.k();
        Self::new(Family::GeneralizedAllThreshold(phi, loss), k)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> String {
        match &self.family {
            Family::AllThreshold(phi) => format!("at({})", phi.name()),
            Family::ImmediateThreshold(phi) => format!("it({})", phi.name()),
            Family::CumulativeLink(link) => format!("cl({})", link.name()),
            Family::LeastAbsoluteDeviation => "lad".to_string(),
            Family::GeneralizedAllThreshold(phi, loss) => {
                format!("gat({}, {})", phi.name(), loss.name())
            }
        }
    }

    /// The task loss this surrogate targets: absolute error for AT, CL and
    /// LAD, classification error for IT, and the carried loss for GAT.
    pub fn target_loss(&self) -> AdmissibleLoss {
        match &self.family {
            Family::AllThreshold(_)
            | Family::CumulativeLink(_)
            | Family::LeastAbsoluteDeviation => {
                AdmissibleLoss::absolute(self.k).expect("k validated at construction")
            }
            Family::ImmediateThreshold(_) => {
                AdmissibleLoss::zero_one(self.k).expect("k validated at construction")
            }
            Family::GeneralizedAllThreshold(_, loss) => loss.clone(),
        }
    }

    /// Whether the map alpha -> psi(y, alpha) is differentiable wherever it
    /// is finite.
    pub fn is_smooth(&self) -> bool {
        match &self.family {
            Family::AllThreshold(phi)
            | Family::ImmediateThreshold(phi)
            | Family::GeneralizedAllThreshold(phi, _) => phi.is_smooth(),
            Family::CumulativeLink(_) => true,
            Family::LeastAbsoluteDeviation => false,
        }
    }

    /// psi(y, alpha).
    pub fn eval(&self, y: usize, alpha: &DecisionVector) -> Result<f64> {
        self.check_args(y, alpha)?;
        self.eval_raw(y, alpha.values())
    }

    /// Evaluation on a bare slice, used by the optimizers whose intermediate
    /// points (separable 1-D block solves) need not be monotone. The
    /// formulas themselves never require monotonicity.
    pub(crate) fn eval_raw(&self, y: usize, a: &[f64]) -> Result<f64> {
        debug_assert_eq!(a.len() + 1, self.k);
        let k = self.k;
        match &self.family {
            Family::AllThreshold(phi) => {
                let mut total = 0.0;
                for &ai in &a[..y - 1] {
                    total += phi.eval(-ai)?;
                }
                for &ai in &a[y - 1..] {
                    total += phi.eval(ai)?;
                }
                Ok(total)
            }
            Family::ImmediateThreshold(phi) => {
                if y == 1 {
                    phi.eval(a[0])
                } else if y == k {
                    phi.eval(-a[k - 2])
                } else {
                    Ok(phi.eval(-a[y - 2])? + phi.eval(a[y - 1])?)
                }
            }
            Family::CumulativeLink(link) => cl_eval(*link, y, a, k),
            Family::LeastAbsoluteDeviation => Ok((y as f64 + a[0] - 1.5).abs()),
            Family::GeneralizedAllThreshold(phi, loss) => {
                let c = loss.cost_coeffs();
                let mut total = 0.0;
                for i in 1..y {
                    total += c[y - i - 1] * phi.eval(-a[i - 1])?;
                }
                for i in y..k {
                    total += c[i - y] * phi.eval(a[i - 1])?;
                }
                Ok(total)
            }
        }
    }

    /// Gradient of psi(y, .) with respect to alpha. Components the loss does
    /// not touch are 0; at kinks the midpoint of the subdifferential is
    /// returned (the hinge keeps its own left-derivative convention at its
    /// kink, which sits at +-1, never at 0).
    pub fn grad(&self, y: usize, alpha: &DecisionVector) -> Result<Vec<f64>> {
        self.check_args(y, alpha)?;
        let mut g = vec![0.0; self.k - 1];
        self.grad_raw_into(y, alpha.values(), &mut g)?;
        Ok(g)
    }

    pub(crate) fn grad_raw_into(&self, y: usize, a: &[f64], g: &mut [f64]) -> Result<()> {
        debug_assert_eq!(a.len() + 1, self.k);
        let k = self.k;
        g.fill(0.0);
        match &self.family {
            Family::AllThreshold(phi) => {
                for i in 0..y - 1 {
                    g[i] = -phi.grad(-a[i])?;
                }
                for i in y - 1..k - 1 {
                    g[i] = phi.grad(a[i])?;
                }
            }
            Family::ImmediateThreshold(phi) => {
                if y == 1 {
                    g[0] = phi.grad(a[0])?;
                } else if y == k {
                    g[k - 2] = -phi.grad(-a[k - 2])?;
                } else {
                    g[y - 2] = -phi.grad(-a[y - 2])?;
                    g[y - 1] = phi.grad(a[y - 1])?;
                }
            }
            Family::CumulativeLink(link) => cl_grad(*link, y, a, k, g)?,
            Family::LeastAbsoluteDeviation => {
                let r = y as f64 + a[0] - 1.5;
                g[0] = if r > 0.0 {
                    1.0
                } else if r < 0.0 {
                    -1.0
                } else {
                    0.0
                };
            }
            Family::GeneralizedAllThreshold(phi, loss) => {
                let c = loss.cost_coeffs();
                for i in 1..y {
                    g[i - 1] = -c[y - i - 1] * phi.grad(-a[i - 1])?;
                }
                for i in y..k {
                    g[i - 1] = c[i - y] * phi.grad(a[i - 1])?;
                }
            }
        }
        Ok(())
    }

    fn check_args(&self, y: usize, alpha: &DecisionVector) -> Result<()> {
        if y < 1 || y > self.k {
            return Err(Error::LabelOutOfRange { label: y, k: self.k });
        }
        if alpha.k() != self.k {
            return Err(Error::DimensionMismatch {
                context: "surrogate_eval",
                expected: self.k - 1,
                actual: alpha.k() - 1,
            });
        }
        Ok(())
    }
}

/// Cumulative link negative log likelihood.
///
/// Middle classes need log(sigma(a_y) - sigma(a_{y-1})). Direct subtraction
/// of sigmoids loses every significant digit once the gap drops below about
/// 1e-8, so the logit case is computed from the factorization
/// sigma(b) - sigma(a) = sigma(b) (1 - sigma(a)) (1 - e^{a-b}) entirely in
/// log space.
fn cl_eval(link: LinkKind, y: usize, a: &[f64], k: usize) -> Result<f64> {
    let ln_floor = CL_LIKELIHOOD_FLOOR.ln();
    let log_lik = if y == 1 {
        log_link(link, a[0])
    } else if y == k {
        log_link_complement(link, a[k - 2])
    } else {
        let lo = a[y - 2];
        let hi = a[y - 1];
        if hi <= lo {
            return Err(Error::CumulativeLinkDomain {
                label: y,
                floor: CL_LIKELIHOOD_FLOOR,
            });
        }
        match link {
            LinkKind::SigmoidLogit => {
                let tail = -(-(lo - hi).exp_m1()).ln(); // -log(1 - e^{lo-hi})
                -(crate::core::phi::softplus(-hi) + crate::core::phi::softplus(lo) + tail)
            }
            LinkKind::GaussianCdf => {
                let diff = 0.5
                    * (libm::erfc(lo / std::f64::consts::SQRT_2)
                        - libm::erfc(hi / std::f64::consts::SQRT_2));
                if diff <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    diff.ln()
                }
            }
        }
    };
    if log_lik < ln_floor || !log_lik.is_finite() {
        return Err(Error::CumulativeLinkDomain {
            label: y,
            floor: CL_LIKELIHOOD_FLOOR,
        });
    }
    Ok(-log_lik)
}

fn cl_grad(link: LinkKind, y: usize, a: &[f64], k: usize, g: &mut [f64]) -> Result<()> {
    // Gradient of -log likelihood; shares the stable log-likelihood pieces.
    if y == 1 {
        let ll = log_link(link, a[0]);
        check_floor(ll, y)?;
        g[0] = -(link.log_density(a[0]) - ll).exp();
    } else if y == k {
        let ll = log_link_complement(link, a[k - 2]);
        check_floor(ll, y)?;
        g[k - 2] = (link.log_density(a[k - 2]) - ll).exp();
    } else {
        let lo = a[y - 2];
        let hi = a[y - 1];
        if hi <= lo {
            return Err(Error::CumulativeLinkDomain {
                label: y,
                floor: CL_LIKELIHOOD_FLOOR,
            });
        }
        let ll = match link {
            LinkKind::SigmoidLogit => {
                let tail = -(-(lo - hi).exp_m1()).ln();
                -(crate::core::phi::softplus(-hi) + crate::core::phi::softplus(lo) + tail)
            }
            LinkKind::GaussianCdf => {
                let diff = 0.5
                    * (libm::erfc(lo / std::f64::consts::SQRT_2)
                        - libm::erfc(hi / std::f64::consts::SQRT_2));
                if diff <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    diff.ln()
                }
            }
        };
        check_floor(ll, y)?;
        g[y - 2] = (link.log_density(lo) - ll).exp();
        g[y - 1] = -(link.log_density(hi) - ll).exp();
    }
    Ok(())
}

fn check_floor(log_lik: f64, y: usize) -> Result<()> {
    if log_lik < CL_LIKELIHOOD_FLOOR.ln() || !log_lik.is_finite() {
        return Err(Error::CumulativeLinkDomain {
            label: y,
            floor: CL_LIKELIHOOD_FLOOR,
        });
    }
    Ok(())
}

fn log_link(link: LinkKind, t: f64) -> f64 {
    match link {
        LinkKind::SigmoidLogit => -crate::core::phi::softplus(-t),
        LinkKind::GaussianCdf => {
            let v = 0.5 * libm::erfc(-t / std::f64::consts::SQRT_2);
            if v <= 0.0 {
                f64::NEG_INFINITY
            } else {
                v.ln()
            }
        }
    }
}

fn log_link_complement(link: LinkKind, t: f64) -> f64 {
    match link {
        LinkKind::SigmoidLogit => -crate::core::phi::softplus(t),
        LinkKind::GaussianCdf => {
            let v = 0.5 * libm::erfc(t / std::f64::consts::SQRT_2);
            if v <= 0.0 {
                f64::NEG_INFINITY
            } else {
                v.ln()
            }
        }
    }
}

/// The regression-to-threshold change of variables alpha_i = i + 1/2 - beta.
/// Predicting on the transformed vector is round-half-down rounding of beta,
/// clipped to 1..=k.
pub fn lad_transform(beta: f64, k: usize) -> Result<DecisionVector> {
    if k < 2 {
        return Err(Error::BadClassCount { k });
    }
    if !beta.is_finite() {
        return Err(Error::NonFiniteInput { context: "lad_transform" });
    }
    let values = (1..k).map(|i| i as f64 + 0.5 - beta).collect();
    DecisionVector::new(values)
}

/// The per-index weights the GAT surrogate puts on phi(-alpha_i) and
/// phi(alpha_i) for a given true label. Index i runs over 1..k-1 (0-based
/// here); used by the reduction-identity tests.
pub fn gat_term_weights(loss: &AdmissibleLoss, y: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = loss.k();
    if y < 1 || y > k {
        return Err(Error::LabelOutOfRange { label: y, k });
    }
    let c = loss.cost_coeffs();
    let mut neg = vec![0.0; k - 1];
    let mut pos = vec![0.0; k - 1];
    for i in 1..y {
        neg[i - 1] = c[y - i - 1];
    }
    for i in y..k {
        pos[i - 1] = c[i - y];
    }
    Ok((neg, pos))
}
