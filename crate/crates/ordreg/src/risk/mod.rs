//! Conditional risks, Bayes oracles, closed-form surrogate minimizers,
//! the gamma-transform, excess-risk formulas and bounds, and odds ratios.

pub mod grid;

use std::collections::BTreeSet;

use crate::core::{AdmissibleLoss, DecisionVector, PhiKind, SimplexPoint};
use crate::error::{Error, Result};
use crate::optim::{minimize_scalar_convex, OptimConfig};
use crate::surrogates::{Family, SurrogateSpec};

/// Tie tolerance when collecting the set of risk-minimizing labels. Risks of
/// tied labels are computed along different summation orders, so exact
/// equality would be fragile; anything this close to the minimum counts as
/// attaining it.
pub const BAYES_TIE_TOLERANCE: f64 = 1e-12;

/// Plain cumulative probabilities u_i(p) = p_1 + ... + p_i, i = 1..k-1.
pub fn cumulative_u(p: &SimplexPoint) -> Vec<f64> {
    let probs = p.probs();
    let mut out = Vec::with_capacity(probs.len() - 1);
    let mut acc = 0.0;
    for &pi in &probs[..probs.len() - 1] {
        acc += pi;
        out.push(acc);
    }
    out
}

/// Generalized cumulative weights for an admissible loss with increments c:
/// u_i = sum_{j<=i} p_j c_{i-j+1} and v_i = sum_{j>i} p_j c_{j-i}.
/// With absolute-error increments u reduces to the plain cumulative sums
/// and v to their complements.
pub fn uv_general(coeffs: &[f64], p: &SimplexPoint) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = p.k();
    if coeffs.len() != k - 1 {
        return Err(Error::DimensionMismatch {
            context: "uv_general",
            expected: k - 1,
            actual: coeffs.len(),
        });
    }
    let probs = p.probs();
    let mut u = vec![0.0; k - 1];
    let mut v = vec![0.0; k - 1];
    for i in 1..k {
        let mut ui = 0.0;
        for j in 1..=i {
            ui += probs[j - 1] * coeffs[i - j];
        }
        let mut vi = 0.0;
        for j in (i + 1)..=k {
            vi += probs[j - 1] * coeffs[j - i - 1];
        }
        u[i - 1] = ui;
        v[i - 1] = vi;
    }
    Ok((u, v))
}

/// L(alpha, p) = sum_i p_i l(i, alpha).
pub fn conditional_risk(
    loss: &AdmissibleLoss,
    alpha: &DecisionVector,
    p: &SimplexPoint,
) -> Result<f64> {
    check_dims(loss.k(), alpha, p)?;
    let mut total = 0.0;
    for (i, &pi) in p.probs().iter().enumerate() {
        total += pi * loss.eval(i + 1, alpha)?;
    }
    Ok(total)
}

/// The absolute-error conditional risk through the cumulative probabilities:
/// L = sum_{i<r} u_i + sum_{i>=r} (1 - u_i) with r = pred(alpha).
pub fn absolute_risk_from_cumulative(alpha: &DecisionVector, p: &SimplexPoint) -> Result<f64> {
    if alpha.k() != p.k() {
        return Err(Error::DimensionMismatch {
            context: "absolute_risk_from_cumulative",
            expected: p.k() - 1,
            actual: alpha.k() - 1,
        });
    }
    let u = cumulative_u(p);
    let r = alpha.pred();
    let below: f64 = u[..r - 1].iter().sum();
    let above: f64 = u[r - 1..].iter().map(|ui| 1.0 - ui).sum();
    Ok(below + above)
}

/// A(alpha, p) = sum_i p_i psi(i, alpha). Classes with zero probability are
/// skipped, so a cumulative link term that is infinite on a zero-probability
/// class does not poison the sum (the usual 0 * inf = 0 convention for
/// expected losses).
pub fn surrogate_conditional_risk(
    spec: &SurrogateSpec,
    alpha: &DecisionVector,
    p: &SimplexPoint,
) -> Result<f64> {
    check_dims(spec.k(), alpha, p)?;
    surrogate_conditional_risk_raw(spec, alpha.values(), p)
}

pub(crate) fn surrogate_conditional_risk_raw(
    spec: &SurrogateSpec,
    alpha: &[f64],
    p: &SimplexPoint,
) -> Result<f64> {
    let mut total = 0.0;
    for (i, &pi) in p.probs().iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        total += pi * spec.eval_raw(i + 1, alpha)?;
    }
    Ok(total)
}

/// Gradient of A(., p) at alpha, with the same zero-probability skipping.
pub fn surrogate_conditional_grad(
    spec: &SurrogateSpec,
    alpha: &DecisionVector,
    p: &SimplexPoint,
) -> Result<Vec<f64>> {
    check_dims(spec.k(), alpha, p)?;
    surrogate_conditional_grad_raw(spec, alpha.values(), p)
}

pub(crate) fn surrogate_conditional_grad_raw(
    spec: &SurrogateSpec,
    alpha: &[f64],
    p: &SimplexPoint,
) -> Result<Vec<f64>> {
    let mut total = vec![0.0; spec.k() - 1];
    let mut work = vec![0.0; spec.k() - 1];
    for (i, &pi) in p.probs().iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        spec.grad_raw_into(i + 1, alpha, &mut work)?;
        for (t, gi) in total.iter_mut().zip(&work) {
            *t += pi * gi;
        }
    }
    Ok(total)
}

/// The binary-classification conditional risk C(beta, q) = q phi(beta)
/// + (1 - q) phi(-beta).
pub fn binary_conditional_risk(phi: &PhiKind, beta: f64, q: f64) -> Result<f64> {
    Ok(q * phi.eval(beta)? + (1.0 - q) * phi.eval(-beta)?)
}

/// C*(q) = inf_beta C(beta, q), in closed form for the built-in losses and
/// by scalar minimization for custom ones.
pub fn binary_optimal_risk(phi: &PhiKind, q: f64) -> Result<f64> {
    Ok(match phi {
        PhiKind::Hinge => 1.0 - (2.0 * q - 1.0).abs(),
        PhiKind::SquaredHinge | PhiKind::Squared => 4.0 * q * (1.0 - q),
        PhiKind::Logistic => binary_entropy(q),
        PhiKind::Exponential => 2.0 * (q * (1.0 - q)).sqrt(),
        PhiKind::Custom(_) => {
            let f = |beta: f64| {
                binary_conditional_risk(phi, beta, q).unwrap_or(f64::INFINITY)
            };
            minimize_scalar_convex(f, 1e-12).1
        }
    })
}

/// -q ln q - (1-q) ln(1-q), with the 0 ln 0 = 0 convention.
pub fn binary_entropy(q: f64) -> f64 {
    let part = |t: f64| if t > 0.0 { -t * t.ln() } else { 0.0 };
    part(q) + part(1.0 - q)
}

/// The all-threshold conditional risk written as a sum of binary risks,
/// sum_i C(alpha_i, u_i(p)). An independent route used to cross-check
/// [`surrogate_conditional_risk`].
pub fn at_risk_from_binary(
    phi: &PhiKind,
    alpha: &DecisionVector,
    p: &SimplexPoint,
) -> Result<f64> {
    if alpha.k() != p.k() {
        return Err(Error::DimensionMismatch {
            context: "at_risk_from_binary",
            expected: p.k() - 1,
            actual: alpha.k() - 1,
        });
    }
    let u = cumulative_u(p);
    let mut total = 0.0;
    for (ai, ui) in alpha.values().iter().zip(u) {
        total += binary_conditional_risk(phi, *ai, ui)?;
    }
    Ok(total)
}

/// The absolute-error Bayes decision vector (2u_1 - 1, ..., 2u_{k-1} - 1).
/// Monotone by construction because u is nondecreasing.
pub fn bayes_alpha(p: &SimplexPoint) -> DecisionVector {
    let values = cumulative_u(p).iter().map(|u| 2.0 * u - 1.0).collect();
    DecisionVector::new(values).expect("cumulative sums are nondecreasing")
}

/// Brute-force oracle: all labels minimizing the conditional risk
/// sum_i p_i g(|i - r|), within [`BAYES_TIE_TOLERANCE`] of the minimum.
/// Ground truth for every consistency test in the crate.
pub fn bayes_label_set(loss: &AdmissibleLoss, p: &SimplexPoint) -> Result<BTreeSet<usize>> {
    let risks = label_risks(loss, p)?;
    let min = risks.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(risks
        .iter()
        .enumerate()
        .filter(|(_, risk)| **risk <= min + BAYES_TIE_TOLERANCE)
        .map(|(i, _)| i + 1)
        .collect())
}

/// The optimal conditional risk L*(p) by brute force over labels.
pub fn optimal_risk(loss: &AdmissibleLoss, p: &SimplexPoint) -> Result<f64> {
    let risks = label_risks(loss, p)?;
    Ok(risks.iter().cloned().fold(f64::INFINITY, f64::min))
}

fn label_risks(loss: &AdmissibleLoss, p: &SimplexPoint) -> Result<Vec<f64>> {
    let k = loss.k();
    if p.k() != k {
        return Err(Error::DimensionMismatch {
            context: "bayes_label_set",
            expected: k,
            actual: p.k(),
        });
    }
    let probs = p.probs();
    Ok((1..=k)
        .map(|r| {
            probs
                .iter()
                .enumerate()
                .map(|(i, pi)| pi * loss.g((i + 1).abs_diff(r)))
                .sum()
        })
        .collect())
}

/// A closed-form surrogate optimum. `alpha` may contain signed infinities
/// when some cumulative probability sits at 0 or 1 and the per-coordinate
/// formula is logarithmic; `at_boundary` flags that case so numeric callers
/// know to clamp.
#[derive(Debug, Clone)]
pub struct ClosedFormOptimum {
    pub alpha: DecisionVector,
    pub a_star: f64,
    pub at_boundary: bool,
}

/// The closed-form minimizers of the AT conditional risk (one per built-in
/// phi) and of the cumulative link risk (inverse link of the cumulative
/// probabilities, with A* the label entropy).
pub fn closed_form_minimizer(family: &Family, p: &SimplexPoint) -> Result<ClosedFormOptimum> {
    let u = cumulative_u(p);
    let (alpha, a_star) = match family {
        Family::AllThreshold(phi) => {
            let alpha: Vec<f64> = match phi {
                PhiKind::Hinge => u.iter().map(|&ui| plain_sign(2.0 * ui - 1.0)).collect(),
                PhiKind::SquaredHinge | PhiKind::Squared => {
                    u.iter().map(|&ui| 2.0 * ui - 1.0).collect()
                }
                PhiKind::Logistic => u.iter().map(|&ui| logit(ui)).collect(),
                PhiKind::Exponential => u.iter().map(|&ui| 0.5 * logit(ui)).collect(),
                PhiKind::Custom(_) => {
                    return Err(Error::UnsupportedPhi {
                        context: "closed_form_minimizer",
                    })
                }
            };
            let mut a_star = 0.0;
            for &ui in &u {
                a_star += binary_optimal_risk(phi, ui)?;
            }
            (alpha, a_star)
        }
        Family::CumulativeLink(link) => {
            let alpha = u
                .iter()
                .map(|&ui| link.inverse(ui))
                .collect::<Result<Vec<f64>>>()?;
            let a_star = -p
                .probs()
                .iter()
                .map(|&pi| if pi > 0.0 { pi * pi.ln() } else { 0.0 })
                .sum::<f64>();
            (alpha, a_star)
        }
        _ => {
            return Err(Error::UnsupportedFamily {
                context: "closed_form_minimizer",
            })
        }
    };
    let at_boundary = alpha.iter().any(|v| !v.is_finite());
    Ok(ClosedFormOptimum {
        alpha: DecisionVector::new(alpha)?,
        a_star,
        at_boundary,
    })
}

fn plain_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn logit(u: f64) -> f64 {
    if u <= 0.0 {
        f64::NEG_INFINITY
    } else if u >= 1.0 {
        f64::INFINITY
    } else {
        (u / (1.0 - u)).ln()
    }
}

/// The calibration function gamma appearing in the excess-risk bound,
/// gamma(theta) = phi(0) - C*((1 + theta) / 2), in its published per-phi
/// form. For the hinge, squared hinge, exponential and squared losses the
/// published form is exactly the defining expression; for the logistic loss
/// it is the quadratic lower bound theta^2 / 2, which keeps the bound valid
/// while being slightly looser than the entropy expression. Custom losses
/// fall back to the defining expression with a numeric C*.
pub fn gamma_transform(phi: &PhiKind, theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFiniteInput {
            context: "gamma_transform",
        });
    }
    Ok(match phi {
        PhiKind::Hinge => theta.abs(),
        PhiKind::SquaredHinge | PhiKind::Squared => theta * theta,
        PhiKind::Logistic => theta * theta / 2.0,
        PhiKind::Exponential => 1.0 - (1.0 - theta * theta).max(0.0).sqrt(),
        PhiKind::Custom(_) => {
            phi.eval(0.0)? - binary_optimal_risk(phi, (1.0 + theta) / 2.0)?
        }
    })
}

/// Excess conditional risk L(alpha, p) - L*(p) through the generalized
/// cumulative weights: the sum of (v_i - u_i) between the prediction and a
/// Bayes label. For the absolute error this is the classic sum of
/// |2 u_i - 1| over sign disagreements. Agrees with the brute-force risk
/// difference to within floating-point noise.
pub fn excess_risk(
    loss: &AdmissibleLoss,
    alpha: &DecisionVector,
    p: &SimplexPoint,
) -> Result<f64> {
    check_dims(loss.k(), alpha, p)?;
    let r = alpha.pred();
    let bayes = bayes_label_set(loss, p)?;
    if bayes.contains(&r) {
        return Ok(0.0);
    }
    // nearest Bayes label; ties toward the smaller one
    let r_star = *bayes
        .iter()
        .min_by_key(|b| (b.abs_diff(r), **b))
        .expect("bayes set is nonempty");
    let (u, v) = uv_general(loss.cost_coeffs(), p)?;
    let excess = if r < r_star {
        (r..r_star).map(|i| v[i - 1] - u[i - 1]).sum()
    } else {
        (r_star..r).map(|i| u[i - 1] - v[i - 1]).sum()
    };
    Ok(excess)
}

/// Slack of the excess-risk bound:
/// (A - A*)/(k-1) - gamma((L - L*)/(k-1)), nonnegative for every convex phi
/// that is differentiable at 0 with phi'(0) < 0 and has phi(b) - phi(-b)
/// decreasing. All five built-ins qualify; custom losses are rejected
/// because those preconditions cannot be verified automatically.
pub fn check_excess_bound(
    phi: &PhiKind,
    alpha: &DecisionVector,
    p: &SimplexPoint,
) -> Result<f64> {
    if !phi.is_builtin() {
        return Err(Error::UnsupportedPhi {
            context: "check_excess_bound",
        });
    }
    let k = p.k();
    let loss = AdmissibleLoss::absolute(k)?;
    let spec = SurrogateSpec::at(phi.clone(), k)?;
    let a = surrogate_conditional_risk(&spec, alpha, p)?;
    let a_star = closed_form_minimizer(spec.family(), p)?.a_star;
    let l = conditional_risk(&loss, alpha, p)?;
    let l_star = optimal_risk(&loss, p)?;
    let denom = (k - 1) as f64;
    let gamma = gamma_transform(phi, ((l - l_star) / denom).clamp(0.0, 1.0))?;
    Ok((a - a_star) / denom - gamma)
}

/// Odds ratios R_i = [u_i / (1 - u_i)] [(1 - u_{i+1}) / u_{i+1}] for
/// i = 1..k-2. Empty for k = 2.
pub fn odds_ratio(p: &SimplexPoint) -> Result<Vec<f64>> {
    let u = cumulative_u(p);
    for (i, &ui) in u.iter().enumerate() {
        if ui <= 0.0 || ui >= 1.0 {
            return Err(Error::BoundaryCumulative {
                index: i + 1,
                value: ui,
            });
        }
    }
    Ok(u.windows(2)
        .map(|w| (w[0] / (1.0 - w[0])) * ((1.0 - w[1]) / w[1]))
        .collect())
}

/// The lower weighted median of the label distribution: the smallest label
/// whose cumulative probability reaches 1/2. Minimizes beta -> E|Y - beta|,
/// and through the regression transform its prediction attains the optimal
/// absolute-error risk.
pub fn lad_optimal_beta(p: &SimplexPoint) -> f64 {
    let mut acc = 0.0;
    for (i, &pi) in p.probs().iter().enumerate() {
        acc += pi;
        if acc >= 0.5 {
            return (i + 1) as f64;
        }
    }
    p.k() as f64
}

/// E|Y - beta| under p.
pub fn lad_deviation(p: &SimplexPoint, beta: f64) -> f64 {
    p.probs()
        .iter()
        .enumerate()
        .map(|(i, pi)| pi * ((i + 1) as f64 - beta).abs())
        .sum()
}

fn check_dims(k: usize, alpha: &DecisionVector, p: &SimplexPoint) -> Result<()> {
    if alpha.k() != k {
        return Err(Error::DimensionMismatch {
            context: "risk",
            expected: k - 1,
            actual: alpha.k() - 1,
        });
    }
    if p.k() != k {
        return Err(Error::DimensionMismatch {
            context: "risk",
            expected: k,
            actual: p.k(),
        });
    }
    Ok(())
}

/// A weighted finite collection of feature points with known conditional
/// label distributions; the population analogue of a dataset, used by the
/// threshold-family consistency checks.
#[derive(Debug, Clone)]
pub struct PopulationPoint {
    pub x: Vec<f64>,
    pub eta: SimplexPoint,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct SyntheticPopulation {
    points: Vec<PopulationPoint>,
}

impl SyntheticPopulation {
    pub fn new(points: Vec<PopulationPoint>) -> Result<Self> {
        let mut sum = 0.0;
        for pt in &points {
            if pt.weight < 0.0 || !pt.weight.is_finite() {
                return Err(Error::BadWeights { sum: pt.weight });
            }
            sum += pt.weight;
        }
        if (sum - 1.0).abs() > crate::core::SIMPLEX_SUM_TOLERANCE {
            return Err(Error::BadWeights { sum });
        }
        Ok(Self { points })
    }

    /// A population whose conditional distributions share every odds ratio:
    /// the cumulative probabilities of `base` are shifted in logit space by
    /// each entry of `shifts`, which is precisely the proportional odds
    /// structure. Equal weights; the shift doubles as the feature value.
    pub fn proportional_odds(base: &SimplexPoint, shifts: &[f64]) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::TooFewSamples { n: 0, min: 1 });
        }
        let base_u = cumulative_u(base);
        for (i, &ui) in base_u.iter().enumerate() {
            if ui <= 0.0 || ui >= 1.0 {
                return Err(Error::BoundaryCumulative {
                    index: i + 1,
                    value: ui,
                });
            }
        }
        let w = 1.0 / shifts.len() as f64;
        let k = base.k();
        let mut points = Vec::with_capacity(shifts.len());
        for &t in shifts {
            let u: Vec<f64> = base_u
                .iter()
                .map(|&ui| crate::core::phi::sigmoid(logit(ui) + t))
                .collect();
            let mut probs = Vec::with_capacity(k);
            probs.push(u[0]);
            for i in 1..k - 1 {
                probs.push((u[i] - u[i - 1]).max(0.0));
            }
            probs.push(1.0 - u[k - 2]);
            points.push(PopulationPoint {
                x: vec![t],
                eta: SimplexPoint::normalized(probs)?,
                weight: w,
            });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[PopulationPoint] {
        &self.points
    }
}

/// Everything the risk CLI prints for one (loss, surrogate, alpha, p) query.
#[derive(Debug, Clone)]
pub struct RiskReport {
    pub l_value: f64,
    pub l_star: f64,
    pub a_value: Option<f64>,
    pub a_star: Option<f64>,
    pub bayes_labels: BTreeSet<usize>,
    pub excess: f64,
}

/// The optimal surrogate conditional risk, by closed form where one exists
/// (AT with a built-in phi, CL, LAD) and by projected-gradient minimization
/// otherwise.
pub fn surrogate_optimal_risk(
    spec: &SurrogateSpec,
    p: &SimplexPoint,
    cfg: &OptimConfig,
) -> Result<f64> {
    match spec.family() {
        Family::AllThreshold(phi) if phi.is_builtin() => {
            Ok(closed_form_minimizer(spec.family(), p)?.a_star)
        }
        Family::CumulativeLink(_) => Ok(closed_form_minimizer(spec.family(), p)?.a_star),
        Family::LeastAbsoluteDeviation => Ok(lad_deviation(p, lad_optimal_beta(p))),
        _ => Ok(crate::optim::minimize_conditional(spec, p, cfg)?.value),
    }
}

pub fn risk_report(
    loss: &AdmissibleLoss,
    surrogate: Option<&SurrogateSpec>,
    alpha: &DecisionVector,
    p: &SimplexPoint,
    cfg: &OptimConfig,
) -> Result<RiskReport> {
    let l_value = conditional_risk(loss, alpha, p)?;
    let l_star = optimal_risk(loss, p)?;
    let bayes_labels = bayes_label_set(loss, p)?;
    let (a_value, a_star) = match surrogate {
        Some(spec) => (
            Some(surrogate_conditional_risk(spec, alpha, p)?),
            Some(surrogate_optimal_risk(spec, p, cfg)?),
        ),
        None => (None, None),
    };
    Ok(RiskReport {
        l_value,
        l_star,
        a_value,
        a_star,
        bayes_labels,
        excess: l_value - l_star,
    })
}
