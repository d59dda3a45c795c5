//! Empirical risk minimization for linear threshold models and the
//! least-squares baseline.

use super::{axpy, dist2, linalg, project_monotone, OptimConfig, ARMIJO, MAX_SHRINKS};
use crate::core::DecisionVector;
use crate::error::{Error, Result};
use crate::surrogates::SurrogateSpec;

/// A linear score with ordered thresholds: the decision vector at x is
/// (theta_1 - <w, x>, ..., theta_{k-1} - <w, x>).
#[derive(Debug, Clone)]
pub struct LinearThresholdModel {
    weights: Vec<f64>,
    thresholds: Vec<f64>,
    degenerate: bool,
}

impl LinearThresholdModel {
    pub fn new(weights: Vec<f64>, thresholds: Vec<f64>) -> Result<Self> {
        for i in 0..thresholds.len().saturating_sub(1) {
            if thresholds[i] > thresholds[i + 1] {
                return Err(Error::NotMonotone {
                    index: i,
                    left: thresholds[i],
                    right: thresholds[i + 1],
                });
            }
        }
        if thresholds.is_empty() {
            return Err(Error::EmptyDecisionVector);
        }
        Ok(Self {
            weights,
            thresholds,
            degenerate: false,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn k(&self) -> usize {
        self.thresholds.len() + 1
    }

    /// Flag set by the trainer when the training labels were constant and
    /// the thresholds were pinned to reproduce that label everywhere.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x)
    }

    pub fn decision(&self, x: &[f64]) -> DecisionVector {
        let s = self.score(x);
        DecisionVector::new(self.thresholds.iter().map(|t| t - s).collect())
            .expect("ordered thresholds shifted by a constant stay ordered")
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        self.decision(x).pred()
    }
}

/// A fitted model together with the per-accepted-step objective trace
/// (nonincreasing by the line-search guarantee) and a convergence flag.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub model: LinearThresholdModel,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Full-batch projected gradient descent with Armijo backtracking on
/// (w, theta), minimizing the mean surrogate loss. After every step the
/// thresholds are replaced by their projection onto the monotone cone, so
/// the gradient is exactly that of the stated objective. Deterministic:
/// w starts at 0 and theta_j at j - k/2.
pub fn fit_linear_threshold(
    spec: &SurrogateSpec,
    features: &[Vec<f64>],
    labels: &[usize],
    cfg: &OptimConfig,
) -> Result<FittedModel> {
    cfg.validate()?;
    let n = features.len();
    if n == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: labels.len(),
        });
    }
    let k = spec.k();
    let dim = features[0].len();
    for (i, row) in features.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: dim,
                found: row.len(),
            });
        }
    }
    for &y in labels {
        if y < 1 || y > k {
            return Err(Error::LabelOutOfRange { label: y, k });
        }
    }

    // single-class training set: constant prediction, flagged
    let first = labels[0];
    if labels.iter().all(|&y| y == first) {
        let mut thresholds = Vec::with_capacity(k - 1);
        for j in 1..k {
            thresholds.push(if j < first { -1e3 } else { 1e3 });
        }
        let mut model = LinearThresholdModel::new(vec![0.0; dim], thresholds)?;
        model.degenerate = true;
        return Ok(FittedModel {
            model,
            objective_trace: Vec::new(),
            iterations: 0,
            converged: true,
        });
    }

    let mut w = vec![0.0; dim];
    let mut theta: Vec<f64> = (1..k).map(|j| j as f64 - k as f64 / 2.0).collect();

    let objective = |w: &[f64], theta: &[f64]| -> f64 {
        let mut total = 0.0;
        for (x, &y) in features.iter().zip(labels) {
            let s = dot(w, x);
            let alpha = match DecisionVector::new(theta.iter().map(|t| t - s).collect()) {
                Ok(a) => a,
                Err(_) => return f64::INFINITY,
            };
            match spec.eval(y, &alpha) {
                Ok(v) if v.is_finite() => total += v,
                _ => return f64::INFINITY,
            }
        }
        total / n as f64
    };

    let gradient = |w: &[f64], theta: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut gw = vec![0.0; dim];
        let mut gt = vec![0.0; k - 1];
        for (x, &y) in features.iter().zip(labels) {
            let s = dot(w, x);
            let alpha = DecisionVector::new(theta.iter().map(|t| t - s).collect())?;
            let g = spec.grad(y, &alpha)?;
            let coef: f64 = g.iter().sum();
            for (gti, gi) in gt.iter_mut().zip(&g) {
                *gti += gi / n as f64;
            }
            for (gwj, xj) in gw.iter_mut().zip(x) {
                *gwj -= coef * xj / n as f64;
            }
        }
        Ok((gw, gt))
    };

    let mut f = objective(&w, &theta);
    let mut trace = vec![f];
    let mut step = cfg.initial_step;
    let mut converged = false;
    let mut stall_rounds = 0usize;
    let mut iterations = 0usize;

    for iter in 0..cfg.max_iters {
        iterations = iter + 1;
        let (gw, gt) = gradient(&w, &theta)?;
        if gw.iter().chain(&gt).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient { iteration: iter });
        }

        // gradient mapping with unit reference step
        let mw = axpy(&w, &gw, -1.0);
        let mt = project_monotone(&axpy(&theta, &gt, -1.0));
        let pg = (dist2(&w, &mw) + dist2(&theta, &mt)).sqrt();
        if pg <= cfg.grad_tolerance {
            converged = true;
            break;
        }

        // shrink until the sufficient-decrease test passes, then expand by
        // doubling while it keeps passing
        let candidate_at = |t: f64| -> (Vec<f64>, Vec<f64>) {
            (
                axpy(&w, &gw, -t),
                project_monotone(&axpy(&theta, &gt, -t)),
            )
        };
        let mut trial = step * 2.0;
        let mut found: Option<(Vec<f64>, Vec<f64>, f64, f64)> = None;
        for _ in 0..MAX_SHRINKS {
            let (wc, tc) = candidate_at(trial);
            let move2 = dist2(&w, &wc) + dist2(&theta, &tc);
            if move2 == 0.0 {
                break;
            }
            let fc = objective(&wc, &tc);
            if fc.is_finite() && fc <= f - (ARMIJO / trial) * move2 {
                found = Some((wc, tc, fc, trial));
                break;
            }
            trial *= cfg.backtracking;
        }
        if let Some((_, _, _, accepted_t)) = &found {
            let mut accepted_t = *accepted_t;
            for _ in 0..super::MAX_EXPANSIONS {
                let t2 = accepted_t * 2.0;
                let (wc, tc) = candidate_at(t2);
                let move2 = dist2(&w, &wc) + dist2(&theta, &tc);
                let fc = objective(&wc, &tc);
                let best_fc = found.as_ref().map(|x| x.2).expect("present");
                if fc.is_finite() && fc < best_fc && fc <= f - (ARMIJO / t2) * move2 {
                    found = Some((wc, tc, fc, t2));
                    accepted_t = t2;
                } else {
                    break;
                }
            }
        }
        let mut accepted = false;
        if let Some((wc, tc, fc, t)) = found {
            w = wc;
            theta = tc;
            f = fc;
            step = t;
            accepted = true;
            trace.push(f);
        }

        if !accepted {
            // nonsmooth stall: take a diminishing subgradient step only if it
            // does not increase the recorded objective trace
            stall_rounds += 1;
            let gn = (super::norm2(&gw).powi(2) + super::norm2(&gt).powi(2))
                .sqrt()
                .max(1e-12);
            let t = cfg.initial_step / (gn * (stall_rounds as f64).sqrt());
            let wc = axpy(&w, &gw, -t);
            let tc = project_monotone(&axpy(&theta, &gt, -t));
            let fc = objective(&wc, &tc);
            if fc.is_finite() && fc < f {
                w = wc;
                theta = tc;
                f = fc;
                trace.push(f);
            } else if stall_rounds > 50 {
                break;
            }
        }
    }

    let model = LinearThresholdModel::new(w, theta)?;
    debug_assert!(trace.windows(2).all(|p| p[1] <= p[0] + 1e-12));
    Ok(FittedModel {
        model,
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// Ordinary least squares on the labels with an appended intercept column;
/// prediction rounds the real-valued score to the nearest label, clipping
/// at the ends.
#[derive(Debug, Clone)]
pub struct LeastSquaresModel {
    /// Feature weights followed by the intercept.
    pub coefficients: Vec<f64>,
    pub rank_deficient: bool,
}

impl LeastSquaresModel {
    pub fn predict_real(&self, x: &[f64]) -> f64 {
        let p = self.coefficients.len() - 1;
        dot(&self.coefficients[..p], x) + self.coefficients[p]
    }

    pub fn predict_label(&self, x: &[f64], k: usize) -> usize {
        let raw = self.predict_real(x).round();
        raw.clamp(1.0, k as f64) as usize
    }
}

/// Exact normal-equations solution of min_w sum (y_i - <w, x_i>)^2 over the
/// intercept-augmented design. Rank-deficient designs are solved through a
/// vanishing ridge (the minimum-norm limit) and flagged.
pub fn fit_least_squares(features: &[Vec<f64>], targets: &[f64]) -> Result<LeastSquaresModel> {
    let n = features.len();
    if n == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if targets.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: targets.len(),
        });
    }
    let p = features[0].len();
    let d = p + 1;
    let mut m = vec![vec![0.0; d]; d];
    let mut b = vec![0.0; d];
    for (x, &y) in features.iter().zip(targets) {
        if x.len() != p {
            return Err(Error::RaggedRow {
                row: 0,
                expected: p,
                found: x.len(),
            });
        }
        for i in 0..p {
            for j in 0..=i {
                m[i][j] += x[i] * x[j];
            }
            m[p][i] += x[i];
            b[i] += x[i] * y;
        }
        m[p][p] += 1.0;
        b[p] += y;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            m[i][j] = m[j][i];
        }
    }
    let (coefficients, rank_deficient) = linalg::solve_spd(&m, &b);
    Ok(LeastSquaresModel {
        coefficients,
        rank_deficient,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
