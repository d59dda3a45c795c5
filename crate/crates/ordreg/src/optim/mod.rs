//! Projection onto the monotone cone, projected-gradient minimization of
//! surrogate conditional risks, and empirical-risk trainers.

mod erm;
mod linalg;
pub mod numdiff;

pub use erm::{
    fit_least_squares, fit_linear_threshold, FittedModel, LeastSquaresModel, LinearThresholdModel,
};

use crate::core::{DecisionVector, SimplexPoint};
use crate::error::{Error, Result};
use crate::risk::surrogate_conditional_grad;
use crate::surrogates::{Family, SurrogateSpec};

/// Settings shared by the conditional-risk minimizer and the trainers.
#[derive(Debug, Clone)]
pub struct OptimConfig {
    pub max_iters: usize,
    pub grad_tolerance: f64,
    pub initial_step: f64,
    /// Line-search shrink factor, in (0, 1).
    pub backtracking: f64,
    pub seed: u64,
}

impl Default for OptimConfig {
    /// Tight settings for conditional-risk certification: the problems have
    /// k - 1 variables and must pin A* to ~1e-8.
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            grad_tolerance: 1e-8,
            initial_step: 1.0,
            backtracking: 0.5,
            seed: 0,
        }
    }
}

impl OptimConfig {
    /// Looser settings for empirical risk minimization over (w, theta).
    pub fn erm_defaults() -> Self {
        Self {
            max_iters: 10_000,
            grad_tolerance: 1e-6,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::BadOptimConfig {
                reason: "max_iters must be positive",
            });
        }
        if !(self.grad_tolerance > 0.0) {
            return Err(Error::BadOptimConfig {
                reason: "grad_tolerance must be positive",
            });
        }
        if !(self.initial_step > 0.0) {
            return Err(Error::BadOptimConfig {
                reason: "initial_step must be positive",
            });
        }
        if !(self.backtracking > 0.0 && self.backtracking < 1.0) {
            return Err(Error::BadOptimConfig {
                reason: "backtracking factor must lie in (0, 1)",
            });
        }
        Ok(())
    }
}

/// Euclidean projection onto the nondecreasing cone via pool adjacent
/// violators. Idempotent; the identity on already-monotone input.
pub fn project_monotone(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut means: Vec<f64> = Vec::with_capacity(n);
    let mut widths: Vec<usize> = Vec::with_capacity(n);
    for &x in v {
        means.push(x);
        widths.push(1);
        // pool while the new block violates monotonicity with its predecessor
        while means.len() > 1 {
            let m = means.len();
            if means[m - 2] <= means[m - 1] {
                break;
            }
            let w1 = widths[m - 2] as f64;
            let w2 = widths[m - 1] as f64;
            let pooled = (w1 * means[m - 2] + w2 * means[m - 1]) / (w1 + w2);
            means.truncate(m - 1);
            widths[m - 2] += widths[m - 1];
            widths.truncate(m - 1);
            means[m - 2] = pooled;
        }
    }
    let mut out = Vec::with_capacity(n);
    for (mean, width) in means.into_iter().zip(widths) {
        out.extend(std::iter::repeat(mean).take(width));
    }
    out
}

/// Result of a conditional-risk minimization. `alpha` is the best iterate
/// seen. For the separable families `converged` is always true (the block
/// solves are exact); for the projected-gradient path it means the
/// gradient-mapping norm dropped below tolerance, and false indicates a
/// stagnation or iteration-budget stop with `value` still the best found.
#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub alpha: DecisionVector,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) const ARMIJO: f64 = 1e-4;
pub(crate) const MAX_SHRINKS: usize = 60;
pub(crate) const MAX_EXPANSIONS: usize = 60;
const STAGNATION_WINDOW: usize = 60;
const UNBOUNDED_FLOOR: f64 = -1e12;

/// One projected-gradient line search: shrink geometrically until the
/// sufficient-decrease test passes, then expand by doubling while the test
/// keeps passing and the value keeps dropping. The expansion phase is what
/// lets a coordinate with a flat tail run away in a few iterations instead
/// of being throttled by the curvature of its neighbours.
pub(crate) fn search_step(
    objective: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    f: f64,
    g: &[f64],
    first_trial: f64,
    shrink: f64,
) -> Option<(Vec<f64>, f64, f64)> {
    let mut trial = first_trial;
    let mut found: Option<(Vec<f64>, f64, f64)> = None;
    for _ in 0..MAX_SHRINKS {
        let cand = project_monotone(&axpy(x, g, -trial));
        let move2 = dist2(x, &cand);
        if move2 == 0.0 {
            return None;
        }
        let fc = objective(&cand);
        if fc.is_finite() && fc <= f - (ARMIJO / trial) * move2 {
            found = Some((cand, fc, trial));
            break;
        }
        trial *= shrink;
    }
    let (mut cand, mut fc, mut accepted) = found?;
    for _ in 0..MAX_EXPANSIONS {
        let t2 = accepted * 2.0;
        let next = project_monotone(&axpy(x, g, -t2));
        let move2 = dist2(x, &next);
        let fn2 = objective(&next);
        if fn2.is_finite() && fn2 < fc && fn2 <= f - (ARMIJO / t2) * move2 {
            cand = next;
            fc = fn2;
            accepted = t2;
        } else {
            break;
        }
    }
    Some((cand, fc, accepted))
}

/// Coordinate-wise minimal-norm subgradient estimated from one-sided
/// slopes sampled at offsets (h, 2h) on each side, so a kink sitting within
/// h of the point cannot contaminate either slope. Each coordinate's slope
/// interval is projected onto 0: an all-zero result certifies that every
/// coordinate minimum lies within 2h, i.e. (unconstrained) optimality up to
/// O(h). For the separable threshold surrogates this recovers a descent
/// direction at kinks where a fixed subgradient convention does not
/// descend.
pub(crate) fn minimal_norm_subgradient(objective: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let mut work = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-8 * (1.0 + x[i].abs());
        let mut at = |offset: f64| {
            work[i] = x[i] + offset;
            let v = objective(&work);
            work[i] = x[i];
            v
        };
        let right = (at(2.0 * h) - at(h)) / h;
        let left = (at(-h) - at(-2.0 * h)) / h;
        out[i] = if left > 0.0 {
            left
        } else if right < 0.0 {
            right
        } else {
            0.0
        };
    }
    out
}

/// Minimize the surrogate conditional risk A(., p) over the monotone cone.
///
/// The threshold families (AT, IT, GAT, LAD) are separable across
/// coordinates, and for a separable convex objective the constrained
/// optimum is found exactly by pool-adjacent-violators with a 1-D convex
/// solve per pooled block; that route certifies A* to the 1-D solver's
/// precision regardless of conditioning. The cumulative link couples
/// adjacent coordinates, so it runs projected gradient with an
/// expanding Armijo line search, started from a strictly increasing ramp
/// (ties are outside its effective domain).
pub fn minimize_conditional(
    spec: &SurrogateSpec,
    p: &SimplexPoint,
    cfg: &OptimConfig,
) -> Result<MinimizeOutcome> {
    cfg.validate()?;
    if spec.k() != p.k() {
        return Err(Error::DimensionMismatch {
            context: "minimize_conditional",
            expected: spec.k(),
            actual: p.k(),
        });
    }
    match spec.family() {
        Family::CumulativeLink(_) => minimize_projected_gradient(spec, p, cfg),
        _ => minimize_separable_isotonic(spec, p),
    }
}

/// Generalized pool-adjacent-violators for sum_i f_i(alpha_i) over the
/// nondecreasing cone: scan left to right keeping a stack of blocks, each
/// holding the 1-D minimizer of its pooled objective; merge while adjacent
/// block values violate monotonicity. Exact for separable convex objectives
/// up to the scalar solver's tolerance.
fn minimize_separable_isotonic(spec: &SurrogateSpec, p: &SimplexPoint) -> Result<MinimizeOutcome> {
    let n = spec.k() - 1;
    let mut work = vec![0.0; n];
    // pooled objective of coordinates in lo..=hi evaluated at common beta;
    // coordinates outside the block contribute constants that cancel in the
    // 1-D comparisons, so they can sit at anything finite (0 here)
    let mut block_objective = |lo: usize, hi: usize, beta: f64| -> f64 {
        for v in work.iter_mut() {
            *v = 0.0;
        }
        for v in work[lo..=hi].iter_mut() {
            *v = beta;
        }
        partial_separable_risk(spec, p, &work, lo, hi)
    };

    let mut starts: Vec<usize> = Vec::with_capacity(n);
    let mut values: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        starts.push(i);
        let beta = solve_block(|b| block_objective(i, i, b));
        values.push(beta);
        while values.len() > 1 && values[values.len() - 2] > values[values.len() - 1] {
            let m = values.len();
            let lo = starts[m - 2];
            values.truncate(m - 1);
            starts.truncate(m - 1);
            values[m - 2] = solve_block(|b| block_objective(lo, i, b));
        }
    }

    let mut alpha = vec![0.0; n];
    for (b, (&start, &value)) in starts.iter().zip(&values).enumerate() {
        let end = starts.get(b + 1).copied().unwrap_or(n);
        for a in alpha[start..end].iter_mut() {
            *a = value;
        }
    }
    // the pooled solution is monotone up to scalar-solver noise; snap ties
    for i in 1..n {
        if alpha[i] < alpha[i - 1] {
            alpha[i] = alpha[i - 1];
        }
    }
    let value = crate::risk::surrogate_conditional_risk_raw(spec, &alpha, p)?;
    Ok(MinimizeOutcome {
        alpha: DecisionVector::new(alpha)?,
        value,
        iterations: n,
        converged: true,
    })
}

/// Minimize one block's pooled objective. Zero is special: the prediction
/// rule changes value there, so when the one-sided slopes certify that 0 is
/// a minimizer it is returned exactly rather than a point a few ulps to
/// either side of it. A kinked-at-zero base loss owes its inconsistency to
/// precisely this case.
fn solve_block(mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = 1e-8;
    let right = (f(2.0 * h) - f(h)) / h;
    let left = (f(-h) - f(-2.0 * h)) / h;
    if left <= 0.0 && 0.0 <= right {
        return 0.0;
    }
    minimize_scalar_convex(f, 1e-10).0
}

/// The terms of A(alpha, p) that involve coordinates lo..=hi only. Skipping
/// the rest keeps the 1-D solves O(block) instead of O(k).
fn partial_separable_risk(
    spec: &SurrogateSpec,
    p: &SimplexPoint,
    alpha: &[f64],
    lo: usize,
    hi: usize,
) -> f64 {
    let probs = p.probs();
    let mut total = 0.0;
    match spec.family() {
        Family::AllThreshold(phi) => {
            for (i, &a) in alpha.iter().enumerate().take(hi + 1).skip(lo) {
                // phi(-a_i) weighted by P(Y > i), phi(a_i) by P(Y <= i)
                let above: f64 = probs[i + 1..].iter().sum();
                let below: f64 = probs[..=i].iter().sum();
                total += above * phi.eval(-a).unwrap_or(f64::INFINITY)
                    + below * phi.eval(a).unwrap_or(f64::INFINITY);
            }
        }
        Family::ImmediateThreshold(phi) => {
            for (i, &a) in alpha.iter().enumerate().take(hi + 1).skip(lo) {
                total += probs[i + 1] * phi.eval(-a).unwrap_or(f64::INFINITY)
                    + probs[i] * phi.eval(a).unwrap_or(f64::INFINITY);
            }
        }
        Family::GeneralizedAllThreshold(phi, loss) => {
            let c = loss.cost_coeffs();
            for (i, &a) in alpha.iter().enumerate().take(hi + 1).skip(lo) {
                let mut neg = 0.0;
                let mut pos = 0.0;
                for (j, &pj) in probs.iter().enumerate() {
                    // psi(y, .) puts c_{y-1-i} on phi(-a_i) for i+1 < y and
                    // c_{i-y+1} on phi(a_i) for i+1 >= y (0-based i)
                    if j > i {
                        neg += pj * c[j - i - 1];
                    } else {
                        pos += pj * c[i - j];
                    }
                }
                total += neg * phi.eval(-a).unwrap_or(f64::INFINITY)
                    + pos * phi.eval(a).unwrap_or(f64::INFINITY);
            }
        }
        Family::LeastAbsoluteDeviation => {
            if lo == 0 {
                for (j, &pj) in probs.iter().enumerate() {
                    total += pj * ((j + 1) as f64 + alpha[0] - 1.5).abs();
                }
            }
        }
        Family::CumulativeLink(_) => unreachable!("cumulative link is not separable"),
    }
    total
}

fn minimize_projected_gradient(
    spec: &SurrogateSpec,
    p: &SimplexPoint,
    cfg: &OptimConfig,
) -> Result<MinimizeOutcome> {
    let k = spec.k();
    let n = k - 1;

    let objective = |a: &[f64]| -> f64 {
        match crate::risk::surrogate_conditional_risk_raw(spec, a, p) {
            Ok(v) if v.is_nan() => f64::INFINITY,
            Ok(v) => v,
            Err(_) => f64::INFINITY,
        }
    };

    let mut alpha: Vec<f64> = match spec.family() {
        Family::CumulativeLink(_) => (1..k).map(|j| j as f64 - k as f64 / 2.0).collect(),
        _ => vec![0.0; n],
    };
    let mut f = objective(&alpha);
    // widen the ramp if some middle-class likelihood is still under the floor
    let mut widen = 0;
    while !f.is_finite() && widen < 6 {
        for (j, a) in alpha.iter_mut().enumerate() {
            *a = 2.0 * (j as f64 + 1.0 - k as f64 / 2.0);
        }
        f = objective(&alpha);
        widen += 1;
    }

    let mut best_alpha = alpha.clone();
    let mut best_f = f;
    let mut step = cfg.initial_step;
    let mut converged = false;
    let mut stall_rounds = 0usize;
    let mut last_improvement = 0usize;
    let mut iterations = 0usize;

    for iter in 0..cfg.max_iters {
        iterations = iter + 1;
        let dv = DecisionVector::new(alpha.clone())?;
        let g = surrogate_conditional_grad(spec, &dv, p)?;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient { iteration: iter });
        }

        // gradient mapping with unit reference step
        let mapped = project_monotone(&axpy(&alpha, &g, -1.0));
        let pg_norm = dist2(&alpha, &mapped).sqrt();
        if pg_norm <= cfg.grad_tolerance {
            converged = true;
            break;
        }

        let mut moved = false;
        if let Some((cand, fc, accepted)) =
            search_step(&objective, &alpha, f, &g, step * 2.0, cfg.backtracking)
        {
            alpha = cand;
            f = fc;
            step = accepted;
            moved = true;
        } else if !spec.is_smooth() {
            // the fixed subgradient convention does not descend here; use
            // the minimal-norm coordinate subgradient instead
            let repair = minimal_norm_subgradient(&objective, &alpha);
            if norm2(&repair) <= cfg.grad_tolerance {
                converged = true;
                break;
            }
            if let Some((cand, fc, accepted)) =
                search_step(&objective, &alpha, f, &repair, step * 2.0, cfg.backtracking)
            {
                alpha = cand;
                f = fc;
                step = accepted;
                moved = true;
            } else {
                // diminishing projected subgradient; non-monotone, so the
                // best iterate is what gets returned
                stall_rounds += 1;
                let gn = norm2(&g).max(1e-12);
                let mut t = cfg.initial_step / (gn * (stall_rounds as f64).sqrt());
                for _ in 0..MAX_SHRINKS {
                    let cand = project_monotone(&axpy(&alpha, &g, -t));
                    let fc = objective(&cand);
                    if fc.is_finite() && dist2(&alpha, &cand) > 0.0 {
                        alpha = cand;
                        f = fc;
                        moved = true;
                        break;
                    }
                    t *= 0.5;
                }
            }
        }
        if !moved {
            break;
        }

        // improvements below roundoff scale cannot be distinguished from
        // noise and do not reset the stagnation clock
        if f < best_f - 1e-15 * (1.0 + best_f.abs()) {
            best_f = f;
            best_alpha = alpha.clone();
            last_improvement = iter;
        } else if f < best_f {
            best_f = f;
            best_alpha = alpha.clone();
        }
        if best_f < UNBOUNDED_FLOOR {
            break;
        }
        if iter - last_improvement > STAGNATION_WINDOW {
            break;
        }
    }

    Ok(MinimizeOutcome {
        alpha: DecisionVector::new(best_alpha)?,
        value: best_f,
        iterations,
        converged,
    })
}

/// Golden-section minimization of a convex scalar function, with an
/// expanding bracket. Returns (argmin, min value); the argmin is localized
/// only to about sqrt(machine epsilon) where the function is smooth, as for
/// any value-comparison search.
pub fn minimize_scalar_convex(mut f: impl FnMut(f64) -> f64, tol: f64) -> (f64, f64) {
    // expand until the minimum is interior
    let mut lo = -1.0;
    let mut hi = 1.0;
    for _ in 0..60 {
        let flo = f(lo);
        let f_in_lo = f(lo + (hi - lo) * 1e-3);
        let fhi = f(hi);
        let f_in_hi = f(hi - (hi - lo) * 1e-3);
        let mut grew = false;
        if flo < f_in_lo {
            lo *= 2.0;
            grew = true;
        }
        if fhi < f_in_hi {
            hi *= 2.0;
            grew = true;
        }
        if !grew {
            break;
        }
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // relative tolerance: at large magnitudes the interval width bottoms
    // out at the local ulp, so an absolute test would never fire
    for _ in 0..400 {
        if (b - a).abs() <= tol * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

pub(crate) fn axpy(x: &[f64], g: &[f64], scale: f64) -> Vec<f64> {
    x.iter().zip(g).map(|(xi, gi)| xi + scale * gi).collect()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
