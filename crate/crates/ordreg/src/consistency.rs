//! Exhaustive consistency sweeps: minimize the surrogate conditional risk
//! at every point of a simplex grid and measure the excess risk of the
//! resulting prediction against the brute-force Bayes oracle.

use crate::core::SimplexPoint;
use crate::error::{Error, Result};
use crate::optim::{minimize_conditional, minimize_scalar_convex, OptimConfig};
use crate::risk::grid::simplex_grid;
use crate::risk::{conditional_risk, lad_deviation, optimal_risk};
use crate::surrogates::{lad_transform, Family, SurrogateSpec};

/// Guard rail: grid sweeps are exhaustive and only sensible for small k.
pub const SWEEP_K_LIMIT: usize = 7;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub spec: SurrogateSpec,
    /// Grid step is 1 / resolution.
    pub resolution: usize,
    /// A sweep passes when the maximum excess risk stays below this.
    pub tolerance: f64,
    pub optim: OptimConfig,
}

impl SweepConfig {
    pub fn new(spec: SurrogateSpec, resolution: usize) -> Self {
        // Excess risk is certified against the brute-force Bayes oracle, so
        // the per-point optimizer only has to pin the minimizer's
        // prediction, not the optimal value; a looser gradient tolerance
        // keeps cumulative-link sweeps (whose boundary-grid optima escape
        // to infinity) from crawling.
        let optim = OptimConfig {
            grad_tolerance: 1e-5,
            max_iters: 20_000,
            ..OptimConfig::default()
        };
        Self {
            spec,
            resolution,
            tolerance: 1e-6,
            optim,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub max_excess: f64,
    pub worst_p: SimplexPoint,
    pub n_points: usize,
    pub passed: bool,
}

/// Run the sweep, returning only the summary.
pub fn sweep_consistency(cfg: &SweepConfig) -> Result<SweepOutcome> {
    Ok(sweep_consistency_detailed(cfg)?.0)
}

/// Run the sweep and also return the per-grid-point excess risks, in the
/// same order as [`simplex_grid`].
pub fn sweep_consistency_detailed(cfg: &SweepConfig) -> Result<(SweepOutcome, Vec<f64>)> {
    let k = cfg.spec.k();
    if k > SWEEP_K_LIMIT {
        return Err(Error::GridGuard {
            k,
            limit: SWEEP_K_LIMIT,
        });
    }
    let loss = cfg.spec.target_loss();
    let grid = simplex_grid(k, cfg.resolution);
    let mut excesses = Vec::with_capacity(grid.len());
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst = grid[0].clone();
    for p in &grid {
        let alpha = match cfg.spec.family() {
            Family::LeastAbsoluteDeviation => {
                // LAD lives on the one-parameter transform family; minimize
                // over the regressed value and map back
                let (beta, _) = minimize_scalar_convex(|b| lad_deviation(p, b), 1e-10);
                lad_transform(beta, k)?
            }
            _ => minimize_conditional(&cfg.spec, p, &cfg.optim)?.alpha,
        };
        let excess = conditional_risk(&loss, &alpha, p)? - optimal_risk(&loss, p)?;
        excesses.push(excess);
        if excess > max_excess {
            max_excess = excess;
            worst = p.clone();
        }
    }
    let outcome = SweepOutcome {
        max_excess,
        worst_p: worst,
        n_points: grid.len(),
        passed: max_excess <= cfg.tolerance,
    };
    Ok((outcome, excesses))
}
