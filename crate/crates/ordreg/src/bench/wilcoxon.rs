//! Two-sided Wilcoxon signed-rank test for paired scores.

use crate::core::link::normal_cdf;
use crate::error::{Error, Result};

/// Pairs beyond this count switch to the normal approximation.
pub const EXACT_LIMIT: usize = 20;

/// Effective sample sizes below this give the test little power; flagged,
/// not rejected, because paired fold scores can legitimately collapse to a
/// handful of nonzero differences.
pub const LOW_POWER_LIMIT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    /// Full enumeration of the signed-rank distribution (ties included).
    Exact,
    /// Normal approximation with tie correction and continuity correction.
    NormalApproximation,
}

#[derive(Debug, Clone)]
pub struct WilcoxonOutcome {
    /// Two-sided p-value.
    pub p_value: f64,
    /// W+, the rank sum of positive differences.
    pub statistic: f64,
    /// Pairs remaining after zero differences are dropped.
    pub n_effective: usize,
    pub method: WilcoxonMethod,
    /// All differences were zero; p is 1 by convention.
    pub all_zero: bool,
    /// Fewer than [`LOW_POWER_LIMIT`] nonzero differences.
    pub low_power: bool,
}

/// Two-sided signed-rank test of H0: the paired differences are symmetric
/// about zero. Zero differences are dropped; absolute ties share average
/// ranks. Exact for up to [`EXACT_LIMIT`] nonzero pairs.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonOutcome> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    for (i, d) in diffs.iter().enumerate() {
        if !d.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
    }
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonOutcome {
            p_value: 1.0,
            statistic: 0.0,
            n_effective: 0,
            method: WilcoxonMethod::Exact,
            all_zero: true,
            low_power: true,
        });
    }

    let ranks = average_ranks(&diffs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();

    let (p_value, method) = if n <= EXACT_LIMIT {
        (exact_two_sided(&ranks, w_plus), WilcoxonMethod::Exact)
    } else {
        (
            normal_two_sided(&ranks, w_plus, n),
            WilcoxonMethod::NormalApproximation,
        )
    };
    Ok(WilcoxonOutcome {
        p_value,
        statistic: w_plus,
        n_effective: n,
        method,
        all_zero: false,
        low_power: n < LOW_POWER_LIMIT,
    })
}

/// Ranks of |d| with ties sharing the average rank.
fn average_ranks(diffs: &[f64]) -> Vec<f64> {
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().partial_cmp(&diffs[j].abs()).expect("finite"));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && diffs[order[end]].abs() == diffs[order[start]].abs() {
            end += 1;
        }
        let avg = (start + end - 1) as f64 / 2.0 + 1.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

/// Exact two-sided p by dynamic programming over doubled ranks. Averaged
/// ranks are half-integers, so doubling makes every achievable rank sum an
/// integer; the count table then enumerates all 2^n sign assignments.
fn exact_two_sided(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in &doubled {
        reach += r;
        for s in (0..=reach.saturating_sub(r)).rev() {
            if counts[s] > 0.0 {
                let add = counts[s];
                counts[s + r] += add;
            }
        }
    }
    let w2 = (2.0 * w_plus).round() as usize;
    let all: f64 = counts.iter().sum();
    let le: f64 = counts[..=w2.min(total)].iter().sum();
    let ge: f64 = counts[w2.min(total)..].iter().sum();
    (2.0 * le.min(ge) / all).min(1.0)
}

fn normal_two_sided(ranks: &[f64], w_plus: f64, n: usize) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    // tie correction: subtract sum(t^3 - t)/48 over tie groups
    let mut sorted: Vec<f64> = ranks.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let centered = w_plus - mean;
    let correction = 0.5 * centered.signum();
    let z = (centered - correction) / var.sqrt();
    (2.0 * (1.0 - normal_cdf(z.abs()))).min(1.0)
}
