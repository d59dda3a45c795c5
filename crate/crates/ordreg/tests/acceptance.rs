//! The verification gate: every claim the library is supposed to certify,
//! checked end to end at its stated tolerance. Each test prints one
//! pass/fail line (visible with --nocapture).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ordreg::bench::cv::{cross_validate, planted_dataset, CvConfig, Method};
use ordreg::bench::report::{BenchmarkReport, DatasetReport, MethodSummary};
use ordreg::bench::wilcoxon::wilcoxon_signed_rank;
use ordreg::bench::{load_dataset, Schema};
use ordreg::consistency::{sweep_consistency, SweepConfig};
use ordreg::core::phi::kinked_witness;
use ordreg::core::{AdmissibleLoss, DecisionVector, LinkKind, PhiKind, SimplexPoint};
use ordreg::optim::numdiff::{grad_check, min_symmetric_eigenvalue, numeric_hessian};
use ordreg::optim::{minimize_conditional, OptimConfig};
use ordreg::risk::grid::simplex_grid;
use ordreg::risk::{
    bayes_alpha, bayes_label_set, binary_optimal_risk, check_excess_bound, closed_form_minimizer,
    conditional_risk, cumulative_u, lad_optimal_beta, odds_ratio, optimal_risk,
    SyntheticPopulation,
};
use ordreg::surrogates::{lad_transform, Family, SurrogateSpec};

fn criterion(name: &str, body: impl FnOnce() -> Result<String, String>) {
    criterion_within(name, f64::INFINITY, body)
}

/// Criteria with a stated wall-clock budget enforce it.
fn criterion_within(
    name: &str,
    budget_secs: f64,
    body: impl FnOnce() -> Result<String, String>,
) {
    let start = std::time::Instant::now();
    let outcome = body();
    let elapsed = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) if elapsed <= budget_secs => {
            println!("criterion {name}: PASS ({detail}; {elapsed:.2}s)");
        }
        Ok(detail) => {
            println!(
                "criterion {name}: FAIL (over budget: {elapsed:.2}s > {budget_secs}s; {detail})"
            );
            panic!("criterion {name} exceeded its runtime budget");
        }
        Err(reason) => {
            println!("criterion {name}: FAIL ({reason})");
            panic!("criterion {name} failed: {reason}");
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_simplex(rng: &mut ChaCha8Rng, k: usize, floor: f64) -> SimplexPoint {
    let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut probs = Vec::with_capacity(k);
    let mut prev = 0.0;
    for c in cuts {
        probs.push(c - prev + floor);
        prev = c;
    }
    probs.push(1.0 - prev + floor);
    SimplexPoint::normalized(probs).unwrap()
}

fn random_alpha(rng: &mut ChaCha8Rng, k: usize) -> DecisionVector {
    let mut v: Vec<f64> = (0..k - 1).map(|_| rng.random_range(-3.0..3.0)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    DecisionVector::new(v).unwrap()
}

/// 1. The closed-form Bayes vector (2u - 1) attains the brute-force optimum
///    of the expected absolute error at every grid point, k = 2..=5.
#[test]
fn criterion_1_bayes_oracle_equivalence() {
    criterion_within("1 bayes-oracle", 5.0, || {
        let mut points = 0usize;
        for k in 2..=5 {
            let loss = AdmissibleLoss::absolute(k).map_err(|e| e.to_string())?;
            for p in simplex_grid(k, 10) {
                let pred = bayes_alpha(&p).pred();
                let bayes = bayes_label_set(&loss, &p).map_err(|e| e.to_string())?;
                if !bayes.contains(&pred) {
                    return Err(format!(
                        "pred {pred} not Bayes at k={k}, p={:?} (bayes {bayes:?})",
                        p.probs()
                    ));
                }
                points += 1;
            }
        }
        Ok(format!("{points} grid points"))
    });
}

/// 2. Monotonicity constraints can be ignored for the AT optimum: the
///    numerically minimized risk equals sum_i C*(u_i) within 1e-6 for the
///    five base losses, 200 random p per k in {3, 4, 5}.
#[test]
fn criterion_2_decomposition() {
    criterion_within("2 decomposition", 30.0, || {
        let mut rng = rng(2_000);
        let mut worst = 0.0f64;
        for k in [3usize, 4, 5] {
            for _ in 0..200 {
                let p = random_simplex(&mut rng, k, 0.0);
                let u = cumulative_u(&p);
                for phi in PhiKind::BUILTINS {
                    let mut c_sum = 0.0;
                    for &ui in &u {
                        c_sum += binary_optimal_risk(&phi, ui).map_err(|e| e.to_string())?;
                    }
                    let spec = SurrogateSpec::at(phi.clone(), k).map_err(|e| e.to_string())?;
                    let out = minimize_conditional(&spec, &p, &OptimConfig::default())
                        .map_err(|e| e.to_string())?;
                    let gap = (out.value - c_sum).abs();
                    worst = worst.max(gap);
                    if gap > 1e-6 {
                        return Err(format!(
                            "{} k={k}: |A_hat - sum C*| = {gap:.3e}",
                            phi.name()
                        ));
                    }
                }
            }
        }
        Ok(format!("max |A_hat - sum C*(u_i)| = {worst:.3e}"))
    });
}

/// 3. The per-phi closed forms match the numeric argmin within 1e-4
///    componentwise away from u in {0, 1/2, 1}, and A* within 1e-6; the
///    cumulative link optimum (inverse link of u) matches too.
#[test]
fn criterion_3_closed_forms() {
    criterion("3 closed-forms", || {
        let mut rng = rng(3_000);
        let mut worst_alpha = 0.0f64;
        let mut worst_value = 0.0f64;
        for k in [3usize, 4, 5] {
            for _ in 0..100 {
                let p = random_simplex(&mut rng, k, 0.0);
                let u = cumulative_u(&p);
                for phi in PhiKind::BUILTINS {
                    let family = Family::AllThreshold(phi.clone());
                    let closed = closed_form_minimizer(&family, &p).map_err(|e| e.to_string())?;
                    let spec = SurrogateSpec::at(phi.clone(), k).map_err(|e| e.to_string())?;
                    let out = minimize_conditional(&spec, &p, &OptimConfig::default())
                        .map_err(|e| e.to_string())?;
                    let value_gap = (out.value - closed.a_star).abs();
                    worst_value = worst_value.max(value_gap);
                    if value_gap > 1e-6 {
                        return Err(format!("{} k={k}: A* gap {value_gap:.3e}", phi.name()));
                    }
                    for i in 0..k - 1 {
                        // componentwise check only where the formula's
                        // argument is away from the excluded set {0, 1/2, 1}
                        let interior =
                            u[i].min(1.0 - u[i]) > 1e-6 && (u[i] - 0.5).abs() > 1e-6;
                        if !interior {
                            continue;
                        }
                        let gap = (out.alpha.values()[i] - closed.alpha.values()[i]).abs();
                        worst_alpha = worst_alpha.max(gap);
                        if gap > 1e-4 {
                            return Err(format!(
                                "{} k={k} i={i}: argmin gap {gap:.3e} (u={})",
                                phi.name(),
                                u[i]
                            ));
                        }
                    }
                }
                // cumulative link: sigma^{-1}(u) with A* the label entropy
                let p_interior = random_simplex(&mut rng, k, 1e-3);
                let u_int = cumulative_u(&p_interior);
                for link in [LinkKind::SigmoidLogit, LinkKind::GaussianCdf] {
                    let family = Family::CumulativeLink(link);
                    let closed =
                        closed_form_minimizer(&family, &p_interior).map_err(|e| e.to_string())?;
                    let spec = SurrogateSpec::cl(link, k).map_err(|e| e.to_string())?;
                    let out = minimize_conditional(&spec, &p_interior, &OptimConfig::default())
                        .map_err(|e| e.to_string())?;
                    let value_gap = (out.value - closed.a_star).abs();
                    worst_value = worst_value.max(value_gap);
                    if value_gap > 1e-6 {
                        return Err(format!("cl({}) k={k}: A* gap {value_gap:.3e}", link.name()));
                    }
                    for i in 0..k - 1 {
                        if u_int[i].min(1.0 - u_int[i]) > 1e-6 && (u_int[i] - 0.5).abs() > 1e-6 {
                            let gap = (out.alpha.values()[i] - closed.alpha.values()[i]).abs();
                            worst_alpha = worst_alpha.max(gap);
                            if gap > 1e-4 {
                                return Err(format!(
                                    "cl({}) k={k} i={i}: argmin gap {gap:.3e}",
                                    link.name()
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(format!(
            "max argmin gap {worst_alpha:.3e}, max A* gap {worst_value:.3e}"
        ))
    });
}

/// 4. Consistency sweeps: AT, IT and GAT(squared error) with every built-in
///    phi reach max grid excess <= 1e-6 for k in {2, 3, 4}; the
///    kinked-at-zero phi produces excess > 0.01 somewhere for AT at k = 2.
#[test]
fn criterion_4_consistency_sweeps() {
    criterion_within("4 consistency-sweeps", 60.0, || {
        let mut worst = 0.0f64;
        let mut sweeps = 0usize;
        for k in [2usize, 3, 4] {
            for phi in PhiKind::BUILTINS {
                let specs = [
                    SurrogateSpec::at(phi.clone(), k).map_err(|e| e.to_string())?,
                    SurrogateSpec::it(phi.clone(), k).map_err(|e| e.to_string())?,
                    SurrogateSpec::gat(
                        phi.clone(),
                        AdmissibleLoss::squared_error(k).map_err(|e| e.to_string())?,
                    )
                    .map_err(|e| e.to_string())?,
                ];
                for spec in specs {
                    let name = spec.name();
                    let out = sweep_consistency(&SweepConfig::new(spec, 10))
                        .map_err(|e| e.to_string())?;
                    worst = worst.max(out.max_excess);
                    sweeps += 1;
                    if out.max_excess > 1e-6 {
                        return Err(format!(
                            "{name} k={k}: max excess {} at {:?}",
                            out.max_excess,
                            out.worst_p.probs()
                        ));
                    }
                }
            }
        }
        let witness = SweepConfig::new(
            SurrogateSpec::at(kinked_witness(), 2).map_err(|e| e.to_string())?,
            10,
        );
        let out = sweep_consistency(&witness).map_err(|e| e.to_string())?;
        if out.max_excess <= 0.01 {
            return Err(format!(
                "kinked witness max excess {} not > 0.01",
                out.max_excess
            ));
        }
        Ok(format!(
            "{sweeps} consistent sweeps (worst excess {worst:.2e}); witness excess {:.3} at p={:?}",
            out.max_excess,
            out.worst_p.probs()
        ))
    });
}

/// 5. Excess-risk bound: gamma((L - L*)/(k-1)) <= (A - A*)/(k-1) for 1e4
///    random (alpha, p, k <= 6) across the five base losses.
#[test]
fn criterion_5_excess_risk_bound() {
    criterion_within("5 excess-bound", 10.0, || {
        let mut rng = rng(5_000);
        let mut min_slack = f64::INFINITY;
        for phi in PhiKind::BUILTINS {
            for _ in 0..2_000 {
                let k = rng.random_range(2..=6);
                let p = random_simplex(&mut rng, k, 0.0);
                let alpha = random_alpha(&mut rng, k);
                let slack = check_excess_bound(&phi, &alpha, &p).map_err(|e| e.to_string())?;
                min_slack = min_slack.min(slack);
                if slack < -1e-9 {
                    return Err(format!(
                        "{}: slack {slack:.3e} at p={:?}, alpha={:?}",
                        phi.name(),
                        p.probs(),
                        alpha.values()
                    ));
                }
            }
        }
        Ok(format!("min slack over 10^4 draws = {min_slack:.3e}"))
    });
}

/// 6. Cumulative link: the inverse link agrees in sign with 2t - 1 on a
///    grid for both links; the logistic CL Hessian is numerically PSD at
///    500 random strictly increasing points; the logistic CL optimum
///    coincides with the logistic AT optimum within 1e-8.
#[test]
fn criterion_6_cumulative_link() {
    criterion("6 cumulative-link", || {
        for link in [LinkKind::SigmoidLogit, LinkKind::GaussianCdf] {
            let mut t = 0.01f64;
            while t <= 0.99 {
                if (t - 0.5).abs() > 1e-12 {
                    let v = link.inverse(t).map_err(|e| e.to_string())? * (2.0 * t - 1.0);
                    if v <= 0.0 {
                        return Err(format!("{}: sign condition fails at t={t}", link.name()));
                    }
                }
                t += 0.01;
            }
        }

        let mut rng = rng(6_000);
        let k = 4;
        let spec = SurrogateSpec::cl(LinkKind::SigmoidLogit, k).map_err(|e| e.to_string())?;
        let mut min_eig = f64::INFINITY;
        for _ in 0..500 {
            let mut v: Vec<f64> = (0..k - 1).map(|_| rng.random_range(-3.0..3.0)).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (i, vi) in v.iter_mut().enumerate() {
                *vi += 0.05 * i as f64;
            }
            let y = rng.random_range(1..=k);
            let hess = numeric_hessian(
                |a| {
                    spec.eval(y, &DecisionVector::new(a.to_vec()).unwrap())
                        .unwrap()
                },
                &v,
                1e-4,
            );
            let eig = min_symmetric_eigenvalue(&hess);
            min_eig = min_eig.min(eig);
            if eig < -1e-8 {
                return Err(format!("Hessian eigenvalue {eig:.3e} at y={y}, alpha={v:?}"));
            }
        }

        let mut worst = 0.0f64;
        for _ in 0..200 {
            let p = random_simplex(&mut rng, 4, 1e-6);
            let cl = closed_form_minimizer(&Family::CumulativeLink(LinkKind::SigmoidLogit), &p)
                .map_err(|e| e.to_string())?;
            let at = closed_form_minimizer(&Family::AllThreshold(PhiKind::Logistic), &p)
                .map_err(|e| e.to_string())?;
            for (a, b) in cl.alpha.values().iter().zip(at.alpha.values()) {
                let gap = (a - b).abs();
                worst = worst.max(gap);
                if gap > 1e-8 {
                    return Err(format!("CL vs logistic AT optimum gap {gap:.3e}"));
                }
            }
        }
        Ok(format!(
            "sign condition on 98-point grid, min Hessian eig {min_eig:.3e}, CL/AT optimum gap {worst:.3e}"
        ))
    });
}

/// 7. LAD consistency: the weighted-median minimizer pushed through the
///    regression transform attains the optimal absolute-error risk at every
///    grid point, k <= 5.
#[test]
fn criterion_7_lad_consistency() {
    criterion("7 lad-consistency", || {
        let mut points = 0usize;
        for k in 2..=5 {
            let loss = AdmissibleLoss::absolute(k).map_err(|e| e.to_string())?;
            for p in simplex_grid(k, 10) {
                let beta = lad_optimal_beta(&p);
                let alpha = lad_transform(beta, k).map_err(|e| e.to_string())?;
                let risk = conditional_risk(&loss, &alpha, &p).map_err(|e| e.to_string())?;
                let best = optimal_risk(&loss, &p).map_err(|e| e.to_string())?;
                if risk - best > 1e-12 {
                    return Err(format!(
                        "k={k} p={:?}: LAD risk {risk} vs L* {best}",
                        p.probs()
                    ));
                }
                points += 1;
            }
        }
        Ok(format!("{points} grid points, exact"))
    });
}

/// 8. F-consistency: on a constant-odds-ratio population, the per-point
///    unconstrained optima of logistic AT and logistic CL have differences
///    alpha_i - alpha_{i+1} independent of the point, within 1e-6.
#[test]
fn criterion_8_f_consistency() {
    criterion("8 f-consistency", || {
        let base = SimplexPoint::new(vec![0.1, 0.2, 0.3, 0.4]).map_err(|e| e.to_string())?;
        let pop = SyntheticPopulation::proportional_odds(&base, &[-2.0, -1.0, 0.0, 1.0, 2.0])
            .map_err(|e| e.to_string())?;

        // sanity: the construction really has constant odds ratios
        let reference_r = odds_ratio(&pop.points()[0].eta).map_err(|e| e.to_string())?;
        for pt in pop.points() {
            let r = odds_ratio(&pt.eta).map_err(|e| e.to_string())?;
            for (a, b) in r.iter().zip(&reference_r) {
                if (a - b).abs() > 1e-9 {
                    return Err(format!("odds ratio drift {a} vs {b}"));
                }
            }
        }

        let k = base.k();
        let cfg = OptimConfig {
            grad_tolerance: 1e-10,
            ..OptimConfig::default()
        };
        let mut worst = 0.0f64;
        for family in [
            Family::AllThreshold(PhiKind::Logistic),
            Family::CumulativeLink(LinkKind::SigmoidLogit),
        ] {
            let spec = SurrogateSpec::new(family, k).map_err(|e| e.to_string())?;
            let mut reference: Option<Vec<f64>> = None;
            for pt in pop.points() {
                let out =
                    minimize_conditional(&spec, &pt.eta, &cfg).map_err(|e| e.to_string())?;
                let diffs: Vec<f64> = out
                    .alpha
                    .values()
                    .windows(2)
                    .map(|w| w[0] - w[1])
                    .collect();
                match &reference {
                    None => reference = Some(diffs),
                    Some(r) => {
                        for (a, b) in diffs.iter().zip(r) {
                            let gap = (a - b).abs();
                            worst = worst.max(gap);
                            if gap > 1e-6 {
                                return Err(format!(
                                    "{}: threshold-difference drift {gap:.3e} at x={:?}",
                                    spec.name(),
                                    pt.x
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(format!("max threshold-difference drift {worst:.3e}"))
    });
}

/// 9. Gradient integrity: analytic vs central-difference gradients agree to
///    1e-5 relative for every smooth surrogate at 500 random points each.
#[test]
fn criterion_9_gradient_integrity() {
    criterion("9 gradient-integrity", || {
        let mut rng = rng(9_000);
        let k = 5;
        let mut specs = Vec::new();
        for phi in [
            PhiKind::SquaredHinge,
            PhiKind::Logistic,
            PhiKind::Exponential,
            PhiKind::Squared,
        ] {
            specs.push(SurrogateSpec::at(phi.clone(), k).map_err(|e| e.to_string())?);
            specs.push(SurrogateSpec::it(phi.clone(), k).map_err(|e| e.to_string())?);
            specs.push(
                SurrogateSpec::gat(
                    phi.clone(),
                    AdmissibleLoss::squared_error(k).map_err(|e| e.to_string())?,
                )
                .map_err(|e| e.to_string())?,
            );
        }
        specs.push(SurrogateSpec::cl(LinkKind::SigmoidLogit, k).map_err(|e| e.to_string())?);
        specs.push(SurrogateSpec::cl(LinkKind::GaussianCdf, k).map_err(|e| e.to_string())?);

        let mut worst = 0.0f64;
        for spec in &specs {
            for _ in 0..500 {
                let mut v: Vec<f64> = (0..k - 1).map(|_| rng.random_range(-3.0..3.0)).collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi += 0.05 * i as f64;
                }
                let y = rng.random_range(1..=k);
                let alpha = DecisionVector::new(v.clone()).unwrap();
                let analytic = spec.grad(y, &alpha).map_err(|e| e.to_string())?;
                let err = grad_check(
                    |a| {
                        spec.eval(y, &DecisionVector::new(a.to_vec()).unwrap())
                            .unwrap()
                    },
                    &analytic,
                    &v,
                    1e-6,
                );
                worst = worst.max(err);
                if err > 1e-5 {
                    return Err(format!("{}: gradient error {err:.3e}", spec.name()));
                }
            }
        }
        Ok(format!(
            "{} surrogates x 500 points, max relative error {worst:.3e}",
            specs.len()
        ))
    });
}

/// 10a. On planted ordinal data the GAT surrogate beats least squares with
///      Wilcoxon p < 0.01 over 20 paired folds.
#[test]
fn criterion_10a_benchmark_planted() {
    criterion_within("10a benchmark-planted", 300.0, || {
        let (data, _) = planted_dataset(2000, 4, 5, 0.5, 0).map_err(|e| e.to_string())?;
        let cfg = CvConfig::default();
        let gat = cross_validate(
            &Method::Gat {
                phi: PhiKind::Logistic,
            },
            &data,
            &cfg,
        )
        .map_err(|e| e.to_string())?;
        let ls =
            cross_validate(&Method::LeastSquares, &data, &cfg).map_err(|e| e.to_string())?;
        let gat_mean: f64 = gat.fold_scores.iter().sum::<f64>() / 20.0;
        let ls_mean: f64 = ls.fold_scores.iter().sum::<f64>() / 20.0;
        let w = wilcoxon_signed_rank(&gat.fold_scores, &ls.fold_scores)
            .map_err(|e| e.to_string())?;
        if gat_mean >= ls_mean {
            return Err(format!("gat mean {gat_mean} not below ls mean {ls_mean}"));
        }
        if w.p_value >= 0.01 {
            return Err(format!("wilcoxon p {} not < 0.01", w.p_value));
        }
        Ok(format!(
            "gat {gat_mean:.4} vs ls {ls_mean:.4}, wilcoxon p = {:.3e}",
            w.p_value
        ))
    });
}

/// 10b. When the benchmark datasets are supplied (directory in
///      ORDREG_SETI_DIR), the harness completes and reports per-dataset
///      means; the GAT-vs-LS win count is reported, not hard-failed.
#[test]
fn criterion_10b_benchmark_datasets() {
    criterion_within("10b benchmark-datasets", 300.0, || {
        let Some(dir) = std::env::var_os("ORDREG_SETI_DIR") else {
            return Ok("SKIP: set ORDREG_SETI_DIR to a directory of dataset files".into());
        };
        let mut paths: Vec<_> = std::fs::read_dir(&dir)
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_file())
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err("ORDREG_SETI_DIR contains no files".into());
        }
        let cfg = CvConfig::default();
        let mut report = BenchmarkReport::default();
        let mut gat_wins = 0usize;
        let mut completed = 0usize;
        let mut lines = Vec::new();
        // failures are isolated so one bad file cannot hide the rest
        for path in &paths {
            let mut run = || -> Result<(), String> {
                let data = load_dataset(path, &Schema::default())
                    .and_then(|d| d.discretize(5))
                    .map_err(|e| e.to_string())?;
                let gat = cross_validate(
                    &Method::Gat {
                        phi: PhiKind::Logistic,
                    },
                    &data,
                    &cfg,
                )
                .map_err(|e| e.to_string())?;
                let ls = cross_validate(&Method::LeastSquares, &data, &cfg)
                    .map_err(|e| e.to_string())?;
                let w = wilcoxon_signed_rank(&gat.fold_scores, &ls.fold_scores)
                    .map_err(|e| e.to_string())?;
                let summaries = vec![
                    MethodSummary::from_scores("gat", gat.fold_scores),
                    MethodSummary::from_scores("ls", ls.fold_scores),
                ];
                if summaries[0].mean < summaries[1].mean {
                    gat_wins += 1;
                }
                lines.push(format!(
                    "{}: gat {:.4} ls {:.4} p={:.3e}",
                    data.name, summaries[0].mean, summaries[1].mean, w.p_value
                ));
                report.entries.push(DatasetReport {
                    dataset: data.name.clone(),
                    folds: cfg.folds,
                    methods: summaries,
                    wilcoxon_p: w.p_value,
                    significant: w.p_value < 0.01,
                });
                Ok(())
            };
            match run() {
                Ok(()) => completed += 1,
                Err(e) => lines.push(format!("{}: failed ({e})", path.display())),
            }
        }
        for line in &lines {
            println!("  {line}");
        }
        if completed == 0 {
            return Err("no supplied dataset could be processed".into());
        }
        Ok(format!(
            "{completed}/{} datasets completed, gat wins {gat_wins}/{completed} (directional target: majority)",
            paths.len()
        ))
    });
}

