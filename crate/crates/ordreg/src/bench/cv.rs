//! Seeded k-fold cross-validation with paired splits, scoring, and a
//! planted-model generator for the simulation checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{standardize, Dataset};
use crate::core::{AdmissibleLoss, PhiKind};
use crate::error::{Error, Result};
use crate::optim::{
    fit_least_squares, fit_linear_threshold, LinearThresholdModel, OptimConfig,
};
use crate::surrogates::SurrogateSpec;

/// The two competitors of the benchmark.
#[derive(Debug, Clone)]
pub enum Method {
    /// Generalized all threshold with squared-error increments.
    Gat { phi: PhiKind },
    LeastSquares,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Gat { .. } => "gat",
            Method::LeastSquares => "ls",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CvConfig {
    pub folds: usize,
    /// Number of reshuffled repetitions; fold scores are concatenated.
    pub repeats: usize,
    pub seed: u64,
    pub standardize: bool,
    /// Deal each class round-robin into folds instead of shuffling globally.
    pub stratify: bool,
    pub optim: OptimConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 20,
            repeats: 1,
            seed: 0,
            standardize: true,
            stratify: false,
            optim: OptimConfig::erm_defaults(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub fold_scores: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Mean squared difference between predicted and true labels.
pub fn squared_error_score(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::TooFewSamples { n: 0, min: 1 });
    }
    let total: f64 = pred
        .iter()
        .zip(truth)
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    Ok(total / pred.len() as f64)
}

/// The shuffled fold assignment for (n, folds, seed, repeat). Splits depend
/// on nothing else, so every method sees identical train/test partitions:
/// the comparison is paired by construction.
pub fn kfold_indices(n: usize, folds: usize, seed: u64, repeat: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = fold_rng(seed, repeat);
    shuffle(&mut order, &mut rng);
    let mut out = vec![Vec::new(); folds];
    for (pos, idx) in order.into_iter().enumerate() {
        out[pos % folds].push(idx);
    }
    out
}

/// Stratified variant: each class is shuffled separately and dealt
/// round-robin, so fold class proportions track the dataset's.
pub fn stratified_kfold_indices(
    labels: &[usize],
    k: usize,
    folds: usize,
    seed: u64,
    repeat: u64,
) -> Vec<Vec<usize>> {
    let mut rng = fold_rng(seed, repeat);
    let mut out = vec![Vec::new(); folds];
    let mut pos = 0usize;
    for class in 1..=k {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        shuffle(&mut members, &mut rng);
        for idx in members {
            out[pos % folds].push(idx);
            pos += 1;
        }
    }
    out
}

fn fold_rng(seed: u64, repeat: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (repeat.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn shuffle(order: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
}

/// Cross-validate one method. Deterministic for a fixed config.
pub fn cross_validate(method: &Method, data: &Dataset, cfg: &CvConfig) -> Result<CvOutcome> {
    let n = data.n();
    if cfg.folds < 2 || cfg.folds > n {
        return Err(Error::BadFoldCount {
            folds: cfg.folds,
            n,
        });
    }
    if cfg.repeats == 0 {
        return Err(Error::BadOptimConfig {
            reason: "repeats must be positive",
        });
    }
    let mut warnings = Vec::new();
    let mut class_counts = vec![0usize; data.k];
    for &y in &data.labels {
        class_counts[y - 1] += 1;
    }
    if let Some(min_count) = class_counts.iter().min() {
        if cfg.folds > *min_count {
            warnings.push(format!(
                "{}: {} folds exceed the support of the rarest class ({}); some training folds may miss it",
                data.name, cfg.folds, min_count
            ));
        }
    }

    let mut fold_scores = Vec::with_capacity(cfg.folds * cfg.repeats);
    for repeat in 0..cfg.repeats {
        let folds = if cfg.stratify {
            stratified_kfold_indices(&data.labels, data.k, cfg.folds, cfg.seed, repeat as u64)
        } else {
            kfold_indices(n, cfg.folds, cfg.seed, repeat as u64)
        };
        for test_idx in &folds {
            let train_idx: Vec<usize> =
                (0..n).filter(|i| !test_idx.contains(i)).collect();
            let score = run_fold(method, data, &train_idx, test_idx, cfg)?;
            fold_scores.push(score);
        }
    }
    Ok(CvOutcome {
        fold_scores,
        warnings,
    })
}

/// Cross-validate several methods on identical splits.
pub fn paired_cross_validate(
    methods: &[Method],
    data: &Dataset,
    cfg: &CvConfig,
) -> Result<Vec<CvOutcome>> {
    methods
        .iter()
        .map(|m| cross_validate(m, data, cfg))
        .collect()
}

fn run_fold(
    method: &Method,
    data: &Dataset,
    train_idx: &[usize],
    test_idx: &[usize],
    cfg: &CvConfig,
) -> Result<f64> {
    let gather = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
        (
            idx.iter().map(|&i| data.features[i].clone()).collect(),
            idx.iter().map(|&i| data.labels[i]).collect(),
        )
    };
    let (train_x, train_y) = gather(train_idx);
    let (test_x, test_y) = gather(test_idx);
    let (train_x, test_x) = if cfg.standardize {
        standardize(&train_x, &test_x)?
    } else {
        (train_x, test_x)
    };

    let predictions: Vec<usize> = match method {
        Method::Gat { phi } => {
            let loss = AdmissibleLoss::squared_error(data.k)?;
            let spec = SurrogateSpec::gat(phi.clone(), loss)?;
            let fitted = fit_linear_threshold(&spec, &train_x, &train_y, &cfg.optim)?;
            test_x.iter().map(|x| fitted.model.predict(x)).collect()
        }
        Method::LeastSquares => {
            let targets: Vec<f64> = train_y.iter().map(|&y| y as f64).collect();
            let model = fit_least_squares(&train_x, &targets)?;
            test_x
                .iter()
                .map(|x| model.predict_label(x, data.k))
                .collect()
        }
    };
    squared_error_score(&predictions, &test_y)
}

/// Data from a planted linear threshold model with logistic score noise:
/// y = 1 + #{j : theta_j < <w, x> + eps}. The thresholds are deliberately
/// uneven, which a straight-line least-squares fit of the labels cannot
/// represent.
pub fn planted_dataset(
    n: usize,
    dim: usize,
    k: usize,
    noise_scale: f64,
    seed: u64,
) -> Result<(Dataset, LinearThresholdModel)> {
    if k < 2 {
        return Err(Error::BadClassCount { k });
    }
    if n < 4 * k {
        return Err(Error::TooFewSamples { n, min: 4 * k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..dim)
        .map(|j| if j % 2 == 0 { 1.0 } else { -0.5 } * (1.0 + j as f64 / dim as f64))
        .collect();
    // uneven spacing: crowded low thresholds, one wide top gap
    let thresholds: Vec<f64> = (1..k)
        .map(|j| {
            let t = j as f64 / k as f64;
            3.0 * (t * t * t) - 1.2 + 0.3 * j as f64
        })
        .collect();
    let model = LinearThresholdModel::new(weights, thresholds)?;

    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..dim).map(|_| standard_normal(&mut rng)).collect();
        let score = model.score(&x);
        let u: f64 = rng.random_range(1e-12..1.0 - 1e-12);
        let eps = noise_scale * (u / (1.0 - u)).ln();
        let noisy = score + eps;
        let y = 1 + model
            .thresholds()
            .iter()
            .filter(|&&t| t < noisy)
            .count();
        features.push(x);
        labels.push(y);
    }
    // planted draws can miss a class for tiny n; resample deterministically
    let mut seen = vec![false; k];
    for &y in &labels {
        seen[y - 1] = true;
    }
    if seen.iter().any(|s| !s) {
        return planted_dataset(n, dim, k, noise_scale, seed.wrapping_add(1));
    }
    let dataset = Dataset::from_parts(format!("planted_n{n}_seed{seed}"), features, labels, k)?;
    Ok((dataset, model))
}

/// Box-Muller standard normal draw.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
