//! Dataset ingestion, discretization, standardization, cross-validation
//! and reporting for the GAT-vs-least-squares benchmark.

pub mod cv;
pub mod report;
pub mod wilcoxon;

use std::path::Path;

use crate::error::{Error, Result};

/// Where the regression target sits in each row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetColumn {
    #[default]
    Last,
    First,
    Index(usize),
}

#[derive(Debug, Clone, Default)]
pub struct Schema {
    pub target: TargetColumn,
}

/// A parsed numeric table before target discretization.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub name: String,
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl LoadedData {
    pub fn n(&self) -> usize {
        self.features.len()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn discretize(self, k: usize) -> Result<Dataset> {
        let labels = discretize_targets(&self.targets, k)?;
        Dataset::from_parts(self.name, self.features, labels, k)
    }
}

/// A dataset ready for the harness: features plus labels in 1..=k with
/// every bin nonempty.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub k: usize,
}

impl Dataset {
    pub fn from_parts(
        name: String,
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        k: usize,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadClassCount { k });
        }
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: labels.len(),
            });
        }
        let mut seen = vec![false; k];
        for &y in &labels {
            if y < 1 || y > k {
                return Err(Error::LabelOutOfRange { label: y, k });
            }
            seen[y - 1] = true;
        }
        if let Some(bin) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyBin { bin: bin + 1 });
        }
        Ok(Self {
            name,
            features,
            labels,
            k,
        })
    }

    pub fn n(&self) -> usize {
        self.features.len()
    }
}

/// Parse a whitespace- or comma-delimited numeric text file, one sample per
/// row, target in the column named by the schema. Delimiter is detected
/// from the first data line. Row and column numbers in errors are 1-based.
pub fn load_dataset(path: &Path, schema: &Schema) -> Result<LoadedData> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    parse_delimited(&text, &name, schema).map_err(|e| match e {
        Error::EmptyFile { .. } => Error::EmptyFile {
            path: path.display().to_string(),
        },
        other => other,
    })
}

/// The parser behind [`load_dataset`], separated for in-memory tests.
pub fn parse_delimited(text: &str, name: &str, schema: &Schema) -> Result<LoadedData> {
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if lines.is_empty() {
        return Err(Error::EmptyFile {
            path: name.to_string(),
        });
    }
    let comma = lines[0].contains(',');
    let mut features = Vec::with_capacity(lines.len());
    let mut targets = Vec::with_capacity(lines.len());
    let mut width = None;
    for (row_idx, line) in lines.iter().enumerate() {
        let row = row_idx + 1;
        let tokens: Vec<&str> = if comma {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        let expected = *width.get_or_insert(tokens.len());
        if tokens.len() != expected {
            return Err(Error::RaggedRow {
                row,
                expected,
                found: tokens.len(),
            });
        }
        if tokens.len() < 2 {
            return Err(Error::RaggedRow {
                row,
                expected: 2,
                found: tokens.len(),
            });
        }
        let target_col = match schema.target {
            TargetColumn::Last => tokens.len() - 1,
            TargetColumn::First => 0,
            TargetColumn::Index(i) => {
                if i >= tokens.len() {
                    return Err(Error::RaggedRow {
                        row,
                        expected: i + 1,
                        found: tokens.len(),
                    });
                }
                i
            }
        };
        let mut x = Vec::with_capacity(tokens.len() - 1);
        for (col_idx, token) in tokens.iter().enumerate() {
            let value: f64 = token.parse().map_err(|_| Error::NonNumericCell {
                row,
                col: col_idx + 1,
                token: token.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteCell {
                    row,
                    col: col_idx + 1,
                });
            }
            if col_idx == target_col {
                targets.push(value);
            } else {
                x.push(value);
            }
        }
        features.push(x);
    }
    Ok(LoadedData {
        name: name.to_string(),
        features,
        targets,
    })
}

/// Equal-frequency binning of raw targets into labels 1..=k. Equal raw
/// values always receive the same label: a tie group spanning a bin
/// boundary is assigned to the lower bin of its first member.
pub fn discretize_targets(raw: &[f64], k: usize) -> Result<Vec<usize>> {
    let n = raw.len();
    if k < 2 {
        return Err(Error::BadClassCount { k });
    }
    if n < k {
        return Err(Error::TooFewSamples { n, min: k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw[a].partial_cmp(&raw[b]).expect("finite targets"));

    let mut distinct = 1;
    for w in 1..n {
        if raw[order[w]] != raw[order[w - 1]] {
            distinct += 1;
        }
    }
    if distinct < k {
        return Err(Error::TooFewDistinct { k, distinct });
    }

    let mut labels = vec![0usize; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && raw[order[end]] == raw[order[start]] {
            end += 1;
        }
        // rank-based bin of the group's first member
        let bin = 1 + start * k / n;
        for &idx in &order[start..end] {
            labels[idx] = bin;
        }
        start = end;
    }

    let mut seen = vec![false; k];
    for &l in &labels {
        seen[l - 1] = true;
    }
    if let Some(bin) = seen.iter().position(|s| !s) {
        return Err(Error::EmptyBin { bin: bin + 1 });
    }
    Ok(labels)
}

/// Per-feature affine map to zero mean and unit variance, fit on training
/// rows only. Zero-variance features map to 0.
#[derive(Debug, Clone)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(train: &[Vec<f64>]) -> Result<Self> {
        let n = train.len();
        if n == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let dim = train[0].len();
        let mut mean = vec![0.0; dim];
        for row in train {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= n as f64;
        }
        let mut var = vec![0.0; dim];
        for row in train {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                let d = x - m;
                *v += d * d;
            }
        }
        let scale = var
            .into_iter()
            .map(|v| {
                let sd = (v / n as f64).sqrt();
                if sd > 0.0 {
                    1.0 / sd
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Self { mean, scale })
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|row| {
                row.iter()
                    .zip(&self.mean)
                    .zip(&self.scale)
                    .map(|((x, m), s)| (x - m) * s)
                    .collect()
            })
            .collect()
    }
}

/// Fit on train, apply to both.
pub fn standardize(
    train: &[Vec<f64>],
    test: &[Vec<f64>],
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let std = Standardizer::fit(train)?;
    Ok((std.transform(train), std.transform(test)))
}
