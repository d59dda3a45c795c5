//! Benchmark report assembly and CSV emission.

use std::path::Path;

use crate::error::{Error, Result};

/// Significance threshold on the Wilcoxon p-value.
pub const SIGNIFICANCE_LEVEL: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub method: String,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
}

impl MethodSummary {
    pub fn from_scores(method: &str, fold_scores: Vec<f64>) -> Self {
        let n = fold_scores.len().max(1) as f64;
        let mean = fold_scores.iter().sum::<f64>() / n;
        // sample standard deviation across folds
        let var = if fold_scores.len() > 1 {
            fold_scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            method: method.to_string(),
            fold_scores,
            mean,
            std_dev: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DatasetReport {
    pub dataset: String,
    pub folds: usize,
    pub methods: Vec<MethodSummary>,
    pub wilcoxon_p: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Default)]
pub struct BenchmarkReport {
    pub entries: Vec<DatasetReport>,
}

impl BenchmarkReport {
    /// Stable output order: dataset name, then method name.
    pub fn sort(&mut self) {
        self.entries.sort_by(|a, b| a.dataset.cmp(&b.dataset));
        for entry in &mut self.entries {
            entry.methods.sort_by(|a, b| a.method.cmp(&b.method));
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "dataset,method,mean_sq_error,std_sq_error,folds,wilcoxon_p,significant\n",
        );
        for entry in &self.entries {
            for m in &entry.methods {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    entry.dataset,
                    m.method,
                    format_significant(m.mean),
                    format_significant(m.std_dev),
                    entry.folds,
                    format_significant(entry.wilcoxon_p),
                    entry.significant
                ));
            }
        }
        out
    }
}

/// Write the CSV atomically: emit to a sibling temp file, then rename.
pub fn emit_report(report: &BenchmarkReport, path: &Path) -> Result<()> {
    let csv = report.to_csv();
    let tmp = path.with_extension("csv.tmp");
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::write(&tmp, csv).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

/// Up to nine significant digits, %.9g style: fixed notation in the middle
/// of the range, scientific at the extremes, trailing zeros trimmed. Keeps
/// reports diffable across runs.
pub fn format_significant(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.8e}", x);
    let (_, exp) = sci.split_once('e').expect("always has an exponent");
    let exp: i32 = exp.parse().expect("valid exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_decimal(&fixed)
    } else {
        let (mant, exp) = sci.split_once('e').expect("checked");
        format!("{}e{}", trim_decimal(mant), exp)
    }
}

fn trim_decimal(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> BenchmarkReport {
        let mk = |name: &str, scores: Vec<f64>| MethodSummary::from_scores(name, scores);
        let mut report = BenchmarkReport::default();
        report.entries.push(DatasetReport {
            dataset: "wine".into(),
            folds: 2,
            methods: vec![mk("ls", vec![1.5, 2.5]), mk("gat", vec![1.0, 2.0])],
            wilcoxon_p: 0.005,
            significant: true,
        });
        report.entries.push(DatasetReport {
            dataset: "abalone".into(),
            folds: 2,
            methods: vec![mk("gat", vec![0.5, 0.7]), mk("ls", vec![0.6, 0.8])],
            wilcoxon_p: 0.5,
            significant: false,
        });
        report.sort();
        report
    }

    #[test]
    fn csv_shape_and_ordering() {
        let report = sample_report();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[0],
            "dataset,method,mean_sq_error,std_sq_error,folds,wilcoxon_p,significant"
        );
        assert!(lines[1].starts_with("abalone,gat,"));
        assert!(lines[2].starts_with("abalone,ls,"));
        assert!(lines[3].starts_with("wine,gat,"));
        assert!(lines[4].starts_with("wine,ls,"));
        assert!(lines[3].ends_with(",true"));
        assert!(lines[1].ends_with(",false"));
    }

    #[test]
    fn significance_threshold() {
        let report = sample_report();
        assert!(report.entries[1].wilcoxon_p < SIGNIFICANCE_LEVEL);
        assert!(report.entries[1].significant);
        assert!(!report.entries[0].significant);
    }

    #[test]
    fn emission_is_atomic_and_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let report = sample_report();
        emit_report(&report, &path).unwrap();
        let first = std::fs::read(&path).unwrap();
        emit_report(&report, &path).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
        assert!(!dir.path().join("report.csv.tmp").exists());
    }

    #[test]
    fn nine_significant_digit_formatting() {
        assert_eq!(format_significant(0.5), "0.5");
        assert_eq!(format_significant(1.3), "1.3");
        assert_eq!(format_significant(0.0), "0");
        assert_eq!(format_significant(-0.0), "0");
        assert_eq!(format_significant(0.083984375), "0.083984375");
        assert_eq!(format_significant(1.0 / 3.0), "0.333333333");
        assert_eq!(format_significant(123456789.0), "123456789");
        assert_eq!(format_significant(1.23e-12), "1.23e-12");
        assert_eq!(format_significant(-2.5e14), "-2.5e14");
    }
}
