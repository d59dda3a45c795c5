//! Command-line front end: single-point risk reports, exhaustive
//! consistency sweeps and the GAT-vs-least-squares benchmark.
//!
//! Exit codes encode verdicts so CI can consume sweeps directly:
//! 0 = pass, 1 = property violated (or a dataset failed), 2 = usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ordreg::bench::cv::{cross_validate, planted_dataset, CvConfig, Method};
use ordreg::bench::report::{
    emit_report, format_significant, BenchmarkReport, DatasetReport, MethodSummary,
    SIGNIFICANCE_LEVEL,
};
use ordreg::bench::wilcoxon::wilcoxon_signed_rank;
use ordreg::bench::{load_dataset, Schema, TargetColumn};
use ordreg::consistency::{sweep_consistency_detailed, SweepConfig};
use ordreg::core::phi::kinked_witness;
use ordreg::core::{AdmissibleLoss, DecisionVector, LinkKind, PhiKind, SimplexPoint};
use ordreg::optim::OptimConfig;
use ordreg::risk::grid::simplex_grid;
use ordreg::risk::risk_report;
use ordreg::surrogates::SurrogateSpec;

#[derive(Parser)]
#[command(name = "ordreg", version, about = "Ordinal regression surrogate toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate conditional risk, surrogate risk and Bayes labels at one point.
    Risk(RiskArgs),
    /// Sweep a simplex grid and report the worst excess risk of a surrogate.
    Consistency(ConsistencyArgs),
    /// Cross-validate GAT against least squares on datasets.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PhiArg {
    Hinge,
    SquaredHinge,
    Logistic,
    Exponential,
    Squared,
    /// The convex-but-kinked-at-zero counterexample max(1-2t, 1-t).
    Kinked,
}

impl PhiArg {
    fn to_phi(self) -> PhiKind {
        match self {
            PhiArg::Hinge => PhiKind::Hinge,
            PhiArg::SquaredHinge => PhiKind::SquaredHinge,
            PhiArg::Logistic => PhiKind::Logistic,
            PhiArg::Exponential => PhiKind::Exponential,
            PhiArg::Squared => PhiKind::Squared,
            PhiArg::Kinked => kinked_witness(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LinkArg {
    Logit,
    Gaussian,
}

impl LinkArg {
    fn to_link(self) -> LinkKind {
        match self {
            LinkArg::Logit => LinkKind::SigmoidLogit,
            LinkArg::Gaussian => LinkKind::GaussianCdf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Absolute,
    ZeroOne,
    SquaredError,
}

impl LossArg {
    fn to_loss(self, k: usize) -> Result<AdmissibleLoss, ordreg::Error> {
        match self {
            LossArg::Absolute => AdmissibleLoss::absolute(k),
            LossArg::ZeroOne => AdmissibleLoss::zero_one(k),
            LossArg::SquaredError => AdmissibleLoss::squared_error(k),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SurrogateArg {
    At,
    It,
    Cl,
    Lad,
    Gat,
}

#[derive(Args)]
struct SurrogateFlags {
    /// Surrogate family.
    #[arg(long, value_enum)]
    surrogate: Option<SurrogateArg>,
    /// Base convex loss for at/it/gat.
    #[arg(long, value_enum, default_value = "logistic")]
    phi: PhiArg,
    /// Link function for cl.
    #[arg(long, value_enum, default_value = "logit")]
    link: LinkArg,
    /// Task loss (targets the sweep oracle; also the gat increments).
    #[arg(long, value_enum)]
    loss: Option<LossArg>,
}

impl SurrogateFlags {
    fn build(&self, k: usize) -> Result<Option<SurrogateSpec>, ordreg::Error> {
        let Some(kind) = self.surrogate else {
            return Ok(None);
        };
        let spec = match kind {
            SurrogateArg::At => SurrogateSpec::at(self.phi.to_phi(), k)?,
            SurrogateArg::It => SurrogateSpec::it(self.phi.to_phi(), k)?,
            SurrogateArg::Cl => SurrogateSpec::cl(self.link.to_link(), k)?,
            SurrogateArg::Lad => SurrogateSpec::lad(k)?,
            SurrogateArg::Gat => {
                let loss = self.loss.unwrap_or(LossArg::SquaredError).to_loss(k)?;
                SurrogateSpec::gat(self.phi.to_phi(), loss)?
            }
        };
        Ok(Some(spec))
    }
}

#[derive(Args)]
struct RiskArgs {
    /// Conditional label distribution, comma separated (defines k).
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "p_file",
        required_unless_present = "p_file"
    )]
    p: Vec<f64>,
    /// Read the distribution from a file of whitespace/comma numbers.
    #[arg(long)]
    p_file: Option<PathBuf>,
    /// Decision vector, comma separated, k-1 nondecreasing values.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "alpha_file",
        required_unless_present = "alpha_file"
    )]
    alpha: Vec<f64>,
    /// Read the decision vector from a file.
    #[arg(long)]
    alpha_file: Option<PathBuf>,
    #[command(flatten)]
    surrogate: SurrogateFlags,
    /// Also write the report as a one-row CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn numbers_from(inline: Vec<f64>, file: Option<&PathBuf>) -> Result<Vec<f64>, ordreg::Error> {
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|source| ordreg::Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut out = Vec::new();
        for (i, token) in text.split([',', ' ', '\n', '\t', '\r']).enumerate() {
            let token = token.trim();
            if token.is_empty() {
                continue;
            }
            out.push(token.parse().map_err(|_| ordreg::Error::NonNumericCell {
                row: 1,
                col: i + 1,
                token: token.to_string(),
            })?);
        }
        return Ok(out);
    }
    Ok(inline)
}

#[derive(Args)]
struct ConsistencyArgs {
    /// Class count (grid sweeps are exhaustive; guarded at k <= 7).
    #[arg(long, short)]
    k: usize,
    #[command(flatten)]
    surrogate: SurrogateFlags,
    /// Grid step; must divide 1 evenly.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Maximum excess risk accepted as consistent.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Optimizer iteration budget per grid point.
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Write per-grid-point excess risks as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Dataset files (numeric text, target in the last column by default).
    #[arg(long)]
    data: Vec<PathBuf>,
    /// Add a synthetic dataset drawn from a planted threshold model.
    #[arg(long, value_parser = ["planted"])]
    synthetic: Option<String>,
    /// Sample count for --synthetic.
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Feature dimension for --synthetic.
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// Logistic noise scale for --synthetic.
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    /// Bins for target discretization (and classes of the synthetic data).
    #[arg(long, short, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    folds: usize,
    /// Re-shuffled repetitions of the whole CV (scores are concatenated).
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base loss for the GAT surrogate.
    #[arg(long, value_enum, default_value = "logistic")]
    phi: PhiArg,
    /// Target column position: last, first, or a 1-based index.
    #[arg(long, default_value = "last")]
    target_column: String,
    /// Skip per-fold feature standardization.
    #[arg(long)]
    no_standardize: bool,
    /// Stratify folds by class.
    #[arg(long)]
    stratify: bool,
    /// Report CSV path.
    #[arg(long, default_value = "ordreg_bench.csv")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Risk(args) => cmd_risk(args),
        Command::Consistency(args) => cmd_consistency(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn cmd_risk(args: RiskArgs) -> Result<ExitCode, ordreg::Error> {
    let p_values = numbers_from(args.p, args.p_file.as_ref())?;
    let alpha_values = numbers_from(args.alpha, args.alpha_file.as_ref())?;
    let p = SimplexPoint::new(p_values)?;
    let k = p.k();
    let alpha = DecisionVector::new(alpha_values)?;
    let spec = args.surrogate.build(k)?;
    // explicit --loss wins; otherwise the surrogate names its target loss,
    // and a bare query defaults to the absolute error
    let loss = match (args.surrogate.loss, &spec) {
        (Some(loss), _) => loss.to_loss(k)?,
        (None, Some(spec)) => spec.target_loss(),
        (None, None) => AdmissibleLoss::absolute(k)?,
    };
    let report = risk_report(&loss, spec.as_ref(), &alpha, &p, &OptimConfig::default())?;

    let labels: Vec<String> = report.bayes_labels.iter().map(usize::to_string).collect();
    println!("pred={}", alpha.pred());
    println!("L={}", format_significant(report.l_value));
    println!("L_star={}", format_significant(report.l_star));
    println!("excess={}", format_significant(report.excess));
    println!("bayes_labels={}", labels.join(","));
    if let (Some(a), Some(a_star)) = (report.a_value, report.a_star) {
        println!("A={}", format_significant(a));
        println!("A_star={}", format_significant(a_star));
    }

    if let Some(path) = args.csv {
        let mut csv = String::from("pred,L,L_star,excess,bayes_labels,A,A_star\n");
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            alpha.pred(),
            format_significant(report.l_value),
            format_significant(report.l_star),
            format_significant(report.excess),
            labels.join(";"),
            report.a_value.map(format_significant).unwrap_or_default(),
            report.a_star.map(format_significant).unwrap_or_default(),
        ));
        write_text(&path, &csv)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_consistency(args: ConsistencyArgs) -> Result<ExitCode, ordreg::Error> {
    let resolution = (1.0 / args.step).round();
    if !(args.step > 0.0) || (1.0 / args.step - resolution).abs() > 1e-9 {
        return Err(ordreg::Error::BadOptimConfig {
            reason: "step must divide 1 evenly",
        });
    }
    let spec = args
        .surrogate
        .build(args.k)?
        .ok_or(ordreg::Error::BadOptimConfig {
            reason: "--surrogate is required for consistency sweeps",
        })?;
    let mut cfg = SweepConfig::new(spec, resolution as usize);
    cfg.tolerance = args.tolerance;
    cfg.optim.max_iters = args.max_iters;
    let (outcome, excesses) = sweep_consistency_detailed(&cfg)?;

    println!("surrogate={}", cfg.spec.name());
    println!("k={}", args.k);
    println!("step={}", format_significant(args.step));
    println!("points={}", outcome.n_points);
    println!("max_excess={}", format_significant(outcome.max_excess));
    let worst: Vec<String> = outcome
        .worst_p
        .probs()
        .iter()
        .map(|v| format_significant(*v))
        .collect();
    println!("worst_p={}", worst.join(","));
    println!("verdict={}", if outcome.passed { "pass" } else { "fail" });

    if let Some(path) = args.out {
        let grid = simplex_grid(args.k, resolution as usize);
        let mut csv = String::new();
        for i in 1..=args.k {
            csv.push_str(&format!("p{i},"));
        }
        csv.push_str("excess\n");
        for (point, excess) in grid.iter().zip(&excesses) {
            for v in point.probs() {
                csv.push_str(&format_significant(*v));
                csv.push(',');
            }
            csv.push_str(&format_significant(*excess));
            csv.push('\n');
        }
        write_text(&path, &csv)?;
    }
    Ok(if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, ordreg::Error> {
    let schema = Schema {
        target: match args.target_column.as_str() {
            "last" => TargetColumn::Last,
            "first" => TargetColumn::First,
            other => {
                let idx: usize = other.parse().map_err(|_| ordreg::Error::BadOptimConfig {
                    reason: "target-column must be last, first or a 1-based index",
                })?;
                if idx == 0 {
                    return Err(ordreg::Error::BadOptimConfig {
                        reason: "target-column index is 1-based",
                    });
                }
                TargetColumn::Index(idx - 1)
            }
        },
    };
    if args.data.is_empty() && args.synthetic.is_none() {
        return Err(ordreg::Error::BadOptimConfig {
            reason: "provide --data files and/or --synthetic planted",
        });
    }

    let cv_cfg = CvConfig {
        folds: args.folds,
        repeats: args.repeats,
        seed: args.seed,
        standardize: !args.no_standardize,
        stratify: args.stratify,
        optim: OptimConfig::erm_defaults(),
    };
    let methods = [
        Method::Gat {
            phi: args.phi.to_phi(),
        },
        Method::LeastSquares,
    ];

    let mut report = BenchmarkReport::default();
    let mut failures: Vec<(String, String)> = Vec::new();
    let mut gat_wins = 0usize;
    let mut ls_wins = 0usize;
    let mut ties = 0usize;

    let mut datasets = Vec::new();
    if args.synthetic.is_some() {
        let (data, _) = planted_dataset(args.n, args.dim, args.k, args.noise, args.seed)?;
        datasets.push(data);
    }
    for path in &args.data {
        match load_dataset(path, &schema).and_then(|d| d.discretize(args.k)) {
            Ok(data) => datasets.push(data),
            Err(err) => failures.push((path.display().to_string(), err.to_string())),
        }
    }

    for data in &datasets {
        let run = || -> Result<DatasetReport, ordreg::Error> {
            let mut summaries = Vec::new();
            let mut scores = Vec::new();
            for method in &methods {
                let out = cross_validate(method, data, &cv_cfg)?;
                for w in &out.warnings {
                    eprintln!("warning: {w}");
                }
                summaries.push(MethodSummary::from_scores(method.name(), out.fold_scores.clone()));
                scores.push(out.fold_scores);
            }
            let wilcoxon = wilcoxon_signed_rank(&scores[0], &scores[1])?;
            Ok(DatasetReport {
                dataset: data.name.clone(),
                folds: cv_cfg.folds * cv_cfg.repeats,
                methods: summaries,
                wilcoxon_p: wilcoxon.p_value,
                significant: wilcoxon.p_value < SIGNIFICANCE_LEVEL,
            })
        };
        match run() {
            Ok(entry) => {
                let gat = entry.methods.iter().find(|m| m.method == "gat").expect("gat ran");
                let ls = entry.methods.iter().find(|m| m.method == "ls").expect("ls ran");
                let winner = if gat.mean < ls.mean {
                    gat_wins += 1;
                    "gat"
                } else if ls.mean < gat.mean {
                    ls_wins += 1;
                    "ls"
                } else {
                    ties += 1;
                    "tie"
                };
                println!(
                    "dataset={} gat={} ls={} wilcoxon_p={} significant={} winner={}",
                    entry.dataset,
                    format_significant(gat.mean),
                    format_significant(ls.mean),
                    format_significant(entry.wilcoxon_p),
                    entry.significant,
                    winner
                );
                report.entries.push(entry);
            }
            Err(err) => failures.push((data.name.clone(), err.to_string())),
        }
    }

    report.sort();
    emit_report(&report, &args.out)?;
    println!("gat_wins={gat_wins} ls_wins={ls_wins} ties={ties}");
    println!("report={}", args.out.display());
    for (path, err) in &failures {
        eprintln!("failed: {path}: {err}");
    }
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), ordreg::Error> {
    std::fs::write(path, text).map_err(|source| ordreg::Error::Io {
        path: path.display().to_string(),
        source,
    })
}
