//! End-to-end runs of the compiled binary: output format, exit codes and
//! determinism.

use std::path::Path;
use std::process::{Command, Output};

fn ordreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn line_value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("missing {key}= line in:\n{text}"))
}

#[test]
fn risk_with_surrogate_reports_all_fields() {
    let out = ordreg(&[
        "risk",
        "--surrogate",
        "at",
        "--phi",
        "hinge",
        "--p",
        "0.25,0.75",
        "--alpha",
        "-1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(line_value(&text, "A"), "0.5");
    assert_eq!(line_value(&text, "A_star"), "0.5");
    assert_eq!(line_value(&text, "excess"), "0");
    assert_eq!(line_value(&text, "pred"), "2");
}

#[test]
fn risk_without_surrogate_reports_target_loss_only() {
    let out = ordreg(&["risk", "--p", "0.2,0.3,0.5", "--alpha", "1,2", "--loss", "absolute"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(line_value(&text, "L"), "1.3");
    assert_eq!(line_value(&text, "L_star"), "0.7");
    assert_eq!(line_value(&text, "bayes_labels"), "2,3");
    assert!(!text.contains("A="));
}

#[test]
fn risk_rejects_non_monotone_alpha_with_usage_exit() {
    let out = ordreg(&["risk", "--p", "0.5,0.5,0.0", "--alpha", "2,1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not monotone"), "{err}");
}

#[test]
fn risk_csv_is_written_when_requested() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("risk.csv");
    let out = ordreg(&[
        "risk",
        "--p",
        "0.2,0.3,0.5",
        "--alpha",
        "1,2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "pred,L,L_star,excess,bayes_labels,A,A_star"
    );
    assert!(lines.next().unwrap().starts_with("1,1.3,0.7,0.6,2;3,"));
}

#[test]
fn consistency_passes_for_logistic_at() {
    let out = ordreg(&[
        "consistency",
        "--surrogate",
        "at",
        "--phi",
        "logistic",
        "--k",
        "3",
        "--step",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert_eq!(line_value(&text, "verdict"), "pass");
    assert_eq!(line_value(&text, "points"), "66");
}

#[test]
fn consistency_fails_for_the_kinked_witness_with_exit_one() {
    let out = ordreg(&[
        "consistency",
        "--surrogate",
        "at",
        "--phi",
        "kinked",
        "--k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert_eq!(line_value(&text, "verdict"), "fail");
    let worst: f64 = line_value(&text, "max_excess").parse().unwrap();
    assert!(worst > 0.01);
}

#[test]
fn consistency_passes_for_the_cumulative_link_at_k4() {
    let out = ordreg(&[
        "consistency",
        "--surrogate",
        "cl",
        "--link",
        "logit",
        "--k",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(line_value(&stdout_of(&out), "verdict"), "pass");
}

#[test]
fn consistency_guard_rail_is_a_usage_error() {
    let out = ordreg(&[
        "consistency",
        "--surrogate",
        "at",
        "--phi",
        "logistic",
        "--k",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn consistency_grid_csv_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let out = ordreg(&[
        "consistency",
        "--surrogate",
        "lad",
        "--k",
        "3",
        "--step",
        "0.2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p1,p2,p3,excess");
    // C(5 + 2, 2) = 21 grid points
    assert_eq!(lines.len(), 22);
}

#[test]
fn bench_runs_a_dataset_file_and_emits_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let data_path = dir.path().join("toy.txt");
    // linear target over two features, 60 rows
    let mut rows = String::new();
    for i in 0..60 {
        let a = (i % 10) as f64 / 3.0;
        let b = ((i * 7) % 11) as f64 / 5.0;
        let t = 2.0 * a - b + (i % 3) as f64 * 0.05;
        rows.push_str(&format!("{a} {b} {t}\n"));
    }
    std::fs::write(&data_path, rows).unwrap();

    let report = dir.path().join("report.csv");
    let out = ordreg(&[
        "bench",
        "--data",
        data_path.to_str().unwrap(),
        "--k",
        "3",
        "--folds",
        "5",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.contains("dataset=toy"));
    assert!(text.contains("gat_wins="));
    let csv = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "dataset,method,mean_sq_error,std_sq_error,folds,wilcoxon_p,significant"
    );
    assert_eq!(lines.len(), 3); // header + gat + ls
    assert!(lines[1].starts_with("toy,gat,"));
    assert!(lines[2].starts_with("toy,ls,"));
}

#[test]
fn bench_isolates_missing_files_and_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "1 0.5\n2 1.5\n3 2.5\n4 3.5\n1 0.6\n2 1.4\n3 2.6\n4 3.4\n").unwrap();
    let report = dir.path().join("report.csv");
    let missing = dir.path().join("no_such_file.txt");
    let out = ordreg(&[
        "bench",
        "--data",
        good.to_str().unwrap(),
        "--data",
        missing.to_str().unwrap(),
        "--k",
        "2",
        "--folds",
        "4",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no_such_file"), "{err}");
    // the good dataset still ran
    assert!(stdout_of(&out).contains("dataset=good"));
    assert!(Path::new(&report).exists());
}

#[test]
fn bench_synthetic_run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = dir.path().join("r1.csv");
    let r2 = dir.path().join("r2.csv");
    for path in [&r1, &r2] {
        let out = ordreg(&[
            "bench",
            "--synthetic",
            "planted",
            "--n",
            "300",
            "--k",
            "3",
            "--folds",
            "6",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&r1).unwrap(), std::fs::read(&r2).unwrap());
}

#[test]
fn risk_inputs_can_come_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let p_file = dir.path().join("p.txt");
    let a_file = dir.path().join("alpha.txt");
    std::fs::write(&p_file, "0.2, 0.3, 0.5\n").unwrap();
    std::fs::write(&a_file, "1 2\n").unwrap();
    let out = ordreg(&[
        "risk",
        "--p-file",
        p_file.to_str().unwrap(),
        "--alpha-file",
        a_file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert_eq!(line_value(&text, "L"), "1.3");
}

#[test]
fn usage_error_exit_code_is_two() {
    let out = ordreg(&["bench"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ordreg(&["consistency", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ordreg(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}
