use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use randsing::bounds::BoundReport;
use randsing::montecarlo::RunManifest;
use randsing::rational::q;
use randsing_cli::report::{BoundRecord, CheckLawReport, DecomposeReport, Provenance, StrongRankRecord};

fn randsing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randsing"))
        .args(args)
        .env_remove("RANDSING_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn decompose_report_round_trips() {
    let out = randsing(&["decompose", "--dist", "discrete{0:1/2, 1:1/2}", "--rho", "1/4"]);
    let text = stdout(&out);
    let report: DecomposeReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.decomposition.p, q(1, 2));
    assert_eq!(report.pushforward.as_ref(), Some(&report.dist));
    assert!(report.decomposition.reconstructs_law);
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);
    assert!(text.contains("\"x_minus\": \"1/3\""));
}

#[test]
fn shifted_variant_reports_the_broken_law() {
    let out = randsing(&["decompose", "--dist", "discrete{0:1/2, 1:1/2}", "--rho", "1/4", "--variant", "shifted"]);
    let report: DecomposeReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.pushforward.unwrap().to_string(), "discrete{0/1:1/2, 4/3:1/2}");
    assert!(!report.decomposition.reconstructs_law);
}

#[test]
fn check_law_diagnostics() {
    let out = randsing(&["check-law", "--dist", "uniform{(0,1/4):1/2, (3/4,1):1/2}", "--rho", "1/10"]);
    let report: CheckLawReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.reconstructs_law && !report.gap_case);
    assert_eq!(report.t2_within_bound, Some(true));
}

#[test]
fn exit_codes() {
    let no_witness = randsing(&["check-law", "--dist", "discrete{5:1}", "--rho", "1/10"]);
    assert_eq!(no_witness.status.code(), Some(3));
    let bad_literal = randsing(&["decompose", "--dist", "discrete{0:1/2", "--rho", "1/4"]);
    assert_eq!(bad_literal.status.code(), Some(2));
    let bad_rho = randsing(&["decompose", "--dist", "discrete{0:1/2, 1:1/2}", "--rho", "1/2"]);
    assert_eq!(bad_rho.status.code(), Some(2));
    let bad_thresholds = randsing(&["bound", "--n", "10", "--p0", "3/4", "--alpha", "0.1", "--beta", "0.2"]);
    assert_eq!(bad_thresholds.status.code(), Some(2));
    let no_trials = randsing(&["simulate", "--dist", "discrete{0:1/2, 1:1/2}", "--n", "2", "--trials", "0"]);
    assert_eq!(no_trials.status.code(), Some(2));
    let missing = randsing(&["strong-rank", "--matrix", "/nonexistent/matrix.txt"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn bound_with_auto_thresholds() {
    let out = randsing(&["bound", "--n", "1000", "--p0", "3/4", "--auto-thresholds"]);
    let record: BoundRecord = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(record.thresholds, Provenance::Optimized);
    assert_eq!(record.c_source, Provenance::Default);
    assert!(record.report.exp_alpha < 0.0 && record.report.exp_beta < 0.0);
    let report: BoundReport = record.report;
    assert!((report.total - (report.term_sr + report.term_rows + report.term_lo)).abs() < 1e-12);
}

#[test]
fn bound_scan_csv() {
    let out = randsing(&["bound", "--p0", "3/4", "--alpha", "0.2", "--beta", "0.05", "--c", "1", "--scan", "n=10..30:10"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,total,total_sqrt_n");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("30,"));
}

#[test]
fn strong_rank_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    fs::write(&path, "# two equal columns\n1 2 1\n0 1/2 0\n3 -1 3\n").unwrap();
    let out = randsing(&["strong-rank", "--matrix", path.to_str().unwrap()]);
    let record: StrongRankRecord = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((record.rank, record.strong_rank), (2, 1));
    assert_eq!(record.witness_circuit, Some(vec![0, 2]));
    let rows = randsing(&["strong-rank", "--matrix", path.to_str().unwrap(), "--axis", "rows"]);
    let record: StrongRankRecord = serde_json::from_str(&stdout(&rows)).unwrap();
    assert_eq!(record.strong_rank, 2);
}

#[test]
fn lo_sweep_csv() {
    let out = randsing(&["lo-sweep", "--s", "4,16"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("s,max_atom,scaled_approx"));
    assert!(text.contains("4,3/8,0.750000"));
    let bad = randsing(&["lo-sweep", "--probs", "9/10", "--p0", "3/4"]);
    assert_eq!(bad.status.code(), Some(2));
}

fn simulate_into(dir: &Path, name: &str, workers: &str) -> (String, String) {
    let csv = dir.join(format!("{name}.csv"));
    let out = randsing(&[
        "simulate", "--dist", "discrete{0:1/2, 1:1/2}", "--n", "3", "--trials", "500", "--seed", "7",
        "--workers", workers, "--out", csv.to_str().unwrap(),
    ]);
    stdout(&out);
    let manifest = dir.join(format!("{name}.manifest.json"));
    (fs::read_to_string(csv).unwrap(), fs::read_to_string(manifest).unwrap())
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (csv_a, manifest_a) = simulate_into(dir.path(), "a", "1");
    let (csv_b, manifest_b) = simulate_into(dir.path(), "b", "3");
    assert_eq!(csv_a, csv_b);
    assert_eq!(manifest_a, manifest_b);
    let manifest: RunManifest = serde_json::from_str(&manifest_a).unwrap();
    assert_eq!((manifest.seed, manifest.trials, manifest.n_values), (7, 500, vec![3]));
    assert!(csv_a.starts_with("n,trials,hits,p_hat,ci_low,ci_high,bound_total,bound_total_sqrt_n,check\n3,500,"));
}

#[test]
fn config_file_and_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# bound settings\np0 = 3/4\nauto_thresholds = true\nn = 50\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_randsing"))
        .args(["bound", "--config", conf.to_str().unwrap(), "--n", "60"])
        .env("RANDSING_OUT_DIR", dir.path().join("reports"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(dir.path().join("reports/bound.json")).unwrap();
    let record: BoundRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(record.report.n, 60);
}

#[test]
fn scaling_marks_vacuous_rows() {
    let out = randsing(&["scaling", "--dist", "discrete{0:1/2, 1:1/2}", "--rho", "1/4", "--n-values", "2..3", "--trials", "200"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with(",vacuous") || r.ends_with(",dominated")));
}
