use std::path::Path;
use std::process::{Command, Output};

use herdlab::dynamics::read_trajectory_csv;

fn herdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_herdlab"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn scc_prints_the_example_poset() {
    let o = herdlab(&["scc"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("components: 4"), "{text}");
    assert!(text.contains("covers: (C2,C1) (C4,C2) (C4,C3)"), "{text}");
    assert!(text.contains("maximal: C1 C3"), "{text}");
    assert!(text.contains("minimal: C4"), "{text}");

    let asset = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/four_components.txt");
    let o = herdlab(&["scc", "--weights", asset.to_str().unwrap()]);
    assert_eq!(stdout(&o), text);
}

#[test]
fn gfunc_grid_starts_at_one() {
    let o = herdlab(&["gfunc", "--alpha-grid", "12", "--n", "6"]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0].len(), 13);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.0);
    assert!(rows[0][1..]
        .iter()
        .all(|v| v.parse::<f64>().unwrap() == 1.0));
    assert!(rows[100][1..]
        .iter()
        .all(|v| v.parse::<f64>().unwrap() == 0.0));
}

#[test]
fn ensemble_is_reproducible() {
    let args = ["ensemble", "--runs", "1", "--seed", "42", "--t-max", "300"];
    let a = herdlab(&args);
    let b = herdlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let mut summaries = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(k.to_string());
        let o = herdlab(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
        assert!(o.status.success());
        summaries.push(std::fs::read(out.join("summary.csv")).unwrap());
    }
    assert_eq!(summaries[0], summaries[1]);
    let text = String::from_utf8(summaries.pop().unwrap()).unwrap();
    assert!(text.contains("# seed: 42"));
    assert!(text.contains("# config_digest: "));
    assert!(!text.contains("thread"));
}

#[test]
fn simulate_csv_round_trips_and_respects_env_threads() {
    let o = Command::new(env!("CARGO_BIN_EXE_herdlab"))
        .args([
            "simulate",
            "--weights",
            "0.5 0.5; 0.5 0.5",
            "--alpha",
            "0.3",
            "--x1",
            "0.2,0.9",
            "--t-max",
            "40",
            "--seed",
            "5",
        ])
        .env("HERDLAB_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    let table = read_trajectory_csv(&stdout(&o)).unwrap();
    assert_eq!(table.times, (1..=40).collect::<Vec<u64>>());
    assert_eq!(table.states[0], vec![0.2, 0.9]);
    assert!(table.metadata.iter().any(|(k, v)| k == "seed" && v == "5"));
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pair.txt"), "2\n0.5 0.5\n0.5 0.5\n").unwrap();
    let cfg = dir.path().join("scenario.cfg");
    std::fs::write(
        &cfg,
        "# symmetric pair\nweights = pair.txt\nalpha = 0.5\nx1 = 0.3\nt_max = 400\nruns = 200\nseed = 9\ndelta = 0.01\n",
    )
    .unwrap();
    let o = herdlab(&["ensemble", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("runs: 200"), "{text}");
    assert!(text.contains("predicted fraction at 1: 0.300000"), "{text}");

    let o = herdlab(&["ensemble", "--config", cfg.to_str().unwrap(), "--runs", "7"]);
    assert!(stdout(&o).contains("runs: 7"));
}

#[test]
fn config_errors_exit_2_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "alpha = 0.5\n# ok so far\nspeed = 3\n").unwrap();
    let o = herdlab(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.cfg:3"), "{err}");

    std::fs::write(&cfg, "weights = 0.5 0.6; 0.5 0.5\n").unwrap();
    let o = herdlab(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = herdlab(&["simulate", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = herdlab(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stubborn_flag_is_one_based() {
    let o = herdlab(&[
        "simulate",
        "--weights",
        "0.5 0.5; 0.5 0.5",
        "--x1",
        "1,0",
        "--stubborn",
        "1",
        "--t-max",
        "30",
    ]);
    assert!(o.status.success());
    let table = read_trajectory_csv(&stdout(&o)).unwrap();
    assert!(table.states.iter().all(|x| x[0] == 1.0));
    let o = herdlab(&["simulate", "--stubborn", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn timevariant_reports_the_gap() {
    let o = herdlab(&[
        "timevariant",
        "--schedule",
        "halving",
        "--beta",
        "0.25",
        "--steps",
        "100",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let gap: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# terminal_gap: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((gap - 0.288_788_095_086_602_4).abs() < 1e-12);

    let o = herdlab(&["timevariant", "--schedule", "sometimes"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_subset_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = herdlab(&[
        "verify",
        "--only",
        "poset-golden,g-function",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[PASS]  1 poset-golden"), "{text}");
    assert!(text.contains("2 checks, 0 failed"), "{text}");
    let json = std::fs::read_to_string(report).unwrap();
    assert!(json.contains("\"passed\": true"));

    let o = herdlab(&["verify", "--only", "no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reproduce_writes_figure_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = herdlab(&["reproduce", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let split = std::fs::read_to_string(dir.path().join("split.csv")).unwrap();
    assert!(split.contains("# components: C1=to_1 C2=to_1 C3=to_0 C4=oscillating"));
    let consensus = std::fs::read_to_string(dir.path().join("consensus.csv")).unwrap();
    assert!(consensus.contains("# verdict: consensus_1"));
    let table = read_trajectory_csv(&consensus).unwrap();
    assert_eq!(table.states.len(), 200);
    assert!(dir.path().join("gfunc.csv").exists());
}
