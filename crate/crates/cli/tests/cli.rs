use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_robust-pcsp");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("ROBUST_PCSP_THREADS", "1").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn planted(dir: &TempDir, n: usize, m: usize, eps: f64) -> PathBuf {
    let p = pcsp_core::generate::planted_two_sat(n, m, eps, 3);
    let path = dir.path().join("inst.json");
    std::fs::write(&path, pcsp_core::io::serialize_instance(&p.template, &p.instance)).unwrap();
    path
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(robust_pcsp_cli::csv::REPORT_HEADER));
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["solve", "--no-such-flag"])), 1);
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["sweep", "--grid", "0.5,1.5"])), 1);
}

#[test]
fn missing_input_exits_one_without_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sol.json");
    let o = run(&["solve", "--instance", "/nonexistent/inst.json", "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
    assert!(!out.exists());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, b"{\"template\": 3}").unwrap();
    assert_eq!(code(&run(&["solve", "--instance", s(&bad)])), 1);
}

#[test]
fn solve_then_round() {
    let dir = TempDir::new().unwrap();
    let inst = planted(&dir, 20, 60, 0.05);
    let sol = dir.path().join("sol.json");
    let o = run(&["solve", "--instance", s(&inst), "--out", s(&sol)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let trials = dir.path().join("trials.csv");
    let o = run(&[
        "round",
        "--instance",
        s(&inst),
        "--solution",
        s(&sol),
        "--epsilon",
        "0.05",
        "--trials",
        "30",
        "--trials-csv",
        s(&trials),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&o);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0], "0.05");
    assert_eq!(r[0][5], "true");
    let loss: f64 = r[0][2].parse().unwrap();
    assert!((0.0..=1.0).contains(&loss));
    let t = std::fs::read_to_string(&trials).unwrap();
    assert!(t.starts_with(robust_pcsp_cli::csv::TRIALS_HEADER));
    assert_eq!(t.lines().count(), 31);
}

#[test]
fn budget_exhaustion_exits_two() {
    let dir = TempDir::new().unwrap();
    let inst = planted(&dir, 20, 60, 0.05);
    let o = run(&["solve", "--instance", s(&inst), "--max-iter", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn dimacs_input() {
    let dir = TempDir::new().unwrap();
    let cnf = dir.path().join("f.cnf");
    std::fs::write(&cnf, "c two clauses\np cnf 2 2\n1 2 0\n-1 0\n").unwrap();
    let o = run(&["solve", "--dimacs", s(&cnf)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let sol = basic_sdp::parse_solution(&o.stdout).unwrap();
    assert!((sol.value - 1.0).abs() < 1e-6);
}

#[test]
fn runs_are_bit_identical() {
    let dir = TempDir::new().unwrap();
    let inst = planted(&dir, 20, 60, 0.05);
    for scheme in ["cmm", "independent", "correlated"] {
        let args = ["round", "--instance", s(&inst), "--epsilon", "0.05", "--trials", "25", "--scheme", scheme];
        let (a, b) = (run(&args), run(&args));
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{scheme}");
    }
    let args = ["sweep", "--n", "20", "--m", "60", "--grid", "0.01,0.04", "--trials", "20", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn config_fills_flags_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"subcommand": "sweep", "problem": "unique-games", "n": 20, "m": 60, "grid": [0.01, 0.04], "trials": 10}"#,
    )
    .unwrap();
    let o = run(&["--config", s(&cfg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&o);
    assert_eq!(r.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["0.01", "0.04"]);
    let o = run(&["--config", s(&cfg), "sweep", "--grid", "0.02"]);
    assert_eq!(code(&o), 0);
    assert_eq!(rows(&o).len(), 1);
    std::fs::write(&cfg, r#"{"subcommand": "sweep", "typo": 1}"#).unwrap();
    assert_eq!(code(&run(&["--config", s(&cfg)])), 1);
}

#[test]
fn sweep_loss_grows_with_corruption() {
    let o = run(&["sweep", "--n", "40", "--m", "200", "--grid", "0.0025,0.04", "--trials", "50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&o);
    let loss: Vec<f64> = r.iter().map(|r| r[2].parse().unwrap()).collect();
    let completeness: Vec<f64> = r.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(loss[0] < loss[1], "{loss:?}");
    assert!(completeness[0] > completeness[1]);
    assert!(r.iter().all(|r| r[6] == "1e-7" && r[7] == "0.0001"));
}

#[test]
fn polymorphism_and_weights() {
    let o = run(&["check-polymorphism", "--template", "two-sat", "--family", "maj", "--arity", "3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], true);
    let o = run(&["check-polymorphism", "--template", "1in3-nae", "--fold", "--family", "maj", "--arity", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["holds"], false);
    assert_eq!(v["failure"]["output"], serde_json::json!([0, 0, 0]));
    let o = run(&["find-weights", "--template", "ug3", "--all"]);
    assert_eq!(code(&o), 0);
    assert!(!separation::parse_certificates(&o.stdout).unwrap().is_empty());
    let o = run(&["find-weights", "--template", "1in3-nae", "--b", "0,0,0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["feasible"], false);
}

#[test]
fn gap_witness_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("gap.json");
    let o = run(&["gap-gen", "--epsilon", "0.3", "--dim", "40", "--samples", "300", "--seed", "5", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let wit = dir.path().join("gap.json.witness.json");
    assert_eq!(code(&run(&["verify-witness", "--instance", s(&out)])), 0);

    let mut side: serde_json::Value = serde_json::from_slice(&std::fs::read(&wit).unwrap()).unwrap();
    let d2 = &mut side["constraints"][0]["D2"][0];
    *d2 = serde_json::json!(d2.as_f64().unwrap() + 1e-6);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_vec(&side).unwrap()).unwrap();
    assert_eq!(code(&run(&["verify-witness", "--instance", s(&out), "--witness", s(&tampered)])), 2);

    let other = dir.path().join("other.json");
    assert_eq!(
        code(&run(&[
            "gap-gen",
            "--epsilon",
            "0.3",
            "--dim",
            "40",
            "--samples",
            "300",
            "--seed",
            "6",
            "--out",
            s(&other)
        ])),
        0
    );
    assert_eq!(code(&run(&["verify-witness", "--instance", s(&other), "--witness", s(&wit)])), 2);
    assert_eq!(code(&run(&["verify-witness", "--instance", s(&out), "--witness", s(&dir.path().join("none"))])), 1);
}
