//! End-to-end checks of the `ocsp` binary: generate, solve, certify,
//! simulate, and the determinism of generated files.

use std::path::Path;
use std::process::{Command, Output};

fn ocsp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ocsp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn gen_solve_roundtrip_and_secret() {
    let dir = tempdir("gen_solve");
    let gen = ocsp(
        &[
            "gen",
            "--dist",
            "yes",
            "--q",
            "4",
            "--n",
            "8",
            "--alpha",
            "1/8",
            "--T",
            "30",
            "--predicate",
            "MAS",
            "--pi",
            "0 1",
            "--seed",
            "9",
            "--out",
            "inst.json",
        ],
        &dir,
    );
    assert_ok(&gen);
    assert!(dir.join("inst.json").exists());
    assert!(dir.join("inst.secret.json").exists());

    let solved = assert_ok(&ocsp(&["solve", "inst.json"], &dir));
    let report: serde_json::Value = serde_json::from_str(&solved).unwrap();
    assert_eq!(report["mode"], "exact");
    // YES instances carry the shifted-assignment guarantee.
    assert!(report["optimum"]["float"].as_f64().unwrap() >= 0.75);

    let coarse = assert_ok(&ocsp(&["solve", "inst.json", "--coarse", "--q", "4"], &dir));
    let coarse: serde_json::Value = serde_json::from_str(&coarse).unwrap();
    assert!(
        coarse["optimum"]["float"].as_f64().unwrap()
            <= report["optimum"]["float"].as_f64().unwrap() + 1e-12
    );
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempdir("gen_det");
    for name in ["a.json", "b.json"] {
        assert_ok(&ocsp(
            &[
                "gen",
                "--dist",
                "no",
                "--q",
                "3",
                "--n",
                "9",
                "--alpha",
                "1/3",
                "--T",
                "7",
                "--predicate",
                "Btwn",
                "--seed",
                "5",
                "--out",
                name,
            ],
            &dir,
        ));
    }
    let a = std::fs::read(dir.join("a.json")).unwrap();
    let b = std::fs::read(dir.join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn expand_check_reports_exact_mode() {
    let dir = tempdir("expand");
    std::fs::write(dir.join("g.json"), r#"{"n":4,"k":2,"edges":[[0,1],[2,3]]}"#).unwrap();
    let out = assert_ok(&ocsp(&["expand-check", "g.json", "--gamma", "1/2"], &dir));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["delta_min"]["exact"], "1/2");
    let out = assert_ok(&ocsp(
        &[
            "expand-check",
            "g.json",
            "--gamma",
            "1/2",
            "--sphe",
            "--q",
            "2",
        ],
        &dir,
    ));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["delta_min"]["exact"], "1/1");
}

#[test]
fn baseline_and_subsample_run() {
    let dir = tempdir("baseline");
    std::fs::write(
        dir.join("cycle.json"),
        r#"{"n":3,"k":2,"predicate":{"named":"MAS"},"constraints":[[0,1],[1,2],[2,0]]}"#,
    )
    .unwrap();
    let out = assert_ok(&ocsp(
        &["baseline", "cycle.json", "--trials", "4000", "--seed", "1"],
        &dir,
    ));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let mean = v["mean"]["float"].as_f64().unwrap();
    assert!((mean - 0.5).abs() < 0.05);

    let out = assert_ok(&ocsp(
        &["subsample", "cycle.json", "--s", "1", "--seed", "2"],
        &dir,
    ));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["optimum"]["exact"], "1/1");
}

#[test]
fn irmd_sim_single_case_reports_rate() {
    let dir = tempdir("irmd");
    let out = assert_ok(&ocsp(
        &[
            "irmd-sim",
            "--case",
            "no",
            "--q",
            "3",
            "--n",
            "6",
            "--alpha",
            "1/3",
            "--T",
            "2",
            "--predicate",
            "MAS",
            "--alg",
            "count-threshold",
            "--threshold",
            "1",
            "--trials",
            "200",
            "--seed",
            "3",
        ],
        &dir,
    ));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["output_one_rate"].as_f64().unwrap() <= 1.0);
    assert!(v["max_state_bits"].as_u64().unwrap() <= 64);
}

#[test]
fn experiment_csv_is_seed_deterministic() {
    let dir = tempdir("expcsv");
    for name in ["x.csv", "y.csv"] {
        assert_ok(&ocsp(
            &[
                "experiment",
                "value-gap",
                "--q",
                "4",
                "--n",
                "8",
                "--alpha",
                "1/8",
                "--T",
                "20",
                "--trials",
                "6",
                "--seed",
                "77",
                "--threads",
                if name == "x.csv" { "1" } else { "3" },
                "--out",
                name,
            ],
            &dir,
        ));
    }
    let x = std::fs::read(dir.join("x.csv")).unwrap();
    let y = std::fs::read(dir.join("y.csv")).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert!(text.starts_with("# config: "));
    assert!(text.contains("# config_hash: "));
}

#[test]
fn failed_invariants_exit_nonzero() {
    // An out-of-range config is a hard error (exit 1), not a silent pass.
    let dir = tempdir("badcfg");
    let out = ocsp(
        &[
            "experiment",
            "value-gap",
            "--n",
            "12",
            "--trials",
            "2",
            "--seed",
            "1",
        ],
        &dir,
    );
    assert!(!out.status.success());
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("ocsp-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
