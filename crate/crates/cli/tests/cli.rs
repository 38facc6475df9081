use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_homophily"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn homophily")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_dataset(dir: &Path, edges: &str, labels: &str, attributes: &str) -> PathBuf {
    fs::create_dir_all(dir).unwrap();
    fs::write(dir.join("edges.tsv"), edges).unwrap();
    fs::write(dir.join("labels.tsv"), labels).unwrap();
    fs::write(dir.join("attributes.tsv"), attributes).unwrap();
    dir.to_path_buf()
}

/// Triangle 1-2-3 plus the pair 4-5.
fn five_users(root: &Path) -> PathBuf {
    write_dataset(
        &root.join("five"),
        "1\t2\n1\t3\n2\t3\n4\t5\n",
        "1 A\n2 A\n3 B\n4 C\n5 C\n",
        "1 10 5\n2 20 10\n3 30 60\n4 40 20\n5 50 100\n",
    )
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "stderr: {}", stderr(o));
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn stats_matches_hand_values() {
    let tmp = TempDir::new().unwrap();
    let d = write_dataset(
        &tmp.path().join("path"),
        "1 2\n2 3\n",
        "1 A\n2 A\n3 B\n4 B\n",
        "",
    );
    let v = json(&run(&["stats", "--format", "json", "--dataset", d.to_str().unwrap()]));
    assert_eq!(v["schema_version"], 1);
    let row = &v["datasets"][0];
    assert_eq!(row["dataset"], "path");
    assert_eq!(row["n_users"], 4);
    assert_eq!(row["n_isolated"], 1);
    assert_eq!(row["n_edges"], 2);
    assert_eq!(row["mean_degree"], 1.0);
    assert_eq!(row["median_degree"], 1.0);
    assert!((row["degree_dispersion"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn two_datasets_keep_input_order() {
    let tmp = TempDir::new().unwrap();
    let a = write_dataset(&tmp.path().join("zeta"), "1 2\n", "1 A\n2 A\n", "");
    let b = write_dataset(&tmp.path().join("alpha"), "1 2\n2 3\n", "1 A\n2 A\n3 A\n", "");
    let o = run(&[
        "stats",
        "--format",
        "csv",
        "--dataset",
        a.to_str().unwrap(),
        "--dataset",
        b.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let names: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["zeta", "alpha"]);
}

#[test]
fn explicit_paths_and_names() {
    let tmp = TempDir::new().unwrap();
    let d = five_users(tmp.path());
    let o = run(&[
        "stats",
        "--edges",
        d.join("edges.tsv").to_str().unwrap(),
        "--labels",
        d.join("labels.tsv").to_str().unwrap(),
        "--name",
        "Fixture",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).lines().nth(2).unwrap().starts_with("Fixture"));
}

#[test]
fn missing_file_names_the_path() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nowhere").join("edges.tsv");
    let o = run(&["stats", "--edges", missing.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains(missing.to_str().unwrap()), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn parse_error_names_path_and_line() {
    let tmp = TempDir::new().unwrap();
    let d = write_dataset(&tmp.path().join("bad"), "1 2\n2 x\n", "1 A\n2 A\n", "");
    let o = run(&["stats", "--dataset", d.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("edges.tsv") && err.contains("line 2"), "{err}");
}

#[test]
fn correlate_coupled_fixture() {
    let tmp = TempDir::new().unwrap();
    let d = write_dataset(
        &tmp.path().join("coupled"),
        "",
        "1 A\n2 A\n3 A\n4 A\n",
        "1 1 1\n2 5 5\n3 9 9\n4 30 30\n",
    );
    let o = run(&["correlate", "--dataset", d.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let row = text.lines().nth(2).unwrap();
    assert_eq!(
        row.split_whitespace().collect::<Vec<_>>(),
        ["coupled", "1.00", "n/a", "n/a"]
    );
    assert_eq!(text.matches("coupled").count(), 4);
}

#[test]
fn correlate_empty_attributes_fails() {
    let tmp = TempDir::new().unwrap();
    let d = write_dataset(&tmp.path().join("e"), "1 2\n", "1 A\n2 A\n", "");
    let o = run(&["correlate", "--dataset", d.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("attributes.tsv"), "{}", stderr(&o));
}

#[test]
fn evaluate_five_user_fixture() {
    let tmp = TempDir::new().unwrap();
    let d = five_users(tmp.path());
    let v = json(&run(&["evaluate", "--format", "json", "--dataset", d.to_str().unwrap()]));
    assert_eq!(v["kind"], "evaluate");
    assert_eq!(v["n_correct"], 4);
    assert_eq!(v["n_estimable"], 5);
    assert_eq!(v["accuracy"], 0.8);
    assert_eq!(v["coverage"], 1.0);
}

#[test]
fn evaluate_with_filter() {
    let tmp = TempDir::new().unwrap();
    let d = five_users(tmp.path());
    // Ratios are 11/6, 21/11, 31/61, 41/21, 51/101: keeping ratio < 1 leaves users 3 and 5.
    let v = json(&run(&[
        "evaluate",
        "--format",
        "json",
        "--dataset",
        d.to_str().unwrap(),
        "--attribute",
        "ratio",
        "--direction",
        "HighCut",
        "--threshold",
        "1",
    ]));
    assert_eq!(v["n_estimable"], 2);
    assert_eq!(v["n_correct"], 1);
    assert_eq!(v["coverage"], 0.4);
}

#[test]
fn evaluate_isolated_dataset_warns() {
    let tmp = TempDir::new().unwrap();
    let d = write_dataset(&tmp.path().join("iso"), "", "1 A\n2 B\n3 A\n", "");
    let o = run(&["evaluate", "--format", "json", "--dataset", d.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["coverage"], 0.0);
    assert!(v["accuracy"].is_null());
}

fn synth(dir: &Path, config: &str, seed: &str) -> Output {
    let cfg = dir.with_extension("json");
    fs::write(&cfg, config).unwrap();
    run(&[
        "synth",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        seed,
        "--out",
        dir.to_str().unwrap(),
    ])
}

const SMALL: &str = r#"{"n_users": 3000, "n_regions": 10}"#;

#[test]
fn workers_do_not_change_bytes() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path().join("s");
    assert!(synth(&d, SMALL, "5").status.success());
    for cmd in ["evaluate", "report"] {
        let mut outputs = Vec::new();
        for w in ["1", "8"] {
            let o = run(&[cmd, "--format", "json", "--workers", w, "--dataset", d.to_str().unwrap()]);
            assert!(o.status.success(), "{}", stderr(&o));
            outputs.push(o.stdout);
        }
        assert_eq!(outputs[0], outputs[1], "{cmd}");
    }
}

#[test]
fn sweep_writes_curve_with_baseline_and_grid() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path().join("s");
    assert!(synth(&d, SMALL, "6").status.success());
    let out = tmp.path().join("out");
    let o = run(&[
        "sweep",
        "--dataset",
        d.to_str().unwrap(),
        "--attribute",
        "ratio",
        "--direction",
        "HighCut",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("101/101"));
    let curve = fs::read_to_string(out.join("curve.csv")).unwrap();
    let rows: Vec<&str> = curve.lines().skip(1).collect();
    assert_eq!(rows.len(), 102);
    assert!(rows[0].starts_with(','));
    let sweep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(sweep["kind"], "sweep");
    assert!(sweep["sweep"]["best"]["result"]["coverage"].as_f64().unwrap() > 0.3);
}

#[test]
fn sweep_constant_attribute_returns_baseline() {
    let tmp = TempDir::new().unwrap();
    let d = write_dataset(
        &tmp.path().join("c"),
        "1 2\n1 3\n2 3\n4 5\n",
        "1 A\n2 A\n3 B\n4 C\n5 C\n",
        "1 7 7\n2 7 7\n3 7 7\n4 7 7\n5 7 7\n",
    );
    let o = run(&[
        "sweep",
        "--format",
        "json",
        "--dataset",
        d.to_str().unwrap(),
        "--attribute",
        "friends",
        "--direction",
        "HighCut",
    ]);
    let v = json(&o);
    assert_eq!(v["sweep"]["best"]["result"]["accuracy"], 0.8);
    assert_eq!(v["sweep"]["baseline"]["accuracy"], 0.8);
}

#[test]
fn synth_is_reproducible_and_reportable() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(synth(&a, SMALL, "42").status.success());
    assert!(synth(&b, SMALL, "42").status.success());
    for f in ["edges.tsv", "labels.tsv", "attributes.tsv", "manifest.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let o = run(&["report", "--dataset", a.to_str().unwrap(), "--name", "Synth"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("Country"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn synth_infeasible_config_fails() {
    let tmp = TempDir::new().unwrap();
    let o = synth(&tmp.path().join("x"), r#"{"n_users": 3, "n_regions": 20}"#, "1");
    assert!(!o.status.success());
    assert!(stderr(&o).contains("generation failed"));
}

#[test]
fn synth_requires_out() {
    let o = run(&["synth"]);
    assert!(!o.status.success());
}

#[test]
fn invalid_flags_are_rejected() {
    let tmp = TempDir::new().unwrap();
    let d = five_users(tmp.path());
    let d = d.to_str().unwrap();
    for args in [
        vec!["report", "--dataset", d, "--alpha", "0.7"],
        vec!["report", "--dataset", d, "--coverage-floor", "1"],
        vec!["report", "--dataset", d, "--workers", "0"],
        vec!["sweep", "--dataset", d, "--attribute", "age", "--direction", "HighCut"],
    ] {
        assert!(!run(&args).status.success(), "{args:?}");
    }
}
