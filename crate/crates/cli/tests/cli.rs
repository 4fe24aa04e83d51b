use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ponvm(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ponvm"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("PONVM_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_writes_instance_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = ponvm(dir.path(), &["generate", "--scale", "reduced", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("nodes.csv").exists());
    assert!(dir.path().join("edges.csv").exists());
    assert!(stdout(&o).contains("candidates=15"), "{}", stdout(&o));
}

#[test]
fn solve_then_validate_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let o = ponvm(&run, &["solve", "--scale", "reduced", "--scenario", "2", "--reduction", "0.1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("\nolt olt 0"), "{}", stdout(&o));
    for f in ["solution.txt", "report.csv", "run.toml", "instance/nodes.csv"] {
        assert!(run.join(f).exists(), "{f}");
    }

    let check = dir.path().join("check");
    let o = ponvm(
        &check,
        &[
            "validate",
            "--solution",
            run.join("solution.txt").to_str().unwrap(),
            "--instance",
            run.join("instance").to_str().unwrap(),
            "--config",
            run.join("run.toml").to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("violations=0"));
    let csv = fs::read_to_string(check.join("validation.csv")).unwrap();
    assert_eq!(csv.trim(), "constraint_family,row_id,residual");
}

#[test]
fn validate_reports_corrupted_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    assert!(ponvm(&run, &["heuristic", "--scale", "reduced"]).status.success());
    let text = fs::read_to_string(run.join("solution.txt")).unwrap();
    // drop every upstream flow of the first object
    let broken: String = text.lines().filter(|l| !l.starts_with("xu_0_")).map(|l| format!("{l}\n")).collect();
    assert_ne!(broken, text);
    fs::write(run.join("broken.txt"), broken).unwrap();
    let o = ponvm(
        &dir.path().join("check"),
        &[
            "validate",
            "--solution",
            run.join("broken.txt").to_str().unwrap(),
            "--instance",
            run.join("instance").to_str().unwrap(),
            "--config",
            run.join("run.toml").to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: validation:"), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("check/validation.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}

#[test]
fn heuristic_json_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = ponvm(dir.path(), &["--json", "heuristic", "--scenario", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["engine"], "eepiv");
    assert_eq!(v["vms"], 8);
    assert_eq!(v["cloudlets"], 2);
    assert_eq!(v["extra"]["served"], 100);
}

#[test]
fn exact_at_full_scale_is_a_budget_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ponvm(dir.path(), &["solve"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: budget:"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["solve", "--scenario", "4"][..],
        &["solve", "--reduction", "1.0"],
        &["sweep", "--seeds", "5..2"],
        &["sweep", "--engine", "simplex"],
        &["frobnicate"],
    ] {
        let o = ponvm(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "[topology]\nscale = \"reduced\"\nobjects_per_network = 6\n[model]\nscenario = 3\n").unwrap();
    let o = ponvm(
        &dir.path().join("a"),
        &["--config", cfg.to_str().unwrap(), "--json", "heuristic", "--objects", "10"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["scenario"], 3);
    assert_eq!(v["extra"]["objects"], 20);

    fs::write(&cfg, "[topology]\nrelays = 3\n").unwrap();
    let o = ponvm(&dir.path().join("b"), &["--config", cfg.to_str().unwrap(), "generate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: parse:"), "{}", stderr(&o));
}

#[test]
fn export_lp_and_mps() {
    let dir = tempfile::tempdir().unwrap();
    let o = ponvm(&dir.path().join("lp"), &["export-lp", "--scale", "reduced", "--relays", "1", "--objects", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lp = fs::read_to_string(dir.path().join("lp/model.lp")).unwrap();
    assert!(lp.starts_with("\\") || lp.to_lowercase().starts_with("minimize"), "{}", &lp[..40.min(lp.len())]);
    assert!(lp.trim_end().ends_with("End"));
    assert!(dir.path().join("lp/names.csv").exists());

    let o = ponvm(&dir.path().join("mps"), &["export-lp", "--scale", "reduced", "--format", "mps"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mps = fs::read_to_string(dir.path().join("mps/model.mps")).unwrap();
    assert!(mps.contains("MARKER"));
    assert!(mps.trim_end().ends_with("ENDATA"));
}

#[test]
fn reduced_sweep_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = ponvm(
        dir.path(),
        &[
            "--jobs",
            "2",
            "sweep",
            "--scale",
            "reduced",
            "--objects",
            "6",
            "--engine",
            "eepiv,exact",
            "--reductions",
            "0.1,0.5",
            "--seeds",
            "1..2",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("cells=24 failed=0"), "{}", stdout(&o));
    for f in ["sweep.csv", "placements.csv", "cells.csv", "savings.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let cells = fs::read_to_string(dir.path().join("cells.csv")).unwrap();
    assert_eq!(cells.lines().count(), 25);
}
