use std::path::PathBuf;
use std::process::{Command, Output};

use cbf::cli::Cli;
use cbf::config::{Config, Mode};
use clap::Parser;

fn cbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbf")).args(args).env_remove("CBF_MAX_N").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cbf-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn enumerate_prints_catalan_many_partitions() {
    let o = cbf(&["bnc", "enumerate", "--chi", "llrr"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("14 partitions"), "{s}");
    // one-based blocks in canonical order, the one-block partition included
    assert!(s.lines().any(|l| l == "[[1,2,3,4]]"));
}

#[test]
fn mixed_cumulants_vanish() {
    let o = cbf(&["cumulants", "mixed-test", "--factors", "2", "--n", "4", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all mixed cumulants zero: true"));
}

#[test]
fn transform_theorem_has_zero_difference() {
    let o = cbf(&["rtransform", "theorem", "--degree", "4", "--dimB", "2", "--dimD", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("coefficient-diff 0 "));
}

#[test]
fn replay_is_byte_identical() {
    let dir = scratch("replay");
    let (a, b) = (dir.join("a"), dir.join("b"));
    let o = cbf(&["moments", "universal-F", "--n", "3", "--seed", "5", "--out", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let m = a.join("manifest.json");
    let o = cbf(&["replay", m.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("replay digest match: true"));
    assert_eq!(std::fs::read(a.join("report.json")).unwrap(), std::fs::read(b.join("report.json")).unwrap());

    let mut json: serde_json::Value = serde_json::from_slice(&std::fs::read(&m).unwrap()).unwrap();
    json["result_digest"] = "0".repeat(64).into();
    std::fs::write(&m, serde_json::to_vec(&json).unwrap()).unwrap();
    let o = cbf(&["replay", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("replay digest match: false"));
}

#[test]
fn limits_write_csv_tables() {
    let dir = scratch("limits");
    let o = cbf(&["limits", "clt", "--n", "3", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("limits_rho.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,omega,N,value-norm,fitted-rate"));
    assert!(dir.join("limits_eta.csv").exists() && dir.join("manifest.json").exists());
}

#[test]
fn errors_are_machine_readable() {
    let o = cbf(&["bnc", "intervals", "--chi", "lr"]);
    assert_eq!(o.status.code(), Some(2));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["kind"], "usage");

    let o = cbf(&["bnc", "enumerate", "--chi", "lrlrlr", "--max-n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["kind"], "size-limit");

    let o = Command::new(env!("CARGO_BIN_EXE_cbf"))
        .args(["bnc", "enumerate", "--chi", "lrlrlr"])
        .env("CBF_MAX_N", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = cbf(&["bnc", "enumerate", "--chi", "lxr"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_config_file_over_defaults() {
    let dir = scratch("config");
    let file = dir.join("run.json");
    std::fs::write(&file, r#"{"seed": 11, "n": 3, "mode": "float", "dim-d": 6}"#).unwrap();
    let cli = Cli::try_parse_from(["cbf", "rep", "build", "--config", file.to_str().unwrap(), "--seed", "12"]).unwrap();
    let c = cli.flags.resolve().unwrap();
    assert_eq!(c.seed, 12);
    assert_eq!(c.n, 3);
    assert_eq!(c.mode, Mode::Float);
    assert_eq!(c.dim_d, 6);
    assert_eq!(c.dim_b, Config::default().dim_b);

    let cli = Cli::try_parse_from(["cbf", "rep", "build", "--omega", "011"]).unwrap();
    assert_eq!(cli.flags.resolve().unwrap().omega, Some(vec![0, 1, 1]));
}

#[test]
fn replay_detects_a_changed_seed() {
    let dir = scratch("reseed");
    let o = cbf(&["rep", "moments", "--chi", "lrl", "--seed", "3", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let m = dir.join("manifest.json");
    let mut json: serde_json::Value = serde_json::from_slice(&std::fs::read(&m).unwrap()).unwrap();
    json["config"]["seed"] = 4.into();
    std::fs::write(&m, serde_json::to_vec(&json).unwrap()).unwrap();
    let o = cbf(&["replay", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
