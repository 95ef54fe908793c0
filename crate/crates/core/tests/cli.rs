use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gwo_de::cli::{parse_spec, serialize_spec};

fn gwo_de(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwo-de"))
        .args(args)
        .env_remove("GWO_DE_WORKERS")
        .output()
        .unwrap()
}

fn write_spec(dir: &Path, body: &str) -> String {
    let out = dir.join("out");
    let text = format!("{body}output = \"{}\"\n", out.display());
    let path = dir.join("spec.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = "seed = 3\nnp = 8\nmax_iterations = 20\ntrials = 2\ndimension = 3\n\
                     algorithms = [\"gwo_de\", \"gwo\", \"jde\"]\nfunctions = [\"sphere\", \"ackley\"]\n";

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_owned).collect()
}

#[test]
fn run_writes_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "seed = 1\nnp = 6\nmax_iterations = 5\ntrials = 2\ndimension = 2\nalgorithms = [\"gwo\"]\nfunctions = [\"sphere\"]\n",
    );
    let o = gwo_de(&["run", "--spec", &spec]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let errors = lines(&out.join("errors.csv"));
    assert_eq!(errors[0], "algorithm,function,trial,seed,error");
    assert_eq!(errors.len(), 3);
    assert_eq!(lines(&out.join("summary.csv"))[0], "function,gwo");
    for f in ["cells.csv", "results.json", "traces.csv", "metadata.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(gwo_de(&["run", "--spec", &spec, "--out", a.to_str().unwrap(), "--workers", "1"]).status.success());
    assert!(gwo_de(&["run", "--spec", &spec, "--out", b.to_str().unwrap(), "--workers", "4"]).status.success());
    for f in ["errors.csv", "summary.csv", "cells.csv", "traces.csv", "results.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let spec = write_spec(dir.path(), SMALL);
    let o = gwo_de(&["run", "--spec", &spec, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_spec_exits_1_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "seed = 1\ntrials = 0\nalgorithms = [\"gwo\"]\nfunctions = [\"sphere\"]\n");
    let o = gwo_de(&["run", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn missing_spec_file_exits_2() {
    assert_eq!(gwo_de(&["run", "--spec", "/nonexistent/spec.toml"]).status.code(), Some(2));
}

#[test]
fn rank_and_plots_from_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), SMALL);
    assert!(gwo_de(&["run", "--spec", &spec]).status.success());
    let out = dir.path().join("out");

    let o = gwo_de(&["rank", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ranking = lines(&out.join("ranking.csv"));
    assert_eq!(ranking[0], "Algorithm,AverageRanking,Normalized,Ranks");
    assert_eq!(ranking.len(), 4);

    let o = gwo_de(&["export-plots", out.to_str().unwrap(), "--kind", "box"]);
    assert!(o.status.success());
    let boxes = lines(&out.join("plots/box_sphere.csv"));
    assert_eq!(boxes[0], "algorithm,min,q1,median,q3,max");
    assert_eq!(boxes.len(), 4);

    let o = gwo_de(&["export-plots", out.to_str().unwrap(), "--kind", "convergence"]);
    assert!(o.status.success());
    let conv = lines(&out.join("plots/convergence_ackley.csv"));
    assert_eq!(conv[0], "evaluations,gwo_de,gwo,jde");
    assert_eq!(conv.len(), 1 + 21);

    assert_eq!(gwo_de(&["export-plots", out.to_str().unwrap(), "--kind", "violin"]).status.code(), Some(1));
}

#[test]
fn convergence_without_traces_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), SMALL);
    assert!(gwo_de(&["run", "--spec", &spec, "--format", "csv"]).status.success());
    let out = dir.path().join("out");
    assert!(!out.join("results.json").exists());
    assert_eq!(gwo_de(&["export-plots", out.to_str().unwrap(), "--kind", "convergence"]).status.code(), Some(1));
    // box plots fall back to errors.csv
    assert!(gwo_de(&["export-plots", out.to_str().unwrap(), "--kind", "box"]).status.success());
}

#[test]
fn rank_rejects_single_algorithm_and_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    fs::write(&one, "function,gwo\nsphere,1e-3\n").unwrap();
    assert_eq!(gwo_de(&["rank", one.to_str().unwrap()]).status.code(), Some(1));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "function,a,b\nsphere,1,oops\n").unwrap();
    let o = gwo_de(&["rank", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn rank_ties_and_table1() {
    let dir = tempfile::tempdir().unwrap();
    let tied = dir.path().join("tied.csv");
    fs::write(&tied, "function,a,b\nf1,0.5,0.5\nf2,3,3\n").unwrap();
    assert!(gwo_de(&["rank", tied.to_str().unwrap()]).status.success());
    let r = lines(&dir.path().join("ranking.csv"));
    assert_eq!(r[1], "a,1.5,1,1");
    assert_eq!(r[2], "b,1.5,1,2");

    let table1 = "function,ABC,PSO,TLBO,Jaya,GWO,GWO-DE,jDE,DE/best\n\
        schaffer_f6,1.84e-1,0,5.95e-12,1.12e-4,1.94e-4,3.89e-4,0,0\n\
        sphere,5.22e4,1.38e-6,9.90e-4,6.74e1,7.86e-99,1.32e-99,2.04e-9,6.24e2\n\
        rosenbrock,3.26e3,2.77e1,2.57e1,4.70e1,2.59e1,7.72e-5,2.20e1,9.55e1\n\
        ackley,2.03e1,3.49e-4,2.25,7.64,7.32e-15,7.03e-15,1.34e-5,7.11\n\
        griewank,4.51e2,1.49e-2,1.05e-2,1.60,1.27e-3,1.28e-3,1.49e-8,5.64\n\
        weierstrass,3.55e1,1.24e-2,3.71e-1,1.34e1,6.23e-1,4.67e-1,1.50e-3,1.14e1\n\
        rastrigin,3.77e2,1.91e1,3.07,2.53e2,0,2.63,4.73e1,7.64e1\n\
        noncontinuous_rastrigin,3.42e2,2.30e1,5.52,2.21e2,2.80e-1,2.78,3.03e1,7.30e1\n\
        penalized_f12,2.17e8,6.83e-3,4.35e-2,3.49e1,8.61e-3,1.07e-31,2.00e-10,5.67e1\n\
        penalized_f13,5.35e8,1.61e-5,2.65e-4,5.40e3,6.88e-2,4.02e-32,8.25e-10,6.68e3\n";
    let sub = dir.path().join("t1");
    fs::create_dir(&sub).unwrap();
    fs::write(sub.join("summary.csv"), table1).unwrap();
    let o = gwo_de(&["rank", sub.to_str().unwrap()]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("GWO-DE") && l.trim_end().ends_with(" 1")), "{stdout}");
    let r = lines(&sub.join("ranking.csv"));
    let gwo_de_row = r.iter().find(|l| l.starts_with("GWO-DE,")).unwrap();
    assert!(gwo_de_row.ends_with(",1,1"), "{gwo_de_row}");
}

#[test]
fn list_functions_formats() {
    let o = gwo_de(&["list-functions"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("name,min_dimension,lower,upper,f_star"));
    assert_eq!(text.lines().count(), 11);
    assert!(text.contains("rosenbrock,2,-30,30,0"));
    let o = gwo_de(&["list-functions", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 10);
}

#[test]
fn workers_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), SMALL);
    let o = Command::new(env!("CARGO_BIN_EXE_gwo-de"))
        .args(["run", "--spec", &spec])
        .env("GWO_DE_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1), "zero workers from the environment is rejected");
}

#[test]
fn spec_round_trip_through_files() {
    let spec = parse_spec(SMALL).unwrap();
    assert_eq!(parse_spec(&serialize_spec(&spec).unwrap()).unwrap(), spec);
}
