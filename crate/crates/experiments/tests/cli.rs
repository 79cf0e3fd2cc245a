use std::path::Path;
use std::process::Command;

use sta3d_experiments::commands::{cmd_sweep_delta, cmd_sweep_tf};
use sta3d_experiments::{Grid, Overrides, RunConfig};

fn sta3d(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sta3d")).args(args).output().expect("binary runs")
}

fn small(workers: usize) -> RunConfig {
    RunConfig {
        steps: 3000,
        workers,
        grids: vec![Grid::new(-0.1, 0.1, 4).unwrap(), Grid::new(-0.1, 0.1, 3).unwrap()],
        ..Default::default()
    }
}

#[test]
fn sweeps_are_identical_across_worker_counts() {
    let one = cmd_sweep_delta(&small(1)).unwrap().to_csv().unwrap();
    let many = cmd_sweep_delta(&small(5)).unwrap().to_csv().unwrap();
    assert_eq!(one, many);
    let mut cfg = small(1);
    cfg.grids = vec![Grid::new(20.0, 90.0, 6).unwrap()];
    let a = cmd_sweep_tf(&cfg).unwrap().to_csv().unwrap();
    cfg.workers = 3;
    assert_eq!(a, cmd_sweep_tf(&cfg).unwrap().to_csv().unwrap());
}

#[test]
fn cli_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |w: &str, name: &str| {
        let p = dir.path().join(name);
        let args = ["sweep-eps", "--grid", "0.1:0.2:5", "--steps", "2000", "--workers", w, "--out", p.to_str().unwrap()];
        assert!(sta3d(&args).status.success());
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("1", "a.csv"), run("4", "b.csv"));
}

#[test]
fn csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pulses.csv");
    let out = sta3d(&["pulses", "--out", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&p).unwrap();
    let lines: Vec<&str> = text.split("\r\n").filter(|l| !l.is_empty()).collect();
    let meta: Vec<&&str> = lines.iter().take_while(|l| l.starts_with('#')).collect();
    assert!(meta.iter().any(|l| l.starts_with("# params: ") && l.contains("tf=90") && l.contains("eps=0.153")));
    assert!(meta.iter().any(|l| l.starts_with("# integrator: ") && l.contains("steps=20000")));
    assert!(!text.contains("workers"));
    let header = lines[meta.len()];
    assert_eq!(header, "t_g,omega1_over_g,omega2p_over_g");
    let rows = &lines[meta.len() + 1..];
    assert_eq!(rows.len(), 1000);
    for row in rows {
        for cell in row.split(',') {
            let (mantissa, _) = cell.split_once('e').expect("scientific notation");
            let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 12, "{cell}");
            cell.parse::<f64>().unwrap();
        }
    }
    let last: Vec<f64> = rows.last().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((last[1] / last[2] - 2f64.sqrt()).abs() <= 1e-9);
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, "tf = 60\neps = 0.2\nsteps = 1000\n").unwrap();
    let cfg = RunConfig::resolve(Some(&cfg_path), Overrides { eps: Some(0.16), ..Default::default() }).unwrap();
    assert_eq!(cfg.params.tf, 60.0);
    assert_eq!(cfg.params.epsilon, 0.16);
    assert_eq!(cfg.steps, 1000);
    assert_eq!(cfg.params.v, 1.0);

    let p = dir.path().join("p.csv");
    let out = sta3d(&["pulses", "--config", cfg_path.to_str().unwrap(), "--tf", "80", "--out", p.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(p).unwrap();
    assert!(text.contains("tf=80 eps=0.2"), "{text:.300}");

    let missing = RunConfig::resolve(Some(Path::new("/nonexistent/run.cfg")), Overrides::default());
    assert!(missing.is_err());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let out = sta3d(&["pulses", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write /nonexistent-dir/x.csv"));
}

#[test]
fn bad_flags_are_rejected() {
    assert!(!sta3d(&["sweep-tf", "--grid", "10:5:3"]).status.success());
    assert!(!sta3d(&["pulses", "--eps", "3"]).status.success());
    assert!(!sta3d(&["frobnicate"]).status.success());
}

#[test]
fn verify_reports_and_exits_nonzero_on_failure() {
    let out = sta3d(&["verify", "--steps", "4000", "--v-over-g", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("three_level_reduction")).unwrap();
    assert!(line.starts_with("FAIL\t") && line.contains("precondition"));
    assert!(text.lines().last().unwrap().starts_with("SUMMARY\t"));

    let out = sta3d(&["verify", "--steps", "4000", "--eps", "0.5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("closed_form_fidelity")).unwrap();
    assert!(line.starts_with("INFO\t"));
}
