use noidkit::io::{SurfaceMesh, Table};
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("noidkit-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noidkit")).args(args).output().unwrap()
}

fn report(dir: &Path) -> HashMap<String, String> {
    fs::read_to_string(dir.join("report.txt"))
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

#[test]
fn scherk_table() {
    let dir = scratch("scherk");
    let o = run(&["scherk", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = Table::read(&dir.join("scherk.csv")).unwrap();
    assert_eq!(t.header, ["s", "u", "conservation_residual"]);
    let (s, u, res) = (t.column("s").unwrap(), t.column("u").unwrap(), t.column("conservation_residual").unwrap());
    assert_eq!((s[0], u[0]), (0.0, 0.0));
    let q = s.iter().position(|&x| x == std::f64::consts::FRAC_PI_4).unwrap();
    assert!((u[q] - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-6);
    assert!(res.iter().all(|r| r.abs() < 1e-10));
    let mesh = SurfaceMesh::read(&dir.join("scherk.obj")).unwrap();
    assert_eq!(mesh.vertices.len(), 2500);
    assert!(dir.join("resolved.ini").exists());
}

#[test]
fn scherk_needs_negative_base_curvature() {
    let dir = scratch("scherk-flat");
    let o = run(&["scherk", "--out", &out_arg(&dir), "--set", "space.kappa=-1", "--set", "space.H=0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.exists());
}

#[test]
fn knoid_pipeline_audits_pass_and_are_deterministic() {
    let first = scratch("knoid-a");
    let second = scratch("knoid-b");
    for dir in [&first, &second] {
        let o = run(&["knoid", "--out", &out_arg(dir), "--set", "contour.truncations=2", "--strict"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    }
    let rep = report(&first);
    assert_eq!(rep["pipeline"], "knoid");
    let audits: Vec<_> = rep.iter().filter(|(k, _)| k.starts_with("audit.")).collect();
    assert!(audits.len() >= 8);
    assert!(audits.iter().all(|(_, v)| *v == "pass"), "{audits:?}");
    for name in ["knoid_r2.contour", "knoid_r2.obj", "solve_reports.csv", "ladder.csv", "mirror_A+.csv", "mirror_R.csv"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap(), "{name}");
    }
    let mesh = SurfaceMesh::read(&first.join("knoid_r2.obj")).unwrap();
    let solves = Table::read(&first.join("solve_reports.csv")).unwrap();
    assert_eq!(solves.column("nodes").unwrap()[0] as usize, mesh.vertices.len());
    let mirror = Table::read(&first.join("mirror_A+.csv")).unwrap();
    assert!(mirror.column("alpha_prime").unwrap().iter().all(|&r| r > 0.0));
}

#[test]
fn resolved_config_reproduces_the_run() {
    let first = scratch("resolved-a");
    let second = scratch("resolved-b");
    let o = run(&["knoid", "--out", &out_arg(&first), "--set", "contour.truncations=2", "--set", "mesh.level=3"]);
    assert_eq!(o.status.code(), Some(0));
    let cfg = first.join("resolved.ini");
    let o = run(&["knoid", "--config", &cfg.display().to_string(), "--out", &out_arg(&second)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(first.join("knoid_r2.obj")).unwrap(), fs::read(second.join("knoid_r2.obj")).unwrap());
    let text = fs::read_to_string(&cfg).unwrap();
    assert!(text.contains("[solver]") && text.contains("gradient_tol"));
}

#[test]
fn symmetric_noid2k_is_flagged() {
    let dir = scratch("noid2k-sym");
    let o = run(&["noid2k", "--out", &out_arg(&dir), "--set", "contour.alpha=pi/4", "--set", "contour.truncations=2, 3"]);
    assert_eq!(o.status.code(), Some(0));
    let rep = report(&dir);
    assert_eq!(rep["symmetric"], "true");
    assert_eq!(rep["delta"].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rep["audit.containment"], "pass");
    assert!(dir.join("noid2k_final.obj").exists());
    assert!(dir.join("mirror_p5.csv").exists());
}

#[test]
fn invalid_alpha_is_rejected_before_any_compute() {
    let dir = scratch("noid2k-bad");
    let o = run(&["noid2k", "--out", &out_arg(&dir), "--set", "contour.alpha=pi/3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
    assert!(!dir.exists());
}

#[test]
fn configuration_errors() {
    let dir = scratch("config");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.ini");
    fs::write(&cfg, "[space]\nkappa = -1\nH = 0.3\n[contour]\nradius = 2\n").unwrap();
    let o = run(&["knoid", "--config", &cfg.display().to_string(), "--out", &out_arg(&dir.join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["knoid", "--config", &dir.join("missing.ini").display().to_string()]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["knoid", "--out", &out_arg(&dir.join("o")), "--set", "mesh.level=many"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["knoid"; 1].iter().chain(&["--bogus"]).copied().collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failures_have_their_own_code() {
    let dir = scratch("numerical");
    let o = run(&["knoid", "--out", &out_arg(&dir), "--set", "contour.truncations=2", "--set", "solver.max_pcg=1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["knoid", "--out", &out_arg(&dir), "--set", "contour.truncations=2", "--set", "solver.max_newton=0", "--strict"]);
    assert_eq!(o.status.code(), Some(5));
    assert_eq!(report(&dir)["audit.solves_converged"], "fail");
}

#[test]
fn sister_and_verify() {
    let dir = scratch("sister");
    let o = run(&["sister", "--out", &out_arg(&dir), "--set", "contour.truncations=2", "--strict"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let fan = Table::read(&dir.join("fan_A+.csv")).unwrap();
    let heights = fan.column("height").unwrap();
    assert!(heights.windows(2).all(|w| w[1] > w[0]));
    let dir = scratch("verify");
    let o = run(&["verify", "--out", &out_arg(&dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(report(&dir)["audit.scherk.closed_form"], "pass");
}
