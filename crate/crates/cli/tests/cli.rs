use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn conslaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conslaw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(format!("{name}.scn"))
}

#[test]
fn list_names_every_bundle() {
    let o = conslaw(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["heat-Es", "dirac-cpt", "ns-adjoint", "appendix"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn adjoint_of_jordan_example() {
    let o = conslaw(&["adjoint", "jordan2x2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("L* = vars 2: [[-1,0],[0,-1]] * Dx^3 + [[-1,0],[0,-1]] * Dt + [[0,0],[1,0]] * Dt*Dx"));
    assert!(text.contains("classification: neither"));
}

#[test]
fn conjugacy_of_dirac_is_gamma0() {
    let o = conslaw(&["conjugacy", "dirac(m=1)"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("A1 = [[1,0,0,0],[0,1,0,0],[0,0,-1,0],[0,0,0,-1]]"));
}

#[test]
fn current_of_wave_operator() {
    let o = conslaw(&["current", "wave1d"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("X0 = conj(Q1)·P1_t - conj(Q1_t)·P1"));
    assert!(text.contains("Div X − Π_L = 0: true"));
}

#[test]
fn verify_writes_series_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let scn = scenario("wave_energy");
    let o = conslaw(&["verify", scn.to_str().unwrap(), "--out-dir", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("wave_energy.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
    let checks = summary["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    for c in checks {
        let csv = std::fs::read_to_string(dir.path().join(c["series"].as_str().unwrap())).unwrap();
        assert!(csv.starts_with("t,re_kappa,im_kappa,drift\n"));
        assert_eq!(csv.lines().count(), 12);
    }
}

#[test]
fn verify_is_deterministic_across_jobs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let files = [scenario("kdvkdv_all"), scenario("dirac_charge")];
    let files: Vec<&str> = files.iter().map(|p| p.to_str().unwrap()).collect();
    let run = |dir: &Path, jobs: &str| {
        let mut args = vec!["verify", "--seed", "5", "--jobs", jobs, "--out-dir", dir.to_str().unwrap()];
        args.extend(&files);
        assert!(conslaw(&args).status.success());
    };
    run(a.path(), "1");
    run(b.path(), "2");
    for name in ["kdvkdv_all.json", "dirac_charge.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn tolerance_override_can_fail_a_run() {
    let scn = scenario("wave_energy");
    let o = conslaw(&["verify", scn.to_str().unwrap(), "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn malformed_operator_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scn");
    std::fs::write(
        &path,
        "name = bad\noperator = [[1,0],[0,1]] * Dt + [[1,2] * Dx\ngrid = 16 / 4\ninitial = gaussian(w=1)\ntimes = 0, 1\nconserved = any.identity @1e-8\n",
    )
    .unwrap();
    let o = conslaw(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2, column"), "{err}");
}

#[test]
fn reproduce_prints_its_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let o = conslaw(&["reproduce", "ns-adjoint", "jordan-2x2", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("certifies: linearised Navier-Stokes"));
    assert!(text.contains("A1 = [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]"));
    assert!(text.contains("symbol identity residual"));
    assert!(dir.path().join("reproduce-jordan-2x2.json").exists());
}

#[test]
fn reproduce_heat_and_cpt_pass() {
    let o = conslaw(&["reproduce", "heat-Es", "dirac-cpt", "--jobs", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("heat-Es: PASS") && text.contains("dirac-cpt: PASS"));
}

#[test]
fn unknown_reproduction_is_an_error() {
    let o = conslaw(&["reproduce", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dirac_suite_reports_every_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = conslaw(&["dirac", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("dirac.json")).unwrap()).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert!(entries.iter().all(|e| e["pass"] == true && e["anchor"].is_string()));
    assert_eq!(v["anticommutators"].as_array().unwrap().len(), 28);
    assert_eq!(v["fitted_constant"], -2.0);
}
