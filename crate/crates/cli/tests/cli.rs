use std::path::Path;
use std::process::{Command, Output};

fn dgfrac(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgfrac"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn run_writes_trace_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgfrac(
        &["run", "--preset", "subcritical-smoke", "--override", "time.t_end=0.1", "--override", "output.interval=0.05", "-o", "res"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("first crack      none"));
    let res = dir.path().join("res");
    let trace = std::fs::read_to_string(res.join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("step,t,dt,kind,energy,dissipation,cracked_nodes,gmres_iters"));
    assert_eq!(lines.count(), 20);
    let vtus: Vec<String> = std::fs::read_dir(&res)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".vtu"))
        .collect();
    assert_eq!(vtus.len(), 3, "{vtus:?}");
    assert!(vtus.contains(&"out_0.vtu".to_string()) && vtus.contains(&"out_20.vtu".to_string()));
    assert!(res.join("config.txt").exists());
}

#[test]
fn config_file_builds_on_a_preset() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("smoke.cfg"),
        "# tiny run\npreset = subcritical-smoke\ntime.t_end = 0.02\noutput.interval = 0\n",
    )
    .unwrap();
    let out = dgfrac(&["run", "smoke.cfg", "-o", "o"], dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("o/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 4);
    // the saved config runs on its own
    let out = dgfrac(&["run", "o/config.txt", "-o", "again"], dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert_eq!(std::fs::read_to_string(dir.path().join("again/trace.csv")).unwrap(), trace);
}

#[test]
fn unknown_keys_report_their_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "material.mu = 1.0\nmaterial.nu = 0.3\n").unwrap();
    let out = dgfrac(&["run", "bad.cfg", "--preset", "subcritical-smoke"], dir.path());
    assert!(!out.status.success());
    let err = text(&out.stderr);
    assert!(err.contains("line 2") && err.contains("material.nu"), "{err}");

    let out = dgfrac(&["run", "--preset", "subcritical-smoke", "--override", "mesh.colour=red"], dir.path());
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("mesh.colour"));
}

#[test]
fn missing_config_and_unknown_preset_fail() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!dgfrac(&["run"], dir.path()).status.success());
    let out = dgfrac(&["pilot", "--preset", "nope"], dir.path());
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("curved-bar-2d"));
}

#[test]
fn pilot_prints_an_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgfrac(
        &[
            "pilot",
            "--preset",
            "subcritical-smoke",
            "--override",
            "pilot.t_start=0.2",
            "--override",
            "pilot.t_end=0.3",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    let line = stdout.lines().find(|l| l.starts_with("pulse.amplitude_minus = ")).expect(&stdout);
    let amp: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(amp < 0.0);
}

#[test]
fn verify_1d_writes_the_convergence_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dgfrac(
        &["verify-1d", "--preset", "quasi-1d-strip", "--override", "mesh.level=0", "--override", "time.dt_el=0.01", "--override", "time.dt_pf=0.01", "--levels", "2", "-o", "v"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("v/verify_1d.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "level,h,dt,l2_error,order,free_end_ratio");
    assert_eq!(rows.len(), 3);
    let order: f64 = rows[2].split(',').nth(4).unwrap().parse().unwrap();
    assert!(order > 0.5, "{csv}");
    assert!(text(&out.stdout).contains("spall (analytic)"));
}
