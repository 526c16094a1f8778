use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_radreact"));
    cmd.env_remove("SELFFORCE_OUT");
    cmd
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run_in(out: &Path, scenario: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(scenario).arg("--out").arg(out).args(extra).output().unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn header(csv: &str) -> Vec<String> {
    let line = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    line.split(',').map(str::to_owned).collect()
}

#[test]
fn static_charge_grid_is_coulomb() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &example("static_coulomb.toml"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("static_coulomb/field_grid.csv")).unwrap();
    let cols = header(&csv);
    let (ix, ie) = (cols.iter().position(|c| c == "x1").unwrap(), cols.iter().position(|c| c == "E1").unwrap());
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 40);
    for row in rows {
        let r = row[ix];
        let want = 1.0 / (r * r);
        assert!((row[ie] - want).abs() <= 1e-12 * want.max(1.0), "r = {r}: {} vs {want}", row[ie]);
    }
}

#[test]
fn csv_files_carry_metadata_header() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), &example("static_coulomb.toml"), &[]).status.success());
    let csv = fs::read_to_string(dir.path().join("static_coulomb/field_grid.csv")).unwrap();
    let meta: Vec<&str> = csv.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(meta.iter().any(|l| l.contains("Gaussian, c=1")));
    assert!(meta.iter().any(|l| l.contains("sha256")));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("static_coulomb/flux.json")).unwrap()).unwrap();
    assert_eq!(json["meta"]["units"], "Gaussian, c=1");
}

#[test]
fn oscillator_balance_closes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &example("larmor_check.toml"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("larmor_check/balance.json")).unwrap()).unwrap();
    let rel = json["rel_residual"].as_f64().unwrap();
    assert!(rel < 0.01, "rel_residual {rel}");
    for key in ["dP_particle", "P_flux", "W", "residual", "M_flux"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn wrong_dimension_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    fs::write(
        &file,
        "name = \"bad\"\ndimension = 5\nmodel = \"lorentz_dirac\"\ncharge = 1.0\n\n[integration]\ntau_end = 1.0\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &file, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
    assert!(!dir.path().join("bad").exists());
}

#[test]
fn existing_output_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = example("static_coulomb.toml");
    assert!(run_in(dir.path(), &scenario, &[]).status.success());
    let again = run_in(dir.path(), &scenario, &[]);
    assert!(!again.status.success());
    assert!(String::from_utf8_lossy(&again.stderr).contains("--force"));
    assert!(run_in(dir.path(), &scenario, &["--force"]).status.success());
}

#[test]
fn env_var_sets_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("run")
        .arg(example("static_coulomb.toml"))
        .env("SELFFORCE_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("static_coulomb/field_grid.csv").exists());
}

#[test]
fn thread_count_does_not_change_output() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let scenario = example("cyclotron_reduced.toml");
    assert!(run_in(a.path(), &scenario, &["--threads", "1"]).status.success());
    assert!(run_in(b.path(), &scenario, &["--threads", "4"]).status.success());
    for file in ["trajectory.csv", "balance.json"] {
        let x = fs::read(a.path().join("cyclotron_reduced").join(file)).unwrap();
        let y = fs::read(b.path().join("cyclotron_reduced").join(file)).unwrap();
        assert!(x == y, "{file} differs between thread counts");
    }
}

#[test]
fn verify_greens_reports_six_d_slope() {
    let out = bin().args(["verify", "greens"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("6D static slope −3.00 ± 0.01: PASS"), "{stdout}");
    assert!(stdout.contains("3 of 3 checks pass"));
}

#[test]
fn unknown_suite_is_rejected() {
    let out = bin().args(["verify", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
