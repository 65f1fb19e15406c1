use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_surface-fidelity"));
    cmd.env_remove("SURFACE_FIDELITY_OUT");
    cmd
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg(command).arg("--config").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_key_is_usage_error_with_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.toml", "[run]\ncommand = \"exact\"\n[lattice]\ndistances = [2]\nspeling = 3\n");
    let o = run("exact", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("speling") && err.contains("line 5"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn predict_reports_closed_forms() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "p.toml", "[run]\ncommand = \"predict\"\n");
    let o = run("predict", &cfg, &dir.path().join("out"), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("out/predictions.txt")).unwrap();
    assert!(text.starts_with("# surface-fidelity "));
    assert!(text.lines().next().unwrap().contains("config_sha256=") && text.contains("seed=none"));
    assert!(text.contains("0.44068679") && text.contains("0.22034"));
}

#[test]
fn exact_writes_every_engine() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "e.toml",
        "[lattice]\ndistances = [2, 3]\n[coupling]\nh = -0.3\nj = 0.1\n[syndrome]\nplaquettes = \"empty\"\n",
    );
    let o = run("exact", &cfg, &dir.path().join("out"), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("out/amplitudes.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 8);
    for engine in ["qubit_brute", "dual_brute", "transfer_matrix", "sector_sums"] {
        assert_eq!(rows.iter().filter(|r| r.contains(engine)).count(), 2);
    }
}

const MC_DOC: &str = "[run]\nseed = 5\n[lattice]\ndistances = [4, 5]\n\
    [coupling]\nh = 0.0\nscan_parameter = \"j\"\nscan_values = [0.15, 0.2, 0.25, 0.3]\n\
    [mc]\nsweeps = 1500\nburn_in = 100\nchains = 2\n";

#[test]
fn scan_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "s.toml", MC_DOC);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("scan", &cfg, &a, &[]).status.success());
    assert!(run("scan", &cfg, &b, &[]).status.success());
    for name in ["curves.csv", "threshold.txt"] {
        let x = std::fs::read(a.join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.join(name)).unwrap(), "{name}");
    }
    let curves = std::fs::read_to_string(a.join("curves.csv")).unwrap();
    assert!(curves.lines().next().unwrap().ends_with("seed=5"));
    assert_eq!(curves.lines().nth(1).unwrap(), "size,coupling,estimator,mean,std_error,acceptance_rate,sign_average,seed");
    assert_eq!(curves.lines().count(), 2 + 8);
    // No staging files survive.
    assert!(std::fs::read_dir(&a).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "m.toml", MC_DOC);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("mc", &cfg, &a, &[]).status.success());
    assert!(run("mc", &cfg, &b, &["--seed", "6"]).status.success());
    let x = std::fs::read_to_string(a.join("mc.csv")).unwrap();
    let y = std::fs::read_to_string(b.join("mc.csv")).unwrap();
    assert!(y.lines().next().unwrap().ends_with("seed=6"));
    assert_ne!(x.lines().nth(2), y.lines().nth(2));
}

#[test]
fn stochastic_commands_need_a_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "m.toml", &MC_DOC.replace("seed = 5\n", ""));
    let o = run("mc", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("seed"));
}

#[test]
fn engine_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "e.toml", "[run]\nengine = \"qubit_brute\"\n[lattice]\ndistances = [5]\n");
    let o = run("exact", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn validate_passes_and_fails_with_codes() {
    let dir = TempDir::new().unwrap();
    let ok = write(dir.path(), "v.toml", "[run]\ncommand = \"validate\"\n[lattice]\ndistances = [2, 3]\n");
    let o = run("validate", &ok, &dir.path().join("ok"), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = std::fs::read_to_string(dir.path().join("ok/validate.txt")).unwrap();
    assert!(report.contains("checks_failed: 0"));

    let strict = write(dir.path(), "w.toml", "[run]\ntolerance = 1e-300\n[lattice]\ndistances = [2]\n");
    let o = run("validate", &strict, &dir.path().join("bad"), &[]);
    assert_eq!(o.status.code(), Some(3));
    let report = std::fs::read_to_string(dir.path().join("bad/validate.txt")).unwrap();
    assert!(!report.contains("checks_failed: 0"));
}

#[test]
fn usage_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "p.toml", "[run]\ncommand = \"predict\"\n");
    assert_eq!(run("exact", &cfg, &dir.path().join("o"), &[]).status.code(), Some(1));
    assert_eq!(run("frobnicate", &cfg, &dir.path().join("o"), &[]).status.code(), Some(1));
    assert_eq!(bin().arg("predict").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn env_var_sets_default_out_dir() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "p.toml", "[run]\ncommand = \"predict\"\n");
    let target = dir.path().join("from-env");
    let o = bin().args(["predict", "--config"]).arg(&cfg).env("SURFACE_FIDELITY_OUT", &target).output().unwrap();
    assert!(o.status.success());
    assert!(target.join("predictions.txt").exists());
}

#[test]
fn coupling_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    let lattice = surface_fidelity::geometry::Lattice::new(2).unwrap();
    let couplings = surface_fidelity::noise_model::draw_uniform_real(&lattice, 0.5, 0.2, 3).unwrap();
    write(dir.path(), "k.txt", &couplings.to_text());
    let cfg = write(
        dir.path(),
        "f.toml",
        "[lattice]\ndistances = [2]\n[coupling]\ndistribution = \"file\"\nfile = \"k.txt\"\nfields = [[0, 0.25]]\n",
    );
    let o = run("tm", &cfg, &dir.path().join("out"), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let missing = write(dir.path(), "g.toml", "[coupling]\ndistribution = \"file\"\nfile = \"nope.txt\"\n");
    let o = run("tm", &missing, &dir.path().join("out2"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}
