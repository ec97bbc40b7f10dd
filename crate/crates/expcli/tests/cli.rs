//! End-to-end runs of the `qpspec` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qpspec"))
}

fn configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    v.sort();
    v
}

fn listed_names(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_whitespace().next().map(str::to_string))
        .collect()
}

fn run_config(text: &str, out_dir: &Path) -> Output {
    let cfg = out_dir.join("config.toml");
    std::fs::write(&cfg, text).unwrap();
    bin().arg("run").arg(&cfg).arg("--out").arg(out_dir).output().unwrap()
}

const EXPECTED: [&str; 16] = [
    "avalanche_fuzz",
    "bmo_trend",
    "concatenation_bound",
    "fourier_decay",
    "green_decay",
    "hellmann_feynman",
    "holder_scan",
    "ids",
    "ldt_decay",
    "lyapunov_scan",
    "min_gap",
    "positivity_probe",
    "thouless_check",
    "wegner",
    "zero_additivity",
    "zeros_probe",
];

#[test]
fn listing_is_sorted_and_default() {
    let list = bin().arg("list").output().unwrap();
    assert!(list.status.success());
    assert_eq!(listed_names(&list), EXPECTED);
    let bare = bin().output().unwrap();
    assert!(bare.status.success());
    assert_eq!(bare.stdout, list.stdout);
}

#[test]
fn every_listed_experiment_has_a_bundled_config_that_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let configs = configs();
    let stems: Vec<String> = configs
        .iter()
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(stems, EXPECTED);
    for (cfg, name) in configs.iter().zip(EXPECTED) {
        let out = tmp.path().join(name);
        let r = bin().arg("run").arg(cfg).arg("--out").arg(&out).arg("--threads").arg("2").output().unwrap();
        assert!(r.status.success(), "{name}: {}", String::from_utf8_lossy(&r.stderr));
        let csv = std::fs::read_to_string(out.join(format!("{name}.csv"))).unwrap();
        let header = csv.lines().next().unwrap();
        let width = header.split(',').count();
        assert!(csv.lines().count() > 1, "{name} wrote no rows");
        for line in csv.lines().skip(1) {
            assert_eq!(line.split(',').count(), width, "{name}: {line}");
        }
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["experiment"], name);
        assert_eq!(manifest["threads"], 2);
        assert!(manifest["wall_clock_ms"].as_f64().unwrap() >= 0.0);
        assert_eq!(manifest["columns"].as_array().unwrap().len(), width);
        assert_eq!(manifest["library_version"], env!("CARGO_PKG_VERSION"));
    }
}

const BASE: &str = r#"
seed = 3
[model]
potential = "cosine"
lambda = 3.0
[dynamics]
kind = "shift"
omega = "golden"
"#;

#[test]
fn documented_csv_headers() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!("experiment = \"lyapunov_scan\"\n{BASE}[grid]\nn = [250, 500, 1000]\nsamples = 20\n");
    assert!(run_config(&text, tmp.path()).status.success());
    let csv = std::fs::read_to_string(tmp.path().join("lyapunov_scan.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "N,E,L_N,stderr,diff2N,logN_over_N");
    assert_eq!(csv.lines().count(), 4);

    let text = format!("experiment = \"ids\"\n{BASE}[grid]\nenergies = [0.0]\nn = [50]\nsamples = 4\n");
    assert!(run_config(&text, tmp.path()).status.success());
    let csv = std::fs::read_to_string(tmp.path().join("ids.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "E,N,ids,x_samples");
}

#[test]
fn unknown_experiment_is_a_validation_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run_config(&format!("experiment = \"nope\"\n{BASE}"), tmp.path());
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("lyapunov_scan") && err.contains("zeros_probe"), "{err}");
}

#[test]
fn rational_frequency_fails_diophantine_gate() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!("experiment = \"ids\"\n{BASE}")
        .replace("\"golden\"", "\"1/2\"")
        + "[dynamics.diophantine]\na = 2.0\nc = 0.01\nn_max = 100\n";
    let r = run_config(&text, tmp.path());
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("Diophantine condition"));
}

#[test]
fn malformed_config_and_bad_potential_exit_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run_config("experiment = \"ids\"\n[model]\n", tmp.path());
    assert_eq!(r.status.code(), Some(2));
    let text = format!("experiment = \"ids\"\n{BASE}").replace("\"cosine\"", "\"fourier\"");
    assert_eq!(run_config(&text, tmp.path()).status.code(), Some(2));
}

#[test]
fn seed_override_changes_random_output_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/min_gap.toml");
    let run = |seed: &str, dir: &str| {
        let out = tmp.path().join(dir);
        let r = bin().arg("run").arg(&cfg).args(["--seed", seed, "--out"]).arg(&out).output().unwrap();
        assert!(r.status.success());
        std::fs::read(out.join("min_gap.csv")).unwrap()
    };
    assert_eq!(run("11", "a"), run("11", "b"));
    assert_ne!(run("11", "a"), run("12", "c"));
}
