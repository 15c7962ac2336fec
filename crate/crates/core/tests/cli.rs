use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_deficit-coverage");

const SMALL: &str = r#"
[model]
r1 = 1.1
r2 = 1.1
line1 = { premium = 1.0, claim_rate = 0.5, claims = { type = "deterministic", value = 1.0 } }
line2 = { premium = 1.0, claim_rate = 0.9, claims = { type = "deterministic", value = 1.0 } }

[sim]
n_paths = 400
horizon = 500.0

[wh]
n_samples = 400
w_grid = [0.0, 1.0, 2.0]

[sweep]
points = [[0.0, 0.0], [1.0, 2.0]]
s1 = [1.0, 2.0]
s2 = [1.0]

[output]
path_logs = 2
"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("DEFICIT_COVERAGE_OUT")
        .output()
        .expect("binary runs")
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn simulate_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SMALL).unwrap();
    for (out, workers) in [("a", "1"), ("b", "3")] {
        let o = run(
            dir.path(),
            &[
                "simulate",
                "--config",
                "c.toml",
                "--seed",
                "9",
                "--workers",
                workers,
                "--out",
                out,
            ],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["survival.csv", "transform_sim.csv", "paths/path_1.csv"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let text = fs::read_to_string(dir.path().join("a/survival.csv")).unwrap();
    assert!(text.contains("# seed: 9\n"));
    assert!(text.contains("# config_hash: "));
    assert!(text.contains("# code_version: "));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "u,v,estimate,se,n,horizon");
    assert_eq!(rows.len(), 3);
    let log = fs::read_to_string(dir.path().join("a/paths/path_0.csv")).unwrap();
    assert_eq!(data_lines(&log)[0], "t,event,S1,S2,L1,L2,E1,E2");
}

#[test]
fn empty_sweep_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SMALL
        .replace("points = [[0.0, 0.0], [1.0, 2.0]]", "points = []")
        .replace("path_logs = 2", "");
    fs::write(dir.path().join("c.toml"), cfg).unwrap();
    let o = run(
        dir.path(),
        &["simulate", "--config", "c.toml", "--out", "o"],
    );
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("o/survival.csv")).unwrap();
    assert_eq!(data_lines(&text), vec!["u,v,estimate,se,n,horizon"]);
}

#[test]
fn bad_config_exits_nonzero_with_location() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.toml"),
        SMALL.replace("n_paths = 400", "n_path = 400"),
    )
    .unwrap();
    let o = run(dir.path(), &["simulate", "--config", "c.toml"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("n_path") && err.contains("line"), "{err}");
    let o = run(dir.path(), &["simulate", "--config", "missing.toml"]);
    assert!(!o.status.success());
}

#[test]
fn output_directory_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SMALL).unwrap();
    let o = Command::new(BIN)
        .args(["simulate", "--config", "c.toml"])
        .current_dir(dir.path())
        .env("DEFICIT_COVERAGE_OUT", "from_env")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("from_env/survival.csv").exists());
}

#[test]
fn wh_curves_start_at_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SMALL).unwrap();
    let o = run(dir.path(), &["wh", "--config", "c.toml", "--out", "o"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("o/wh_curves.csv")).unwrap();
    let rows = data_lines(&text);
    let first: Vec<f64> = rows[1].split(',').map(|x| x.parse().unwrap()).collect();
    for col in [1, 3, 5, 7] {
        assert_eq!(first[col], 1.0);
    }
    let samples = fs::read_to_string(dir.path().join("o/wh_samples.csv")).unwrap();
    assert_eq!(data_lines(&samples)[0], "process,bound,value");
}

#[test]
fn surplus_note_transform_is_exact_and_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/surplus_note.toml");
    let o = run(
        dir.path(),
        &["transform", "--config", cfg.to_str().unwrap(), "--out", "o"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("o/transform.csv")).unwrap();
    let rows: Vec<Vec<f64>> = data_lines(&text)[1..]
        .iter()
        .map(|r| r.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    for pair in rows.windows(2).filter(|w| w[0][1] == w[1][1]) {
        assert!(pair[1][2] < pair[0][2]);
    }
    assert!(rows.iter().all(|r| r[3] == 0.0));
}

#[test]
fn common_shock_transform_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/common_shock.toml");
    let o = run(
        dir.path(),
        &["transform", "--config", cfg.to_str().unwrap(), "--out", "o"],
    );
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("independent"));
}
