use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use coldbell::analysis::read_csv;

const CONFIG: &str = r#"
seed = 3

[lattice]
M = 3
UN = 2.0
N = 8

[impurities]
d = 3
eta = 0.3

[solver]
kind = "exact"

[sweep]
eta = [0.1, 0.3]
t = { start = 0.0, stop = 2.0, points = 3 }
witnesses = ["wwzb"]

[optimizer]
restarts = 4
"#;

fn coldbell(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coldbell"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("COLDBELL_THREADS", "2")
        .output()
        .unwrap()
}

fn with_config(text: &str) -> (tempfile::TempDir, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, text).unwrap();
    let p = path.to_str().unwrap().to_string();
    (dir, p)
}

fn error_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr not JSON: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn sweep_writes_readable_csv_and_json() {
    let (dir, cfg) = with_config(CONFIG);
    let out = coldbell(&["sweep", "--config", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("sweep: 6 cells, max wwzb"), "{stdout}");
    let table = read_csv(fs::read(dir.path().join("sweep.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(table.rows.len(), 6);
    assert_eq!(table.seed, 3);
    assert_eq!(table.solver, "exact");
    assert!(table.rows.iter().all(|r| r.wwzb.is_some() && r.gtnl.is_none() && r.blp.is_none()));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["cells"].as_array().unwrap().len(), 6);
    assert_eq!(json["config_hash"].as_str().unwrap(), table.config_hash);
}

#[test]
fn sweep_is_reproducible_and_seed_sensitive() {
    let (dir, cfg) = with_config(CONFIG);
    let read = |sub: &str, seed: &str| {
        let d = dir.path().join(sub);
        assert!(coldbell(&["sweep", "--config", &cfg, "--solver", "bogoliubov", "--seed", seed], &d).status.success());
        fs::read(d.join("sweep.csv")).unwrap()
    };
    let a = read("a", "5");
    assert_eq!(a, read("b", "5"));
    assert_ne!(a, read("c", "6"));
    let table = read_csv(a.as_slice()).unwrap();
    assert_eq!(table.solver, "bogoliubov");
    assert!(table.rows.iter().all(|r| r.blp.is_some()));
}

#[test]
fn evolve_at_zero_returns_input_state() {
    let (dir, cfg) = with_config(CONFIG);
    let out = coldbell(&["evolve", "--config", &cfg, "--t", "0"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("evolve.json")).unwrap()).unwrap();
    let state = &json[0]["state"];
    for i in 0..8 {
        for j in 0..8 {
            assert!((state["re"][i][j].as_f64().unwrap() - 0.125).abs() < 1e-14);
            assert!(state["im"][i][j].as_f64().unwrap().abs() < 1e-14);
        }
    }
}

#[test]
fn bell_reports_optimum_and_pstar() {
    let (dir, cfg) = with_config(CONFIG);
    let out = coldbell(&["bell", "--config", &cfg, "--t", "1.5", "--witness", "wwzb,gtnl", "--solver", "bogoliubov"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("bell.json")).unwrap()).unwrap();
    let records = json.as_array().unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[1]["optimum"]["witness"], "gtnl");
    assert_eq!(records[0]["angles"].as_array().unwrap().len(), 12);
    assert!(records[0]["pstar"]["value"].is_number() || records[0]["pstar"]["value"].is_null());
}

#[test]
fn spectrum_lists_every_nonzero_mode() {
    let (dir, cfg) = with_config(CONFIG);
    let out = coldbell(&["spectrum", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,k,epsilon,omega,xi,nu");
    assert_eq!(lines.len(), 3);
}

#[test]
fn invalid_config_yields_error_json() {
    let (dir, cfg) = with_config(&CONFIG.replace("\nd = 3", "\nsites = [1, 1, 2]"));
    let out = coldbell(&["sweep", "--config", &cfg], dir.path());
    assert!(!out.status.success());
    let err = error_json(&out);
    assert_eq!(err["error"]["kind"], "config");
    assert!(err["error"]["message"].as_str().unwrap().contains("more than once"), "{err}");

    let out = coldbell(&["sweep"], dir.path());
    assert!(!out.status.success());
    assert!(error_json(&out)["error"]["message"].as_str().unwrap().contains("--config"));
}

#[test]
fn failed_cells_give_nonzero_exit_with_outputs() {
    let text = CONFIG.replace("[optimizer]", "[exact]\nmax_states = 5\n\n[optimizer]");
    let (dir, cfg) = with_config(&text);
    let out = coldbell(&["sweep", "--config", &cfg], dir.path());
    assert!(!out.status.success());
    let err = error_json(&out);
    assert_eq!(err["error"]["kind"], "cell_failures");
    assert_eq!(err["error"]["cells"].as_array().unwrap().len(), 6);
    assert!(dir.path().join("sweep.csv").exists());
}

#[test]
fn scaled_figure_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = coldbell(&["figure4", "--scale", "t_points=3", "t_max=50"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read_csv(fs::read(dir.path().join("figure4.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(table.rows.len(), 3);
    assert!(table.rows.iter().all(|r| r.gamma_plus.is_some() && r.horodecki_b.is_some()));
    assert!(String::from_utf8(out.stdout).unwrap().contains("final N"));

    let out = coldbell(&["figure3", "--scale", "M=3", "t_points=4"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["figure3_left_M2", "figure3_right_M3"] {
        assert!(dir.path().join(format!("{name}.csv")).exists());
    }
}

#[test]
fn scale_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out = coldbell(&["figure1", "--scale", "foo=1"], dir.path());
    assert!(!out.status.success());
    assert_eq!(error_json(&out)["error"]["kind"], "config");
}
