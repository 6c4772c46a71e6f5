use std::process::{Command, Output};

fn tycz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tycz")).args(args).env_remove("RUST_LOG").output().expect("spawn tycz")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_and_version() {
    let o = tycz(&["--help"]);
    assert!(o.status.success());
    for sub in ["tmg", "fit", "curvature", "inducible", "balanced", "szego", "selftest", "run"] {
        assert!(stdout(&o).contains(sub), "help lacks {sub}");
    }
    assert!(tycz(&["--version"]).status.success());
}

#[test]
fn simanca_tmg_is_m_squared() {
    let o = tycz(&["tmg", "--family", "simanca", "--lambda", "1", "--mu", "1", "--m", "1..6", "--point", "r=0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("point,m,T,truncation_degree,tail_bound"));
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0], "r=0.5");
        let m: f64 = f[1].parse().unwrap();
        let t: f64 = f[2].parse().unwrap();
        assert!((t - m * m).abs() <= 1e-12 * m * m, "T_{m} = {t}");
        count += 1;
    }
    assert_eq!(count, 6);
}

#[test]
fn curve_fubini_study_is_m_plus_one() {
    let o = tycz(&["tmg", "--family", "fs", "--mu", "1", "--n", "1", "--m", "1..4", "--point", "r=0.3", "--format", "json"]);
    assert!(o.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let m = r["m"].as_f64().unwrap();
        assert!((r["T"].as_f64().unwrap() - (m + 1.0)).abs() < 1e-12);
    }
}

#[test]
fn classify_simanca() {
    let o = tycz(&["classify", "--A", "0", "--B", "-1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "Simanca, λ=1");
}

#[test]
fn balanced_an0v_misses_degree_three() {
    let o = tycz(&["balanced", "--family", "an0v", "--lambda", "2", "--mu", "4", "--xi", "0.5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "NotBalanced: missing monomial degree 3");
    let o = tycz(&["balanced", "--family", "flat"]);
    assert!(stdout(&o).starts_with("Balanced: C = "));
}

#[test]
fn inducible_an0v_is_obstructed() {
    let o = tycz(&["inducible", "--family", "an0v", "--lambda", "1.5", "--mu", "4", "--xi", "0.5", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["certified_induced"], false);
    assert!(v["scan"]["status"].to_string().contains("obstructed"), "{v}");
}

#[test]
fn eulerian_table() {
    let o = tycz(&["szego", "eulerian", "--k", "3"]);
    assert_eq!(stdout(&o), "power,coefficient\n0,0\n1,1\n2,4\n3,1\n");
}

#[test]
fn exit_codes() {
    // clap error
    assert_eq!(tycz(&["tmg", "--family", "simanca"]).status.code(), Some(1));
    // bad value the parser accepts but we reject
    assert_eq!(tycz(&["tmg", "--family", "nosuch", "--point", "r=1"]).status.code(), Some(1));
    assert_eq!(tycz(&["tmg", "--family", "flat", "--m", "0..3", "--point", "r=1"]).status.code(), Some(1));
    // computation error: point outside the domain
    assert_eq!(tycz(&["tmg", "--family", "simanca", "--point", "r=-1"]).status.code(), Some(2));
}

#[test]
fn deterministic_output() {
    let args = ["tmg", "--family", "hyp", "--mu", "2", "--m", "1..5", "--point", "r=0.4"];
    assert_eq!(tycz(&args).stdout, tycz(&args).stdout);
}

#[test]
fn saved_config_reruns_identically() {
    let dir = std::env::temp_dir().join(format!("tycz-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    let cfg_s = cfg.to_str().unwrap();
    let first = tycz(&["--save-config", cfg_s, "curvature", "--family", "an0iii", "--lambda", "1", "--mu", "1", "--kappa", "0", "--point", "r=2"]);
    assert!(first.status.success());
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    assert_eq!(saved["command"], "curvature");
    let again = tycz(&["run", cfg_s]);
    assert!(again.status.success());
    assert_eq!(first.stdout, again.stdout);
    std::fs::remove_dir_all(&dir).ok();
}
