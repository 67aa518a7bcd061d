use std::path::Path;
use std::process::{Command, Output};

fn gausscap(args: &[&str]) -> Output {
    gausscap_env(args, &[])
}

fn gausscap_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gausscap"));
    cmd.args(args).env_remove("GAUSSCAP_JOBS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_records(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let i = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|x| x.unwrap()[i].to_string()).collect()
}

#[test]
fn capacity_closed_form_at_three_quarters() {
    let o = gausscap(&["capacity", "--q", "0.75"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("q,P_A,P_E,Q_closed,"));
    assert!(!text.contains('\r'));
    let q: f64 = column(&text, "Q_closed")[0].parse().unwrap();
    assert!((q - 3f64.ln()).abs() < 1e-15);
    // 17 significant digits in scientific notation
    let first = &column(&text, "q")[0];
    assert_eq!(first, "7.5000000000000000e-1");
}

#[test]
fn singular_and_invalid_q_exit_with_two() {
    for args in [&["capacity", "--q", "1"][..], &["capacity", "--q", "-0.2"], &["capacity", "--q-range", "0.9:0.5:0.1"]] {
        let o = gausscap(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn range_grid_has_one_record_per_point_in_order() {
    let o = gausscap(&["--jobs", "3", "capacity", "--q-range", "0.51:0.99:0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let qs: Vec<f64> = column(&stdout(&o), "q").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(qs.len(), 49);
    assert!(qs.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn figures_are_deterministic_across_job_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let grid = "0.55,0.72,0.85";
    let run = |dir: &Path, jobs: &str| {
        let o = gausscap(&["--jobs", jobs, "figures", "--q", grid, "--n-max", "20", "--out-dir", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(a.path(), "1");
    run(b.path(), "4");
    for f in ["fig1.csv", "fig2.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn fig1_default_grid_includes_window_edge() {
    let dir = tempfile::tempdir().unwrap();
    let o = gausscap(&["figures", "--which", "fig1", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let hi = 0.5 + 3f64.sqrt() / 6.0;
    let rows = csv_records(&text);
    let edge = rows
        .iter()
        .find(|r| (r[0].parse::<f64>().unwrap() - hi).abs() < 1e-15)
        .expect("window edge on the grid");
    let c: f64 = edge[edge.len() - 1].parse().unwrap();
    assert!((c + 0.0303).abs() < 5e-3, "{c}");
}

#[test]
fn crosscheck_passes_by_default_and_fails_on_small_cutoff() {
    let o = gausscap(&["crosscheck"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(column(&stdout(&o), "pass").iter().all(|p| p == "true"));

    let o = gausscap(&["crosscheck", "--cutoff", "8", "--nbar", "3", "--q", "0.6", "--s", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(column(&stdout(&o), "pass"), ["false"]);
}

#[test]
fn witness_outcomes() {
    let o = gausscap(&["witness", "--q", "0.72"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_records(&stdout(&o));
    assert_eq!(&rows[0][0], "negativity");
    assert!(rows[0][7].parse::<f64>().unwrap() < -0.47);

    let o = gausscap(&["witness", "--rational", "2/1", "--eps", "1e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_records(&stdout(&o));
    assert_eq!(&rows[0][0], "relative_entropy");
    assert!(rows[0][9].parse::<f64>().unwrap() < 0.0);

    let o = gausscap(&["witness", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(3));

    let o = gausscap(&["witness", "--rational", "2/0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_records_carry_schema_version() {
    let o = gausscap(&["--format", "json", "capacity", "--q", "0.6,1.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "capacity");
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
}

#[test]
fn flags_beat_config_file_which_beats_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gausscap.toml");
    std::fs::write(&cfg, "format = \"json\"\nq = [0.6, 0.7]\npa = 2.5\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = gausscap(&["--config", cfg, "capacity"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["p_a"], 2.5);
    assert_eq!(recs[0]["p_e"], 1.0);

    let o = gausscap(&["--config", cfg, "--format", "csv", "capacity", "--q", "0.8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(column(&text, "q"), ["8.0000000000000004e-1"]);
    assert_eq!(column(&text, "P_A"), ["2.5000000000000000e0"]);

    std::fs::write(dir.path().join("bad.toml"), "colour = 1\n").unwrap();
    let o = gausscap(&["--config", dir.path().join("bad.toml").to_str().unwrap(), "capacity"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn jobs_env_overrides_flag() {
    let args = ["--jobs", "0", "capacity", "--q", "0.7"];
    assert_eq!(gausscap(&args).status.code(), Some(2));
    assert_eq!(gausscap_env(&args, &[("GAUSSCAP_JOBS", "2")]).status.code(), Some(0));
    let o = gausscap_env(&["--jobs", "2", "capacity", "--q", "0.7"], &[("GAUSSCAP_JOBS", "many")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cap.csv");
    let o = gausscap(&["-o", path.to_str().unwrap(), "capacity", "--q", "0.6,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let direct = gausscap(&["capacity", "--q", "0.6,2"]);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}
