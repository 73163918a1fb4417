use std::path::Path;
use std::process::{Command, Output};

fn hubsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hubsim"))
        .args(args)
        .current_dir(dir)
        .env_remove("HUBSIM_WORKERS")
        .output()
        .expect("hubsim runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn csv_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (
            &["generate", "--steps", "100", "--trials", "2"],
            "trial,seed,steps,final_max_degree,final_leader,distinct_sole_leaders,last_leader_change_step,watch_degrees",
        ),
        (&["walk", "--A", "2", "--B", "1", "--mmax", "5"], "m,q_A_m,cumulative,tail_bound"),
        (&["urn", "--trials", "3", "--horizon", "10"], "trial,seed,ratio"),
        (
            &["coupling", "--model", "power", "--p", "2", "--steps", "50", "--trials", "2"],
            "trial,seed,steps,violations,parity_violations,final_delta,final_delta_tilde",
        ),
    ];
    for (args, header) in cases {
        let o = hubsim(args, dir.path());
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o).lines().next(), Some(*header), "{args:?}");
    }
}

#[test]
fn walk_rows_are_exact_for_the_basic_model() {
    let dir = tempfile::tempdir().unwrap();
    let o = hubsim(&["walk", "--A", "2", "--B", "1", "--mmax", "3"], dir.path());
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], 1.0 / 3.0);
    assert_eq!(rows[1][1], 1.0 / 15.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(hubsim(&["--help"], d).status.code(), Some(0));
    assert_eq!(
        hubsim(&["verify", "--steps", "2000", "--trials", "2"], d).status.code(),
        Some(0)
    );
    // Usage errors, bad parameters and failed preconditions all exit 1.
    for args in [
        &["frobnicate"][..],
        &["generate", "--model", "linear", "--beta", "-2"],
        &["walk", "--A", "3", "--mmax", "2"],
        &["generate", "--model", "table", "--table", "1,2,3,3.5"],
        &["generate", "--steps", "ten"],
    ] {
        let o = hubsim(args, d);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn config_file_fills_unset_flags_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# test config\nsteps = 300\ntrials = 5\nseed = 7\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = hubsim(&["generate", "--config", cfg, "--trials", "2"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2, "flag beats file");
    for row in rows {
        assert_eq!(row.split(',').nth(2), Some("300"), "file beats default");
    }

    let same = hubsim(&["generate", "--steps", "300", "--trials", "2", "--seed", "7"], dir.path());
    assert_eq!(o.stdout, same.stdout);

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "stepz = 3\n").unwrap();
    let o = hubsim(&["generate", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stepz"));
}

#[test]
fn out_flag_writes_the_same_bytes_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["hubs", "--steps", "1000", "--trials", "12"];
    let direct = hubsim(&args, dir.path());
    assert!(direct.status.success());

    let target = dir.path().join("hubs.json");
    std::fs::write(&target, "stale").unwrap();
    let mut with_out = args.to_vec();
    with_out.extend(["--out", "hubs.json"]);
    let o = hubsim(&with_out, dir.path());
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), direct.stdout);
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, vec!["hubs.json"], "no temporary files left behind");
}

#[test]
fn json_reports_parse() {
    let dir = tempfile::tempdir().unwrap();
    let o = hubsim(&["scaling", "--steps", "3000", "--trials", "12"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.get("exponent").and_then(|e| e.as_f64()).is_some(), "{v}");
}
