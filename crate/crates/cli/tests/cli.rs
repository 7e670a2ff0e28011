use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_recordtime"))
}

#[test]
fn unknown_suite_is_a_usage_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let status = bin().args(["verify", "nonsense", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists());
    assert!(!dir.path().join("report.csv.meta.json").exists());
}

#[test]
fn invalid_flags_are_usage_errors() {
    for args in [
        vec!["verify", "indicators", "--reps", "0"],
        vec!["verify", "indicators", "--lambda=0"],
        vec!["verify", "limit-cov", "--grid", "1"],
        vec!["trace", "--bogus"],
    ] {
        assert_eq!(bin().args(&args).status().unwrap().code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let status = bin()
        .args(["verify", "indicators", "--reps", "10", "--out", "/nonexistent/dir/report.csv"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn passing_suite_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let status = bin()
        .args(["verify", "stirling", "--scales", "3", "--reps", "20000", "--format", "json", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for k in ["suite", "statistic", "value", "threshold", "pass", "n_samples", "seed"] {
        assert!(keys.contains(&k));
    }
    let pmf: Vec<f64> = rows
        .iter()
        .filter(|r| r["statistic"].as_str().unwrap().starts_with("pmf_n3_"))
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(pmf, vec![1.0 / 3.0, 0.5, 1.0 / 6.0]);
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("r.json.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["resolved"]["reps"], 20000);
}

#[test]
fn failing_check_exits_one() {
    // Two replicates cannot bring the total-variation distance under 0.01.
    let status = bin().args(["verify", "stirling", "--reps", "2"]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn pathwise_reports_are_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, workers) in ["1", "3"].into_iter().enumerate() {
        let out = dir.path().join(format!("p{i}.csv"));
        let status = bin()
            .args(["verify", "pathwise", "--reps", "30", "--seed", "7", "--workers", workers, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        files.push(std::fs::read(out).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files.remove(0)).unwrap();
    assert!(text.starts_with("suite,statistic,value,threshold,pass,n_samples,seed\n"));
}

#[test]
fn trace_export() {
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.csv");
    let status = bin().args(["trace", "--horizon", "0", "--out"]).arg(&zero).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&zero).unwrap(), "s,N,I_next,C,W\n0.0,0,1,0,0.0\n");

    let run = || {
        bin()
            .args(["trace", "--horizon", "20", "--grid", "41", "--seed", "3"])
            .output()
            .unwrap()
            .stdout
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 41);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0] && w[0][4] <= w[1][4] && w[0][3] <= w[1][3]));
    assert_eq!(rows.last().unwrap()[0], 20.0);
}

#[test]
fn rescaled_export_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "scales = [1.0, 2.0]\nreps = 5\ngrid = 3\n").unwrap();
    let out = bin().args(["rescaled", "--reps", "2", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("replicate,n,t,C_tilde,W_tilde"));
    // Flag overrides file: 2 scales × 2 replicates × 3 grid points.
    assert_eq!(lines.count(), 12);
}
