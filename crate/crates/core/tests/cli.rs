use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use decolab::harness::run::{build_spin_bath, SID_COLUMNS};
use decolab::harness::{run_scenario, FitReport, Scenario, TimeSeries, TimeValue};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn decolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decolab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_config(name: &str, out: &Path, extra: &[&str]) -> FitReport {
    let config = configs().join(name);
    let mut args = vec![
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = decolab(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    FitReport::read_json(out.join("summary.json")).unwrap()
}

#[test]
fn run_writes_csv_and_summary_with_expected_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sid");
    run_config("sid-gaussian.toml", &out, &[]);
    let csv = std::fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), SID_COLUMNS);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    for key in [
        "t_D",
        "t_R",
        "equilibrium_value",
        "fit_r2",
        "recurrence_window",
        "flags",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["t_R"], "n/a");
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_config("spin-bath.toml", &a, &["--seed", "7"]);
    run_config("spin-bath.toml", &b, &["--seed", "7"]);
    assert_eq!(
        std::fs::read(a.join("series.csv")).unwrap(),
        std::fs::read(b.join("series.csv")).unwrap()
    );

    let c = dir.path().join("c");
    run_config("spin-bath.toml", &c, &["--seed", "8"]);
    assert_ne!(
        std::fs::read(a.join("series.csv")).unwrap(),
        std::fs::read(c.join("series.csv")).unwrap()
    );
}

#[test]
fn fit_recovers_summary_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("toy");
    let summary = run_config("dissipative-toy.toml", &out, &[]);
    let o = decolab(&["fit", "--series", out.join("series.csv").to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let refit: FitReport = serde_json::from_slice(&o.stdout).unwrap();
    let (a, b) = (summary.t_d.value().unwrap(), refit.t_d.value().unwrap());
    assert!((a - b).abs() / a < 1e-9, "{a} vs {b}");
    assert!((refit.t_r.value().unwrap() - 5.0).abs() / 5.0 < 0.05);
}

#[test]
fn compare_orders_reports() {
    let dir = tempfile::tempdir().unwrap();
    run_config("dissipative-toy.toml", &dir.path().join("toy"), &[]);
    run_config("sid-gaussian.toml", &dir.path().join("sid"), &[]);
    let o = decolab(&["compare", "--reports", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("PASS"), "{text}");
    assert!(text.contains("n/a"), "{text}");
    assert!(dir.path().join("ordering.json").is_file());
}

#[test]
fn oracle_scenarios_print_csv_and_unknown_is_rejected() {
    for name in ["spin-bath", "sid-gaussian", "master-eq"] {
        let o = decolab(&["oracle", "--scenario", name, "--seed", "3"]);
        assert!(
            o.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let ts = TimeSeries::parse_csv(&String::from_utf8_lossy(&o.stdout)).unwrap();
        assert!(ts.len() > 1);
    }
    let o = decolab(&["oracle", "--scenario", "nope"]);
    assert!(!o.status.success());
}

#[test]
fn bad_inputs_fail_with_located_messages() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "name = \"x\"\nkind = \"sid-kernel\"\n[times]\nt_max = -1.0\nsamples = 100\n",
    )
    .unwrap();
    let o = decolab(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("t_max"));

    let good = configs().join("sid-gaussian.toml");
    let o = decolab(&[
        "run",
        "--config",
        good.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
        "--tol-override",
        "bogus=1e-3",
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn spin_bath_fit_matches_closed_form_crossing() {
    let s = Scenario::from_file(configs().join("spin-bath.toml")).unwrap();
    let out = run_scenario(&s).unwrap();
    let bath = build_spin_bath(&s).unwrap();
    let analytic = bath
        .first_crossing((-1.0f64).exp(), 1e-3, s.times.t_max)
        .unwrap();
    let TimeValue::Value(t_d) = out.report.t_d else {
        panic!("no fit")
    };
    assert!((t_d - analytic).abs() / analytic < 0.05);

    // Every sampled coherence equals the closed form.
    let m = out.series.require("offdiag_modulus").unwrap();
    for (t, v) in out.series.t().iter().zip(m) {
        assert!((v - bath.offdiag_closed_form(*t).norm()).abs() < 1e-10);
    }
}

#[test]
fn sid_weak_limit_time_tracks_gaussian_decay() {
    let s = Scenario::from_file(configs().join("sid-gaussian.toml")).unwrap();
    let out = run_scenario(&s).unwrap();
    let c0 = out.series.require("offdiag_contrib").unwrap()[0];
    let eps = s.analysis.epsilon;
    let sigma = 0.5;
    let predicted = (2.0 * (c0.abs() / eps).ln()).sqrt() / sigma;
    let t_star = out.weak_limit.t_star.expect("weak limit reached");
    let dt = out.series.t()[1] - out.series.t()[0];
    assert!(
        (t_star - predicted).abs() <= (0.05 * predicted).max(dt),
        "{t_star} vs {predicted}"
    );
}
