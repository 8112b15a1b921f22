use std::path::Path;
use std::process::{Command, Output};

fn femtoshare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_femtoshare"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn params_round_trip_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = femtoshare(&["params", "--xi", "15"]);
    assert!(out.status.success());
    let toml = stdout(&out);
    assert!(toml.contains("xi_db = 15.0"), "{toml}");
    let cfg = dir.path().join("scenario.toml");
    std::fs::write(&cfg, &toml).unwrap();

    let out = femtoshare(&["eval", "--config", cfg.to_str().unwrap(), "--d", "600"]);
    assert!(out.status.success());
    let d_min = value(&stdout(&out), "d_fm_min_m");
    assert!(d_min < 300.0, "{d_min}");
}

#[test]
fn eval_reports_thinning_at_high_density() {
    let out = femtoshare(&["eval", "--d", "600", "--nf", "100"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("mode = Thinned"), "{text}");
    assert!((value(&text, "rho") - 0.15).abs() < 0.03);

    let text = stdout(&femtoshare(&["eval", "--d", "600", "--nf", "30"]));
    assert!(text.contains("mode = Window"), "{text}");
}

#[test]
fn analytic_preset_writes_csvs_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = femtoshare(&["run", "fig3", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    for f in [
        "fig3_dmin_xi10.csv",
        "fig3_dmin_xi15.csv",
        "fig3_summary.txt",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("fig3_dmin_xi10.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "p_total_dbm,value,std_err,n");
}

fn custom(dir: &Path, seed: &str) -> Output {
    femtoshare(&[
        "run",
        "custom",
        "--sweep",
        "d",
        "400,700",
        "--drops",
        "3",
        "--trials",
        "40",
        "--seed",
        seed,
        "--out",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn custom_sweep_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ra, rb) = (custom(a.path(), "7"), custom(b.path(), "7"));
    assert!(ra.status.code().is_some_and(|c| c <= 1));
    assert_eq!(ra.status.code(), rb.status.code());
    for f in ["custom_femto_sim_sweep.csv", "custom_macro_sim_sweep.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn bad_input_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    for args in [
        vec!["run", "fig9", "--out", out_dir],
        vec!["run", "custom", "--sweep", "d", "800,400", "--out", out_dir],
        vec!["run", "custom", "--out", out_dir],
        vec!["run", "fig1", "--sweep", "d", "400", "--out", out_dir],
        vec!["eval", "--d", "-5"],
    ] {
        let out = femtoshare(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}
