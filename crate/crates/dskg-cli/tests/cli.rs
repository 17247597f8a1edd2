use dskg::io::{read_csv, Manifest};
use dskg::presets::bump;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn dskg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dskg"))
        .args(args)
        .env_remove("DSKG_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn kernel_on_the_diagonal_is_half_e() {
    let o = dskg(&[
        "kernel", "--M", "1", "--x", "0", "--t", "1", "--x0", "0", "--t0", "1",
    ]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - std::f64::consts::E / 2.0).abs() < 1e-12, "{v}");
}

#[test]
fn identity_suite_reports_json_and_passes() {
    let o = dskg(&["verify", "--suite", "identities", "--M", "0.5"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["identities"].as_array().unwrap().len(), 9);
}

#[test]
fn other_suites_pass() {
    for suite in ["riemann", "realness", "hypergeom"] {
        let o = dskg(&["verify", "--suite", suite, "--M", "2"]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
    }
}

#[test]
fn solve_at_time_zero_echoes_the_data() {
    let o = dskg(&[
        "solve1d",
        "--preset",
        "bump-phi0",
        "--M",
        "0",
        "--t",
        "0",
        "--points",
        "11",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,t,u"));
    let mut count = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[2] - bump(v[0])).abs() < 1e-12, "{line}");
        count += 1;
    }
    assert_eq!(count, 11);
}

#[test]
fn validation_failures_exit_with_two() {
    assert_eq!(
        dskg(&["solve1d", "--preset", "gauss", "--t", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        dskg(&["kernel", "--M", "-1", "--t", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dskg(&["solve-nd", "--n", "4", "--preset", "bump-phi0", "--t", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(dskg(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(dskg(&["kernel"]).status.code(), Some(2));
}

#[test]
fn points_outside_the_cone_are_validation_errors() {
    let o = dskg(&["kernel", "--x", "2", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

fn run_to(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "solve1d",
        "--preset",
        "bump-phi1",
        "--M",
        "0.5",
        "--t",
        "1",
        "--points",
        "9",
        "--out",
    ];
    let d = dir.to_str().unwrap();
    args.push(d);
    args.extend_from_slice(extra);
    dskg(&args)
}

#[test]
fn outputs_carry_a_verifiable_manifest_and_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run_to(&a, &["--threads", "1"]).status.success());
    assert!(run_to(&b, &["--threads", "2"]).status.success());
    let ma = Manifest::read(&a.join("manifest.json")).unwrap();
    assert_eq!(ma.command, "solve1d");
    assert!(ma.verify(&a).unwrap().is_empty());
    let mb = Manifest::read(&b.join("manifest.json")).unwrap();
    assert_eq!(ma.config_hash, mb.config_hash);
    assert_eq!(
        std::fs::read(a.join("solution.csv")).unwrap(),
        std::fs::read(b.join("solution.csv")).unwrap()
    );
    let (header, rows) = read_csv(&a.join("solution.csv")).unwrap();
    assert_eq!(header, ["x", "t", "u"]);
    assert_eq!(rows.len(), 9);
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(&cfg, "# kernel run\nM = 3\nt = 1\nt0 = 1\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = dskg(&["kernel", "--config", c, "--M", "1"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - std::f64::consts::E / 2.0).abs() < 1e-12);
    std::fs::write(&cfg, "mass = 3\n").unwrap();
    assert_eq!(dskg(&["kernel", "--config", c]).status.code(), Some(2));
}

#[test]
fn three_dimensional_slice_and_oracle_agree() {
    let args = [
        "--n",
        "3",
        "--preset",
        "bump-phi1",
        "--M",
        "0.5",
        "--t",
        "1",
        "--points",
        "5",
    ];
    let a = dskg(&[&["solve-nd"][..], &args].concat());
    let b = dskg(&[&["oracle"][..], &args].concat());
    assert!(a.status.success() && b.status.success());
    let parse = |o: &Output| -> Vec<f64> {
        stdout(o)
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect()
    };
    let (u, v) = (parse(&a), parse(&b));
    assert_eq!(u.len(), 5);
    for (u, v) in u.iter().zip(&v) {
        assert!((u - v).abs() < 1e-5 * (1.0 + v.abs()), "{u} vs {v}");
    }
}

#[test]
fn lemma_and_decay_commands_write_summaries() {
    let o = dskg(&["lemmas", "--rho", "1.5", "--a", "-0.5", "--points", "4"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kinds"].as_array().unwrap().len(), 4);

    let o = dskg(&[
        "decay",
        "--preset",
        "bump-phi1",
        "--t",
        "2",
        "--points",
        "1024",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 10);
    assert_eq!(v["bounded"], true);
}
