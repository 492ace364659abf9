//! End-to-end tests against the compiled binary: output schemas, exit
//! codes, numeric agreement between formats, and byte stability.

use std::process::{Command, Output};

use serde_json::Value;

fn misout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_misout"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is valid JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn outage_reports_the_exponential_median() {
    let out = misout(&["outage", "--weights", "1", "--x", "0.6931471805599453"]);
    let v = json_stdout(&out);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["command"], "outage");
    assert_eq!(v["inputs"]["weights"]["len"], 1);
    let cdf = v["results"]["cdf"].as_f64().unwrap();
    assert!((cdf - 0.5).abs() < 1e-12, "median outage {cdf}");
}

#[test]
fn gradient_is_symmetric_and_formats_agree() {
    let args = ["outage", "--weights", "0.5,0.5", "--x", "1", "--grad"];
    let v = json_stdout(&misout(&args));
    let cdf = v["results"]["cdf"].as_f64().unwrap();
    assert!((cdf - 0.593994).abs() < 1e-6);
    let g = v["results"]["gradient"]["values"].as_array().unwrap();
    assert_eq!(v["results"]["gradient"]["len"], 2);
    assert_eq!(g[0], g[1]);

    let mut csv_args = args.to_vec();
    csv_args.push("--csv");
    let out = misout(&csv_args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(header, ["x", "cdf", "grad_0", "grad_1"]);
    // CSV carries 15 significant digits, so both formats must agree to a
    // relative 1e-14
    let pairs = [
        (row[1], cdf),
        (row[2], g[0].as_f64().unwrap()),
        (row[3], g[1].as_f64().unwrap()),
    ];
    for (a, b) in pairs {
        assert!((a - b).abs() <= 1e-14 * b.abs(), "{a} vs {b}");
    }
}

#[test]
fn monte_carlo_brackets_the_closed_form() {
    let out = misout(&[
        "outage",
        "--weights",
        "0.7,0.3",
        "--x",
        "1",
        "--mc",
        "1000000",
        "42",
    ]);
    let v = json_stdout(&out);
    let cdf = v["results"]["cdf"].as_f64().unwrap();
    let p_hat = v["results"]["mc_p_hat"].as_f64().unwrap();
    let stderr = v["results"]["mc_stderr"].as_f64().unwrap();
    assert_eq!(v["results"]["mc_n"], 1_000_000);
    assert_eq!(v["results"]["mc_seed"], 42);
    assert!(
        (p_hat - cdf).abs() < 4.0 * stderr,
        "p_hat {p_hat} cdf {cdf}"
    );
}

#[test]
fn usage_errors_exit_2_with_diagnostics() {
    let out = misout(&["outage", "--weights", "0.5,abc", "--x", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("entry 2"));

    let out = misout(&["outage", "--weights", "0.9,0.2", "--x", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum"));

    let out = misout(&["outage", "--weights", "1"]);
    assert_eq!(code(&out), 2, "missing required --x is a usage error");

    let out = misout(&["alloc", "--x", "1", "--rate", "1", "--snr", "1"]);
    assert_eq!(code(&out), 2);
    let out = misout(&["alloc", "--rate", "1"]);
    assert_eq!(code(&out), 2);

    let out = misout(&["verify", "bogus"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = misout(&[
        "outage",
        "--weights",
        "0.2,0.2",
        "--x",
        "1",
        "--mc",
        "10",
        "1",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn alloc_accepts_rate_and_snr_as_a_threshold() {
    let by_rate = json_stdout(&misout(&[
        "alloc", "--rate", "0.25", "--snr", "0.5", "--t", "5",
    ]));
    let x = 0.25_f64.exp_m1() / 0.5;
    let by_x = json_stdout(&misout(&["alloc", "--x", &format!("{x:?}"), "--t", "5"]));
    assert_eq!(by_rate["results"], by_x["results"]);
    assert_eq!(by_rate["inputs"]["x"], by_x["inputs"]["x"]);

    let v = json_stdout(&misout(&["alloc", "--x", "0.1", "--t", "5"]));
    assert_eq!(v["results"]["k"], 5);
    assert_eq!(v["results"]["q"]["len"], 5);
    let v = json_stdout(&misout(&["alloc", "--x", "5", "--t", "5"]));
    assert_eq!(v["results"]["k"], 1);
}

#[test]
fn figure_output_is_byte_stable_and_t_independent() {
    let a = misout(&["figure1", "--t", "3"]);
    let b = misout(&["figure1", "--t", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "repeat runs must match byte for byte");

    let one = misout(&["figure1", "--t", "3", "--threads", "1"]);
    let four = misout(&["figure1", "--t", "3", "--threads", "4"]);
    assert_eq!(
        one.stdout, four.stdout,
        "worker count must not leak into output"
    );
    assert_eq!(a.stdout, one.stdout);

    let text_small = String::from_utf8(a.stdout).unwrap();
    let big = misout(&["figure1", "--t", "6"]);
    let text_big = String::from_utf8(big.stdout).unwrap();
    let rows = |t: &str| -> Vec<String> { t.lines().skip(1).take(2).map(String::from).collect() };
    assert_eq!(
        rows(&text_small),
        rows(&text_big),
        "crossing rows must not depend on t"
    );
}

#[test]
fn figure_csv_file_matches_stdout_and_bad_paths_exit_3() {
    let path = std::env::temp_dir().join(format!("misout-figure-{}.csv", std::process::id()));
    let out = misout(&["figure1", "--t", "4", "--csv", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "file mode writes nothing to stdout");
    let file = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let direct = misout(&["figure1", "--t", "4"]);
    assert_eq!(file, direct.stdout);

    let text = String::from_utf8(file).unwrap();
    assert!(text.starts_with("k,x_k,outage_k\n"));
    assert!(text.contains("\n\noutage,k_opt\n"));
    let first_row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first_row[0], "1");
    let outage1: f64 = first_row[2].parse().unwrap();
    assert!((outage1 - 0.715332).abs() < 1e-5);

    let out = misout(&["figure1", "--t", "2", "--csv", "/nonexistent/f.csv"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_reports_each_check_and_exit_codes_track_passing() {
    let out = misout(&["verify", "lemmas"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.starts_with("[pass]")));
    assert!(text.contains("gradient_matches_finite_difference"));
    assert!(text.contains("worst="));

    let v = json_stdout(&misout(&["verify", "lemmas", "--json"]));
    assert_eq!(v["results"]["passed"], true);
    let checks = v["results"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        assert!(c["worst"].as_f64().unwrap() <= c["limit"].as_f64().unwrap());
        assert_eq!(c["passed"], true);
    }
}
