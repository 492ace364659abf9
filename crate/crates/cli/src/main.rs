//! Command-line front end: closed-form outage evaluation, optimal
//! allocations, the crossing table with step samples for plotting, and the
//! named verification suites.
//!
//! Output is machine readable. JSON records carry `schema_version`,
//! `command`, `inputs` and `results`, with vectors as `{len, values}` and
//! numbers in shortest round-trip form. CSV uses fixed 15-significant-digit
//! scientific notation so files are byte-stable across runs and worker
//! counts.
//!
//! Exit codes: 0 success, 1 failed property check, 2 usage error, 3 I/O
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use misout::allocator::{self, optimal_k, CrossingTable};
use misout::calculus;
use misout::checks::{self, Suite, SuiteConfig};
use misout::oracle;
use misout::{WeightedExpSum, Weights};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "misout",
    version,
    about = "Outage probabilities of weighted exponential sums and the allocations that minimize them"
)]
struct Cli {
    /// Cap the worker-thread count; results do not depend on it
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage probability P{<q,X> <= x} for a given weight vector
    Outage {
        /// Comma-separated weights: non-negative, summing to at most 1
        #[arg(long)]
        weights: String,
        /// Outage threshold
        #[arg(long)]
        x: f64,
        /// Append the outage gradient in each weight
        #[arg(long)]
        grad: bool,
        /// Append a Monte Carlo estimate: sample count and seed
        #[arg(long, num_args = 2, value_names = ["N", "SEED"])]
        mc: Option<Vec<u64>>,
        /// Emit a JSON record (the default)
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit CSV (a header line and one value line) instead of JSON
        #[arg(long)]
        csv: bool,
    },
    /// Outage-minimizing allocation for a threshold or a rate/SNR pair
    Alloc {
        /// Outage threshold (exclusive with --rate/--snr)
        #[arg(long)]
        x: Option<f64>,
        /// Target rate in nats (needs --snr)
        #[arg(long)]
        rate: Option<f64>,
        /// Signal-to-noise ratio (needs --rate)
        #[arg(long)]
        snr: Option<f64>,
        /// Number of channels
        #[arg(long, default_value_t = 2)]
        t: u32,
        /// Emit a JSON record (the default)
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit CSV (a header line and one value line) instead of JSON
        #[arg(long)]
        csv: bool,
    },
    /// Crossing table and sampled step function of the optimal k
    Figure1 {
        /// Number of channels (at least 2)
        #[arg(long, default_value_t = 2)]
        t: u32,
        /// Write the CSV blocks to this path instead of stdout
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Emit a JSON record with the same data on stdout
        #[arg(long)]
        json: bool,
    },
    /// Run a named invariant suite: lemmas, conjecture, prooflab or all
    Verify {
        /// Suite name
        suite: String,
        /// Channel count used by checks that have one
        #[arg(long, default_value_t = 2)]
        t: u32,
        /// Lattice resolution and scan grid size
        #[arg(long, default_value_t = 2000)]
        grid: u32,
        /// Seed for every random draw in the suites
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Emit a JSON record instead of per-check lines
        #[arg(long)]
        json: bool,
    },
}

struct CliError {
    code: u8,
    msg: String,
}

fn usage(msg: String) -> CliError {
    CliError { code: 2, msg }
}

/// Fixed 15-significant-digit scientific form used by all CSV output.
fn sci(v: f64) -> String {
    format!("{v:.14e}")
}

/// Vectors in JSON records carry an explicit length.
fn vec_value(v: &[f64]) -> Value {
    json!({"len": v.len(), "values": v})
}

fn print_record(command: &str, inputs: Value, results: Value) {
    let record = json!({
        "schema_version": "1",
        "command": command,
        "inputs": inputs,
        "results": results,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&record).expect("record serializes")
    );
}

fn print_csv_row(cols: &[(&str, String)]) {
    let names: Vec<&str> = cols.iter().map(|(n, _)| *n).collect();
    let vals: Vec<&str> = cols.iter().map(|(_, v)| v.as_str()).collect();
    println!("{}", names.join(","));
    println!("{}", vals.join(","));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // can only be set once per process; a losing race keeps the default
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Outage {
            weights,
            x,
            grad,
            mc,
            json: _,
            csv,
        } => cmd_outage(&weights, x, grad, mc.as_deref(), csv),
        Command::Alloc {
            x,
            rate,
            snr,
            t,
            json: _,
            csv,
        } => cmd_alloc(x, rate, snr, t, csv),
        Command::Figure1 { t, csv, json } => cmd_figure1(t, csv.as_deref(), json),
        Command::Verify {
            suite,
            t,
            grid,
            seed,
            json,
        } => cmd_verify(&suite, t, grid, seed, json),
    }
}

fn parse_weights(s: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in s.split(',').enumerate() {
        let item = raw.trim();
        let v: f64 = item.parse().map_err(|_| {
            usage(format!(
                "weights entry {} ('{item}') is not a number",
                i + 1
            ))
        })?;
        if !v.is_finite() || v < 0.0 {
            return Err(usage(format!(
                "weights entry {} ({v}) must be finite and non-negative",
                i + 1
            )));
        }
        out.push(v);
    }
    let sum: f64 = out.iter().sum();
    if sum > 1.0 + 1e-12 {
        return Err(usage(format!(
            "weights sum to {sum}, above the unit budget"
        )));
    }
    Ok(out)
}

fn cmd_outage(
    weights: &str,
    x: f64,
    grad: bool,
    mc: Option<&[u64]>,
    csv: bool,
) -> Result<ExitCode, CliError> {
    if !x.is_finite() {
        return Err(usage(format!("x must be finite, got {x}")));
    }
    let q = parse_weights(weights)?;
    let w = Weights::new(q.clone()).map_err(|e| usage(e.to_string()))?;
    let law = WeightedExpSum::from_weights(&w, &[]).map_err(|e| usage(e.to_string()))?;
    let cdf = law.cdf(x);
    let gradient = if grad {
        Some(calculus::outage_gradient(&w, x).map_err(|e| usage(e.to_string()))?)
    } else {
        None
    };
    let estimate = match mc {
        Some(&[n, seed]) => {
            if n < 10_000 {
                return Err(usage(format!("--mc needs at least 10000 samples, got {n}")));
            }
            Some(oracle::monte_carlo(&w, x, n, seed))
        }
        _ => None,
    };

    if csv {
        let mut cols = vec![("x", sci(x)), ("cdf", sci(cdf))];
        let grad_names: Vec<String> = (0..q.len()).map(|i| format!("grad_{i}")).collect();
        if let Some(g) = &gradient {
            for (name, v) in grad_names.iter().zip(g) {
                cols.push((name.as_str(), sci(*v)));
            }
        }
        if let Some(e) = &estimate {
            cols.push(("mc_p_hat", sci(e.p_hat)));
            cols.push(("mc_stderr", sci(e.stderr)));
            cols.push(("mc_n", e.n.to_string()));
            cols.push(("mc_seed", e.seed.to_string()));
        }
        print_csv_row(&cols);
    } else {
        let mut results = serde_json::Map::new();
        results.insert("cdf".into(), json!(cdf));
        if let Some(g) = &gradient {
            results.insert("gradient".into(), vec_value(g));
        }
        if let Some(e) = &estimate {
            results.insert("mc_p_hat".into(), json!(e.p_hat));
            results.insert("mc_stderr".into(), json!(e.stderr));
            results.insert("mc_n".into(), json!(e.n));
            results.insert("mc_seed".into(), json!(e.seed));
        }
        print_record(
            "outage",
            json!({"weights": vec_value(&q), "x": x}),
            Value::Object(results),
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_alloc(
    x: Option<f64>,
    rate: Option<f64>,
    snr: Option<f64>,
    t: u32,
    csv: bool,
) -> Result<ExitCode, CliError> {
    if t < 1 {
        return Err(usage("t must be at least 1".into()));
    }
    let threshold = match (x, rate, snr) {
        (Some(v), None, None) => v,
        (None, Some(r), Some(s)) => {
            allocator::rate_to_threshold(r, s).map_err(|e| usage(e.to_string()))?
        }
        (Some(_), _, _) => {
            return Err(usage(
                "give either --x or --rate with --snr, not both".into(),
            ))
        }
        _ => return Err(usage("give either --x or both --rate and --snr".into())),
    };
    if !threshold.is_finite() {
        return Err(usage(format!("threshold must be finite, got {threshold}")));
    }
    let a = optimal_k(threshold, t);

    if csv {
        let mut cols = vec![
            ("k", a.k.to_string()),
            ("outage", sci(a.outage)),
            ("x", sci(threshold)),
        ];
        let q_names: Vec<String> = (0..a.q.dim()).map(|i| format!("q_{i}")).collect();
        for (name, v) in q_names.iter().zip(a.q.values()) {
            cols.push((name.as_str(), sci(*v)));
        }
        print_csv_row(&cols);
    } else {
        let mut inputs = serde_json::Map::new();
        inputs.insert("x".into(), json!(threshold));
        inputs.insert("t".into(), json!(t));
        if let (Some(r), Some(s)) = (rate, snr) {
            inputs.insert("rate".into(), json!(r));
            inputs.insert("snr".into(), json!(s));
        }
        print_record(
            "alloc",
            Value::Object(inputs),
            json!({
                "k": a.k,
                "outage": a.outage,
                "degenerate": a.degenerate,
                "q": vec_value(a.q.values()),
            }),
        );
    }
    Ok(ExitCode::SUCCESS)
}

/// Sweep the threshold axis past the outermost crossing so the step block
/// covers every optimal k from t down to 1.
fn step_samples(t: u32, x_hi: f64) -> (Vec<f64>, Vec<u32>) {
    let n = 240usize;
    let mut outage = Vec::with_capacity(n + 1);
    let mut k_opt = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let a = optimal_k(x_hi * i as f64 / n as f64, t);
        outage.push(a.outage);
        k_opt.push(a.k);
    }
    (outage, k_opt)
}

fn figure_csv(table: &CrossingTable, outage: &[f64], k_opt: &[u32]) -> String {
    let mut s = String::from("k,x_k,outage_k\n");
    for r in &table.rows {
        s.push_str(&format!("{},{},{}\n", r.k, sci(r.x_k), sci(r.outage_k)));
    }
    s.push('\n');
    s.push_str("outage,k_opt\n");
    for (o, k) in outage.iter().zip(k_opt) {
        s.push_str(&format!("{},{}\n", sci(*o), k));
    }
    s
}

fn cmd_figure1(
    t: u32,
    csv_path: Option<&std::path::Path>,
    json: bool,
) -> Result<ExitCode, CliError> {
    if t < 2 {
        return Err(usage(format!("t must be at least 2, got {t}")));
    }
    let table = allocator::figure1_table(t);
    let x_hi = 1.25 * table.rows[0].x_k;
    let (outage, k_opt) = step_samples(t, x_hi);
    let csv = figure_csv(&table, &outage, &k_opt);
    if let Some(path) = csv_path {
        std::fs::write(path, &csv).map_err(|e| CliError {
            code: 3,
            msg: format!("cannot write {}: {e}", path.display()),
        })?;
    }
    if json {
        let ks: Vec<u32> = table.rows.iter().map(|r| r.k).collect();
        let xs: Vec<f64> = table.rows.iter().map(|r| r.x_k).collect();
        let levels: Vec<f64> = table.rows.iter().map(|r| r.outage_k).collect();
        print_record(
            "figure1",
            json!({"t": t, "csv": csv_path.map(|p| p.display().to_string())}),
            json!({
                "k": {"len": ks.len(), "values": ks},
                "x_k": vec_value(&xs),
                "outage_k": vec_value(&levels),
                "step_outage": vec_value(&outage),
                "step_k": {"len": k_opt.len(), "values": k_opt},
            }),
        );
    } else if csv_path.is_none() {
        print!("{csv}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str, t: u32, grid: u32, seed: u64, json: bool) -> Result<ExitCode, CliError> {
    let Some(s) = Suite::parse(suite) else {
        return Err(usage(format!(
            "unknown suite '{suite}': expected lemmas, conjecture, prooflab or all"
        )));
    };
    let report = checks::run(s, &SuiteConfig { t, grid, seed }).map_err(|e| CliError {
        code: 1,
        msg: format!("suite aborted: {e}"),
    })?;
    if json {
        let rows: Vec<Value> = report
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "worst": c.worst,
                    "limit": c.limit,
                    "passed": c.passed(),
                    "detail": c.detail,
                })
            })
            .collect();
        print_record(
            "verify",
            json!({"suite": report.suite, "t": t, "grid": grid, "seed": seed}),
            json!({"passed": report.passed(), "checks": rows}),
        );
    } else {
        for c in &report.checks {
            let mark = if c.passed() { "pass" } else { "FAIL" };
            let extra = if c.detail.is_empty() {
                String::new()
            } else {
                format!(" ({})", c.detail)
            };
            println!(
                "[{mark}] {} worst={:.6e} limit={:.6e}{extra}",
                c.name, c.worst, c.limit
            );
        }
    }
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        let names: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name)
            .collect();
        eprintln!("failed invariants: {}", names.join(", "));
        Ok(ExitCode::from(1))
    }
}
