//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invariant violation or internal failure,
//! 2 usage or configuration error. Machine-readable output goes to stdout,
//! commentary to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchConfig};
use crate::error::{Error, Result};
use crate::matroid::ExplicitFamily;
use crate::scenario::Scenario;
use crate::solvers::{self, Algorithm, Epsilon, SolverParams};
use crate::verify::{self, CheckConfig, CHECK_MAX_ACTIONS};

/// Caps the benchmark worker count; 0 or unset means one per core.
pub const THREADS_ENV: &str = "ROBUST_SELECT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "robust-select",
    version,
    about = "Robust max-min action selection under matroid constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one scenario file and print the solution as JSON.
    Solve(SolveArgs),
    /// Run the Monte Carlo benchmark and write raw and summary CSVs.
    Bench(BenchArgs),
    /// Run the randomized verification suites on small instances.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    config: PathBuf,
    /// fast | greedy | ratio | brute
    #[arg(long, default_value = "fast")]
    algorithm: String,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    /// Absolute bisection gap; defaults to 1e-3 of the initial upper bound.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    curvature: f64,
    /// Write the solution here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// JSON file with benchmark settings; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    actions: Option<usize>,
    #[arg(long)]
    region: Option<f64>,
    #[arg(long)]
    z_min: Option<usize>,
    #[arg(long)]
    z_max: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Absolute bisection gap (default: 1e-3 of the initial upper bound).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    curvature: Option<f64>,
    #[arg(long, default_value = "fast,ratio")]
    algorithms: String,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    #[arg(long, default_value = "summary.csv")]
    summary: PathBuf,
    /// Record wall-clock times; output is then no longer reproducible.
    #[arg(long)]
    timing: bool,
}

impl BenchArgs {
    fn config(&self) -> Result<BenchConfig> {
        let mut c = match &self.config {
            Some(path) => BenchConfig::from_json_file(path)?,
            None => BenchConfig::default(),
        };
        if let Some(v) = self.agents {
            c.n_agents = v;
        }
        if let Some(v) = self.actions {
            c.n_actions = v;
        }
        if let Some(v) = self.region {
            c.region = v;
        }
        if let Some(v) = self.z_min {
            c.z_min = v;
        }
        if let Some(v) = self.z_max {
            c.z_max = v;
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if let Some(v) = self.seed {
            c.base_seed = v;
        }
        if let Some(v) = self.delta {
            c.delta = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = Epsilon::Absolute(v);
        }
        if let Some(v) = self.curvature {
            c.curvature_input = v;
        }
        c.record_timing |= self.timing;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, default_value_t = CHECK_MAX_ACTIONS)]
    max_actions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add a set family that is not a matroid to the axiom suite.
    #[arg(long, hide = true)]
    inject_corrupt_matroid: bool,
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve(a, out),
        Command::Bench(a) => bench_cmd(a, out, err),
        Command::Check(a) => check(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_configuration() {
                2
            } else {
                1
            }
        }
    }
}

fn io_error(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_owned(),
        source,
    }
}

fn solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let algorithm: Algorithm = a.algorithm.parse()?;
    let params = SolverParams {
        delta: a.delta,
        epsilon: a
            .epsilon
            .map_or(SolverParams::default().epsilon, Epsilon::Absolute),
        curvature: a.curvature,
    };
    params.validate()?;
    let scenario = Scenario::from_json_file(&a.config)?;
    let solution = solvers::solve(&scenario, algorithm, &params)?;
    let json = solution.to_json();
    match &a.output {
        Some(path) => std::fs::write(path, format!("{json}\n")).map_err(io_error(path))?,
        None => {
            let _ = writeln!(out, "{json}");
        }
    }
    Ok(0)
}

fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

fn bench_cmd(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let config = a.config()?;
    let algorithms = bench::parse_algorithms(&a.algorithms)?;
    // fail on unwritable paths before spending time on trials
    for path in [&a.out, &a.summary] {
        std::fs::File::create(path).map_err(io_error(path))?;
    }
    let _ = writeln!(
        err,
        "running {} trials x z in {}..={} for {}",
        config.trials,
        config.z_min,
        config.z_max,
        algorithms.iter().map(|a| a.name()).collect::<Vec<_>>().join(",")
    );
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::param("threads", e.to_string()))?;
    let results = pool.install(|| bench::run_benchmark(&config, &algorithms))?;
    let summaries = bench::aggregate(&results)?;
    bench::write_results_csv(&a.out, &results)?;
    bench::write_summary_csv(&a.summary, &summaries)?;
    let _ = write!(out, "{}", bench::format_summary_table(&summaries));
    let _ = writeln!(
        err,
        "wrote {} rows to {} and {} rows to {}",
        results.len(),
        a.out.display(),
        summaries.len(),
        a.summary.display()
    );
    Ok(0)
}

fn check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if a.max_actions > CHECK_MAX_ACTIONS {
        return Err(Error::TooLarge {
            what: "check --max-actions",
            cap: CHECK_MAX_ACTIONS,
            got: a.max_actions,
        });
    }
    let config = CheckConfig {
        instances: a.instances,
        max_actions: a.max_actions,
        seed: a.seed,
        ..CheckConfig::default()
    };
    let injected: Vec<ExplicitFamily> = if a.inject_corrupt_matroid {
        vec![ExplicitFamily::corrupted_example()]
    } else {
        Vec::new()
    };
    let report = verify::run_checks(&config, &injected)?;
    for s in &report.suites {
        let _ = writeln!(out, "suite {} passed={} failed={}", s.name, s.passed, s.failed);
    }
    for cx in &report.counterexamples {
        let line = serde_json::to_string(cx).expect("counterexample JSON is valid");
        let _ = writeln!(out, "counterexample {line}");
    }
    if report.all_passed() {
        let _ = writeln!(out, "result pass");
        Ok(0)
    } else {
        let _ = writeln!(out, "result fail");
        let _ = writeln!(err, "{} invariant violation(s)", report.counterexamples.len());
        Ok(1)
    }
}
