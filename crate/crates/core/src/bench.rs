//! Monte Carlo benchmark: random sensor-proximity scenarios on a square
//! region split into four quadrant blocks, every algorithm run on the same
//! scenario per trial, results aggregated per budget and written as CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::scenario::{Point2, Scenario};
use crate::solvers::{self, Algorithm, Epsilon, SolverParams};

pub const RAW_HEADER: [&str; 7] = [
    "z",
    "trial",
    "algorithm",
    "objective",
    "evaluations",
    "wall_time_ms",
    "seed",
];

pub const SUMMARY_HEADER: [&str; 7] = [
    "z",
    "algorithm",
    "mean_objective",
    "sd_objective",
    "mean_evaluations",
    "sd_evaluations",
    "mean_wall_time_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub n_agents: usize,
    pub n_actions: usize,
    /// Side length of the square region `[0, region)²`.
    pub region: f64,
    pub z_min: usize,
    pub z_max: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub delta: f64,
    pub epsilon: Epsilon,
    pub curvature_input: f64,
    /// Record per-call wall time. Off by default so that output files are
    /// reproducible byte for byte; the column then holds zeros.
    pub record_timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_agents: 5,
            n_actions: 50,
            region: 100.0,
            z_min: 1,
            z_max: 10,
            trials: 100,
            base_seed: 1,
            delta: 1e-3,
            epsilon: Epsilon::Relative(1e-3),
            curvature_input: 1.0,
            record_timing: false,
        }
    }
}

impl BenchConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|source| Error::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn solver_params(&self) -> SolverParams {
        SolverParams {
            delta: self.delta,
            epsilon: self.epsilon,
            curvature: self.curvature_input,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::param("n_agents", "must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "must be positive"));
        }
        if !(self.region.is_finite() && self.region > 0.0) {
            return Err(Error::param("region", format!("must be positive, got {}", self.region)));
        }
        if self.z_min > self.z_max {
            return Err(Error::param(
                "z_min",
                format!("z_min {} exceeds z_max {}", self.z_min, self.z_max),
            ));
        }
        self.solver_params().validate()
    }
}

/// One `(z, trial, algorithm)` benchmark record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub z: usize,
    pub trial: usize,
    pub algorithm: Algorithm,
    /// `min_i h_i(S)` of the returned set.
    pub objective: f64,
    /// Surrogate-equivalent evaluation count.
    pub evaluations: f64,
    pub wall_time_ms: f64,
    pub seed: u64,
}

/// Per-`(z, algorithm)` statistics over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub z: usize,
    pub algorithm: Algorithm,
    pub mean_objective: f64,
    pub sd_objective: f64,
    pub mean_evaluations: f64,
    pub sd_evaluations: f64,
    pub mean_wall_time_ms: f64,
}

/// Quadrant block index of `p`: 0 lower-left, 1 lower-right, 2 upper-left,
/// 3 upper-right. Points on the midlines belong to the right/upper side.
pub fn quadrant(p: Point2, region: f64) -> usize {
    let half = region / 2.0;
    usize::from(p.x >= half) + 2 * usize::from(p.y >= half)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for trial `trial` at budget `z`; independent of the algorithm list.
pub fn trial_seed(base_seed: u64, z: usize, trial: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(splitmix64(z as u64) ^ trial as u64))
}

/// Draws agents then actions uniformly on `[0, region)²` and builds the
/// quadrant partition matroid with capacity `z` per block.
pub fn generate_scenario(config: &BenchConfig, z: usize, seed: u64) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = config.region;
    let mut draw = |n: usize| -> Vec<Point2> {
        (0..n)
            .map(|_| Point2::new(rng.gen_range(0.0..region), rng.gen_range(0.0..region)))
            .collect()
    };
    let agents = draw(config.n_agents);
    let actions = draw(config.n_actions);
    let mut blocks = vec![Vec::new(); 4];
    for (j, &p) in actions.iter().enumerate() {
        blocks[quadrant(p, region)].push(j);
    }
    let matroid = Matroid::partition(actions.len(), blocks, z)?;
    Scenario::new(agents, actions, matroid)
}

/// Parses a comma-separated algorithm list, accepting only the benchmarked
/// algorithms (`fast`, `ratio`, `greedy`).
pub fn parse_algorithms(list: &str) -> Result<Vec<Algorithm>> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let a: Algorithm = name.parse()?;
        if a == Algorithm::Brute {
            return Err(Error::UnknownAlgorithm(format!("{name} (not available in benchmarks)")));
        }
        if !out.contains(&a) {
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err(Error::param("algorithms", "at least one algorithm is required"));
    }
    Ok(out)
}

/// Runs every algorithm on every `(z, trial)` scenario.
///
/// Trials run on the current rayon pool; output is sorted by
/// `(z, trial, algorithm)` so it does not depend on scheduling.
pub fn run_benchmark(config: &BenchConfig, algorithms: &[Algorithm]) -> Result<Vec<TrialResult>> {
    config.validate()?;
    if let Some(a) = algorithms.iter().find(|&&a| a == Algorithm::Brute) {
        return Err(Error::UnknownAlgorithm(format!("{a} (not available in benchmarks)")));
    }
    let params = config.solver_params();
    let jobs: Vec<(usize, usize)> = (config.z_min..=config.z_max)
        .flat_map(|z| (0..config.trials).map(move |t| (z, t)))
        .collect();

    let per_trial: Vec<Vec<TrialResult>> = jobs
        .par_iter()
        .map(|&(z, trial)| {
            let seed = trial_seed(config.base_seed, z, trial);
            let scenario = generate_scenario(config, z, seed)?;
            algorithms
                .iter()
                .map(|&algorithm| {
                    let sol = solvers::solve(&scenario, algorithm, &params)?;
                    Ok(TrialResult {
                        z,
                        trial,
                        algorithm,
                        objective: sol.min_value,
                        evaluations: sol.f_evaluations(),
                        wall_time_ms: if config.record_timing {
                            sol.wall_time_ms()
                        } else {
                            0.0
                        },
                        seed,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut results: Vec<TrialResult> = per_trial.into_iter().flatten().collect();
    results.sort_by(|a, b| {
        (a.z, a.trial, a.algorithm.name()).cmp(&(b.z, b.trial, b.algorithm.name()))
    });
    Ok(results)
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Means and sample standard deviations per `(z, algorithm)`, ordered by `z`
/// then algorithm name. A single trial has standard deviation zero.
pub fn aggregate(results: &[TrialResult]) -> Result<Vec<Summary>> {
    if results.is_empty() {
        return Err(Error::Empty("no trial results to aggregate"));
    }
    let mut groups: BTreeMap<(usize, &'static str), Vec<&TrialResult>> = BTreeMap::new();
    for r in results {
        groups.entry((r.z, r.algorithm.name())).or_default().push(r);
    }
    Ok(groups
        .into_values()
        .map(|rows| {
            let pick = |f: fn(&TrialResult) -> f64| rows.iter().map(|r| f(r)).collect::<Vec<_>>();
            let (mean_objective, sd_objective) = mean_sd(&pick(|r| r.objective));
            let (mean_evaluations, sd_evaluations) = mean_sd(&pick(|r| r.evaluations));
            let (mean_wall_time_ms, _) = mean_sd(&pick(|r| r.wall_time_ms));
            Summary {
                z: rows[0].z,
                algorithm: rows[0].algorithm,
                mean_objective,
                sd_objective,
                mean_evaluations,
                sd_evaluations,
                mean_wall_time_ms,
            }
        })
        .collect())
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_owned(),
        source,
    };
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn read_csv<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let csv_err = |source| Error::Csv {
        path: path.to_owned(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err)
}

pub fn write_results_csv(path: impl AsRef<Path>, results: &[TrialResult]) -> Result<()> {
    write_csv(path.as_ref(), &RAW_HEADER, results)
}

pub fn write_summary_csv(path: impl AsRef<Path>, summaries: &[Summary]) -> Result<()> {
    write_csv(path.as_ref(), &SUMMARY_HEADER, summaries)
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<TrialResult>> {
    read_csv(path.as_ref())
}

pub fn read_summary_csv(path: impl AsRef<Path>) -> Result<Vec<Summary>> {
    read_csv(path.as_ref())
}

/// Whitespace-aligned summary table, one line per `(z, algorithm)`.
pub fn format_summary_table(summaries: &[Summary]) -> String {
    let mut out = format!(
        "{:>4} {:>8} {:>14} {:>12} {:>16} {:>14}\n",
        "z", "algo", "mean_obj", "sd_obj", "mean_evals", "sd_evals"
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{:>4} {:>8} {:>14.4} {:>12.4} {:>16.1} {:>14.1}",
            s.z,
            s.algorithm.name(),
            s.mean_objective,
            s.sd_objective,
            s.mean_evaluations,
            s.sd_evaluations
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::IndependenceOracle;
    use crate::objective::AgentObjectives;

    fn row(z: usize, trial: usize, algorithm: Algorithm, objective: f64) -> TrialResult {
        TrialResult {
            z,
            trial,
            algorithm,
            objective,
            evaluations: objective * 10.0,
            wall_time_ms: 0.0,
            seed: 7,
        }
    }

    #[test]
    fn generated_structure() {
        let config = BenchConfig::default();
        let s = generate_scenario(&config, 3, 42).unwrap();
        assert_eq!(s.n_agents(), 5);
        assert_eq!(s.n_actions(), 50);
        let blocks = s.matroid().blocks().unwrap();
        assert_eq!(blocks.len(), 4);
        assert_eq!(blocks.iter().map(Vec::len).sum::<usize>(), 50);
        for (j, block) in blocks.iter().enumerate() {
            for &a in block {
                assert_eq!(quadrant(s.actions()[a], 100.0), j);
            }
        }
        assert_eq!(generate_scenario(&config, 3, 42).unwrap(), s);
        assert_ne!(generate_scenario(&config, 3, 43).unwrap(), s);

        let empty = BenchConfig {
            n_actions: 0,
            ..BenchConfig::default()
        };
        let s = generate_scenario(&empty, 3, 1).unwrap();
        assert_eq!(s.n_actions(), 0);
        assert!(s.matroid().blocks().unwrap().iter().all(Vec::is_empty));
        assert_eq!(s.matroid().ground_size(), 0);
    }

    #[test]
    fn quadrant_boundaries() {
        assert_eq!(quadrant(Point2::new(49.9, 49.9), 100.0), 0);
        assert_eq!(quadrant(Point2::new(50.0, 0.0), 100.0), 1);
        assert_eq!(quadrant(Point2::new(0.0, 50.0), 100.0), 2);
        assert_eq!(quadrant(Point2::new(50.0, 50.0), 100.0), 3);
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(trial_seed(1, 2, 3), trial_seed(1, 2, 3));
        assert_ne!(trial_seed(1, 2, 3), trial_seed(1, 3, 2));
        assert_ne!(trial_seed(1, 2, 3), trial_seed(2, 2, 3));
    }

    #[test]
    fn single_trial_run() {
        let config = BenchConfig {
            trials: 1,
            z_min: 1,
            z_max: 1,
            n_actions: 12,
            ..BenchConfig::default()
        };
        let out = run_benchmark(&config, &[Algorithm::Fast]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].seed, trial_seed(1, 1, 0));
        assert_eq!(out[0].wall_time_ms, 0.0);
        assert!(run_benchmark(&config, &[Algorithm::Brute]).is_err());
        let bad = BenchConfig { z_min: 3, z_max: 2, ..config };
        assert!(run_benchmark(&bad, &[Algorithm::Fast]).is_err());
    }

    #[test]
    fn algorithm_lists() {
        assert_eq!(
            parse_algorithms("fast, ratio").unwrap(),
            vec![Algorithm::Fast, Algorithm::Ratio]
        );
        assert!(parse_algorithms("fast,lazy").is_err());
        assert!(parse_algorithms("brute").is_err());
        assert!(parse_algorithms("").is_err());
    }

    #[test]
    fn aggregation() {
        let two = [row(1, 0, Algorithm::Fast, 4.0), row(1, 1, Algorithm::Fast, 6.0)];
        let s = aggregate(&two).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean_objective, 5.0);
        assert!((s[0].sd_objective - 2f64.sqrt()).abs() < 1e-12);

        let one = aggregate(&two[..1]).unwrap();
        assert_eq!(one[0].mean_objective, 4.0);
        assert_eq!(one[0].sd_objective, 0.0);

        let mixed = [
            row(1, 0, Algorithm::Fast, 1.0),
            row(1, 0, Algorithm::Ratio, 100.0),
            row(2, 0, Algorithm::Fast, 10.0),
            row(1, 1, Algorithm::Fast, 3.0),
        ];
        let s = aggregate(&mixed).unwrap();
        let got: Vec<_> = s.iter().map(|s| (s.z, s.algorithm, s.mean_objective)).collect();
        assert_eq!(
            got,
            vec![
                (1, Algorithm::Fast, 2.0),
                (1, Algorithm::Ratio, 100.0),
                (2, Algorithm::Fast, 10.0)
            ]
        );
        assert!(matches!(aggregate(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn csv_round_trip_and_headers() {
        let dir = tempfile::tempdir().unwrap();
        let rows: Vec<_> = (0..5)
            .map(|t| TrialResult {
                objective: 1.0 / (t as f64 + 3.0),
                evaluations: 1e-7 * t as f64,
                wall_time_ms: 0.1 + t as f64,
                seed: u64::MAX - t as u64,
                ..row(t % 2, t, Algorithm::Ratio, 0.0)
            })
            .collect();
        let raw = dir.path().join("raw.csv");
        write_results_csv(&raw, &rows).unwrap();
        assert_eq!(read_results_csv(&raw).unwrap(), rows);
        let text = std::fs::read_to_string(&raw).unwrap();
        assert!(text.starts_with("z,trial,algorithm,objective,evaluations,wall_time_ms,seed\n"));
        assert_eq!(text.lines().count(), 6);
        assert!(text.ends_with('\n'));

        let summary = dir.path().join("summary.csv");
        write_summary_csv(&summary, &[]).unwrap();
        assert_eq!(
            std::fs::read_to_string(&summary).unwrap(),
            "z,algorithm,mean_objective,sd_objective,mean_evaluations,sd_evaluations,mean_wall_time_ms\n"
        );

        let err = write_results_csv(dir.path().join("missing/raw.csv"), &rows).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }
}
