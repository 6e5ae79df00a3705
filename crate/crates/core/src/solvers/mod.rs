//! Selection algorithms for the robust max-min problem
//!
//! ```text
//! maximize  min_i h_i(S)   subject to  S independent in the matroid
//! ```
//!
//! * [`saturate_robust`]: bisection on the saturation level with a
//!   descending-threshold greedy ([`threshold_greedy`]) as the inner solver.
//! * [`simple_greedy`]: classical argmax greedy, on the surrogate or on
//!   `min_i h_i` directly.
//! * [`ratio_greedy_baseline`]: a reconstruction of a ratio-of-contributions
//!   greedy used as the comparison baseline in benchmarks.
//! * [`brute_force_maxmin`] / [`brute_force_surrogate_max`]: exhaustive
//!   oracles for small instances.

mod brute;
mod greedy;
mod ratio;
mod saturate;
mod threshold;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::action_set::ActionSet;
use crate::error::{Error, Result};
use crate::objective::EvaluationCounter;
use crate::scenario::Scenario;

pub use brute::{brute_force_max, brute_force_maxmin, brute_force_surrogate_max, BRUTE_FORCE_CAP};
pub use greedy::simple_greedy;
pub use ratio::ratio_greedy_baseline;
pub use saturate::{saturate_robust, BisectionStep};
pub use threshold::{threshold_greedy, threshold_greedy_run, Addition, ThresholdRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Fast,
    Greedy,
    Ratio,
    Brute,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fast => "fast",
            Algorithm::Greedy => "greedy",
            Algorithm::Ratio => "ratio",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Algorithm::Fast),
            "greedy" => Ok(Algorithm::Greedy),
            "ratio" => Ok(Algorithm::Ratio),
            "brute" => Ok(Algorithm::Brute),
            other => Err(Error::UnknownAlgorithm(other.to_owned())),
        }
    }
}

/// Binary-search stopping gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Epsilon {
    /// Fraction of the initial upper bound `u₀ = min_i h_i(V)`.
    Relative(f64),
    Absolute(f64),
}

impl Epsilon {
    pub fn resolve(self, upper: f64) -> f64 {
        match self {
            Epsilon::Relative(r) => r * upper,
            Epsilon::Absolute(a) => a,
        }
    }

    fn raw(self) -> f64 {
        match self {
            Epsilon::Relative(v) | Epsilon::Absolute(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Threshold shrink factor: each pass divides the threshold by `1 + delta`.
    pub delta: f64,
    pub epsilon: Epsilon,
    /// Curvature used in the bisection acceptance test `f(S) ≥ γ / (1 + c + δ)`.
    pub curvature: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            epsilon: Epsilon::Relative(1e-3),
            curvature: 1.0,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::param("delta", format!("must be finite and > 0, got {}", self.delta)));
        }
        let eps = self.epsilon.raw();
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::param("epsilon", format!("must be finite and > 0, got {eps}")));
        }
        if !(0.0..=1.0).contains(&self.curvature) {
            return Err(Error::param(
                "curvature",
                format!("must lie in [0, 1], got {}", self.curvature),
            ));
        }
        Ok(())
    }
}

/// Algorithm parameters and final search state recorded with a solution.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolutionMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub algorithm: Algorithm,
    pub selected: ActionSet,
    /// `min_i h_i(selected)`, recomputed outside the evaluation count.
    pub min_value: f64,
    pub evaluations: EvaluationCounter,
    pub n_agents: usize,
    pub wall_time: Duration,
    pub meta: SolutionMeta,
    /// Per-iteration record of the bisection; empty for other algorithms.
    pub bisection: Vec<BisectionStep>,
}

#[derive(Serialize)]
struct SolutionRecord<'a> {
    algorithm: Algorithm,
    selected: &'a ActionSet,
    min_value: f64,
    evaluations: f64,
    wall_time_ms: f64,
    params: &'a SolutionMeta,
}

impl Solution {
    pub(crate) fn finish(
        algorithm: Algorithm,
        scenario: &Scenario,
        selected: ActionSet,
        evaluations: EvaluationCounter,
        wall_time: Duration,
    ) -> Self {
        Self {
            algorithm,
            min_value: scenario.min_value(&selected),
            selected,
            evaluations,
            n_agents: crate::objective::AgentObjectives::n_agents(scenario),
            wall_time,
            meta: SolutionMeta::default(),
            bisection: Vec::new(),
        }
    }

    /// Evaluation count in units of one surrogate evaluation.
    pub fn f_evaluations(&self) -> f64 {
        self.evaluations.f_equivalent(self.n_agents)
    }

    pub fn wall_time_ms(&self) -> f64 {
        self.wall_time.as_secs_f64() * 1e3
    }

    pub fn to_json(&self) -> String {
        let record = SolutionRecord {
            algorithm: self.algorithm,
            selected: &self.selected,
            min_value: self.min_value,
            evaluations: self.f_evaluations(),
            wall_time_ms: self.wall_time_ms(),
            params: &self.meta,
        };
        serde_json::to_string_pretty(&record).expect("solution serialization is infallible")
    }
}

/// Runs `algorithm` on `scenario`. `params` only affects `fast`.
pub fn solve(scenario: &Scenario, algorithm: Algorithm, params: &SolverParams) -> Result<Solution> {
    match algorithm {
        Algorithm::Fast => saturate_robust(scenario, params),
        Algorithm::Greedy => simple_greedy(scenario, None),
        Algorithm::Ratio => Ok(ratio_greedy_baseline(scenario)),
        Algorithm::Brute => brute_force_maxmin(scenario),
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in [Algorithm::Fast, Algorithm::Greedy, Algorithm::Ratio, Algorithm::Brute] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!(matches!("lazy".parse::<Algorithm>(), Err(Error::UnknownAlgorithm(_))));
    }

    #[test]
    fn params_validation() {
        assert!(SolverParams::default().validate().is_ok());
        let bad = [
            SolverParams { delta: 0.0, ..Default::default() },
            SolverParams { epsilon: Epsilon::Absolute(-1.0), ..Default::default() },
            SolverParams { curvature: 1.5, ..Default::default() },
            SolverParams { delta: f64::NAN, ..Default::default() },
        ];
        for p in bad {
            assert!(matches!(p.validate(), Err(Error::Parameter { .. })), "{p:?}");
        }
    }
}
