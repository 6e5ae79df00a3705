//! Randomized small-instance verification: approximation bounds against the
//! exhaustive oracles, structural properties of the objectives and the
//! matroids, and the bisection contract.
//!
//! Every check returns `Ok(n)` with the number of individual assertions it
//! made, or a [`Failure`] describing the first violation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action_set::ActionSet;
use crate::error::{Error, Result};
use crate::matroid::{find_axiom_violation, IndependenceOracle, Matroid};
use crate::objective::{AgentObjectives, SetFunction};
use crate::scenario::{Point2, Scenario};
use crate::solvers::{
    brute_force_maxmin, brute_force_surrogate_max, saturate_robust, threshold_greedy_run,
    Epsilon, SolverParams,
};
use crate::surrogate::{compute_curvature, SurrogateOracle};

/// Largest ground set the randomized checks generate.
pub const CHECK_MAX_ACTIONS: usize = 7;

/// Absolute slack for floating-point comparisons.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub suite: &'static str,
    pub detail: String,
}

pub type CheckResult = std::result::Result<usize, Failure>;

fn fail(suite: &'static str, detail: String) -> Failure {
    Failure { suite, detail }
}

/// A deterministic family of random small instances.
///
/// Even-indexed instances use a uniform matroid, odd-indexed ones a partition
/// matroid, so both kinds appear in equal numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceFamily {
    pub count: usize,
    pub max_agents: usize,
    pub max_actions: usize,
    pub seed: u64,
}

impl InstanceFamily {
    pub fn generate(&self) -> Result<Vec<Scenario>> {
        if self.max_actions > CHECK_MAX_ACTIONS {
            return Err(Error::TooLarge {
                what: "randomized checks",
                cap: CHECK_MAX_ACTIONS,
                got: self.max_actions,
            });
        }
        if self.max_agents == 0 {
            return Err(Error::param("max_agents", "must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|k| random_instance(&mut rng, self.max_agents, self.max_actions, k % 2 == 1))
            .collect()
    }
}

fn random_instance(
    rng: &mut ChaCha8Rng,
    max_agents: usize,
    max_actions: usize,
    partition: bool,
) -> Result<Scenario> {
    let n = rng.gen_range(1..=max_agents);
    let m = rng.gen_range(1..=max_actions.max(1)).min(max_actions);
    let mut point = || Point2::new(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0));
    let agents: Vec<_> = (0..n).map(|_| point()).collect();
    let actions: Vec<_> = (0..m).map(|_| point()).collect();
    let matroid = if partition {
        let n_blocks = rng.gen_range(1..=3);
        let mut blocks = vec![Vec::new(); n_blocks];
        for j in 0..m {
            blocks[rng.gen_range(0..n_blocks)].push(j);
        }
        Matroid::partition(m, blocks, rng.gen_range(0..=2))?
    } else {
        Matroid::uniform(m, rng.gen_range(1..=m.max(1)))
    };
    Scenario::new(agents, actions, matroid)
}

fn u0(scenario: &Scenario) -> f64 {
    scenario.min_value(&ActionSet::full(scenario.n_actions()))
}

/// Five saturation levels evenly spaced on `(0, u₀]`; empty when `u₀ = 0`.
pub fn gamma_grid(scenario: &Scenario) -> Vec<f64> {
    let top = u0(scenario);
    if top <= 0.0 {
        return Vec::new();
    }
    (1..=5).map(|k| top * k as f64 / 5.0).collect()
}

/// `f(threshold greedy) ≥ f(S*) / (1 + c_f + δ)` at every grid level, with the
/// exact curvature of the surrogate at that level.
pub fn check_threshold_bound(scenario: &Scenario, delta: f64) -> CheckResult {
    const SUITE: &str = "threshold_greedy_bound";
    let m = scenario.matroid();
    let mut checks = 0;
    for gamma in gamma_grid(scenario) {
        let mut f = SurrogateOracle::new(scenario, gamma).map_err(|e| fail(SUITE, e.to_string()))?;
        let curvature = compute_curvature(&mut f)
            .map_err(|e| fail(SUITE, e.to_string()))?
            .value;
        let greedy = threshold_greedy_run(&mut f, m, delta).selected;
        let optimum = brute_force_surrogate_max(&mut f, m).map_err(|e| fail(SUITE, e.to_string()))?;
        let (got, best) = (f.evaluate(&greedy), f.evaluate(&optimum));
        let bound = best / (1.0 + curvature + delta);
        if got < bound - TOLERANCE {
            return Err(fail(
                SUITE,
                format!(
                    "gamma={gamma}: f(greedy {greedy:?})={got} < f(opt {optimum:?})={best} / (1+{curvature}+{delta})"
                ),
            ));
        }
        checks += 1;
    }
    Ok(checks)
}

/// At every insertion of element `e` into `S_m`,
/// `f(e | S_m) ≥ f(o | S_m) / (1 + δ)` for every `o ∈ S* ∖ S_m` that can
/// still extend `S_m`.
pub fn check_insertion_gains(scenario: &Scenario, delta: f64) -> CheckResult {
    const SUITE: &str = "insertion_gain_relation";
    let m = scenario.matroid();
    let mut checks = 0;
    for gamma in gamma_grid(scenario) {
        let mut f = SurrogateOracle::new(scenario, gamma).map_err(|e| fail(SUITE, e.to_string()))?;
        let run = threshold_greedy_run(&mut f, m, delta);
        let optimum = brute_force_surrogate_max(&mut f, m).map_err(|e| fail(SUITE, e.to_string()))?;
        for add in &run.additions {
            for o in optimum.iter().filter(|&o| m.can_extend(&add.before, o)) {
                let other = f.marginal_gain(&add.before, o);
                if add.gain < other / (1.0 + delta) - TOLERANCE {
                    return Err(fail(
                        SUITE,
                        format!(
                            "gamma={gamma}: adding {} to {:?} gained {} but {o} would gain {other}",
                            add.element, add.before, add.gain
                        ),
                    ));
                }
                checks += 1;
            }
        }
    }
    Ok(checks)
}

/// `min_i h_i(S^G) ≥ min_i h_i(S*) / (1 + c + δ) − ε` end to end, with `c`
/// and `ε` taken from `params`.
pub fn check_robust_bound(scenario: &Scenario, params: &SolverParams) -> CheckResult {
    const SUITE: &str = "robust_bound";
    let sol = saturate_robust(scenario, params).map_err(|e| fail(SUITE, e.to_string()))?;
    let opt = brute_force_maxmin(scenario).map_err(|e| fail(SUITE, e.to_string()))?;
    if !scenario.matroid().is_independent(&sol.selected) {
        return Err(fail(SUITE, format!("{:?} is not independent", sol.selected)));
    }
    let epsilon = sol.meta.epsilon.unwrap_or(0.0);
    let bound = opt.min_value / (1.0 + params.curvature + params.delta) - epsilon;
    if sol.min_value < bound - TOLERANCE {
        return Err(fail(
            SUITE,
            format!(
                "min value {} of {:?} below {} (optimum {} at {:?})",
                sol.min_value, sol.selected, bound, opt.min_value, opt.selected
            ),
        ));
    }
    Ok(1)
}

fn for_each_pair(
    m: usize,
    mut visit: impl FnMut(&ActionSet, &ActionSet) -> std::result::Result<(), String>,
) -> std::result::Result<usize, String> {
    let mut checks = 0;
    for b in 0..(1u64 << m) {
        let bs = ActionSet::from_mask(b);
        let mut a = b;
        loop {
            visit(&ActionSet::from_mask(a), &bs)?;
            checks += 1;
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }
    Ok(checks)
}

fn monotone_submodular<F: SetFunction>(f: &mut F, label: &str) -> std::result::Result<usize, String> {
    let m = f.ground_size();
    let values: Vec<f64> = (0..(1u64 << m))
        .map(|mask| f.evaluate(&ActionSet::from_mask(mask)))
        .collect();
    let at = |s: &ActionSet| values[s.iter().fold(0usize, |acc, e| acc | (1 << e))];
    for_each_pair(m, |a, b| {
        if at(a) > at(b) + TOLERANCE {
            return Err(format!("{label}: not monotone: f({a:?})={} > f({b:?})={}", at(a), at(b)));
        }
        for v in (0..m).filter(|&v| !b.contains(v)) {
            let ga = at(&a.with(v)) - at(a);
            let gb = at(&b.with(v)) - at(b);
            if ga < gb - TOLERANCE {
                return Err(format!(
                    "{label}: not submodular: f({v}|{a:?})={ga} < f({v}|{b:?})={gb}"
                ));
            }
        }
        Ok(())
    })
}

/// Exhaustive monotonicity and submodularity of each `h_i` and of the
/// surrogate at levels `0`, the five grid points, and `u₀`, plus the
/// saturation and sandwich bounds of the surrogate.
pub fn check_objective_structure(scenario: &Scenario) -> CheckResult {
    const SUITE: &str = "objective_structure";
    let m = scenario.n_actions();
    let n = scenario.n_agents();
    let mut checks = 0;
    for i in 0..n {
        let mut h = crate::scenario::AgentObjective::new(scenario, i)
            .map_err(|e| fail(SUITE, e.to_string()))?;
        checks += monotone_submodular(&mut h, &format!("h_{i}")).map_err(|d| fail(SUITE, d))?;
    }
    let mut levels = vec![0.0, u0(scenario)];
    levels.extend(gamma_grid(scenario));
    for gamma in levels {
        let mut f = SurrogateOracle::new(scenario, gamma).map_err(|e| fail(SUITE, e.to_string()))?;
        checks += monotone_submodular(&mut f, &format!("f(.;{gamma})"))
            .map_err(|d| fail(SUITE, d))?;
        for mask in 0..(1u64 << m) {
            let s = ActionSet::from_mask(mask);
            let value = f.evaluate(&s);
            let worst = scenario.min_value(&s);
            if value > gamma + TOLERANCE {
                return Err(fail(SUITE, format!("f({s:?};{gamma})={value} exceeds gamma")));
            }
            let saturated = worst >= gamma;
            let reaches = value >= gamma - TOLERANCE;
            if (saturated && !reaches) || (reaches && worst < gamma - n as f64 * TOLERANCE) {
                return Err(fail(
                    SUITE,
                    format!("f({s:?};{gamma})={value} but all-saturated is {saturated}"),
                ));
            }
            if worst.min(gamma) / n as f64 > value + TOLERANCE {
                return Err(fail(
                    SUITE,
                    format!("f({s:?};{gamma})={value} below min{{{worst},{gamma}}}/{n}"),
                ));
            }
            checks += 3;
        }
    }
    Ok(checks)
}

/// Matroid axioms for `m`, up to the exhaustive cap.
pub fn check_matroid<M: IndependenceOracle + ?Sized>(m: &M) -> CheckResult {
    const SUITE: &str = "matroid_axioms";
    match find_axiom_violation(m) {
        Ok(None) => Ok(1),
        Ok(Some(v)) => Err(fail(SUITE, v.to_string())),
        Err(e) => Err(fail(SUITE, e.to_string())),
    }
}

/// With `u₀ > ε`: exactly `⌈log₂(u₀/ε)⌉` iterations, `ℓ ≤ γ ≤ u` throughout,
/// and the gap halving every iteration.
pub fn check_bisection(scenario: &Scenario, params: &SolverParams) -> CheckResult {
    const SUITE: &str = "bisection_contract";
    let sol = saturate_robust(scenario, params).map_err(|e| fail(SUITE, e.to_string()))?;
    let top = u0(scenario);
    let epsilon = params.epsilon.resolve(top);
    if top <= epsilon {
        return Ok(0);
    }
    let expected = (top / epsilon).log2().ceil() as usize;
    if sol.bisection.len() != expected {
        return Err(fail(
            SUITE,
            format!("{} iterations, expected {expected} (u0={top}, eps={epsilon})", sol.bisection.len()),
        ));
    }
    let mut gap = top;
    for (k, step) in sol.bisection.iter().enumerate() {
        if !(step.lower <= step.gamma && step.gamma <= step.upper) {
            return Err(fail(SUITE, format!("iteration {k}: gamma outside [lower, upper]")));
        }
        let width = step.upper - step.lower;
        if (width - gap).abs() > 1e-12 * top {
            return Err(fail(SUITE, format!("iteration {k}: gap {width}, expected {gap}")));
        }
        gap /= 2.0;
    }
    let final_gap = sol.meta.upper.unwrap_or(0.0) - sol.meta.lower.unwrap_or(0.0);
    if (final_gap - gap).abs() > 1e-12 * top || final_gap > epsilon {
        return Err(fail(SUITE, format!("final gap {final_gap}, expected {gap}")));
    }
    Ok(expected + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub instances: usize,
    pub max_actions: usize,
    pub seed: u64,
    pub delta: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            instances: 200,
            max_actions: CHECK_MAX_ACTIONS,
            seed: 0,
            delta: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
}

/// A failing check together with a replayable input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub suite: &'static str,
    pub detail: String,
    /// Scenario JSON (or set-family JSON for injected fixtures).
    pub instance: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckReport {
    pub suites: Vec<SuiteReport>,
    pub counterexamples: Vec<Counterexample>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn record(&mut self, name: &'static str, result: CheckResult, instance: impl FnOnce() -> serde_json::Value) {
        let idx = match self.suites.iter().position(|s| s.name == name) {
            Some(i) => i,
            None => {
                self.suites.push(SuiteReport {
                    name,
                    passed: 0,
                    failed: 0,
                });
                self.suites.len() - 1
            }
        };
        match result {
            Ok(_) => self.suites[idx].passed += 1,
            Err(f) => {
                self.suites[idx].failed += 1;
                self.counterexamples.push(Counterexample {
                    suite: f.suite,
                    detail: f.detail,
                    instance: instance(),
                });
            }
        }
    }
}

/// Runs every suite on `config.instances` random instances (up to three
/// agents), plus the axiom check on each `extra_families` member.
pub fn run_checks<M>(config: &CheckConfig, extra_families: &[M]) -> Result<CheckReport>
where
    M: IndependenceOracle + Serialize,
{
    let family = InstanceFamily {
        count: config.instances,
        max_agents: 3,
        max_actions: config.max_actions,
        seed: config.seed,
    };
    let params = SolverParams {
        delta: config.delta,
        ..SolverParams::default()
    };
    params.validate()?;
    let scenarios = family.generate()?;
    let mut report = CheckReport::default();
    for s in &scenarios {
        let json = || serde_json::from_str(&s.to_json()).expect("scenario JSON is valid");
        report.record("objective_structure", check_objective_structure(s), json);
        report.record("matroid_axioms", check_matroid(s.matroid()), json);
        report.record("threshold_greedy_bound", check_threshold_bound(s, config.delta), json);
        report.record("insertion_gain_relation", check_insertion_gains(s, config.delta), json);
        report.record("robust_bound", check_robust_bound(s, &params), json);
        report.record("bisection_contract", check_bisection(s, &params), json);
    }
    for fam in extra_families {
        report.record("matroid_axioms", check_matroid(fam), || {
            serde_json::to_value(fam).expect("family JSON is valid")
        });
    }
    Ok(report)
}

/// Bisection parameters with an absolute gap, for instance families where a
/// relative gap would make every run take the same number of iterations.
pub fn absolute_gap(epsilon: f64) -> SolverParams {
    SolverParams {
        epsilon: Epsilon::Absolute(epsilon),
        ..SolverParams::default()
    }
}
