use std::time::Instant;

use serde::Serialize;

use super::{threshold_greedy, Algorithm, Solution, SolutionMeta, SolverParams};
use crate::action_set::ActionSet;
use crate::error::Result;
use crate::objective::{AgentObjectives, EvaluationCounter, SetFunction};
use crate::scenario::{ProximityOracle, Scenario};
use crate::surrogate::SurrogateOracle;

/// State of one bisection iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BisectionStep {
    pub lower: f64,
    pub upper: f64,
    pub gamma: f64,
    /// Surrogate value of the threshold-greedy set at `gamma`.
    pub value: f64,
    pub accepted: bool,
}

/// Bisection on the saturation level `γ`.
///
/// Starts from `ℓ = 0`, `u = min_i h_i(V)`. Each iteration sets
/// `γ = (u + ℓ)/2`, maximizes a fresh surrogate `f(·; γ)` with the threshold
/// greedy, and keeps the candidate (raising `ℓ`) when
/// `f(S; γ) ≥ γ / (1 + c + δ)`, otherwise lowers `u`. Stops once `u − ℓ ≤ ε`.
/// If no level is ever accepted the empty set is returned.
pub fn saturate_robust(scenario: &Scenario, params: &SolverParams) -> Result<Solution> {
    params.validate()?;
    let start = Instant::now();
    let mut evaluations = EvaluationCounter::new();

    let mut oracle = ProximityOracle::new(scenario);
    let u0 = oracle.min_objective(&ActionSet::full(scenario.n_actions()));
    evaluations.merge(&oracle.evaluations());

    let epsilon = params.epsilon.resolve(u0);
    let slack = 1.0 + params.curvature + params.delta;
    let (mut lower, mut upper) = (0.0, u0);
    let mut best = ActionSet::new();
    let mut steps = Vec::new();

    while (upper - lower).abs() > epsilon {
        let gamma = 0.5 * (upper + lower);
        let mut f = SurrogateOracle::new(scenario, gamma)?;
        let candidate = threshold_greedy(&mut f, scenario.matroid(), params.delta);
        let value = f.value(&candidate);
        let accepted = value >= gamma / slack;
        steps.push(BisectionStep {
            lower,
            upper,
            gamma,
            value,
            accepted,
        });
        if accepted {
            lower = gamma;
            best = candidate;
        } else {
            upper = gamma;
        }
        evaluations.merge(&f.counter());
    }

    let mut solution = Solution::finish(
        Algorithm::Fast,
        scenario,
        best,
        evaluations,
        start.elapsed(),
    );
    solution.meta = SolutionMeta {
        delta: Some(params.delta),
        epsilon: Some(epsilon),
        curvature: Some(params.curvature),
        gamma: None,
        lower: Some(lower),
        upper: Some(upper),
        iterations: Some(steps.len()),
    };
    solution.bisection = steps;
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{IndependenceOracle, Matroid};
    use crate::scenario::Point2;
    use crate::solvers::fixtures::{set, tiny, TOL};
    use crate::solvers::Epsilon;

    #[test]
    fn tiny_instance_rank_one() {
        let s = tiny(Matroid::uniform(3, 1));
        let sol = saturate_robust(&s, &SolverParams::default()).unwrap();
        assert_eq!(sol.selected, set(&[2]));
        assert!((sol.min_value - 7.0711).abs() < 1e-3);
        assert_eq!(sol.meta.iterations, Some(10));
    }

    #[test]
    fn single_agent_on_a_line() {
        let s = Scenario::new(
            vec![Point2::new(0.0, 0.0)],
            (1..=3).map(|x| Point2::new(x as f64, 0.0)).collect(),
            Matroid::uniform(3, 1),
        )
        .unwrap();
        let sol = saturate_robust(&s, &SolverParams::default()).unwrap();
        assert_eq!(sol.selected, set(&[2]));
        assert_eq!(sol.min_value, 3.0);
    }

    #[test]
    fn no_actions() {
        let s = Scenario::new(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)],
            vec![],
            Matroid::uniform(0, 1),
        )
        .unwrap();
        let sol = saturate_robust(&s, &SolverParams::default()).unwrap();
        assert!(sol.selected.is_empty());
        assert_eq!(sol.min_value, 0.0);
        assert!(sol.bisection.is_empty());
    }

    #[test]
    fn bisection_contract() {
        let s = tiny(Matroid::partition(3, vec![vec![0, 1], vec![2]], 1).unwrap());
        let params = SolverParams {
            epsilon: Epsilon::Absolute(0.01),
            ..Default::default()
        };
        let sol = saturate_robust(&s, &params).unwrap();
        assert!(s.matroid().is_independent(&sol.selected));
        let u0 = 10.0f64;
        assert_eq!(sol.bisection.len(), (u0 / 0.01).log2().ceil() as usize);
        for w in sol.bisection.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert!(a.lower <= a.gamma && a.gamma <= a.upper);
            let ratio = (b.upper - b.lower) / (a.upper - a.lower);
            assert!((ratio - 0.5).abs() < 1e-12);
        }
        assert!((sol.min_value - s.min_value(&sol.selected)).abs() < TOL);
    }

    #[test]
    fn deterministic() {
        let s = tiny(Matroid::uniform(3, 2));
        let a = saturate_robust(&s, &SolverParams::default()).unwrap();
        let b = saturate_robust(&s, &SolverParams::default()).unwrap();
        assert_eq!(a.selected, b.selected);
        assert_eq!(a.evaluations, b.evaluations);
        assert_eq!(a.bisection, b.bisection);
    }
}
