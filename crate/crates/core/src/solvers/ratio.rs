use std::time::Instant;

use super::{Algorithm, Solution};
use crate::action_set::ActionSet;
use crate::matroid::IndependenceOracle;
use crate::objective::{AgentObjectives, EvaluationCounter};
use crate::scenario::Scenario;

/// Ratio-of-contributions greedy baseline (reconstructed).
///
/// Each round, for every feasible candidate `e` and agent `i`, computes
/// `r_i(e) = h_i(e | S) / max_{e'} h_i(e' | S)` over the feasible candidates
/// (`0/0 = 0`) and adds the candidate with the largest `min_i r_i(e)`, lowest
/// id on ties. Stops at a basis or when every score is zero. Each round
/// evaluates every agent on every feasible candidate, so its cost tracks the
/// ground set rather than the budget.
pub fn ratio_greedy_baseline(scenario: &Scenario) -> Solution {
    let start = Instant::now();
    let n_agents = scenario.n_agents();
    let m = scenario.matroid();
    let mut counter = EvaluationCounter::new();
    let mut selected = ActionSet::new();
    let mut gains: Vec<f64> = Vec::new();

    loop {
        let feasible: Vec<usize> = (0..scenario.n_actions())
            .filter(|&e| m.can_extend(&selected, e))
            .collect();
        if feasible.is_empty() {
            break;
        }
        let base: Vec<f64> = (0..n_agents)
            .map(|i| scenario.agent_value(i, &selected))
            .collect();
        counter.add(n_agents as u64);

        // gains[k * n_agents + i] = h_i(feasible[k] | S)
        gains.clear();
        for &e in &feasible {
            let with = selected.with(e);
            gains.extend((0..n_agents).map(|i| scenario.agent_value(i, &with) - base[i]));
            counter.add(n_agents as u64);
        }
        let best_per_agent: Vec<f64> = (0..n_agents)
            .map(|i| {
                gains
                    .iter()
                    .skip(i)
                    .step_by(n_agents)
                    .copied()
                    .fold(0.0, f64::max)
            })
            .collect();

        let mut choice: Option<(usize, f64)> = None;
        for (k, &e) in feasible.iter().enumerate() {
            let score = (0..n_agents)
                .map(|i| {
                    let top = best_per_agent[i];
                    if top > 0.0 {
                        gains[k * n_agents + i] / top
                    } else {
                        0.0
                    }
                })
                .fold(f64::INFINITY, f64::min);
            if choice.is_none_or(|(_, s)| score > s) {
                choice = Some((e, score));
            }
        }
        match choice {
            Some((e, score)) if score > 0.0 => {
                selected.insert(e);
            }
            _ => break,
        }
    }

    Solution::finish(Algorithm::Ratio, scenario, selected, counter, start.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::Matroid;
    use crate::scenario::Point2;
    use crate::solvers::fixtures::{set, tiny};

    #[test]
    fn only_balanced_action_scores() {
        let s = tiny(Matroid::uniform(3, 1));
        let sol = ratio_greedy_baseline(&s);
        assert_eq!(sol.selected, set(&[2]));
        // one round: N base values plus N per candidate
        assert_eq!(sol.evaluations.individual(), 2 + 2 * 3);
    }

    #[test]
    fn sole_candidate_and_zero_capacity() {
        let one = Scenario::new(
            vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)],
            vec![Point2::new(1.0, 5.0)],
            Matroid::uniform(1, 1),
        )
        .unwrap();
        assert_eq!(ratio_greedy_baseline(&one).selected, set(&[0]));

        let s = tiny(Matroid::partition(3, vec![vec![0, 1, 2]], 0).unwrap());
        assert!(ratio_greedy_baseline(&s).selected.is_empty());
    }
}
