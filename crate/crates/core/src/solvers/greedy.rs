use std::time::Instant;

use super::{Algorithm, Solution, SolutionMeta};
use crate::action_set::ActionSet;
use crate::error::Result;
use crate::matroid::IndependenceOracle;
use crate::objective::SetFunction;
use crate::scenario::{ProximityOracle, Scenario};
use crate::surrogate::SurrogateOracle;

/// Classical greedy: repeatedly add the feasible element with the largest
/// marginal gain (lowest id on ties) until no feasible element has a positive
/// gain.
///
/// With `gamma = Some(γ)` the gains are taken on the surrogate `f(·; γ)`,
/// otherwise directly on `min_i h_i`.
pub fn simple_greedy(scenario: &Scenario, gamma: Option<f64>) -> Result<Solution> {
    let start = Instant::now();
    let (selected, evaluations) = match gamma {
        Some(g) => {
            let mut f = SurrogateOracle::new(scenario, g)?;
            let s = argmax_greedy(&mut f, scenario.matroid());
            (s, f.counter())
        }
        None => {
            let mut g = ProximityOracle::new(scenario);
            let s = argmax_greedy(&mut g, scenario.matroid());
            (s, g.counter())
        }
    };
    let mut solution = Solution::finish(
        Algorithm::Greedy,
        scenario,
        selected,
        evaluations,
        start.elapsed(),
    );
    solution.meta = SolutionMeta {
        gamma,
        ..Default::default()
    };
    Ok(solution)
}

pub(crate) fn argmax_greedy<F, M>(f: &mut F, m: &M) -> ActionSet
where
    F: SetFunction + ?Sized,
    M: IndependenceOracle + ?Sized,
{
    let n = f.ground_size();
    let mut selected = ActionSet::new();
    loop {
        let mut base = None;
        let mut best: Option<(usize, f64)> = None;
        for e in (0..n).filter(|&e| m.can_extend(&selected, e)) {
            let base = *base.get_or_insert_with(|| f.evaluate(&selected));
            let gain = f.evaluate(&selected.with(e)) - base;
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((e, gain));
            }
        }
        match best {
            Some((e, gain)) if gain > 0.0 => {
                selected.insert(e);
            }
            _ => return selected,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::Matroid;
    use crate::scenario::Point2;
    use crate::solvers::fixtures::{set, tiny};

    #[test]
    fn surrogate_and_direct_variants() {
        let s = tiny(Matroid::uniform(3, 1));
        assert_eq!(simple_greedy(&s, Some(8.0)).unwrap().selected, set(&[2]));
        assert_eq!(simple_greedy(&s, None).unwrap().selected, set(&[2]));
    }

    #[test]
    fn empty_and_zero_cases() {
        let empty = Scenario::new(vec![Point2::new(0.0, 0.0)], vec![], Matroid::uniform(0, 1)).unwrap();
        assert!(simple_greedy(&empty, None).unwrap().selected.is_empty());

        // every action sits on the only agent: all objectives vanish
        let zero = Scenario::new(
            vec![Point2::new(3.0, 3.0)],
            vec![Point2::new(3.0, 3.0); 4],
            Matroid::uniform(4, 2),
        )
        .unwrap();
        let sol = simple_greedy(&zero, None).unwrap();
        assert!(sol.selected.is_empty());
        assert_eq!(sol.min_value, 0.0);
    }

    #[test]
    fn stops_without_positive_gain() {
        let s = tiny(Matroid::uniform(3, 3));
        let sol = simple_greedy(&s, None).unwrap();
        // min_i h_i is flat once (5,5) is taken, so the direct greedy stalls
        // short of the optimum {0, 1}
        assert_eq!(sol.selected, set(&[2]));
        assert!((sol.min_value - 7.0711).abs() < 1e-4);
    }
}
