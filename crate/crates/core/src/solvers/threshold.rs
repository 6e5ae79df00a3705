use crate::action_set::{ActionId, ActionSet};
use crate::matroid::IndependenceOracle;
use crate::objective::{AgentObjectives, SetFunction};
use crate::surrogate::SurrogateOracle;

/// One insertion made by the threshold greedy.
#[derive(Debug, Clone, PartialEq)]
pub struct Addition {
    /// The solution just before `element` was added.
    pub before: ActionSet,
    pub element: ActionId,
    pub gain: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRun {
    pub selected: ActionSet,
    /// Largest singleton value, the starting threshold.
    pub max_singleton: f64,
    pub passes: usize,
    pub additions: Vec<Addition>,
}

/// Descending-threshold greedy for a monotone submodular surrogate under a
/// matroid constraint. See [`threshold_greedy_run`].
pub fn threshold_greedy<O, M>(f: &mut SurrogateOracle<'_, O>, m: &M, delta: f64) -> ActionSet
where
    O: AgentObjectives + ?Sized,
    M: IndependenceOracle + ?Sized,
{
    threshold_greedy_run(f, m, delta).selected
}

/// Starts the threshold at `F = max_e f({e})` and divides it by `1 + delta`
/// after every pass while it stays at or above `delta · F`. Each pass scans
/// the remaining candidates in ascending id order and inserts a candidate
/// immediately when its current marginal gain reaches the threshold and the
/// extension stays independent.
///
/// A candidate leaves the scan for good once it cannot extend the solution
/// or its gain drops below `delta · F`: solutions only grow, so neither can
/// be undone. The loop stops as soon as no candidate is left, which covers
/// reaching a basis.
pub fn threshold_greedy_run<O, M>(f: &mut SurrogateOracle<'_, O>, m: &M, delta: f64) -> ThresholdRun
where
    O: AgentObjectives + ?Sized,
    M: IndependenceOracle + ?Sized,
{
    let n = f.ground_size();
    let mut run = ThresholdRun {
        selected: ActionSet::new(),
        max_singleton: 0.0,
        passes: 0,
        additions: Vec::new(),
    };
    if n == 0 {
        return run;
    }
    let top = (0..n)
        .map(|e| f.evaluate(&ActionSet::from_iter([e])))
        .fold(0.0, f64::max);
    run.max_singleton = top;
    if top <= 0.0 {
        return run;
    }

    let floor = delta * top;
    let mut threshold = top;
    let mut live: Vec<ActionId> = (0..n).collect();
    let selected = &mut run.selected;
    let additions = &mut run.additions;
    while threshold >= floor && !live.is_empty() {
        run.passes += 1;
        live.retain(|&e| {
            if !m.can_extend(selected, e) {
                return false;
            }
            let gain = f.marginal_gain(selected, e);
            if gain >= threshold {
                additions.push(Addition {
                    before: selected.clone(),
                    element: e,
                    gain,
                    threshold,
                });
                selected.insert(e);
                return false;
            }
            gain >= floor
        });
        threshold /= 1.0 + delta;
    }
    run
}
