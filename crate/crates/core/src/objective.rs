//! Set-function oracles and evaluation accounting.

use crate::action_set::ActionSet;

/// Counts computations of a single individual objective `h_i` on one set.
///
/// The count only ever grows. Reports expressed in evaluations of the
/// surrogate divide by the number of agents, see [`EvaluationCounter::f_equivalent`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvaluationCounter {
    individual: u64,
}

impl EvaluationCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, n: u64) {
        self.individual += n;
    }

    pub fn individual(&self) -> u64 {
        self.individual
    }

    /// Individual evaluations expressed as evaluations of an `n_agents`-term
    /// aggregate.
    pub fn f_equivalent(&self, n_agents: usize) -> f64 {
        self.individual as f64 / n_agents.max(1) as f64
    }

    pub fn merge(&mut self, other: &EvaluationCounter) {
        self.individual += other.individual;
    }
}

/// A set function over the ground set `0..ground_size()` with an evaluation
/// counter.
pub trait SetFunction {
    fn ground_size(&self) -> usize;

    fn evaluate(&mut self, set: &ActionSet) -> f64;

    fn counter(&self) -> EvaluationCounter;

    /// `f(set ∪ {e}) − f(set)`; zero when `e` is already a member.
    fn marginal_gain(&mut self, set: &ActionSet, e: usize) -> f64 {
        if set.contains(e) {
            return 0.0;
        }
        let with = self.evaluate(&set.with(e));
        with - self.evaluate(set)
    }
}

/// A family of `N` individual objectives `h_i` over a shared ground set.
///
/// Implementations are pure; counting is layered on top by the oracles that
/// consume them.
pub trait AgentObjectives {
    fn n_agents(&self) -> usize;

    fn n_actions(&self) -> usize;

    /// `h_agent(set)`. Callers guarantee `agent < n_agents()`.
    fn agent_value(&self, agent: usize, set: &ActionSet) -> f64;
}
