//! Truncated-average surrogate over the individual objectives.
//!
//! For a saturation level `γ ≥ 0` the surrogate is
//!
//! ```text
//! f(S; γ) = (1/N) Σ_i min{h_i(S), γ}
//! ```
//!
//! which is monotone submodular whenever every `h_i` is, and reaches `γ`
//! exactly when every agent is saturated. Maximizing it at a fixed `γ` is the
//! inner problem of the bisection solver.

use crate::action_set::{ActionId, ActionSet};
use crate::error::{Error, Result};
use crate::objective::{AgentObjectives, EvaluationCounter, SetFunction};
use crate::scenario::Scenario;

/// Largest ground set [`compute_curvature`] accepts.
pub const CURVATURE_CAP: usize = 20;

/// Counted surrogate oracle with a single-set cache of the last base set
/// used for a marginal gain.
#[derive(Debug)]
pub struct SurrogateOracle<'a, O: AgentObjectives + ?Sized = Scenario> {
    objectives: &'a O,
    gamma: f64,
    counter: EvaluationCounter,
    cache: Option<(ActionSet, f64)>,
}

impl<'a, O: AgentObjectives + ?Sized> SurrogateOracle<'a, O> {
    pub fn new(objectives: &'a O, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::param("gamma", format!("must be finite and >= 0, got {gamma}")));
        }
        Ok(Self {
            objectives,
            gamma,
            counter: EvaluationCounter::new(),
            cache: None,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_agents(&self) -> usize {
        self.objectives.n_agents()
    }

    pub fn objectives(&self) -> &'a O {
        self.objectives
    }

    /// `f(set; γ)`, reusing the cached base value when it matches.
    pub fn value(&mut self, set: &ActionSet) -> f64 {
        match &self.cache {
            Some((cached, v)) if cached == set => *v,
            _ => self.evaluate(set),
        }
    }

    fn compute(&mut self, set: &ActionSet) -> f64 {
        let n = self.objectives.n_agents();
        self.counter.add(n as u64);
        if self.gamma == 0.0 {
            return 0.0;
        }
        let total: f64 = (0..n)
            .map(|i| self.objectives.agent_value(i, set).min(self.gamma))
            .sum();
        total / n as f64
    }
}

impl<O: AgentObjectives + ?Sized> SetFunction for SurrogateOracle<'_, O> {
    fn ground_size(&self) -> usize {
        self.objectives.n_actions()
    }

    fn evaluate(&mut self, set: &ActionSet) -> f64 {
        self.compute(set)
    }

    fn counter(&self) -> EvaluationCounter {
        self.counter
    }

    /// Costs one evaluation when `set` matches the cached base, two otherwise.
    fn marginal_gain(&mut self, set: &ActionSet, e: ActionId) -> f64 {
        if set.contains(e) {
            return 0.0;
        }
        let base = match &self.cache {
            Some((cached, v)) if cached == set => *v,
            _ => {
                let v = self.compute(set);
                self.cache = Some((set.clone(), v));
                v
            }
        };
        self.compute(&set.with(e)) - base
    }
}

/// Total curvature of a monotone set function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curvature {
    /// Curvature clamped to `[0, 1]`.
    pub value: f64,
    /// Value before clamping.
    pub raw: f64,
    /// Set when `raw` fell outside `[0, 1]`, which signals a non-monotone or
    /// non-submodular oracle (or floating-point noise at the ends).
    pub out_of_range: bool,
}

/// `c_f = 1 − min_{a: f(a) > 0} (f(V) − f(V∖a)) / f(a)`, zero when no
/// singleton has positive value.
pub fn compute_curvature<F: SetFunction + ?Sized>(f: &mut F) -> Result<Curvature> {
    let n = f.ground_size();
    if n > CURVATURE_CAP {
        return Err(Error::TooLarge {
            what: "curvature computation",
            cap: CURVATURE_CAP,
            got: n,
        });
    }
    let full = ActionSet::full(n);
    let f_full = f.evaluate(&full);
    let mut min_ratio: Option<f64> = None;
    for a in 0..n {
        let single = f.evaluate(&ActionSet::from_iter([a]));
        if single > 0.0 {
            let ratio = (f_full - f.evaluate(&full.without(a))) / single;
            min_ratio = Some(min_ratio.map_or(ratio, |m| m.min(ratio)));
        }
    }
    let raw = min_ratio.map_or(0.0, |m| 1.0 - m);
    Ok(Curvature {
        value: raw.clamp(0.0, 1.0),
        raw,
        out_of_range: !(0.0..=1.0).contains(&raw),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::Matroid;
    use crate::scenario::Point2;

    const TOL: f64 = 1e-4;

    fn set(ids: &[usize]) -> ActionSet {
        ids.iter().copied().collect()
    }

    fn tiny() -> Scenario {
        Scenario::new(
            vec![Point2::new(0.0, 0.0), Point2::new(10.0, 0.0)],
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(10.0, 0.0),
                Point2::new(5.0, 5.0),
            ],
            Matroid::uniform(3, 1),
        )
        .unwrap()
    }

    struct Modular(Vec<f64>, EvaluationCounter);

    impl SetFunction for Modular {
        fn ground_size(&self) -> usize {
            self.0.len()
        }
        fn evaluate(&mut self, set: &ActionSet) -> f64 {
            self.1.add(1);
            set.iter().map(|i| self.0[i]).sum()
        }
        fn counter(&self) -> EvaluationCounter {
            self.1
        }
    }

    struct CappedCount(usize, f64);

    impl SetFunction for CappedCount {
        fn ground_size(&self) -> usize {
            self.0
        }
        fn evaluate(&mut self, set: &ActionSet) -> f64 {
            (set.len() as f64).min(self.1)
        }
        fn counter(&self) -> EvaluationCounter {
            EvaluationCounter::new()
        }
    }

    #[test]
    fn evaluate_examples() {
        let s = tiny();
        let mut f = SurrogateOracle::new(&s, 5.0).unwrap();
        assert!((f.evaluate(&set(&[2])) - 5.0).abs() < 1e-12);
        let mut f = SurrogateOracle::new(&s, 8.0).unwrap();
        assert!((f.evaluate(&set(&[2])) - 7.0711).abs() < TOL);
        let mut f = SurrogateOracle::new(&s, 0.0).unwrap();
        assert_eq!(f.evaluate(&set(&[0, 1, 2])), 0.0);
        assert_eq!(f.counter().individual(), 2);
        assert!(SurrogateOracle::new(&s, -1.0).is_err());
    }

    #[test]
    fn marginal_gain_examples() {
        let s = tiny();
        let mut f = SurrogateOracle::new(&s, 8.0).unwrap();
        assert!((f.marginal_gain(&ActionSet::new(), 2) - 7.0711).abs() < TOL);
        // agent 0 stays at 7.0711, agent 1 rises to min(10, 8)
        assert!((f.marginal_gain(&set(&[2]), 0) - 0.4645).abs() < TOL);
        let before = f.counter();
        assert_eq!(f.marginal_gain(&set(&[2]), 2), 0.0);
        assert_eq!(f.counter(), before);
    }

    #[test]
    fn cache_is_transparent() {
        let s = tiny();
        let mut cached = SurrogateOracle::new(&s, 8.0).unwrap();
        let base = set(&[2]);
        let first = cached.marginal_gain(&base, 0);
        let n_after_first = cached.counter().individual();
        let second = cached.marginal_gain(&base, 1);
        // second query reuses f(base): one new surrogate evaluation only
        assert_eq!(cached.counter().individual() - n_after_first, 2);

        let mut fresh = SurrogateOracle::new(&s, 8.0).unwrap();
        let direct = fresh.evaluate(&base.with(1)) - fresh.evaluate(&base);
        assert_eq!(second.to_bits(), direct.to_bits());
        let mut fresh = SurrogateOracle::new(&s, 8.0).unwrap();
        let direct = fresh.evaluate(&base.with(0)) - fresh.evaluate(&base);
        assert_eq!(first.to_bits(), direct.to_bits());
        assert_eq!(cached.value(&base).to_bits(), fresh.evaluate(&base).to_bits());
    }

    #[test]
    fn curvature_examples() {
        let mut modular = Modular(vec![1.0, 2.5, 0.5], EvaluationCounter::new());
        let c = compute_curvature(&mut modular).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(!c.out_of_range);

        let c = compute_curvature(&mut CappedCount(2, 1.0)).unwrap();
        assert_eq!(c.value, 1.0);

        let c = compute_curvature(&mut CappedCount(3, 0.0)).unwrap();
        assert_eq!(c.value, 0.0);

        assert!(compute_curvature(&mut CappedCount(21, 1.0)).is_err());
    }

    #[test]
    fn curvature_flags_non_monotone() {
        struct Bump;
        impl SetFunction for Bump {
            fn ground_size(&self) -> usize {
                2
            }
            fn evaluate(&mut self, set: &ActionSet) -> f64 {
                match set.len() {
                    0 => 0.0,
                    1 => 1.0,
                    _ => 3.0,
                }
            }
            fn counter(&self) -> EvaluationCounter {
                EvaluationCounter::new()
            }
        }
        let c = compute_curvature(&mut Bump).unwrap();
        assert!(c.out_of_range);
        assert_eq!(c.value, 0.0);
        assert_eq!(c.raw, -1.0);
    }
}
