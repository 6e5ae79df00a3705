use std::cmp::Ordering;
use std::time::Instant;

use super::{Algorithm, Solution};
use crate::action_set::ActionSet;
use crate::error::{Error, Result};
use crate::matroid::IndependenceOracle;
use crate::objective::{AgentObjectives, SetFunction};
use crate::scenario::{ProximityOracle, Scenario};
use crate::surrogate::SurrogateOracle;

/// Largest ground set the exhaustive oracles enumerate.
pub const BRUTE_FORCE_CAP: usize = 20;

/// Independent set maximizing `f`, found by enumerating every subset.
/// Ties go to the smaller set, then to the lexicographically smaller one.
pub fn brute_force_max<F, M>(f: &mut F, m: &M) -> Result<(ActionSet, f64)>
where
    F: SetFunction + ?Sized,
    M: IndependenceOracle + ?Sized,
{
    let n = f.ground_size();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge {
            what: "brute-force search",
            cap: BRUTE_FORCE_CAP,
            got: n,
        });
    }
    let mut best = (ActionSet::new(), f.evaluate(&ActionSet::new()));
    for mask in 1..(1u64 << n) {
        let set = ActionSet::from_mask(mask);
        if !m.is_independent(&set) {
            continue;
        }
        let value = f.evaluate(&set);
        let better = match value.partial_cmp(&best.1) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Equal) => set.cmp_size_lex(&best.0) == Ordering::Less,
            _ => false,
        };
        if better {
            best = (set, value);
        }
    }
    Ok(best)
}

/// Exact max-min solution for small instances.
pub fn brute_force_maxmin(scenario: &Scenario) -> Result<Solution> {
    let start = Instant::now();
    let mut g = ProximityOracle::new(scenario);
    let (selected, _) = brute_force_max(&mut g, scenario.matroid())?;
    Ok(Solution::finish(
        Algorithm::Brute,
        scenario,
        selected,
        g.counter(),
        start.elapsed(),
    ))
}

/// Exact maximizer of the surrogate at its fixed saturation level.
pub fn brute_force_surrogate_max<O, M>(f: &mut SurrogateOracle<'_, O>, m: &M) -> Result<ActionSet>
where
    O: AgentObjectives + ?Sized,
    M: IndependenceOracle + ?Sized,
{
    Ok(brute_force_max(f, m)?.0)
}
