//! Independence oracles: uniform and partition matroids, plus an exhaustive
//! axiom checker usable on any small set system.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::action_set::{ActionId, ActionSet};
use crate::error::{Error, Result};

/// Largest ground set [`find_axiom_violation`] will enumerate.
pub const AXIOM_CHECK_CAP: usize = 12;

/// Independence oracle over the ground set `0..ground_size()`.
pub trait IndependenceOracle {
    fn ground_size(&self) -> usize;

    fn is_independent(&self, set: &ActionSet) -> bool;

    /// Whether `set ∪ {e}` is independent. Always false for `e ∈ set`.
    fn can_extend(&self, set: &ActionSet, e: ActionId) -> bool {
        e < self.ground_size() && !set.contains(e) && self.is_independent(&set.with(e))
    }

    /// True iff no element outside `set` can be added.
    fn is_basis(&self, set: &ActionSet) -> bool {
        (0..self.ground_size()).all(|e| !self.can_extend(set, e))
    }
}

/// Serialized matroid description, as embedded in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidSpec {
    Uniform {
        rank: usize,
    },
    Partition {
        blocks: Vec<Vec<ActionId>>,
        capacity: usize,
        /// Per-block capacities overriding `capacity` when present.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        capacities: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Uniform {
        rank: usize,
    },
    Partition {
        blocks: Vec<Vec<ActionId>>,
        capacities: Vec<usize>,
        block_of: Vec<usize>,
    },
}

/// A validated matroid over a fixed ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct Matroid {
    ground: usize,
    kind: Kind,
}

impl Matroid {
    pub fn uniform(ground: usize, rank: usize) -> Self {
        Self {
            ground,
            kind: Kind::Uniform { rank },
        }
    }

    /// Partition matroid with a shared capacity per block.
    pub fn partition(ground: usize, blocks: Vec<Vec<ActionId>>, capacity: usize) -> Result<Self> {
        let capacities = vec![capacity; blocks.len()];
        Self::partition_with_capacities(ground, blocks, capacities)
    }

    /// Partition matroid; blocks must be pairwise disjoint and cover `0..ground`.
    pub fn partition_with_capacities(
        ground: usize,
        blocks: Vec<Vec<ActionId>>,
        capacities: Vec<usize>,
    ) -> Result<Self> {
        if capacities.len() != blocks.len() {
            return Err(Error::instance(
                "matroid.capacities",
                format!("{} capacities for {} blocks", capacities.len(), blocks.len()),
            ));
        }
        let mut block_of = vec![usize::MAX; ground];
        for (j, block) in blocks.iter().enumerate() {
            for &id in block {
                if id >= ground {
                    return Err(Error::instance(
                        format!("matroid.blocks[{j}]"),
                        format!("action id {id} outside ground set of size {ground}"),
                    ));
                }
                if block_of[id] != usize::MAX {
                    return Err(Error::instance(
                        format!("matroid.blocks[{j}]"),
                        format!("action id {id} also appears in block {}", block_of[id]),
                    ));
                }
                block_of[id] = j;
            }
        }
        if let Some(id) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::instance(
                "matroid.blocks",
                format!("action id {id} is not covered by any block"),
            ));
        }
        Ok(Self {
            ground,
            kind: Kind::Partition {
                blocks,
                capacities,
                block_of,
            },
        })
    }

    pub fn from_spec(ground: usize, spec: &MatroidSpec) -> Result<Self> {
        match spec {
            MatroidSpec::Uniform { rank } => Ok(Self::uniform(ground, *rank)),
            MatroidSpec::Partition {
                blocks,
                capacity,
                capacities,
            } => {
                let caps = capacities
                    .clone()
                    .unwrap_or_else(|| vec![*capacity; blocks.len()]);
                Self::partition_with_capacities(ground, blocks.clone(), caps)
            }
        }
    }

    pub fn to_spec(&self) -> MatroidSpec {
        match &self.kind {
            Kind::Uniform { rank } => MatroidSpec::Uniform { rank: *rank },
            Kind::Partition {
                blocks, capacities, ..
            } => {
                let capacity = capacities.first().copied().unwrap_or(0);
                let uniform = capacities.iter().all(|&c| c == capacity);
                MatroidSpec::Partition {
                    blocks: blocks.clone(),
                    capacity,
                    capacities: (!uniform).then(|| capacities.clone()),
                }
            }
        }
    }

    /// Blocks of a partition matroid, `None` for uniform.
    pub fn blocks(&self) -> Option<&[Vec<ActionId>]> {
        match &self.kind {
            Kind::Partition { blocks, .. } => Some(blocks),
            Kind::Uniform { .. } => None,
        }
    }

    /// Size of every basis.
    pub fn rank(&self) -> usize {
        match &self.kind {
            Kind::Uniform { rank } => (*rank).min(self.ground),
            Kind::Partition {
                blocks, capacities, ..
            } => blocks
                .iter()
                .zip(capacities)
                .map(|(b, &c)| b.len().min(c))
                .sum(),
        }
    }
}

impl IndependenceOracle for Matroid {
    fn ground_size(&self) -> usize {
        self.ground
    }

    fn is_independent(&self, set: &ActionSet) -> bool {
        if set.bound() > self.ground {
            return false;
        }
        match &self.kind {
            Kind::Uniform { rank } => set.len() <= *rank,
            Kind::Partition {
                capacities,
                block_of,
                ..
            } => {
                let mut used = vec![0usize; capacities.len()];
                for id in set {
                    let b = block_of[id];
                    used[b] += 1;
                    if used[b] > capacities[b] {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn can_extend(&self, set: &ActionSet, e: ActionId) -> bool {
        if e >= self.ground || set.contains(e) {
            return false;
        }
        match &self.kind {
            Kind::Uniform { rank } => set.len() < *rank,
            Kind::Partition {
                capacities,
                block_of,
                ..
            } => {
                let b = block_of[e];
                let used = set.iter().filter(|&id| block_of[id] == b).count();
                used < capacities[b]
            }
        }
    }
}

/// A set system given by explicit enumeration of its independent sets.
///
/// Not necessarily a matroid; exists so the axiom checker can be pointed at
/// arbitrary families, including broken ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitFamily {
    ground: usize,
    independent: Vec<ActionSet>,
    #[serde(skip)]
    lookup: HashSet<ActionSet>,
}

impl ExplicitFamily {
    pub fn new(ground: usize, independent: Vec<ActionSet>) -> Self {
        let lookup = independent.iter().cloned().collect();
        Self {
            ground,
            independent,
            lookup,
        }
    }

    /// `{∅, {0, 1}}` over two elements: breaks downward closure.
    pub fn corrupted_example() -> Self {
        Self::new(2, vec![ActionSet::new(), [0, 1].into_iter().collect()])
    }
}

impl IndependenceOracle for ExplicitFamily {
    fn ground_size(&self) -> usize {
        self.ground
    }

    fn is_independent(&self, set: &ActionSet) -> bool {
        self.lookup.contains(set)
    }
}

/// Which matroid axiom a family fails, with the witnessing sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    EmptySetDependent,
    DownwardClosure { subset: ActionSet, superset: ActionSet },
    Exchange { larger: ActionSet, smaller: ActionSet },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::EmptySetDependent => write!(f, "empty set is not independent"),
            AxiomViolation::DownwardClosure { subset, superset } => write!(
                f,
                "{subset:?} is a subset of independent {superset:?} but is dependent"
            ),
            AxiomViolation::Exchange { larger, smaller } => write!(
                f,
                "no element of {larger:?} extends the smaller independent set {smaller:?}"
            ),
        }
    }
}

/// Exhaustively checks all three matroid axioms over every pair of subsets.
pub fn find_axiom_violation<M: IndependenceOracle + ?Sized>(
    m: &M,
) -> Result<Option<AxiomViolation>> {
    let n = m.ground_size();
    if n > AXIOM_CHECK_CAP {
        return Err(Error::TooLarge {
            what: "matroid axiom check",
            cap: AXIOM_CHECK_CAP,
            got: n,
        });
    }
    let total = 1u64 << n;
    let indep: Vec<bool> = (0..total)
        .map(|mask| m.is_independent(&ActionSet::from_mask(mask)))
        .collect();

    if !indep[0] {
        return Ok(Some(AxiomViolation::EmptySetDependent));
    }
    for b in (0..total).filter(|&b| indep[b as usize]) {
        // every submask of b
        let mut a = b;
        loop {
            if !indep[a as usize] {
                return Ok(Some(AxiomViolation::DownwardClosure {
                    subset: ActionSet::from_mask(a),
                    superset: ActionSet::from_mask(b),
                }));
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }
    for a in (0..total).filter(|&a| indep[a as usize]) {
        for b in (0..total).filter(|&b| indep[b as usize]) {
            if b.count_ones() >= a.count_ones() {
                continue;
            }
            let mut diff = a & !b;
            let mut found = false;
            while diff != 0 {
                let v = diff & diff.wrapping_neg();
                if indep[(b | v) as usize] {
                    found = true;
                    break;
                }
                diff &= diff - 1;
            }
            if !found {
                return Ok(Some(AxiomViolation::Exchange {
                    larger: ActionSet::from_mask(a),
                    smaller: ActionSet::from_mask(b),
                }));
            }
        }
    }
    Ok(None)
}

/// True iff `m` satisfies all matroid axioms.
pub fn check_matroid_axioms<M: IndependenceOracle + ?Sized>(m: &M) -> Result<bool> {
    Ok(find_axiom_violation(m)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[usize]) -> ActionSet {
        ids.iter().copied().collect()
    }

    fn small_partition() -> Matroid {
        Matroid::partition(3, vec![vec![0], vec![1, 2]], 1).unwrap()
    }

    #[test]
    fn partition_independence() {
        let m = small_partition();
        assert!(m.is_independent(&set(&[0, 1])));
        assert!(!m.is_independent(&set(&[1, 2])));
        assert!(m.is_independent(&ActionSet::new()));
        assert!(Matroid::uniform(4, 2).is_independent(&ActionSet::new()));
    }

    #[test]
    fn extension_queries() {
        let u = Matroid::uniform(3, 1);
        assert!(u.can_extend(&ActionSet::new(), 0));
        assert!(!u.can_extend(&set(&[0]), 1));
        assert!(!small_partition().can_extend(&set(&[1]), 2));
        // self-extension is never claimed
        assert!(!Matroid::uniform(3, 3).can_extend(&set(&[1]), 1));
    }

    #[test]
    fn basis_queries() {
        assert!(Matroid::uniform(3, 1).is_basis(&set(&[2])));
        assert!(!small_partition().is_basis(&set(&[0])));
        assert!(Matroid::uniform(0, 2).is_basis(&ActionSet::new()));
    }

    #[test]
    fn axiom_checker() {
        assert!(check_matroid_axioms(&Matroid::uniform(4, 2)).unwrap());
        assert!(check_matroid_axioms(&small_partition()).unwrap());
        let bad = ExplicitFamily::corrupted_example();
        assert!(matches!(
            find_axiom_violation(&bad).unwrap(),
            Some(AxiomViolation::DownwardClosure { .. })
        ));
        let no_exchange = ExplicitFamily::new(
            3,
            vec![set(&[]), set(&[0]), set(&[1]), set(&[2]), set(&[0, 1])],
        );
        assert!(matches!(
            find_axiom_violation(&no_exchange).unwrap(),
            Some(AxiomViolation::Exchange { .. })
        ));
        assert!(matches!(
            check_matroid_axioms(&Matroid::uniform(13, 2)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn overridden_can_extend_agrees_with_definition() {
        let ms = [small_partition(), Matroid::uniform(3, 2)];
        for m in &ms {
            for mask in 0..8u64 {
                let s = ActionSet::from_mask(mask);
                if !m.is_independent(&s) {
                    continue;
                }
                for e in 0..3 {
                    let expected = !s.contains(e) && m.is_independent(&s.with(e));
                    assert_eq!(m.can_extend(&s, e), expected, "{s:?} + {e}");
                }
            }
        }
    }

    #[test]
    fn spec_validation_and_round_trip() {
        let err = Matroid::partition(3, vec![vec![0, 1], vec![1, 2]], 1).unwrap_err();
        assert!(err.to_string().contains("matroid.blocks[1]"));
        assert!(Matroid::partition(3, vec![vec![0]], 1).is_err());
        assert!(Matroid::partition(2, vec![vec![0, 5]], 1).is_err());

        let spec: MatroidSpec =
            serde_json::from_str(r#"{"type":"partition","blocks":[[0],[1,2]],"capacity":1}"#)
                .unwrap();
        let m = Matroid::from_spec(3, &spec).unwrap();
        assert_eq!(m, small_partition());
        assert_eq!(m.to_spec(), spec);
        assert_eq!(m.rank(), 2);
    }
}
