//! Problem instances: agent and action positions, the selection constraint,
//! and the distance-based individual objectives.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::action_set::ActionSet;
use crate::error::{Error, Result};
use crate::matroid::{Matroid, MatroidSpec};
use crate::objective::{AgentObjectives, EvaluationCounter, SetFunction};

/// A location in the plane, serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

pub fn euclidean_distance(p: Point2, q: Point2) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    agents: Vec<Point2>,
    actions: Vec<Point2>,
    matroid: MatroidSpec,
}

/// An immutable problem instance.
///
/// Agent-to-action distances are computed once at construction; `h_i(S)` is
/// the largest distance from agent `i` to any selected action, and zero on
/// the empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    agents: Vec<Point2>,
    actions: Vec<Point2>,
    matroid: Matroid,
    // row-major, one row of M distances per agent
    distances: Vec<f64>,
}

impl Scenario {
    pub fn new(agents: Vec<Point2>, actions: Vec<Point2>, matroid: Matroid) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::instance("agents", "at least one agent is required"));
        }
        if let Some(i) = agents.iter().position(|p| !p.is_finite()) {
            return Err(Error::instance(format!("agents[{i}]"), "non-finite coordinate"));
        }
        if let Some(j) = actions.iter().position(|p| !p.is_finite()) {
            return Err(Error::instance(format!("actions[{j}]"), "non-finite coordinate"));
        }
        if crate::matroid::IndependenceOracle::ground_size(&matroid) != actions.len() {
            return Err(Error::instance(
                "matroid",
                format!(
                    "ground set size {} does not match {} actions",
                    crate::matroid::IndependenceOracle::ground_size(&matroid),
                    actions.len()
                ),
            ));
        }
        let distances = agents
            .iter()
            .flat_map(|&a| actions.iter().map(move |&v| euclidean_distance(a, v)))
            .collect();
        Ok(Self {
            agents,
            actions,
            matroid,
            distances,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::parse(text, Path::new("<string>"))
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text, path)
    }

    fn parse(text: &str, path: &Path) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile =
            serde_path_to_error::deserialize(de).map_err(|source| Error::Parse {
                path: path.to_owned(),
                source,
            })?;
        let matroid = Matroid::from_spec(file.actions.len(), &file.matroid)?;
        Self::new(file.agents, file.actions, matroid)
    }

    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            agents: self.agents.clone(),
            actions: self.actions.clone(),
            matroid: self.matroid.to_spec(),
        };
        serde_json::to_string(&file).expect("scenario serialization is infallible")
    }

    pub fn agents(&self) -> &[Point2] {
        &self.agents
    }

    pub fn actions(&self) -> &[Point2] {
        &self.actions
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn distance(&self, agent: usize, action: usize) -> f64 {
        self.distances[agent * self.actions.len() + action]
    }

    /// Uncounted `h_agent(set)`, checking the agent index.
    pub fn proximity(&self, agent: usize, set: &ActionSet) -> Result<f64> {
        if agent >= self.agents.len() {
            return Err(Error::AgentOutOfRange {
                agent,
                n_agents: self.agents.len(),
            });
        }
        Ok(self.agent_value(agent, set))
    }

    /// Uncounted `min_i h_i(set)`.
    pub fn min_value(&self, set: &ActionSet) -> f64 {
        worst_agent(self, set).1
    }
}

impl AgentObjectives for Scenario {
    fn n_agents(&self) -> usize {
        self.agents.len()
    }

    fn n_actions(&self) -> usize {
        self.actions.len()
    }

    fn agent_value(&self, agent: usize, set: &ActionSet) -> f64 {
        let m = self.actions.len();
        let row = &self.distances[agent * m..(agent + 1) * m];
        set.iter().map(|j| row[j]).fold(0.0, f64::max)
    }
}

fn worst_agent<O: AgentObjectives + ?Sized>(o: &O, set: &ActionSet) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for i in 0..o.n_agents() {
        let v = o.agent_value(i, set);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Counting front end over a scenario's individual objectives.
///
/// Its [`SetFunction`] implementation is the system objective
/// `g(S) = min_i h_i(S)`.
#[derive(Debug)]
pub struct ProximityOracle<'a> {
    scenario: &'a Scenario,
    counter: EvaluationCounter,
}

impl<'a> ProximityOracle<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        Self {
            scenario,
            counter: EvaluationCounter::new(),
        }
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    /// `h_agent(set)`, counting one evaluation.
    pub fn proximity_objective(&mut self, agent: usize, set: &ActionSet) -> Result<f64> {
        let v = self.scenario.proximity(agent, set)?;
        self.counter.add(1);
        Ok(v)
    }

    /// `min_i h_i(set)`, counting `N` evaluations.
    pub fn min_objective(&mut self, set: &ActionSet) -> f64 {
        self.worst_case_attack(set).1
    }

    /// The agent whose removal hurts most and its value; ties go to the
    /// lowest index.
    pub fn worst_case_attack(&mut self, set: &ActionSet) -> (usize, f64) {
        self.counter.add(self.scenario.n_agents() as u64);
        worst_agent(self.scenario, set)
    }

    pub fn evaluations(&self) -> EvaluationCounter {
        self.counter
    }
}

impl SetFunction for ProximityOracle<'_> {
    fn ground_size(&self) -> usize {
        self.scenario.n_actions()
    }

    fn evaluate(&mut self, set: &ActionSet) -> f64 {
        self.min_objective(set)
    }

    fn counter(&self) -> EvaluationCounter {
        self.counter
    }
}

/// One agent's objective `h_i` as a standalone counted set function.
#[derive(Debug)]
pub struct AgentObjective<'a, O: AgentObjectives + ?Sized = Scenario> {
    objectives: &'a O,
    agent: usize,
    counter: EvaluationCounter,
}

impl<'a, O: AgentObjectives + ?Sized> AgentObjective<'a, O> {
    pub fn new(objectives: &'a O, agent: usize) -> Result<Self> {
        if agent >= objectives.n_agents() {
            return Err(Error::AgentOutOfRange {
                agent,
                n_agents: objectives.n_agents(),
            });
        }
        Ok(Self {
            objectives,
            agent,
            counter: EvaluationCounter::new(),
        })
    }
}

impl<O: AgentObjectives + ?Sized> SetFunction for AgentObjective<'_, O> {
    fn ground_size(&self) -> usize {
        self.objectives.n_actions()
    }

    fn evaluate(&mut self, set: &ActionSet) -> f64 {
        self.counter.add(1);
        self.objectives.agent_value(self.agent, set)
    }

    fn counter(&self) -> EvaluationCounter {
        self.counter
    }
}
