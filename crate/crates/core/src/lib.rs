//! Robust action selection for multi-agent systems.
//!
//! Each of `N` agents scores a common selection `S` of actions with its own
//! monotone submodular objective `h_i`. The goal is to pick `S`, independent
//! in a matroid, maximizing the worst agent's score `min_i h_i(S)`.
//!
//! The main solver, [`solvers::saturate_robust`], bisects on a saturation
//! level `γ` and at each level maximizes the truncated average
//! `f(S; γ) = (1/N) Σ_i min{h_i(S), γ}` with a descending-threshold greedy.

pub mod action_set;
pub mod bench;
pub mod cli;
pub mod error;
pub mod matroid;
pub mod objective;
pub mod scenario;
pub mod solvers;
pub mod surrogate;
pub mod verify;

pub use action_set::{ActionId, ActionSet};
pub use error::{Error, Result};
pub use matroid::{IndependenceOracle, Matroid, MatroidSpec};
pub use objective::{AgentObjectives, EvaluationCounter, SetFunction};
pub use scenario::{euclidean_distance, Point2, ProximityOracle, Scenario};
pub use solvers::{Algorithm, Epsilon, Solution, SolverParams};
pub use surrogate::{compute_curvature, Curvature, SurrogateOracle};
