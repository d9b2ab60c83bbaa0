//! MaxCut approximation with greedy Clifford-circuit state growth.
//!
//! The solver grows a stabilizer state one qubit at a time, choosing at every
//! step the inactive node with the largest gradient against one of two
//! reference nodes `k` and `j`. The resulting state has `n - 1` signed `ZZ`
//! stabilizers whose signs encode a cut. Because the gradient reduces to a
//! signed sum of edge weights into the two sides of the partially built cut,
//! the solver itself never touches a tableau; [`stab`] replays the gate
//! sequence on an explicit stabilizer tableau and serves as an independent
//! oracle.
//!
//! Crate layout:
//!
//! - [`graph`]: weighted graphs, random instance families and edge-list I/O.
//! - [`cut`]: assignments, cut value, Ising energy and approximation ratios.
//! - [`adapt`]: the randomized and deterministic greedy solvers.
//! - [`stab`]: Pauli strings, stabilizer tableaus and solution verification.
//! - [`baselines`]: exact enumeration, Goemans-Williamson rounding, local
//!   search and the Sahni-Gonzalez greedy heuristic.
//! - [`experiments`]: batch runs, density fits, the threshold-sweep
//!   estimator for mean approximation ratios, timing and CNOT counts.
//!
//! Data-parallel loops (per-start runs of the deterministic solver, the
//! exact enumeration subcubes, batch instances) run on rayon when the
//! `parallel` feature is enabled and fall back to plain iterators otherwise;
//! see [`Parallelism`].

pub mod adapt;
pub mod baselines;
pub mod cut;
mod error;
pub mod experiments;
pub mod graph;
mod par;
pub mod rng;
pub mod stab;

pub use adapt::{
    deterministic, randomized, run_from, DeterministicResult, GateRecord, Side, Solution,
    TiePolicy,
};
pub use cut::{approx_ratio, cut_value, ising_energy, CutAssignment, ObjectiveValue};
pub use error::{Error, Result};
pub use graph::{Graph, WeightSpec};
pub use par::Parallelism;
pub use rng::RngSeed;
