//! Reference MaxCut solvers.

mod exact;
mod greedy;
mod gw;
mod local;

pub use exact::{exact_maxcut, exact_maxcut_with, ExactResult, DEFAULT_EXACT_LIMIT};
pub use greedy::sahni_gonzalez;
pub use gw::{gw_solve, GwParams, GwRelaxation};
pub use local::{local_search, local_search_random};

use crate::graph::Graph;

/// Local fields `h_i = sum_j w_ij s_j` for spins `s`.
pub(crate) fn local_fields(g: &Graph, spins: &[f64]) -> Vec<f64> {
    (0..g.n())
        .map(|i| g.neighbors(i).iter().map(|&(j, w)| w * spins[j]).sum())
        .collect()
}
