use std::time::Instant;

use super::local_fields;
use crate::adapt::Solution;
use crate::cut::CutAssignment;
use crate::graph::Graph;
use crate::rng::{Rng64, RngSeed};

// Flips gaining less than this are treated as non-improving.
const MIN_GAIN: f64 = 1e-12;

/// Best-improvement single-flip descent from `start` to a local optimum.
///
/// Flipping node `i` changes the cut by `s_i h_i`; the largest positive gain
/// is applied (lowest index on ties) until none is left.
pub fn local_search(g: &Graph, start: &CutAssignment) -> Solution {
    assert_eq!(start.len(), g.n(), "start assignment has the wrong length");
    let t0 = Instant::now();
    let mut spins: Vec<f64> = (0..g.n()).map(|i| start.spin(i)).collect();
    let mut h = local_fields(g, &spins);
    loop {
        let mut best = (MIN_GAIN, usize::MAX);
        for i in 0..g.n() {
            let gain = spins[i] * h[i];
            if gain > best.0 {
                best = (gain, i);
            }
        }
        let (_, i) = best;
        if i == usize::MAX {
            break;
        }
        let s = spins[i];
        for &(j, w) in g.neighbors(i) {
            h[j] -= 2.0 * w * s;
        }
        spins[i] = -s;
    }
    let z = CutAssignment::new(spins.iter().map(|&s| s > 0.0).collect());
    let mut sol = Solution::from_assignment(g, "local", z);
    sol.wall_time_s = t0.elapsed().as_secs_f64();
    sol
}

/// [`local_search`] from a uniformly random assignment drawn from `seed`.
pub fn local_search_random(g: &Graph, seed: RngSeed) -> Solution {
    let t0 = Instant::now();
    let mut rng = Rng64::new(seed);
    let start = CutAssignment::new((0..g.n()).map(|_| rng.below(2) == 1).collect());
    let mut sol = local_search(g, &start);
    sol.seed = Some(seed.0);
    sol.wall_time_s = t0.elapsed().as_secs_f64();
    sol
}
