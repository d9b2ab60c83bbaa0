use std::time::Instant;

use crate::adapt::Solution;
use crate::cut::CutAssignment;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{Rng64, RngSeed};

/// Sahni-Gonzalez greedy: visit nodes in a seeded random order and put each
/// on the side that cuts more weight to the nodes already placed (side `A`
/// on ties).
pub fn sahni_gonzalez(g: &Graph, order_seed: RngSeed) -> Result<Solution> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidInstance(format!("need at least 2 nodes, got {n}")));
    }
    let t0 = Instant::now();
    let mut order: Vec<usize> = (0..n).collect();
    Rng64::new(order_seed).shuffle(&mut order);
    // None = not yet placed, Some(true) = A
    let mut side: Vec<Option<bool>> = vec![None; n];
    for &v in &order {
        let (mut to_a, mut to_b) = (0.0, 0.0);
        for &(u, w) in g.neighbors(v) {
            match side[u] {
                Some(true) => to_a += w,
                Some(false) => to_b += w,
                None => {}
            }
        }
        // joining A cuts the edges into B
        side[v] = Some(to_b >= to_a);
    }
    let z = CutAssignment::new(side.into_iter().map(Option::unwrap).collect());
    let mut s = Solution::from_assignment(g, "sg", z);
    s.seed = Some(order_seed.0);
    s.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(s)
}
