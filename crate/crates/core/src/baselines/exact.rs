use serde::{Deserialize, Serialize};

use super::local_fields;
use crate::cut::{cut_value, ising_energy, CutAssignment};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par::{map_range, Parallelism};

pub const DEFAULT_EXACT_LIMIT: usize = 26;

/// Nodes fixed per parallel subcube.
const PREFIX_BITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub optimum_cut: f64,
    pub optimum_energy: f64,
    pub witness: CutAssignment,
    pub evaluated: u64,
}

/// Maximum cut by exhaustive enumeration; see [`exact_maxcut_with`].
pub fn exact_maxcut(g: &Graph, limit: usize) -> Result<ExactResult> {
    exact_maxcut_with(g, limit, Parallelism::default())
}

/// Enumerate the `2^(n-1)` assignments with node 0 pinned to side 0.
///
/// The free nodes `1..n` are split into a prefix (the highest up to six
/// nodes), fixed per worker, and a suffix walked in reflected Gray-code
/// order. Each flip updates the cut value and the local fields in
/// `O(deg)`. The optimum is re-evaluated from the witness at the end so it
/// carries no accumulated rounding.
pub fn exact_maxcut_with(g: &Graph, limit: usize, mode: Parallelism) -> Result<ExactResult> {
    let n = g.n();
    if n > limit {
        return Err(Error::SizeLimit { n, limit });
    }
    if n > 63 {
        return Err(Error::SizeLimit { n, limit: 63 });
    }
    let free = n - 1;
    let prefix = free.min(PREFIX_BITS);
    let suffix = free - prefix;

    let best = map_range(mode, 1usize << prefix, |p| walk_subcube(g, suffix, p))
        .into_iter()
        .fold((f64::NEG_INFINITY, 0u64), |acc, (v, bits)| {
            // deterministic tie-break: smallest bit pattern
            if v > acc.0 || (v == acc.0 && bits < acc.1) {
                (v, bits)
            } else {
                acc
            }
        });

    let witness = CutAssignment::new((0..n).map(|i| best.1 >> i & 1 == 1).collect());
    Ok(ExactResult {
        optimum_cut: cut_value(g, &witness),
        optimum_energy: ising_energy(g, &witness),
        witness,
        evaluated: 1u64 << free,
    })
}

/// Best `(cut, bits)` over the subcube whose prefix nodes `1 + suffix..n`
/// carry the pattern `p`. Bit `i` of `bits` is node `i`.
fn walk_subcube(g: &Graph, suffix: usize, p: usize) -> (f64, u64) {
    let n = g.n();
    let mut bits: u64 = (p as u64) << (1 + suffix);
    let spin = |bits: u64, i: usize| if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
    let spins: Vec<f64> = (0..n).map(|i| spin(bits, i)).collect();
    let mut h = local_fields(g, &spins);
    let z = CutAssignment::new((0..n).map(|i| bits >> i & 1 == 1).collect());
    let mut cut = cut_value(g, &z);
    let mut best = (cut, bits);
    for t in 1u64..(1u64 << suffix) {
        let i = 1 + t.trailing_zeros() as usize;
        let s = spin(bits, i);
        // cut changes by s_i h_i when s_i flips
        cut += s * h[i];
        for &(j, w) in g.neighbors(i) {
            h[j] -= 2.0 * w * s;
        }
        bits ^= 1 << i;
        if cut > best.0 || (cut == best.0 && bits < best.1) {
            best = (cut, bits);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_complete, gen_sk};
    use crate::{RngSeed, WeightSpec};

    fn naive(g: &Graph) -> f64 {
        let n = g.n();
        (0..1u64 << n)
            .map(|m| cut_value(g, &CutAssignment::new((0..n).map(|i| m >> i & 1 == 1).collect())))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn triangle() {
        let g = gen_complete(3, WeightSpec::Unit, RngSeed(0)).unwrap();
        let r = exact_maxcut(&g, DEFAULT_EXACT_LIMIT).unwrap();
        assert_eq!(r.optimum_cut, 2.0);
        assert_eq!(r.optimum_energy, g.total_weight() / 2.0 - 2.0);
        assert_eq!(r.evaluated, 4);
    }

    #[test]
    fn refuses_large() {
        let g = gen_complete(30, WeightSpec::Unit, RngSeed(0)).unwrap();
        assert!(matches!(exact_maxcut(&g, 26), Err(Error::SizeLimit { n: 30, limit: 26 })));
    }

    #[test]
    fn matches_naive_enumeration() {
        for n in [2, 3, 5, 8, 11] {
            for seed in 0..4 {
                let g = gen_sk(n, RngSeed(seed)).unwrap();
                let r = exact_maxcut(&g, 26).unwrap();
                assert!((r.optimum_cut - naive(&g)).abs() < 1e-9);
                assert_eq!(r.optimum_cut, cut_value(&g, &r.witness));
                assert!(!r.witness.get(0));
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = gen_complete(14, WeightSpec::U01, RngSeed(4)).unwrap();
        let a = exact_maxcut_with(&g, 26, Parallelism::Sequential).unwrap();
        let b = exact_maxcut_with(&g, 26, Parallelism::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
