//! Goemans-Williamson: vector relaxation plus random-hyperplane rounding.
//!
//! The relaxation `max sum_{ij} w_ij (1 - y_i . y_j)` over unit vectors is
//! solved in low rank (Burer-Monteiro): `Y` is an `n x r` matrix with unit
//! rows, `r = ceil(sqrt(2n)) + 1`. Ascent steps move along the gradient
//! projected onto each row's tangent space and renormalize the rows; the
//! step length is found by Armijo backtracking, so every accepted iterate
//! increases the objective.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::adapt::Solution;
use crate::cut::{cut_value, CutAssignment};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{Rng64, RngSeed};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwParams {
    pub rank: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub rounds: usize,
    pub seed: RngSeed,
}

impl GwParams {
    /// Defaults for a graph on `n` nodes.
    pub fn for_size(n: usize, rounds: usize, seed: RngSeed) -> Self {
        GwParams {
            rank: ((2.0 * n as f64).sqrt().ceil() as usize + 1).max(2),
            max_iters: 2000,
            grad_tol: 1e-6,
            rounds,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rank < 2 {
            return Err(Error::InvalidParameter(format!("relaxation rank {} < 2", self.rank)));
        }
        if self.rounds < 1 {
            return Err(Error::InvalidParameter("need at least one rounding".into()));
        }
        if self.grad_tol.is_nan() || self.grad_tol <= 0.0 {
            return Err(Error::InvalidParameter("gradient tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// A solved (or partially solved) relaxation.
#[derive(Clone, Debug)]
pub struct GwRelaxation {
    pub rank: usize,
    /// Row-major `n x rank`, unit rows.
    pub vectors: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial point.
    pub history: Vec<f64>,
}

struct Problem<'a> {
    g: &'a Graph,
    n: usize,
    r: usize,
}

impl Problem<'_> {
    fn row<'v>(&self, y: &'v [f64], i: usize) -> &'v [f64] {
        &y[i * self.r..(i + 1) * self.r]
    }

    fn objective(&self, y: &[f64]) -> f64 {
        self.g
            .edges()
            .iter()
            .map(|e| e.w * (1.0 - dot(self.row(y, e.i), self.row(y, e.j))))
            .sum()
    }

    /// Gradient of the objective projected onto the tangent space of each
    /// row, and its squared Frobenius norm.
    fn projected_gradient(&self, y: &[f64]) -> (Vec<f64>, f64) {
        let r = self.r;
        let mut grad = vec![0.0; self.n * r];
        for i in 0..self.n {
            let gi = &mut grad[i * r..(i + 1) * r];
            for &(j, w) in self.g.neighbors(i) {
                let yj = &y[j * r..(j + 1) * r];
                for (a, b) in gi.iter_mut().zip(yj) {
                    *a -= w * b;
                }
            }
            let yi = &y[i * r..(i + 1) * r];
            let c = dot(gi, yi);
            for (a, b) in gi.iter_mut().zip(yi) {
                *a -= c * b;
            }
        }
        let norm2 = grad.iter().map(|v| v * v).sum();
        (grad, norm2)
    }

    fn retract(&self, y: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
        let mut out: Vec<f64> = y.iter().zip(dir).map(|(a, b)| a + t * b).collect();
        for row in out.chunks_mut(self.r) {
            normalize(row);
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    } else {
        v[0] = 1.0;
    }
}

/// Solve the rank-restricted relaxation from a random start.
pub fn solve_relaxation(g: &Graph, p: &GwParams, rng: &mut Rng64) -> GwRelaxation {
    let n = g.n();
    let r = p.rank;
    let prob = Problem { g, n, r };
    let mut y: Vec<f64> = (0..n * r).map(|_| rng.normal()).collect();
    for row in y.chunks_mut(r) {
        normalize(row);
    }
    let mut f = prob.objective(&y);
    let mut history = vec![f];
    let max_degree = (0..n)
        .map(|i| g.neighbors(i).iter().map(|&(_, w)| w.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut t = if max_degree > 0.0 { 1.0 / max_degree } else { 1.0 };
    let (mut dir, mut norm2) = prob.projected_gradient(&y);
    let mut iterations = 0;
    while iterations < p.max_iters && norm2.sqrt() >= p.grad_tol {
        iterations += 1;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = prob.retract(&y, &dir, t);
            let fc = prob.objective(&cand);
            if fc >= f + 1e-4 * t * norm2 {
                y = cand;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        history.push(f);
        t *= 2.0;
        (dir, norm2) = prob.projected_gradient(&y);
    }
    let grad_norm = norm2.sqrt();
    GwRelaxation {
        rank: r,
        vectors: y,
        objective: f,
        iterations,
        grad_norm,
        converged: grad_norm < p.grad_tol,
        history,
    }
}

/// Cut from the hyperplane orthogonal to a Gaussian vector; `sgn(0) = +1`.
fn round_once(relax: &GwRelaxation, n: usize, rng: &mut Rng64) -> CutAssignment {
    let r = relax.rank;
    let normal: Vec<f64> = (0..r).map(|_| rng.normal()).collect();
    CutAssignment::new(
        (0..n)
            .map(|i| dot(&relax.vectors[i * r..(i + 1) * r], &normal) >= 0.0)
            .collect(),
    )
}

/// Relax, then round `p.rounds` times and keep the best cut.
///
/// A relaxation that hits `max_iters` is still rounded; the solution then
/// carries a warning instead of failing.
pub fn gw_solve(g: &Graph, p: &GwParams) -> Result<Solution> {
    if g.n() < 2 {
        return Err(Error::InvalidInstance(format!("need at least 2 nodes, got {}", g.n())));
    }
    p.validate()?;
    let t0 = Instant::now();
    let mut rng = Rng64::new(p.seed);
    let relax = solve_relaxation(g, p, &mut rng);
    let mut round_rng = Rng64::new(p.seed.derive_str("rounding"));
    let mut best: Option<(f64, CutAssignment)> = None;
    for _ in 0..p.rounds {
        let z = round_once(&relax, g.n(), &mut round_rng);
        let v = cut_value(g, &z);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, z));
        }
    }
    let (_, z) = best.unwrap();
    let mut s = Solution::from_assignment(g, format!("gw(rounds={})", p.rounds), z);
    s.seed = Some(p.seed.0);
    if !relax.converged {
        s.warning = Some(format!(
            "relaxation stopped after {} iterations with gradient norm {:.3e}",
            relax.iterations, relax.grad_norm
        ));
        log::warn!("{}", s.warning.as_deref().unwrap());
    }
    s.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::exact_maxcut;
    use crate::graph::gen_complete;
    use crate::WeightSpec;

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        for seed in 0..10 {
            let s = gw_solve(&g, &GwParams::for_size(2, 1, RngSeed(seed))).unwrap();
            assert_eq!(s.cut_value, 1.0);
        }
    }

    #[test]
    fn triangle_many_rounds() {
        let g = gen_complete(3, WeightSpec::Unit, RngSeed(0)).unwrap();
        let s = gw_solve(&g, &GwParams::for_size(3, 100, RngSeed(1))).unwrap();
        assert_eq!(s.cut_value, 2.0);
    }

    #[test]
    fn objective_never_decreases() {
        let g = gen_complete(30, WeightSpec::U01, RngSeed(2)).unwrap();
        let p = GwParams::for_size(30, 1, RngSeed(3));
        let relax = solve_relaxation(&g, &p, &mut Rng64::new(RngSeed(3)));
        assert!(relax.history.windows(2).all(|w| w[1] >= w[0]));
        assert!(relax.converged, "grad norm {}", relax.grad_norm);
    }

    #[test]
    fn relaxation_bounds_the_maximum_cut() {
        // sum w (1 - y.y) is twice the relaxed cut value.
        let g = gen_complete(12, WeightSpec::U01, RngSeed(2)).unwrap();
        let exact = exact_maxcut(&g, 26).unwrap();
        let relax = solve_relaxation(&g, &GwParams::for_size(12, 1, RngSeed(3)), &mut Rng64::new(RngSeed(3)));
        assert!(relax.objective / 2.0 >= exact.optimum_cut - 1e-9);
    }

    #[test]
    fn bad_params() {
        let g = Graph::from_edges(2, [(0, 1, 1.0)]).unwrap();
        let mut p = GwParams::for_size(2, 1, RngSeed(0));
        p.rounds = 0;
        assert!(gw_solve(&g, &p).is_err());
        p.rounds = 1;
        p.rank = 1;
        assert!(gw_solve(&g, &p).is_err());
    }
}
