//! Greedy Clifford-state growth for MaxCut.
//!
//! A run starts from node `k`, pairs it with its heaviest neighbour `j`, and
//! then moves the remaining nodes one at a time into the side of `k` or the
//! side of `j`. Node `b` scores
//!
//! ```text
//! g[b] = - sum_{l in side_k} w(l, b) + sum_{l in side_j} w(l, b)
//! ```
//!
//! against `k` and `-g[b]` against `j`; the node and side with the largest
//! score is taken next. This is the expectation-value gradient of the
//! rotation `exp(i pi/4 Z_l Y_b)` on the current stabilizer state (see
//! [`crate::stab::gradient_full`]), so the classical run and the Clifford
//! circuit emit the same gate sequence.
//!
//! Scores live in a [`GradientCache`] updated in `O(deg)` per move, giving
//! `O(|E| + n^2)` per run; the argmax scan dominates on dense graphs.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cut::{cut_value, ising_energy, CutAssignment};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par::{map_range, Parallelism};
use crate::rng::{Rng64, RngSeed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "k")]
    K,
    #[serde(rename = "j")]
    J,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::K => Side::J,
            Side::J => Side::K,
        }
    }
}

/// One entangling gate: `node` joined the side of `side`.
///
/// The first record of a run is always `(J, j)`, the gate
/// `exp(i pi/4 Y_k Z_j)`; later records `(K, b)` and `(J, b)` are
/// `exp(i pi/4 Z_k Y_b)` and `exp(i pi/4 Z_j Y_b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateRecord {
    pub side: Side,
    pub node: usize,
}

impl GateRecord {
    pub fn new(side: Side, node: usize) -> Self {
        GateRecord { side, node }
    }
}

/// How exact ties between candidate moves are resolved.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum TiePolicy {
    /// Lowest node index; `k` side when a node ties with itself.
    #[default]
    LowestIndex,
    /// Follow the listed moves, starting with the `(J, j)` pairing. Each
    /// entry must be one of the maximizing moves at its step. Once the list
    /// runs out, `LowestIndex` takes over.
    Scripted(Vec<GateRecord>),
    /// Uniform among maximizing moves. The stream for start `k` is seeded by
    /// `seed.derive(k)`.
    Random(RngSeed),
}

/// Per-run tie-break state created from a [`TiePolicy`].
pub struct TieState<'a> {
    policy: &'a TiePolicy,
    cursor: usize,
    rng: Option<Rng64>,
}

impl TiePolicy {
    pub fn start(&self, k: usize) -> TieState<'_> {
        let rng = match self {
            TiePolicy::Random(seed) => Some(Rng64::new(seed.derive(k as u64))),
            _ => None,
        };
        TieState {
            policy: self,
            cursor: 0,
            rng,
        }
    }
}

impl TieState<'_> {
    fn scripted(&mut self) -> Option<GateRecord> {
        match self.policy {
            TiePolicy::Scripted(moves) => {
                let m = moves.get(self.cursor).copied();
                self.cursor += 1;
                m
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Label {
    Inactive,
    K,
    J,
}

/// Which nodes are placed, and on which side.
#[derive(Clone, Debug)]
pub struct PartitionState {
    k: usize,
    j: usize,
    labels: Vec<Label>,
    inactive: Vec<usize>,
    // position of each inactive node inside `inactive`
    slot: Vec<usize>,
    step: usize,
}

impl PartitionState {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn is_inactive(&self, v: usize) -> bool {
        self.labels[v] == Label::Inactive
    }

    pub fn side_of(&self, v: usize) -> Option<Side> {
        match self.labels[v] {
            Label::Inactive => None,
            Label::K => Some(Side::K),
            Label::J => Some(Side::J),
        }
    }

    /// Inactive nodes in unspecified order.
    pub fn inactive(&self) -> &[usize] {
        &self.inactive
    }

    pub fn side_k(&self) -> Vec<usize> {
        self.members(Label::K)
    }

    pub fn side_j(&self) -> Vec<usize> {
        self.members(Label::J)
    }

    fn members(&self, label: Label) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.labels[v] == label).collect()
    }

    fn activate(&mut self, v: usize, side: Side) {
        debug_assert!(self.is_inactive(v));
        let pos = self.slot[v];
        self.inactive.swap_remove(pos);
        if let Some(&moved) = self.inactive.get(pos) {
            self.slot[moved] = pos;
        }
        self.labels[v] = match side {
            Side::K => Label::K,
            Side::J => Label::J,
        };
    }

    /// Readout: side `k` is `A` (bit 1), side `j` its complement.
    /// Still-inactive nodes read as 0.
    pub fn assignment(&self) -> CutAssignment {
        CutAssignment::new(self.labels.iter().map(|&l| l == Label::K).collect())
    }
}

/// Scores of inactive nodes against side `k`; the score against side `j` is
/// the negation.
#[derive(Clone, Debug)]
pub struct GradientCache {
    g: Vec<f64>,
}

impl GradientCache {
    /// Score of joining side `k`. Only meaningful for inactive nodes.
    pub fn get(&self, b: usize) -> f64 {
        self.g[b]
    }

    pub fn value(&self, b: usize, side: Side) -> f64 {
        match side {
            Side::K => self.g[b],
            Side::J => -self.g[b],
        }
    }
}

/// Score of `b` against side `k`, computed from scratch.
pub fn gradient_from_sides(g: &Graph, state: &PartitionState, b: usize) -> f64 {
    g.neighbors(b)
        .iter()
        .map(|&(l, w)| match state.labels[l] {
            Label::K => -w,
            Label::J => w,
            Label::Inactive => 0.0,
        })
        .sum()
}

/// Cached score of inactive node `b` against side `k`.
pub fn gradient(state: &PartitionState, cache: &GradientCache, b: usize) -> f64 {
    assert!(state.is_inactive(b), "node {b} is not inactive");
    cache.get(b)
}

/// Pick the reference node `j` for start `k` and seed the cache.
pub fn init_run(g: &Graph, k: usize, tie: &mut TieState<'_>) -> Result<(PartitionState, GradientCache)> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidInstance(format!("need at least 2 nodes, got {n}")));
    }
    if k >= n {
        return Err(Error::InvalidParameter(format!("start node {k} out of range for n = {n}")));
    }
    let row = g.weight_row(k);
    let best = (0..n).filter(|&b| b != k).map(|b| row[b]).fold(f64::NEG_INFINITY, f64::max);
    let j = if let Some(m) = tie.scripted() {
        if m.side != Side::J || m.node == k || m.node >= n || row[m.node] != best {
            return Err(Error::Script {
                step: 1,
                msg: format!("({:?}, {}) is not a heaviest neighbour of {k}", m.side, m.node),
            });
        }
        m.node
    } else if let Some(rng) = tie.rng.as_mut() {
        let cands: Vec<usize> = (0..n).filter(|&b| b != k && row[b] == best).collect();
        cands[rng.index(cands.len())]
    } else {
        (0..n).find(|&b| b != k && row[b] == best).unwrap()
    };

    let mut labels = vec![Label::Inactive; n];
    labels[k] = Label::K;
    labels[j] = Label::J;
    let inactive: Vec<usize> = (0..n).filter(|&v| v != k && v != j).collect();
    let mut slot = vec![usize::MAX; n];
    for (p, &v) in inactive.iter().enumerate() {
        slot[v] = p;
    }
    let mut cache = vec![0.0; n];
    for &(b, w) in g.neighbors(k) {
        cache[b] -= w;
    }
    for &(b, w) in g.neighbors(j) {
        cache[b] += w;
    }
    let state = PartitionState {
        k,
        j,
        labels,
        inactive,
        slot,
        step: 1,
    };
    Ok((state, GradientCache { g: cache }))
}

/// The move made by one growth step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Choice {
    pub node: usize,
    pub side: Side,
    /// Score of the move, the maximum over all candidate moves.
    pub gradient: f64,
}

fn select(state: &PartitionState, scores: &[f64], tie: &mut TieState<'_>, step: usize) -> Result<Choice> {
    debug_assert!(!state.inactive.is_empty());
    let best = state
        .inactive
        .iter()
        .map(|&b| scores[b].abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let value = |b: usize, side: Side| match side {
        Side::K => scores[b],
        Side::J => -scores[b],
    };

    if let Some(m) = tie.scripted() {
        if m.node >= state.n() || !state.is_inactive(m.node) || value(m.node, m.side) != best {
            return Err(Error::Script {
                step,
                msg: format!("({:?}, {}) is not a maximizing move", m.side, m.node),
            });
        }
        return Ok(Choice {
            node: m.node,
            side: m.side,
            gradient: best,
        });
    }

    if let Some(rng) = tie.rng.as_mut() {
        let mut cands: Vec<(usize, Side)> = Vec::new();
        for &b in &state.inactive {
            for side in [Side::K, Side::J] {
                if value(b, side) == best {
                    cands.push((b, side));
                }
            }
        }
        // `inactive` order depends on history; sort so the draw depends only on the candidate set.
        cands.sort_unstable_by_key(|&(b, s)| (b, s == Side::J));
        let (node, side) = cands[rng.index(cands.len())];
        return Ok(Choice { node, side, gradient: best });
    }

    let node = state
        .inactive
        .iter()
        .copied()
        .filter(|&b| scores[b].abs() == best)
        .min()
        .unwrap();
    let side = if scores[node] >= 0.0 { Side::K } else { Side::J };
    Ok(Choice { node, side, gradient: best })
}

/// Move the best inactive node into a side and update the cache.
pub fn step(
    state: &mut PartitionState,
    cache: &mut GradientCache,
    g: &Graph,
    tie: &mut TieState<'_>,
) -> Result<Choice> {
    if state.inactive.is_empty() {
        return Err(Error::Contract("no inactive nodes left".into()));
    }
    let choice = select(state, &cache.g, tie, state.step + 1)?;
    state.activate(choice.node, choice.side);
    let sign = match choice.side {
        Side::K => -1.0,
        Side::J => 1.0,
    };
    for &(b, w) in g.neighbors(choice.node) {
        if state.labels[b] == Label::Inactive {
            cache.g[b] += sign * w;
        }
    }
    state.step += 1;
    Ok(choice)
}

/// Same as [`step`] but rescoring every inactive node from its neighbours.
/// Reference implementation for testing the cache.
pub fn step_recompute(state: &mut PartitionState, g: &Graph, tie: &mut TieState<'_>) -> Result<Choice> {
    if state.inactive.is_empty() {
        return Err(Error::Contract("no inactive nodes left".into()));
    }
    let mut scores = vec![0.0; state.n()];
    for &b in &state.inactive {
        scores[b] = gradient_from_sides(g, state, b);
    }
    let choice = select(state, &scores, tie, state.step + 1)?;
    state.activate(choice.node, choice.side);
    state.step += 1;
    Ok(choice)
}

/// Output of a single solver call.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub solver: String,
    #[serde(default)]
    pub start_node: Option<usize>,
    pub cut_value: f64,
    pub ising_energy: f64,
    pub assignment: CutAssignment,
    #[serde(default)]
    pub gate_trace: Vec<GateRecord>,
    #[serde(default)]
    pub gradient_trace: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl Solution {
    /// Wrap an assignment, evaluating both objectives on `g`.
    pub fn from_assignment(g: &Graph, solver: impl Into<String>, assignment: CutAssignment) -> Self {
        Solution {
            solver: solver.into(),
            start_node: None,
            cut_value: cut_value(g, &assignment),
            ising_energy: ising_energy(g, &assignment),
            assignment,
            gate_trace: Vec::new(),
            gradient_trace: Vec::new(),
            seed: None,
            wall_time_s: 0.0,
            warning: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("solution serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("bad solution JSON: {e}")))
    }
}

fn finish(g: &Graph, state: &PartitionState, gates: Vec<GateRecord>, grads: Vec<f64>, t0: Instant) -> Solution {
    let mut s = Solution::from_assignment(g, "adapt", state.assignment());
    s.start_node = Some(state.k);
    s.gate_trace = gates;
    s.gradient_trace = grads;
    s.wall_time_s = t0.elapsed().as_secs_f64();
    s
}

/// Full run from start node `k`: the pairing step, then `n - 2` growth steps.
pub fn run_from(g: &Graph, k: usize, policy: &TiePolicy) -> Result<Solution> {
    let t0 = Instant::now();
    let mut tie = policy.start(k);
    let (mut state, mut cache) = init_run(g, k, &mut tie)?;
    let n = g.n();
    let mut gates = Vec::with_capacity(n - 1);
    let mut grads = Vec::with_capacity(n - 1);
    gates.push(GateRecord::new(Side::J, state.j));
    grads.push(g.weight(k, state.j));
    for _ in 2..n {
        let c = step(&mut state, &mut cache, g, &mut tie)?;
        gates.push(GateRecord::new(c.side, c.node));
        grads.push(c.gradient);
    }
    Ok(finish(g, &state, gates, grads, t0))
}

/// [`run_from`] without the cache; every step rescores all inactive nodes.
pub fn run_from_recompute(g: &Graph, k: usize, policy: &TiePolicy) -> Result<Solution> {
    let t0 = Instant::now();
    let mut tie = policy.start(k);
    let (mut state, _) = init_run(g, k, &mut tie)?;
    let n = g.n();
    let mut gates = vec![GateRecord::new(Side::J, state.j)];
    let mut grads = vec![g.weight(k, state.j)];
    for _ in 2..n {
        let c = step_recompute(&mut state, g, &mut tie)?;
        gates.push(GateRecord::new(c.side, c.node));
        grads.push(c.gradient);
    }
    let mut s = finish(g, &state, gates, grads, t0);
    s.solver = "adapt-recompute".into();
    Ok(s)
}

/// One run from a uniformly drawn start node.
pub fn randomized(g: &Graph, seed: RngSeed, policy: &TiePolicy) -> Result<Solution> {
    if g.n() < 2 {
        return Err(Error::InvalidInstance(format!("need at least 2 nodes, got {}", g.n())));
    }
    let t0 = Instant::now();
    let k = Rng64::new(seed).index(g.n());
    let mut s = run_from(g, k, policy)?;
    s.solver = "adapt-rand".into();
    s.seed = Some(seed.0);
    s.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(s)
}

/// Result of one start inside a deterministic sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub k: usize,
    pub cut_value: f64,
    pub ising_energy: f64,
}

#[derive(Clone, Debug)]
pub struct DeterministicResult {
    pub best: Solution,
    pub per_start: Vec<StartRecord>,
}

/// Run from every start node and keep the lowest energy, ties to lowest `k`.
///
/// Starts are independent and may run in parallel; the reduction is by
/// `(energy, k)` so the result does not depend on scheduling.
pub fn deterministic(g: &Graph, policy: &TiePolicy, mode: Parallelism) -> Result<DeterministicResult> {
    if g.n() < 2 {
        return Err(Error::InvalidInstance(format!("need at least 2 nodes, got {}", g.n())));
    }
    let t0 = Instant::now();
    let runs: Vec<Solution> = map_range(mode, g.n(), |k| run_from(g, k, policy))
        .into_iter()
        .collect::<Result<_>>()?;
    let per_start = runs
        .iter()
        .map(|s| StartRecord {
            k: s.start_node.unwrap(),
            cut_value: s.cut_value,
            ising_energy: s.ising_energy,
        })
        .collect();
    let mut best = runs
        .into_iter()
        .min_by(|a, b| {
            a.ising_energy
                .total_cmp(&b.ising_energy)
                .then(a.start_node.cmp(&b.start_node))
        })
        .unwrap();
    best.solver = "adapt-det".into();
    best.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(DeterministicResult { best, per_start })
}
