//! Independent oracles shared by the integration tests: brute-force cut
//! enumeration, a dense statevector simulator and small reference graphs.
#![allow(dead_code)]

use cliffcut::adapt::{GateRecord, Side};
use cliffcut::graph::{gen_complete, gen_erdos_renyi, gen_regular, gen_sk};
use cliffcut::rng::Rng64;
use cliffcut::stab::PauliString;
use cliffcut::{Graph, RngSeed, WeightSpec};
use num_complex::Complex64;

/// Five nodes, seven unit edges, maximum cut 6.
pub fn example_n5() -> Graph {
    let edges = [(1, 2), (1, 5), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5)];
    Graph::from_edges(5, edges.iter().map(|&(a, b)| (a - 1, b - 1, 1.0))).unwrap()
}

/// Four nodes: a triangle with a pendant edge, maximum cut 3.
pub fn example_n4() -> Graph {
    let edges = [(1, 2), (1, 3), (2, 3), (3, 4)];
    Graph::from_edges(4, edges.iter().map(|&(a, b)| (a - 1, b - 1, 1.0))).unwrap()
}

/// Cut value of every assignment, computed edge by edge.
pub fn brute_force_maxcut(g: &Graph) -> f64 {
    let n = g.n();
    assert!(n <= 20);
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << n) {
        let v: f64 = g
            .edges()
            .iter()
            .filter(|e| (mask >> e.i & 1) != (mask >> e.j & 1))
            .map(|e| e.w)
            .sum();
        best = best.max(v);
    }
    best
}

/// Cut value from a bit vector, summing edges directly.
pub fn naive_cut(g: &Graph, bits: &[bool]) -> f64 {
    g.edges().iter().filter(|e| bits[e.i] != bits[e.j]).map(|e| e.w).sum()
}

/// Sparse random graph with weights of either sign.
pub fn random_signed_graph(n: usize, seed: RngSeed) -> Graph {
    let mut rng = Rng64::new(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.uniform() < 0.5 {
                edges.push((a, b, rng.uniform_in(-1.0, 1.0)));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Mixed-family corpus: complete U[0,1], unit complete, SK, 3-regular,
/// Erdos-Renyi and sparse signed graphs, sizes in `min_n..=max_n`.
pub fn mixed_corpus(count: usize, min_n: usize, max_n: usize, seed: u64) -> Vec<Graph> {
    let mut rng = Rng64::new(RngSeed(seed));
    (0..count)
        .map(|i| {
            let n = min_n + rng.index(max_n - min_n + 1);
            let s = RngSeed(seed).derive(i as u64);
            match i % 6 {
                0 => gen_complete(n, WeightSpec::U01, s).unwrap(),
                1 => gen_complete(n, WeightSpec::Unit, s).unwrap(),
                2 => gen_sk(n, s).unwrap(),
                3 if n >= 4 && n.is_multiple_of(2) => gen_regular(n, 3, WeightSpec::Unit, s).unwrap(),
                4 => gen_erdos_renyi(n, 0.5, s).unwrap(),
                _ => random_signed_graph(n, s),
            }
        })
        .collect()
}

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense `2^n` statevector; qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    /// `|+>` on every qubit except `k`, which is `|->`.
    pub fn flipped_plus(n: usize, k: usize) -> Self {
        let dim = 1usize << n;
        let norm = (dim as f64).sqrt().recip();
        let amps = (0..dim)
            .map(|s| if s >> k & 1 == 1 { c(-norm, 0.0) } else { c(norm, 0.0) })
            .collect();
        StateVector { n, amps }
    }

    pub fn apply_1q(&mut self, m: &Mat2, q: usize) {
        let bit = 1usize << q;
        for s in 0..self.amps.len() {
            if s & bit == 0 {
                let (a0, a1) = (self.amps[s], self.amps[s | bit]);
                self.amps[s] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[s | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for s in 0..self.amps.len() {
            if s & cb != 0 && s & tb == 0 {
                self.amps.swap(s, s | tb);
            }
        }
    }

    /// `exp(i pi/4 Y_y Z_z)` as a circuit of `H`, `S`, `S^dagger`, `CNOT`
    /// and `Rx(-pi/2)` (with `Rx(t) = exp(-i t X / 2)`), exact up to a
    /// global phase.
    pub fn apply_yz_circuit(&mut self, y: usize, z: usize) {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let h: Mat2 = [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]];
        let s: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]];
        let sdg: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]];
        // Rx(-pi/2) = cos(pi/4) I + i sin(pi/4) X
        let rx: Mat2 = [[c(r, 0.0), c(0.0, r)], [c(0.0, r), c(r, 0.0)]];
        self.apply_1q(&h, z);
        self.apply_1q(&sdg, y);
        self.cnot(y, z);
        self.apply_1q(&rx, y);
        self.cnot(y, z);
        self.apply_1q(&h, z);
        self.apply_1q(&s, y);
    }

    /// `exp(i pi/4 P) = (I + i P) / sqrt(2)` applied directly.
    pub fn apply_rotation_exact(&mut self, p: &PauliString) {
        let pv = self.apply_pauli(p);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (a, b) in self.amps.iter_mut().zip(pv) {
            *a = (*a + c(0.0, 1.0) * b) * r;
        }
    }

    /// `P |psi>` for a signed Pauli string.
    pub fn apply_pauli(&self, p: &PauliString) -> Vec<Complex64> {
        let mut out = vec![c(0.0, 0.0); self.amps.len()];
        let mut flip = 0usize;
        for q in 0..self.n {
            if p.x_bit(q) {
                flip |= 1 << q;
            }
        }
        for (s, &a) in self.amps.iter().enumerate() {
            // X^x Z^z per qubit, with Y = i X Z.
            let mut phase = c(p.sign() as f64, 0.0);
            for q in 0..self.n {
                let (x, z) = (p.x_bit(q), p.z_bit(q));
                if z && s >> q & 1 == 1 {
                    phase = -phase;
                }
                if x && z {
                    phase *= c(0.0, 1.0);
                }
            }
            out[s ^ flip] += phase * a;
        }
        out
    }

    pub fn expectation(&self, p: &PauliString) -> f64 {
        let pv = self.apply_pauli(p);
        let v: Complex64 = self.amps.iter().zip(&pv).map(|(a, b)| a.conj() * b).sum();
        assert!(v.im.abs() < 1e-9, "non-Hermitian expectation {v}");
        v.re
    }

    /// `|<self|other>|`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }
}

/// Statevector of a run from `k` following `trace`, built from the gate
/// decomposition.
pub fn statevector_run(n: usize, k: usize, trace: &[GateRecord]) -> StateVector {
    let mut sv = StateVector::flipped_plus(n, k);
    let j = trace.first().map(|g| g.node);
    for (i, gate) in trace.iter().enumerate() {
        if i == 0 {
            sv.apply_yz_circuit(k, gate.node);
        } else {
            let anchor = match gate.side {
                Side::K => k,
                Side::J => j.unwrap(),
            };
            sv.apply_yz_circuit(gate.node, anchor);
        }
    }
    sv
}

/// Pauli string with `X`, `Y` or `Z` (or identity, `'I'`) per qubit.
pub fn pauli(ops: &[(usize, char)], n: usize) -> PauliString {
    let mut p = PauliString::identity(n);
    for &(q, op) in ops {
        let (x, z) = match op {
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => (false, false),
        };
        p.set(q, x, z);
    }
    p
}

/// `Z_a X_b Z_l`, with the `Z` factors cancelling when `a == l`.
pub fn gradient_operator(n: usize, a: usize, b: usize, l: usize) -> PauliString {
    let mut p = pauli(&[(b, 'X')], n);
    if a != l {
        p.set(a, false, true);
        p.set(l, false, true);
    }
    p
}

/// Drive a lowest-index run from `k` step by step, calling `visit` before
/// each growth step with the state, the cache and the gates applied so far.
pub fn walk_run(
    g: &Graph,
    k: usize,
    mut visit: impl FnMut(&cliffcut::adapt::PartitionState, &cliffcut::adapt::GradientCache, &[GateRecord]),
) {
    use cliffcut::adapt::{init_run, step};
    let policy = cliffcut::TiePolicy::LowestIndex;
    let mut tie = policy.start(k);
    let (mut state, mut cache) = init_run(g, k, &mut tie).unwrap();
    let mut gates = vec![GateRecord::new(Side::J, state.j())];
    while !state.inactive().is_empty() {
        visit(&state, &cache, &gates);
        let c = step(&mut state, &mut cache, g, &mut tie).unwrap();
        gates.push(GateRecord::new(c.side, c.node));
    }
}
