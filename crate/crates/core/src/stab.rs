//! Stabilizer tableau oracle.
//!
//! Pauli strings are stored in the symplectic form `(x | z)` with a sign;
//! qubit `q` holds `I`, `X`, `Z` or `Y` for `(x, z) = (0,0), (1,0), (0,1),
//! (1,1)`. Products track the power of `i` with the usual per-qubit phase
//! function, and only real signs are ever stored.
//!
//! The oracle replays a solver's gate trace as Pauli rotations
//! `exp(i pi/4 P)`, which map each anticommuting generator `Q` to `i P Q`
//! and leave commuting ones alone. Expectation values are decided by
//! Gaussian elimination over the generators.

use std::collections::VecDeque;
use std::fmt;

use crate::adapt::{GateRecord, Side, Solution};
use crate::cut::{cut_value, CutAssignment};
use crate::error::{Error, Result};
use crate::graph::Graph;

const WORD: usize = 64;

fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            negative: false,
        }
    }

    pub fn x(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.set(q, true, false);
        p
    }

    pub fn z(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.set(q, false, true);
        p
    }

    pub fn y(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.set(q, true, true);
        p
    }

    /// `Z_a Z_b`.
    pub fn zz(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::z(n, a);
        p.mul_z(b);
        p
    }

    /// The rotation axis `Y_y Z_z`.
    pub fn yz(n: usize, y: usize, z: usize) -> Self {
        assert_ne!(y, z);
        let mut p = Self::y(n, y);
        p.set(z, false, true);
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / WORD] >> (q % WORD) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / WORD] >> (q % WORD) & 1 == 1
    }

    pub fn set(&mut self, q: usize, x: bool, z: bool) {
        assert!(q < self.n, "qubit {q} out of range");
        let m = 1u64 << (q % WORD);
        let w = q / WORD;
        self.x[w] = if x { self.x[w] | m } else { self.x[w] & !m };
        self.z[w] = if z { self.z[w] | m } else { self.z[w] & !m };
    }

    /// Multiply in a `Z` on qubit `q` from the right, ignoring phase.
    /// Only used to build sign-free strings from commuting factors.
    fn mul_z(&mut self, q: usize) {
        self.z[q / WORD] ^= 1 << (q % WORD);
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.negative = sign < 0;
        self
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    pub fn is_z_only(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    fn same_operator(&self, other: &PauliString) -> bool {
        self.x == other.x && self.z == other.z
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        parity == 0
    }

    /// `self * other` as `(i^phase, product)` where the product carries the
    /// combined real sign and `phase` is the extra power of `i` in `0..4`.
    fn mul_phase(&self, other: &PauliString) -> (u32, PauliString) {
        assert_eq!(self.n, other.n);
        // Exponent of i picked up per qubit when multiplying single-qubit
        // Paulis in the (x, z) encoding with Y = (1, 1).
        let mut e: i32 = 0;
        for q in 0..self.n {
            let (x1, z1) = (self.x_bit(q) as i32, self.z_bit(q) as i32);
            let (x2, z2) = (other.x_bit(q) as i32, other.z_bit(q) as i32);
            e += match (x1, z1) {
                (0, 0) => 0,
                (1, 1) => z2 - x2,
                (1, 0) => z2 * (2 * x2 - 1),
                _ => x2 * (1 - 2 * z2),
            };
        }
        let mut out = PauliString {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            negative: self.negative ^ other.negative,
        };
        let mut e = e.rem_euclid(4) as u32;
        if e >= 2 {
            out.negative = !out.negative;
            e -= 2;
        }
        (e, out)
    }

    /// Product of two commuting strings; the result is Hermitian.
    pub fn mul_commuting(&self, other: &PauliString) -> PauliString {
        let (e, p) = self.mul_phase(other);
        assert_eq!(e, 0, "product of commuting Paulis must carry a real phase");
        p
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for q in 0..self.n {
            let c = match (self.x_bit(q), self.z_bit(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for PauliString {
    type Err = Error;

    /// Parse `[+|-]` followed by one of `IXYZ` per qubit.
    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let mut p = PauliString::identity(body.len());
        for (q, c) in body.chars().enumerate() {
            let (x, z) = match c {
                'I' => (false, false),
                'X' => (true, false),
                'Z' => (false, true),
                'Y' => (true, true),
                _ => return Err(Error::InvalidParameter(format!("bad Pauli string '{s}'"))),
            };
            p.set(q, x, z);
        }
        p.negative = negative;
        Ok(p)
    }
}

/// `n` stabilizer generators of a pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliString>,
}

/// `Z_k H^n |0..0>`: generators `X_l` for `l != k` and `-X_k`.
pub fn init_flipped_plus(n: usize, k: usize) -> Tableau {
    assert!(k < n, "start qubit {k} out of range");
    let rows = (0..n)
        .map(|q| {
            let p = PauliString::x(n, q);
            if q == k {
                p.negated()
            } else {
                p
            }
        })
        .collect();
    Tableau { n, rows }
}

impl Tableau {
    pub fn from_rows(rows: Vec<PauliString>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.n != n) {
            return Err(Error::MalformedState("need n generators on n qubits".into()));
        }
        let t = Tableau { n, rows };
        if !t.is_valid() {
            return Err(Error::MalformedState("generators must commute and be independent".into()));
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    /// Conjugate by `exp(i pi/4 P)` for `P = Y_y Z_z` (or `Z_z Y_y`).
    pub fn apply_rotation(&mut self, p: &PauliString) {
        assert_eq!(p.n, self.n);
        assert!(!p.negative, "rotation axis must be unsigned");
        let support = p.support();
        let ok = support.len() == 2
            && support.iter().filter(|&&q| p.x_bit(q) && p.z_bit(q)).count() == 1
            && support.iter().filter(|&&q| !p.x_bit(q) && p.z_bit(q)).count() == 1;
        assert!(ok, "rotation axis must have the form Y Z, got {p}");
        for row in self.rows.iter_mut() {
            if !row.commutes_with(p) {
                // P Q = i^e R with e odd for anticommuting P, Q, so
                // i P Q = i^(e+1) R is real: -R for e = 1, +R for e = 3.
                let (e, prod) = p.mul_phase(row);
                assert!(e % 2 == 1, "anticommuting product must be imaginary");
                *row = if e == 1 { prod.negated() } else { prod };
            }
        }
        debug_assert!(self.is_valid(), "tableau invariants broken");
    }

    /// Pairwise commutation and full GF(2) rank.
    pub fn is_valid(&self) -> bool {
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.rows[a].commutes_with(&self.rows[b]) {
                    return false;
                }
            }
        }
        self.rank() == self.n
    }

    pub fn rank(&self) -> usize {
        let mut mat: Vec<Vec<u64>> = self
            .rows
            .iter()
            .map(|r| r.x.iter().chain(&r.z).copied().collect())
            .collect();
        let cols = 2 * self.n;
        let mut rank = 0;
        for c in 0..cols {
            let bit = |row: &Vec<u64>| symplectic_bit(row, self.n, c);
            if let Some(p) = (rank..mat.len()).find(|&r| bit(&mat[r])) {
                mat.swap(rank, p);
                let pivot = mat[rank].clone();
                for (r, row) in mat.iter_mut().enumerate() {
                    if r != rank && bit(row) {
                        for (a, b) in row.iter_mut().zip(&pivot) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    /// `<P>`: `+1` or `-1` if `+P` or `-P` is in the stabilizer group, else 0.
    pub fn expectation(&self, p: &PauliString) -> i8 {
        assert_eq!(p.n, self.n);
        if self.rows.iter().any(|r| !r.commutes_with(p)) {
            return 0;
        }
        // A full stabilizer group contains every commuting Pauli up to sign.
        // Express P's bits over the generators and multiply those generators.
        let n = self.n;
        let width = 2 * n;
        let mut mat: Vec<(Vec<u64>, Vec<bool>)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut used = vec![false; n];
                used[i] = true;
                (r.x.iter().chain(&r.z).copied().collect(), used)
            })
            .collect();
        let mut target: Vec<u64> = p.x.iter().chain(&p.z).copied().collect();
        let mut combo = vec![false; n];
        let mut rank = 0;
        for c in 0..width {
            let bit = |row: &Vec<u64>| symplectic_bit(row, n, c);
            let Some(piv) = (rank..n).find(|&r| bit(&mat[r].0)) else {
                continue;
            };
            mat.swap(rank, piv);
            let (prow, pused) = mat[rank].clone();
            for (r, (row, used)) in mat.iter_mut().enumerate() {
                if r != rank && bit(row) {
                    for (a, b) in row.iter_mut().zip(&prow) {
                        *a ^= b;
                    }
                    for (a, b) in used.iter_mut().zip(&pused) {
                        *a ^= b;
                    }
                }
            }
            if bit(&target) {
                for (a, b) in target.iter_mut().zip(&prow) {
                    *a ^= b;
                }
                for (a, b) in combo.iter_mut().zip(&pused) {
                    *a ^= b;
                }
            }
            rank += 1;
        }
        debug_assert!(target.iter().all(|&w| w == 0), "commuting Pauli outside the group");
        let mut prod = PauliString::identity(n);
        for (i, &u) in combo.iter().enumerate() {
            if u {
                prod = prod.mul_commuting(&self.rows[i]);
            }
        }
        debug_assert!(prod.same_operator(p));
        if prod.negative == p.negative {
            1
        } else {
            -1
        }
    }

    /// Bring the generators to a canonical form: rows with X support first in
    /// row-echelon order on the X block, then Z-only rows in reduced echelon
    /// form on the Z block. The generated group is unchanged.
    pub fn canonicalize(&mut self) {
        let n = self.n;
        let mut rank = 0;
        for c in 0..n {
            let Some(p) = (rank..n).find(|&r| self.rows[r].x_bit(c)) else {
                continue;
            };
            self.rows.swap(rank, p);
            for r in 0..n {
                if r != rank && self.rows[r].x_bit(c) {
                    self.rows[r] = self.rows[r].mul_commuting(&self.rows[rank]);
                }
            }
            rank += 1;
        }
        for c in 0..n {
            let Some(p) = (rank..n).find(|&r| self.rows[r].z_bit(c)) else {
                continue;
            };
            self.rows.swap(rank, p);
            // Z-only pivots leave the X block of every other row intact.
            for r in 0..n {
                if r != rank && self.rows[r].z_bit(c) {
                    self.rows[r] = self.rows[r].mul_commuting(&self.rows[rank]);
                }
            }
            rank += 1;
        }
    }
}

/// Column `c` of the stacked `(x | z)` row, where `z` starts at word `words(n)`.
fn symplectic_bit(row: &[u64], n: usize, c: usize) -> bool {
    let (block, q) = if c < n { (0, c) } else { (words(n), c - n) };
    row[block + q / WORD] >> (q % WORD) & 1 == 1
}

/// The rotation axis for one gate record of a run started at `k`, paired
/// with `j`.
pub fn rotation_axis(n: usize, k: usize, j: usize, first: bool, gate: GateRecord) -> PauliString {
    if first {
        PauliString::yz(n, k, gate.node)
    } else {
        let anchor = match gate.side {
            Side::K => k,
            Side::J => j,
        };
        PauliString::yz(n, gate.node, anchor)
    }
}

/// `-sum_l w(l, b) <Z_l X_b Z_a>` on the tableau.
pub fn gradient_full(t: &Tableau, g: &Graph, a: usize, b: usize) -> f64 {
    let n = t.n();
    let mut total = 0.0;
    for &(l, w) in g.neighbors(b) {
        let mut p = PauliString::x(n, b);
        // Z_l Z_a: two Z factors on distinct qubits, or identity if l == a.
        if l != a {
            p.mul_z(l);
            p.mul_z(a);
        }
        total -= w * t.expectation(&p) as f64;
    }
    total
}

/// Read the cut from the `ZZ` stabilizers of a finished run.
///
/// Node 0 is anchored to spin `+1` (bit 1) and the `ZZ` signs are propagated
/// breadth-first.
pub fn extract_cut(t: &Tableau) -> Result<CutAssignment> {
    let n = t.n();
    let mut c = t.clone();
    c.canonicalize();
    let zz: Vec<&PauliString> = c.rows.iter().filter(|r| r.is_z_only()).collect();
    if zz.len() != n - 1 {
        return Err(Error::MalformedState(format!(
            "expected {} independent ZZ generators, found {}",
            n - 1,
            zz.len()
        )));
    }
    let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); n];
    for r in zz {
        let s = r.support();
        if s.len() != 2 {
            return Err(Error::MalformedState(format!("Z-type generator {r} is not of ZZ form")));
        }
        adj[s[0]].push((s[1], r.sign()));
        adj[s[1]].push((s[0], r.sign()));
    }
    let mut spin = vec![0i8; n];
    spin[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &(v, s) in &adj[u] {
            if spin[v] == 0 {
                spin[v] = s * spin[u];
                queue.push_back(v);
            } else if spin[v] != s * spin[u] {
                return Err(Error::MalformedState("inconsistent ZZ signs".into()));
            }
        }
    }
    if spin.contains(&0) {
        return Err(Error::MalformedState("ZZ constraints do not connect all qubits".into()));
    }
    Ok(CutAssignment::from_spins(&spin))
}

/// Replay a gate trace from start node `k`. Fails if the trace is not a
/// valid run: `n - 1` records, the first on side `j`, every node placed once.
pub fn replay(n: usize, k: usize, trace: &[GateRecord]) -> Result<Tableau> {
    if trace.len() + 1 != n {
        return Err(Error::MalformedState(format!("expected {} gates, got {}", n.saturating_sub(1), trace.len())));
    }
    replay_prefix(n, k, trace)
}

/// Replay the first gates of a run, giving the tableau of a partially
/// grown state. An empty prefix is the initial state.
pub fn replay_prefix(n: usize, k: usize, trace: &[GateRecord]) -> Result<Tableau> {
    if k >= n {
        return Err(Error::MalformedState(format!("start node {k} out of range")));
    }
    if trace.len() >= n {
        return Err(Error::MalformedState(format!("{} gates for {n} qubits", trace.len())));
    }
    let mut t = init_flipped_plus(n, k);
    let Some(&first) = trace.first() else {
        return Ok(t);
    };
    if first.side != Side::J {
        return Err(Error::MalformedState("first gate must pair k with j".into()));
    }
    let j = first.node;
    let mut placed = vec![false; n];
    placed[k] = true;
    for (i, &gate) in trace.iter().enumerate() {
        if gate.node >= n || placed[gate.node] {
            return Err(Error::MalformedState(format!("gate {i} reuses or misplaces node {}", gate.node)));
        }
        placed[gate.node] = true;
        t.apply_rotation(&rotation_axis(n, k, j, i == 0, gate));
    }
    Ok(t)
}

/// Outcome of [`verify_solution`].
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub passed: bool,
    pub diagnostic: Option<String>,
    pub replayed: Option<CutAssignment>,
}

impl Verification {
    fn fail(msg: String, replayed: Option<CutAssignment>) -> Self {
        Verification {
            passed: false,
            diagnostic: Some(msg),
            replayed,
        }
    }
}

/// Replay `s.gate_trace` on a tableau and check the assignment (up to
/// complement) and the recorded cut value.
pub fn verify_solution(g: &Graph, s: &Solution) -> Verification {
    let n = g.n();
    let Some(k) = s.start_node else {
        return Verification::fail("solution has no start node".into(), None);
    };
    if s.assignment.len() != n {
        return Verification::fail(format!("assignment has {} bits, graph has {n} nodes", s.assignment.len()), None);
    }
    let t = match replay(n, k, &s.gate_trace) {
        Ok(t) => t,
        Err(e) => return Verification::fail(e.to_string(), None),
    };
    if t.expectation(&all_x(n).negated()) != 1 {
        return Verification::fail("replayed state is not stabilized by -X...X".into(), None);
    }
    let cut = match extract_cut(&t) {
        Ok(c) => c,
        Err(e) => return Verification::fail(e.to_string(), None),
    };
    if !cut.same_up_to_complement(&s.assignment) {
        let bit = (1..n)
            .find(|&i| (cut.get(i) == cut.get(0)) != (s.assignment.get(i) == s.assignment.get(0)))
            .unwrap_or(0);
        return Verification::fail(
            format!(
                "replay gives {cut}, solution has {}; first disagreement at node {bit} (stabilizer {:+}Z_0 Z_{bit})",
                s.assignment,
                if cut.get(bit) == cut.get(0) { 1 } else { -1 },
            ),
            Some(cut),
        );
    }
    let value = cut_value(g, &cut);
    if (value - s.cut_value).abs() > 1e-9 * value.abs().max(1.0) {
        return Verification::fail(
            format!("recorded cut value {} but assignment cuts {value}", s.cut_value),
            Some(cut),
        );
    }
    Verification {
        passed: true,
        diagnostic: None,
        replayed: Some(cut),
    }
}

fn all_x(n: usize) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set(q, true, false);
    }
    p
}
