//! Weighted undirected graphs, random instance families and the edge-list
//! text format.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::{Rng64, RngSeed};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// An immutable weighted graph on nodes `0..n`.
///
/// Each undirected edge is stored once with `i < j`; the adjacency lists hold
/// both directions. Absent pairs have weight zero everywhere in the crate.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Build a graph, normalizing each pair to `i < j`.
    ///
    /// Rejects self-loops, duplicate pairs, out-of-range indices and
    /// non-finite weights.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("graph needs at least one node".into()));
        }
        let mut seen = HashSet::new();
        let mut stored = Vec::new();
        let mut adj = vec![Vec::new(); n];
        for (a, b, w) in edges {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if j >= n {
                return Err(Error::InvalidInstance(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if i == j {
                return Err(Error::InvalidInstance(format!("self-loop at node {i}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidInstance(format!("edge ({i}, {j}) has non-finite weight")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({i}, {j})")));
            }
            stored.push(Edge { i, j, w });
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        Ok(Graph { n, edges: stored, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Weight of `(a, b)`, zero if absent. Linear in the degree of `a`.
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.adj[a]
            .iter()
            .find(|&&(v, _)| v == b)
            .map_or(0.0, |&(_, w)| w)
    }

    /// Dense row of weights from `v`, zero for absent edges.
    pub fn weight_row(&self, v: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.n];
        for &(u, w) in &self.adj[v] {
            row[u] = w;
        }
        row
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn has_negative_weights(&self) -> bool {
        self.edges.iter().any(|e| e.w < 0.0)
    }
}

/// Free-function form of [`Graph::total_weight`].
pub fn total_weight(g: &Graph) -> f64 {
    g.total_weight()
}

/// Edge weight distribution.
///
/// Textual forms (used in configs and on the command line): `unit`, `u01`,
/// `uniform(a,b)`, `exp(mean)`, `normal(mean,var)`, `normal-sqrt-n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightSpec {
    Unit,
    Uniform { a: f64, b: f64 },
    Exponential { mean: f64 },
    Normal { mean: f64, var: f64 },
    /// Standard normal divided by `sqrt(n)`.
    NormalOverSqrtN,
}

impl WeightSpec {
    pub const U01: WeightSpec = WeightSpec::Uniform { a: 0.0, b: 1.0 };

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            WeightSpec::Unit | WeightSpec::NormalOverSqrtN => true,
            WeightSpec::Uniform { a, b } => a.is_finite() && b.is_finite() && a <= b,
            WeightSpec::Exponential { mean } => mean.is_finite() && mean > 0.0,
            WeightSpec::Normal { mean, var } => mean.is_finite() && var.is_finite() && var >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad weight distribution {self}")))
        }
    }

    fn sample(&self, n: usize, rng: &mut Rng64) -> f64 {
        match *self {
            WeightSpec::Unit => 1.0,
            WeightSpec::Uniform { a, b } => rng.uniform_in(a, b),
            WeightSpec::Exponential { mean } => rng.exponential(mean),
            WeightSpec::Normal { mean, var } => mean + var.sqrt() * rng.normal(),
            WeightSpec::NormalOverSqrtN => rng.normal() / (n as f64).sqrt(),
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WeightSpec::Unit => write!(f, "unit"),
            WeightSpec::Uniform { a, b } if a == 0.0 && b == 1.0 => write!(f, "u01"),
            WeightSpec::Uniform { a, b } => write!(f, "uniform({a:?},{b:?})"),
            WeightSpec::Exponential { mean } => write!(f, "exp({mean:?})"),
            WeightSpec::Normal { mean, var } => write!(f, "normal({mean:?},{var:?})"),
            WeightSpec::NormalOverSqrtN => write!(f, "normal-sqrt-n"),
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("unrecognized weight distribution '{s}'"));
        let spec = match s {
            "unit" => WeightSpec::Unit,
            "u01" => WeightSpec::U01,
            "normal-sqrt-n" => WeightSpec::NormalOverSqrtN,
            _ => {
                let open = s.find('(').ok_or_else(bad)?;
                let args = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
                let args: Vec<f64> = args
                    .split(',')
                    .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<_>>()?;
                match (&s[..open], args.as_slice()) {
                    ("uniform", &[a, b]) => WeightSpec::Uniform { a, b },
                    ("exp", &[mean]) => WeightSpec::Exponential { mean },
                    ("normal", &[mean, var]) => WeightSpec::Normal { mean, var },
                    _ => return Err(bad()),
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for WeightSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeightSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Complete graph with i.i.d. weights, drawn in `(i, j)` lexicographic order.
pub fn gen_complete(n: usize, spec: WeightSpec, seed: RngSeed) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidInstance(format!("complete graph needs n >= 2, got {n}")));
    }
    spec.validate()?;
    let mut rng = Rng64::new(seed);
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, spec.sample(n, &mut rng)));
        }
    }
    Graph::from_edges(n, edges)
}

/// Sherrington-Kirkpatrick couplings `g / sqrt(n)`, `g ~ N(0, 1)`, on the
/// complete graph. With the scale folded into the weights,
/// [`crate::cut::ising_energy`] is the SK Hamiltonian.
pub fn gen_sk(n: usize, seed: RngSeed) -> Result<Graph> {
    gen_complete(n, WeightSpec::NormalOverSqrtN, seed)
}

const PAIRING_ATTEMPTS: usize = 50;
const REPAIR_ROUNDS: usize = 20;

/// Random simple `k`-regular graph.
///
/// Stubs are paired uniformly (configuration model). Pairings with loops or
/// repeated edges are redrawn up to a fixed number of times; after that the
/// last pairing is repaired by random degree-preserving edge switches.
/// Weights are drawn afterwards in sorted edge order.
pub fn gen_regular(n: usize, k: usize, spec: WeightSpec, seed: RngSeed) -> Result<Graph> {
    if k >= n {
        return Err(Error::InvalidInstance(format!("degree {k} must be below n = {n}")));
    }
    if (n * k) % 2 == 1 {
        return Err(Error::InvalidInstance(format!("n * k = {} is odd", n * k)));
    }
    spec.validate()?;
    let mut rng = Rng64::new(seed);
    let mut pairs = Vec::new();
    for _ in 0..PAIRING_ATTEMPTS {
        pairs = random_pairing(n, k, &mut rng);
        if is_simple(&pairs) {
            return finish_regular(n, pairs, spec, &mut rng);
        }
    }
    for _ in 0..REPAIR_ROUNDS {
        if repair_pairing(&mut pairs, n, &mut rng) {
            return finish_regular(n, pairs, spec, &mut rng);
        }
        pairs = random_pairing(n, k, &mut rng);
    }
    Err(Error::InvalidInstance(format!(
        "could not sample a simple {k}-regular graph on {n} nodes"
    )))
}

fn random_pairing(n: usize, k: usize, rng: &mut Rng64) -> Vec<(usize, usize)> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    rng.shuffle(&mut stubs);
    stubs
        .chunks_exact(2)
        .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
        .collect()
}

fn is_simple(pairs: &[(usize, usize)]) -> bool {
    let mut seen = HashSet::with_capacity(pairs.len());
    pairs.iter().all(|&(a, b)| a != b && seen.insert((a, b)))
}

/// Switch bad pairs against random partners until the multigraph is simple.
/// Returns false if the switch budget runs out.
fn repair_pairing(pairs: &mut [(usize, usize)], n: usize, rng: &mut Rng64) -> bool {
    let m = pairs.len();
    if m < 2 {
        return is_simple(pairs);
    }
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for &p in pairs.iter() {
        *count.entry(p).or_default() += 1;
    }
    let is_bad = |p: (usize, usize), count: &HashMap<(usize, usize), usize>| p.0 == p.1 || count[&p] > 1;
    let budget = 1000 * (m + n);
    for _ in 0..budget {
        let Some(e) = (0..m).find(|&e| is_bad(pairs[e], &count)) else {
            return true;
        };
        let f = rng.index(m);
        if f == e {
            continue;
        }
        let (u, v) = pairs[e];
        let (x, y) = pairs[f];
        let (p, q) = if rng.below(2) == 0 { ((u, x), (v, y)) } else { ((u, y), (v, x)) };
        let p = (p.0.min(p.1), p.0.max(p.1));
        let q = (q.0.min(q.1), q.0.max(q.1));
        if p.0 == p.1 || q.0 == q.1 || p == q {
            continue;
        }
        if count.get(&p).copied().unwrap_or(0) > 0 || count.get(&q).copied().unwrap_or(0) > 0 {
            continue;
        }
        for old in [pairs[e], pairs[f]] {
            let c = count.get_mut(&old).unwrap();
            *c -= 1;
            if *c == 0 {
                count.remove(&old);
            }
        }
        pairs[e] = p;
        pairs[f] = q;
        *count.entry(p).or_default() += 1;
        *count.entry(q).or_default() += 1;
    }
    false
}

fn finish_regular(n: usize, mut pairs: Vec<(usize, usize)>, spec: WeightSpec, rng: &mut Rng64) -> Result<Graph> {
    pairs.sort_unstable();
    let edges: Vec<_> = pairs.into_iter().map(|(i, j)| (i, j, spec.sample(n, rng))).collect();
    Graph::from_edges(n, edges)
}

/// `G(n, p)` with unit weights; pairs visited in lexicographic order.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: RngSeed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::InvalidInstance("graph needs at least one node".into()));
    }
    let mut rng = Rng64::new(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.uniform() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Parse the edge-list format: a header `n m`, then `m` lines `i j w` with
/// `i < j`. Lines starting with `#` and blank lines are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(perr(hline, format!("expected header 'n m', got '{header}'")));
    }
    let n: usize = fields[0].parse().map_err(|_| perr(hline, format!("bad node count '{}'", fields[0])))?;
    let m: usize = fields[1].parse().map_err(|_| perr(hline, format!("bad edge count '{}'", fields[1])))?;
    if n == 0 {
        return Err(perr(hline, "node count must be at least 1".into()));
    }
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        if edges.len() == m {
            return Err(perr(line, format!("more than the {m} declared edges")));
        }
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(perr(line, format!("expected 'i j w', got '{l}'")));
        }
        let i: usize = f[0].parse().map_err(|_| perr(line, format!("bad node index '{}'", f[0])))?;
        let j: usize = f[1].parse().map_err(|_| perr(line, format!("bad node index '{}'", f[1])))?;
        let w: f64 = f[2].parse().map_err(|_| perr(line, format!("bad weight '{}'", f[2])))?;
        if i >= j || j >= n {
            return Err(perr(line, format!("need 0 <= i < j < {n}, got ({i}, {j})")));
        }
        if !w.is_finite() {
            return Err(perr(line, format!("non-finite weight '{}'", f[2])));
        }
        if !seen.insert((i, j)) {
            return Err(perr(line, format!("duplicate edge ({i}, {j})")));
        }
        edges.push((i, j, w));
    }
    if edges.len() != m {
        return Err(perr(
            text.lines().count().max(1),
            format!("declared {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(n, edges)
}

/// Render in the edge-list format. Weights use the shortest representation
/// that parses back to the same `f64`.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.num_edges());
    for e in g.edges() {
        out.push_str(&format!("{} {} {:?}\n", e.i, e.j, e.w));
    }
    out
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text)
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(format_edge_list(g).as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(g: &Graph) -> Vec<usize> {
        (0..g.n()).map(|v| g.degree(v)).collect()
    }

    #[test]
    fn complete_unit_triangle() {
        let g = gen_complete(3, WeightSpec::Unit, RngSeed(0)).unwrap();
        assert_eq!(g.num_edges(), 3);
        assert!(g.edges().iter().all(|e| e.w == 1.0));
    }

    #[test]
    fn complete_is_deterministic() {
        let a = gen_complete(6, WeightSpec::U01, RngSeed(11)).unwrap();
        let b = gen_complete(6, WeightSpec::U01, RngSeed(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(format_edge_list(&a), format_edge_list(&b));
    }

    #[test]
    fn complete_rejects_tiny() {
        assert!(matches!(gen_complete(1, WeightSpec::U01, RngSeed(0)), Err(Error::InvalidInstance(_))));
        assert!(gen_sk(1, RngSeed(0)).is_err());
    }

    #[test]
    fn uniform_weight_mean() {
        let g = gen_complete(100, WeightSpec::U01, RngSeed(5)).unwrap();
        let mean = g.total_weight() / g.num_edges() as f64;
        assert!((0.45..=0.55).contains(&mean), "mean {mean}");
    }

    #[test]
    fn sk_two_nodes_uses_first_normal() {
        let g = gen_sk(2, RngSeed(8)).unwrap();
        let mut rng = Rng64::new(RngSeed(8));
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.edges()[0].w, rng.normal() / 2f64.sqrt());
    }

    #[test]
    fn sk_moments() {
        let n = 200;
        let g = gen_sk(n, RngSeed(21)).unwrap();
        let xs: Vec<f64> = g.edges().iter().map(|e| e.w * (n as f64).sqrt()).collect();
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        assert!((0.8..=1.2).contains(&var), "var {var}");
        assert!(mean.abs() <= 4.0 / m.sqrt(), "mean {mean}");
    }

    #[test]
    fn regular_small_is_k4() {
        let g = gen_regular(4, 3, WeightSpec::Unit, RngSeed(3)).unwrap();
        assert_eq!(g.num_edges(), 6);
        assert_eq!(degrees(&g), vec![3; 4]);
    }

    #[test]
    fn regular_degrees_exact() {
        for seed in 0..20 {
            let g = gen_regular(20, 3, WeightSpec::Unit, RngSeed(seed)).unwrap();
            assert_eq!(degrees(&g), vec![3; 20]);
        }
        let g = gen_regular(100, 8, WeightSpec::U01, RngSeed(1)).unwrap();
        assert_eq!(g.num_edges(), 400);
        assert_eq!(degrees(&g), vec![8; 100]);
    }

    #[test]
    fn regular_rejects_bad_params() {
        assert!(gen_regular(5, 3, WeightSpec::Unit, RngSeed(0)).is_err());
        assert!(gen_regular(4, 4, WeightSpec::Unit, RngSeed(0)).is_err());
        let empty = gen_regular(6, 0, WeightSpec::Unit, RngSeed(0)).unwrap();
        assert_eq!(empty.num_edges(), 0);
    }

    #[test]
    fn erdos_renyi_extremes() {
        assert_eq!(gen_erdos_renyi(10, 0.0, RngSeed(0)).unwrap().num_edges(), 0);
        let full = gen_erdos_renyi(10, 1.0, RngSeed(0)).unwrap();
        assert_eq!(full.num_edges(), 45);
        assert!(full.edges().iter().all(|e| e.w == 1.0));
        assert!(matches!(gen_erdos_renyi(10, 1.5, RngSeed(0)), Err(Error::InvalidParameter(_))));
        assert!(gen_erdos_renyi(10, -0.1, RngSeed(0)).is_err());
    }

    #[test]
    fn erdos_renyi_edge_count() {
        let g = gen_erdos_renyi(120, 0.5, RngSeed(77)).unwrap();
        let sigma = (7140.0f64 * 0.25).sqrt();
        assert!((g.num_edges() as f64 - 3570.0).abs() <= 4.0 * sigma);
    }

    #[test]
    fn parse_header_example() {
        let g = parse_edge_list("3 2\n0 1 1.0\n1 2 0.5\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.weight(2, 1), 0.5);
        assert_eq!(g.weight(0, 2), 0.0);
    }

    #[test]
    fn parse_skips_comments() {
        let g = parse_edge_list("# a comment\n2 1\n# another\n0 1 2.5\n").unwrap();
        assert_eq!(g.total_weight(), 2.5);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let cases = [
            ("3 1\n0 3 1.0\n", 2),
            ("3 2\n0 1 1.0\n0 1 2.0\n", 3),
            ("3 1\n0 1 abc\n", 2),
            ("3 1\n1 0 1.0\n", 2),
            ("3 1\n0 1\n", 2),
            ("x 1\n", 1),
        ];
        for (text, line) in cases {
            match parse_edge_list(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
        assert!(parse_edge_list("3 2\n0 1 1.0\n").is_err());
        assert!(parse_edge_list("").is_err());
    }

    #[test]
    fn total_weight_cases() {
        assert_eq!(Graph::from_edges(3, []).unwrap().total_weight(), 0.0);
        assert_eq!(Graph::from_edges(2, [(0, 1, 0.3)]).unwrap().total_weight(), 0.3);
    }

    #[test]
    fn from_edges_validates() {
        assert!(Graph::from_edges(2, [(0, 0, 1.0)]).is_err());
        assert!(Graph::from_edges(2, [(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(Graph::from_edges(2, [(0, 1, f64::NAN)]).is_err());
        assert!(Graph::from_edges(0, []).is_err());
    }

    #[test]
    fn weight_spec_text_forms() {
        for s in ["unit", "u01", "uniform(-1.0,2.0)", "exp(1.5)", "normal(0.0,1.0)", "normal-sqrt-n"] {
            let spec: WeightSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("exp(-1)".parse::<WeightSpec>().is_err());
        assert!("normal(0,-1)".parse::<WeightSpec>().is_err());
        assert!("gamma(1)".parse::<WeightSpec>().is_err());
    }
}
