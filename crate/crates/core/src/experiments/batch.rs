use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::persist::{PerStartRow, ResultWriter};
use crate::adapt::{self, Solution, StartRecord, TiePolicy};
use crate::baselines::{exact_maxcut_with, gw_solve, local_search_random, sahni_gonzalez, GwParams, DEFAULT_EXACT_LIMIT};
use crate::cut::approx_ratio;
use crate::error::{Error, Result};
use crate::graph::{gen_complete, gen_erdos_renyi, gen_regular, gen_sk, Graph, WeightSpec};
use crate::par::{map_range, Parallelism};
use crate::rng::{fnv1a, mix, RngSeed};

/// A random instance family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Family {
    Complete { weights: WeightSpec },
    Sk,
    Regular { k: usize, weights: WeightSpec },
    Er { p: f64 },
}

impl Family {
    /// Family tag for the `family` column; `K` or `p` goes in its own column.
    pub fn tag(&self) -> String {
        match self {
            Family::Complete { weights } => format!("complete-{weights}"),
            Family::Sk => SK_TAG.into(),
            Family::Regular { weights, .. } => format!("regular-{weights}"),
            Family::Er { .. } => "er".into(),
        }
    }

    pub fn k_or_p(&self) -> String {
        match self {
            Family::Regular { k, .. } => k.to_string(),
            Family::Er { p } => format!("{p:?}"),
            _ => String::new(),
        }
    }

    /// Whether instances may carry negative weights.
    pub fn signed(&self) -> bool {
        match self {
            Family::Sk => true,
            Family::Complete { weights } | Family::Regular { weights, .. } => match *weights {
                WeightSpec::Unit | WeightSpec::Exponential { .. } => false,
                WeightSpec::Uniform { a, .. } => a < 0.0,
                WeightSpec::Normal { .. } | WeightSpec::NormalOverSqrtN => true,
            },
            Family::Er { .. } => false,
        }
    }

    pub fn generate(&self, n: usize, seed: RngSeed) -> Result<Graph> {
        match *self {
            Family::Complete { weights } => gen_complete(n, weights, seed),
            Family::Sk => gen_sk(n, seed),
            Family::Regular { k, weights } => gen_regular(n, k, weights, seed),
            Family::Er { p } => gen_erdos_renyi(n, p, seed),
        }
    }
}

/// Seed of instance `index` of size `n`:
/// `mix([master, fnv1a(tag + "/" + k_or_p), n, index])`.
pub fn instance_seed(master: RngSeed, family: &Family, n: usize, index: usize) -> RngSeed {
    let label = format!("{}/{}", family.tag(), family.k_or_p());
    RngSeed(mix(&[master.0, fnv1a(label.as_bytes()), n as u64, index as u64]))
}

/// A solver as named in configs and on the command line: `adapt-det`,
/// `adapt-rand`, `gw` or `gw:<rounds>`, `local`, `sg`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverSpec {
    AdaptDet,
    AdaptRand,
    Gw { rounds: usize },
    Local,
    SahniGonzalez,
}

impl SolverSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SolverSpec::AdaptDet => "adapt-det",
            SolverSpec::AdaptRand => "adapt-rand",
            SolverSpec::Gw { .. } => "gw",
            SolverSpec::Local => "local",
            SolverSpec::SahniGonzalez => "sg",
        }
    }

    pub fn params(&self) -> String {
        match self {
            SolverSpec::Gw { rounds } => format!("rounds={rounds}"),
            _ => String::new(),
        }
    }

    /// Run on `g`. Randomized solvers draw from `seed`; the deterministic
    /// sweep also returns its per-start records.
    pub fn run(&self, g: &Graph, seed: RngSeed, mode: Parallelism) -> Result<(Solution, Vec<StartRecord>)> {
        let policy = TiePolicy::LowestIndex;
        Ok(match *self {
            SolverSpec::AdaptDet => {
                let r = adapt::deterministic(g, &policy, mode)?;
                (r.best, r.per_start)
            }
            SolverSpec::AdaptRand => (adapt::randomized(g, seed, &policy)?, Vec::new()),
            SolverSpec::Gw { rounds } => (gw_solve(g, &GwParams::for_size(g.n(), rounds, seed))?, Vec::new()),
            SolverSpec::Local => (local_search_random(g, seed), Vec::new()),
            SolverSpec::SahniGonzalez => (sahni_gonzalez(g, seed)?, Vec::new()),
        })
    }
}

impl fmt::Display for SolverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverSpec::Gw { rounds } => write!(f, "gw:{rounds}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for SolverSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "adapt-det" => SolverSpec::AdaptDet,
            "adapt-rand" => SolverSpec::AdaptRand,
            "gw" => SolverSpec::Gw { rounds: 1 },
            "local" => SolverSpec::Local,
            "sg" => SolverSpec::SahniGonzalez,
            _ => {
                let rounds = s
                    .strip_prefix("gw:")
                    .and_then(|r| r.parse::<usize>().ok())
                    .filter(|&r| r >= 1)
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown solver '{s}'")))?;
                SolverSpec::Gw { rounds }
            }
        })
    }
}

impl Serialize for SolverSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SolverSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn default_limit() -> usize {
    DEFAULT_EXACT_LIMIT
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub instances: usize,
    pub solvers: Vec<SolverSpec>,
    pub master_seed: u64,
    /// Run exact enumeration on sizes up to `exact_limit`.
    #[serde(default)]
    pub exact: bool,
    #[serde(default = "default_limit")]
    pub exact_limit: usize,
}

impl BatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.instances == 0 || self.solvers.is_empty() {
            return Err(Error::InvalidParameter(
                "batch needs at least one size, instance and solver".into(),
            ));
        }
        Ok(())
    }
}

/// One (instance, solver) record.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceResult {
    pub family: String,
    pub n: usize,
    pub k_or_p: String,
    pub instance_seed: u64,
    pub solver: String,
    pub params: String,
    pub cut_value: f64,
    pub ising_energy: f64,
    pub exact_optimum: Option<f64>,
    pub ratio: Option<f64>,
    pub wall_time_s: f64,
    /// Per-start records of a deterministic sweep; empty otherwise.
    pub per_start: Vec<StartRecord>,
}

/// Family tag of spin-glass instances, whose Hamiltonian sums each
/// coupling once without the factor 1/2 of the cut Hamiltonian.
pub const SK_TAG: &str = "sk";

impl InstanceResult {
    /// Energy per node on the family's own Hamiltonian: `ising_energy / n`,
    /// doubled for spin-glass instances so that densities compare with the
    /// usual ground-state energy densities of that model.
    pub fn density(&self) -> f64 {
        let scale = if self.family == SK_TAG { 2.0 } else { 1.0 };
        scale * self.ising_energy / self.n as f64
    }
}

fn run_instance(config: &BatchConfig, n: usize, index: usize, mode: Parallelism) -> Result<Vec<InstanceResult>> {
    let fam = &config.family;
    let seed = instance_seed(RngSeed(config.master_seed), fam, n, index);
    let g = fam.generate(n, seed)?;
    let w = g.total_weight();
    let exact = if config.exact && n <= config.exact_limit {
        Some(exact_maxcut_with(&g, config.exact_limit, mode)?.optimum_cut)
    } else {
        None
    };
    let mut out = Vec::with_capacity(config.solvers.len());
    for solver in &config.solvers {
        let solver_seed = seed.derive_str(solver.name());
        let (sol, per_start) = match solver.run(&g, solver_seed, mode) {
            Ok(r) => r,
            Err(e) => {
                log::error!("{} n={n} instance={index}: {e}", solver);
                continue;
            }
        };
        let ratio = exact.and_then(|c| {
            if fam.signed() {
                approx_ratio(sol.ising_energy, w / 2.0 - c).ok()
            } else {
                approx_ratio(sol.cut_value, c).ok()
            }
        });
        out.push(InstanceResult {
            family: fam.tag(),
            n,
            k_or_p: fam.k_or_p(),
            instance_seed: seed.0,
            solver: solver.name().into(),
            params: solver.params(),
            cut_value: sol.cut_value,
            ising_energy: sol.ising_energy,
            exact_optimum: exact,
            ratio,
            wall_time_s: sol.wall_time_s,
            per_start,
        });
    }
    Ok(out)
}

/// Path of the per-start file written next to `results`.
pub fn per_start_path(results: &Path) -> PathBuf {
    results.with_extension("per_start.csv")
}

/// Generate every instance of the config, run every solver on it and
/// optionally write the results.
///
/// Rows are ordered by size (config order), instance index, then solver
/// (config order). Each size is computed as a block, possibly in parallel,
/// and appended to the CSV once complete. With an output path, a JSON
/// sidecar `<path>.json` records the config and crate version, and
/// per-start records of `adapt-det` go to `<stem>.per_start.csv`.
pub fn run_batch(config: &BatchConfig, mode: Parallelism, out: Option<&Path>) -> Result<Vec<InstanceResult>> {
    config.validate()?;
    let mut writer = match out {
        Some(path) => {
            let sidecar = serde_json::json!({
                "config": config,
                "version": env!("CARGO_PKG_VERSION"),
            });
            let side_path = PathBuf::from(format!("{}.json", path.display()));
            fs::write(&side_path, serde_json::to_string_pretty(&sidecar).unwrap())
                .map_err(|e| Error::io(&side_path, e))?;
            let per_start = config
                .solvers
                .contains(&SolverSpec::AdaptDet)
                .then(|| per_start_path(path));
            Some(ResultWriter::create(path, per_start.as_deref())?)
        }
        None => None,
    };
    let mut all = Vec::new();
    for &n in &config.sizes {
        let block: Vec<Vec<InstanceResult>> = map_range(mode, config.instances, |i| {
            run_instance(config, n, i, mode).unwrap_or_else(|e| {
                log::error!("instance n={n} index={i}: {e}");
                Vec::new()
            })
        });
        let rows: Vec<InstanceResult> = block.into_iter().flatten().collect();
        if let Some(w) = writer.as_mut() {
            w.append(&rows)?;
        }
        all.extend(rows);
    }
    Ok(all)
}

impl From<(&InstanceResult, &StartRecord)> for PerStartRow {
    fn from((r, s): (&InstanceResult, &StartRecord)) -> Self {
        PerStartRow {
            family: r.family.clone(),
            n: r.n,
            instance_seed: r.instance_seed,
            k: s.k,
            cut_value: s.cut_value,
            ising_energy: s.ising_energy,
            exact_optimum: r.exact_optimum,
        }
    }
}
