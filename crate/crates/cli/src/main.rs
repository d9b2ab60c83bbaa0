//! `cliffcut` command-line tool.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors
//! (including failed verification).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cliffcut::adapt::{run_from, GateRecord, Side, StartRecord};
use cliffcut::baselines::{exact_maxcut_with, gw_solve, local_search_random, sahni_gonzalez, GwParams};
use cliffcut::experiments::{
    cnot_count, density_table, estimate_alpha_bar, fit_density, read_per_start, read_results, run_batch,
    threshold_grid, tts_benchmark, AlphaMode, BatchConfig, PerStartInstance, Topology, TtsConfig,
};
use cliffcut::graph::{gen_complete, gen_erdos_renyi, gen_regular, gen_sk, read_edge_list, write_edge_list};
use cliffcut::stab::verify_solution;
use cliffcut::{deterministic, randomized, Graph, Parallelism, RngSeed, Solution, TiePolicy, WeightSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "cliffcut", version, about = "MaxCut approximation with greedy Clifford-circuit growth")]
struct Cli {
    /// Worker threads for parallel work; defaults to all available cores.
    #[arg(long, global = true, env = "CLIFFCUT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random instance as an edge-list file.
    Gen(GenArgs),
    /// Solve an instance and print the solution as JSON.
    Solve(SolveArgs),
    /// Exact maximum cut by exhaustive enumeration.
    Exact(ExactArgs),
    /// Replay a solution's gate trace on a stabilizer tableau.
    Verify(VerifyArgs),
    /// Run a batch experiment described by a JSON config.
    Batch(ConfigArgs),
    /// Fit mean energy densities to `q * N^(-2/3) + limit`.
    Fit(FitArgs),
    /// Estimate mean approximation ratios from per-start results.
    AlphaBar(AlphaArgs),
    /// Measure time to solution and fit scaling exponents.
    Tts(ConfigArgs),
    /// Count the CNOT gates of the solution circuit.
    Cnot(CnotArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenFamily {
    Complete,
    Sk,
    Regular,
    Er,
}

#[derive(Args, Debug)]
struct GenArgs {
    family: GenFamily,
    #[arg(long)]
    n: usize,
    /// Weight distribution: unit, u01, uniform(a,b), exp(mean),
    /// normal(mean,var) or normal-sqrt-n.
    #[arg(long)]
    dist: Option<String>,
    /// Degree of regular graphs.
    #[arg(long)]
    k: Option<usize>,
    /// Edge probability of Erdos-Renyi graphs.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SolverName {
    AdaptDet,
    AdaptRand,
    Gw,
    Local,
    Sg,
}

#[derive(Args, Debug)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "adapt-det")]
    solver: SolverName,
    /// Hyperplane roundings for `gw`.
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// With `adapt-det`, also output the result of every start node.
    #[arg(long)]
    per_start: bool,
    /// Run the greedy growth once from this start node.
    #[arg(long, conflicts_with = "per_start")]
    start: Option<usize>,
    /// Tie-break script for `--start`, e.g. `j:3,j:0,k:4`: the first entry
    /// names the paired node, later ones the node and the side it joins.
    #[arg(long, requires = "start")]
    script: Option<String>,
    /// Human-readable summary instead of JSON.
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExactArgs {
    input: PathBuf,
    #[arg(long, default_value_t = cliffcut::baselines::DEFAULT_EXACT_LIMIT)]
    limit: usize,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    input: PathBuf,
    /// Solution JSON as written by `solve`.
    solution: PathBuf,
    /// Largest graph the oracle accepts.
    #[arg(long, default_value_t = 256)]
    max_n: usize,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Model {
    /// `q * N^(-2/3) + limit`.
    Parisi,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FitArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Results CSV written by `batch`.
    #[arg(long = "in")]
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Only fit rows of this solver.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pretty: bool,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct AlphaArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Per-start CSV written by `batch`.
    #[arg(long = "in")]
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    /// deterministic or randomized.
    #[arg(long)]
    mode: Option<AlphaMode>,
    #[arg(long)]
    grid_lo: Option<f64>,
    #[arg(long)]
    grid_hi: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pretty: bool,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CnotArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// all-to-all or linear.
    #[arg(long)]
    topology: Option<Topology>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error carrying its exit code.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<cliffcut::Error> for Failure {
    fn from(e: cliffcut::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let mode = configure_threads(cli.threads)?;
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a, mode),
        Command::Exact(a) => cmd_exact(a, mode),
        Command::Verify(a) => cmd_verify(a),
        Command::Batch(a) => cmd_batch(a, mode),
        Command::Fit(a) => cmd_fit(a),
        Command::AlphaBar(a) => cmd_alpha(a),
        Command::Tts(a) => cmd_tts(a),
        Command::Cnot(a) => cmd_cnot(a),
    }
}

fn configure_threads(threads: Option<usize>) -> Result<Parallelism, Failure> {
    if threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    #[cfg(feature = "parallel")]
    {
        if let Some(t) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| Failure::Runtime(e.into()))?;
        }
        Ok(if threads == Some(1) {
            Parallelism::Sequential
        } else {
            Parallelism::Parallel
        })
    }
    #[cfg(not(feature = "parallel"))]
    {
        if threads.is_some_and(|t| t > 1) {
            log::warn!("built without the parallel feature; running single threaded");
        }
        Ok(Parallelism::Sequential)
    }
}

/// The given seed, or a fresh one from OS entropy, reported on stderr so
/// the run can be repeated.
fn seed_or_entropy(seed: Option<u64>) -> RngSeed {
    RngSeed(seed.unwrap_or_else(|| {
        let s: u64 = rand::random();
        eprintln!("seed: {s}");
        s
    }))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { stdout.write_all(b"\n") })
                .context("writing to stdout")?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output")
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Usage)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::Usage)
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    read_edge_list(path).map_err(|e| Failure::Runtime(anyhow!(e)))
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let dist = |default: WeightSpec| -> Result<WeightSpec, Failure> {
        match &a.dist {
            Some(s) => s.parse().map_err(|e: cliffcut::Error| usage(e.to_string())),
            None => Ok(default),
        }
    };
    let g = match a.family {
        GenFamily::Complete => {
            let d = dist(WeightSpec::U01)?;
            let seed = seed_or_entropy(a.seed);
            gen_complete(a.n, d, seed)
        }
        GenFamily::Sk => {
            if a.dist.is_some() {
                return Err(usage("sk instances have fixed weights; drop --dist"));
            }
            gen_sk(a.n, seed_or_entropy(a.seed))
        }
        GenFamily::Regular => {
            let k = a.k.ok_or_else(|| usage("regular graphs need --k"))?;
            let d = dist(WeightSpec::Unit)?;
            gen_regular(a.n, k, d, seed_or_entropy(a.seed))
        }
        GenFamily::Er => {
            let p = a.p.ok_or_else(|| usage("erdos-renyi graphs need --p"))?;
            if a.dist.is_some() {
                return Err(usage("erdos-renyi graphs are unweighted; drop --dist"));
            }
            gen_erdos_renyi(a.n, p, seed_or_entropy(a.seed))
        }
    }
    .map_err(|e| usage(e.to_string()))?;
    match a.out {
        Some(path) => write_edge_list(&g, &path)?,
        None => emit(None, &cliffcut::graph::format_edge_list(&g))?,
    }
    Ok(())
}

fn parse_script(s: &str) -> Result<Vec<GateRecord>, Failure> {
    s.split(',')
        .map(|item| {
            let (side, node) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| usage(format!("script entry '{item}' is not side:node")))?;
            let side = match side {
                "k" | "K" => Side::K,
                "j" | "J" => Side::J,
                _ => return Err(usage(format!("unknown side '{side}' in script"))),
            };
            let node = node
                .parse()
                .map_err(|_| usage(format!("bad node '{node}' in script")))?;
            Ok(GateRecord::new(side, node))
        })
        .collect()
}

#[derive(Serialize)]
struct PerStartOutput<'a> {
    solution: &'a Solution,
    per_start: &'a [StartRecord],
}

fn summary(s: &Solution) -> String {
    let (a, b) = s.assignment.sides();
    let mut text = format!(
        "solver       {}\ncut value    {}\nenergy       {}\nassignment   {}\nsides        {:?} | {:?}\n",
        s.solver, s.cut_value, s.ising_energy, s.assignment, a, b
    );
    if let Some(k) = s.start_node {
        text += &format!("start node   {k}\n");
    }
    if let Some(seed) = s.seed {
        text += &format!("seed         {seed}\n");
    }
    if let Some(w) = &s.warning {
        text += &format!("warning      {w}\n");
    }
    text += &format!("time         {:.6} s\n", s.wall_time_s);
    text
}

fn cmd_solve(a: SolveArgs, mode: Parallelism) -> Outcome {
    let adapt = matches!(a.solver, SolverName::AdaptDet | SolverName::AdaptRand);
    if a.per_start && a.solver != SolverName::AdaptDet {
        return Err(usage("--per-start applies to adapt-det only"));
    }
    if a.start.is_some() && !adapt {
        return Err(usage("--start applies to the adapt solvers only"));
    }
    if a.rounds == 0 {
        return Err(usage("--rounds must be at least 1"));
    }
    let script = a.script.as_deref().map(parse_script).transpose()?;
    let g = load_graph(&a.input)?;
    if let Some(k) = a.start {
        if k >= g.n() {
            return Err(usage(format!("--start {k} out of range for {} nodes", g.n())));
        }
    }
    let mut per_start = Vec::new();
    let solution = match (a.solver, a.start) {
        (_, Some(k)) => {
            let policy = script.map(TiePolicy::Scripted).unwrap_or_default();
            run_from(&g, k, &policy)?
        }
        (SolverName::AdaptDet, None) => {
            let r = deterministic(&g, &TiePolicy::LowestIndex, mode)?;
            per_start = r.per_start;
            r.best
        }
        (SolverName::AdaptRand, None) => randomized(&g, seed_or_entropy(a.seed), &TiePolicy::LowestIndex)?,
        (SolverName::Gw, None) => gw_solve(&g, &GwParams::for_size(g.n(), a.rounds, seed_or_entropy(a.seed)))?,
        (SolverName::Local, None) => local_search_random(&g, seed_or_entropy(a.seed)),
        (SolverName::Sg, None) => sahni_gonzalez(&g, seed_or_entropy(a.seed))?,
    };
    let text = if a.pretty {
        let mut t = summary(&solution);
        if a.per_start {
            for r in &per_start {
                t += &format!("start {:>4}  cut {}  energy {}\n", r.k, r.cut_value, r.ising_energy);
            }
        }
        t
    } else if a.per_start {
        to_json(&PerStartOutput {
            solution: &solution,
            per_start: &per_start,
        })
    } else {
        to_json(&solution)
    };
    emit(a.out.as_deref(), &text)
}

fn cmd_exact(a: ExactArgs, mode: Parallelism) -> Outcome {
    let g = load_graph(&a.input)?;
    let r = exact_maxcut_with(&g, a.limit, mode)?;
    let text = if a.pretty {
        format!(
            "optimum cut  {}\nenergy       {}\nwitness      {}\nevaluated    {}\n",
            r.optimum_cut, r.optimum_energy, r.witness, r.evaluated
        )
    } else {
        to_json(&r)
    };
    emit(None, &text)
}

/// A solution file, either a bare solution or `solve --per-start` output.
#[derive(Deserialize)]
#[serde(untagged)]
enum SolutionFile {
    Wrapped { solution: Solution },
    Bare(Solution),
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let g = load_graph(&a.input)?;
    if g.n() > a.max_n {
        return Err(usage(format!(
            "graph has {} nodes, above the oracle cap of {} (raise with --max-n)",
            g.n(),
            a.max_n
        )));
    }
    let s = match read_json::<SolutionFile>(&a.solution)? {
        SolutionFile::Wrapped { solution } | SolutionFile::Bare(solution) => solution,
    };
    let v = verify_solution(&g, &s);
    let text = if a.pretty {
        match (&v.diagnostic, &v.replayed) {
            (None, Some(cut)) => {
                let (x, y) = cut.sides();
                format!("verified: cut {} with sides {x:?} | {y:?}\n", s.cut_value)
            }
            _ => format!("verification failed: {}\n", v.diagnostic.as_deref().unwrap_or("unknown")),
        }
    } else {
        to_json(&serde_json::json!({
            "passed": v.passed,
            "diagnostic": v.diagnostic,
            "replayed": v.replayed.as_ref().map(|c| c.to_string()),
        }))
    };
    emit(None, &text)?;
    if v.passed {
        Ok(())
    } else {
        Err(Failure::Runtime(anyhow!(v.diagnostic.unwrap_or_default())))
    }
}

fn cmd_batch(a: ConfigArgs, mode: Parallelism) -> Outcome {
    let config: BatchConfig = read_json(&a.config)?;
    config.validate().map_err(|e| usage(e.to_string()))?;
    let out = a.out.ok_or_else(|| usage("batch needs --out for the results CSV"))?;
    let rows = run_batch(&config, mode, Some(&out))?;
    eprintln!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

/// Values from a JSON config file; explicit flags take precedence over
/// them at the call site.
fn merge_config<T: DeserializeOwned + Default>(config: Option<&Path>) -> Result<T, Failure> {
    match config {
        Some(p) => read_json(p),
        None => Ok(T::default()),
    }
}

#[derive(Serialize)]
struct SolverFit {
    solver: String,
    fit: cliffcut::experiments::FitResult,
    table: Vec<cliffcut::experiments::DensityPoint>,
}

fn cmd_fit(flags: FitArgs) -> Outcome {
    let cfg: FitArgs = merge_config(flags.config.as_deref())?;
    let input = flags.input.or(cfg.input).ok_or_else(|| usage("fit needs --in"))?;
    let _model = flags.model.or(cfg.model).unwrap_or(Model::Parisi);
    let range = (
        flags.n_min.or(cfg.n_min).unwrap_or(0),
        flags.n_max.or(cfg.n_max).unwrap_or(usize::MAX),
    );
    let solver = flags.solver.or(cfg.solver);
    let out = flags.out.or(cfg.out);
    let rows = read_results(&input)?;
    let mut solvers: Vec<String> = rows.iter().map(|r| r.solver.clone()).collect();
    solvers.sort();
    solvers.dedup();
    if let Some(s) = &solver {
        if !solvers.contains(s) {
            return Err(usage(format!("no rows for solver '{s}'")));
        }
        solvers = vec![s.clone()];
    }
    let mut fits = Vec::new();
    for s in solvers {
        let subset: Vec<_> = rows.iter().filter(|r| r.solver == s).cloned().collect();
        let fit = fit_density(&subset, range)?;
        let table = density_table(&subset)
            .into_iter()
            .filter(|p| p.n >= range.0 && p.n <= range.1)
            .collect();
        fits.push(SolverFit { solver: s, fit, table });
    }
    let text = if flags.pretty {
        fits.iter()
            .map(|f| {
                format!(
                    "{}: q = {:.6}, limit = {:.6}, residual = {:.3e}, N in [{}, {}]\n",
                    f.solver, f.fit.q, f.fit.limit_value, f.fit.residual, f.fit.n_range.0, f.fit.n_range.1
                )
            })
            .collect()
    } else {
        to_json(&fits)
    };
    emit(out.as_deref(), &text)
}

fn cmd_alpha(flags: AlphaArgs) -> Outcome {
    let cfg: AlphaArgs = merge_config(flags.config.as_deref())?;
    let input = flags.input.or(cfg.input).ok_or_else(|| usage("alpha-bar needs --in"))?;
    let mode = flags.mode.or(cfg.mode).unwrap_or(AlphaMode::Deterministic);
    let grid = threshold_grid(
        flags.grid_lo.or(cfg.grid_lo).unwrap_or(0.88),
        flags.grid_hi.or(cfg.grid_hi).unwrap_or(1.0),
        flags.grid_step.or(cfg.grid_step).unwrap_or(0.0005),
    )
    .map_err(|e| usage(e.to_string()))?;
    let out = flags.out.or(cfg.out);
    let rows = read_per_start(&input)?;
    let data = PerStartInstance::from_rows(&rows)?;
    let r = estimate_alpha_bar(&data, &grid, mode)?;
    let text = if flags.pretty {
        let flag = |b: bool| if b { " (grid boundary)" } else { "" };
        format!(
            "alpha_bar   {:.4}{}\nalpha_bar_r {:.4}{}\n",
            r.alpha_bar,
            flag(r.alpha_bar_at_boundary),
            r.alpha_bar_r,
            flag(r.alpha_bar_r_at_boundary)
        )
    } else {
        to_json(&r)
    };
    emit(out.as_deref(), &text)
}

fn cmd_tts(a: ConfigArgs) -> Outcome {
    let config: TtsConfig = read_json(&a.config)?;
    if config.sizes.is_empty() || config.instances == 0 || config.solvers.is_empty() {
        return Err(usage("tts config needs sizes, instances and solvers"));
    }
    let report = tts_benchmark(&config)?;
    emit(a.out.as_deref(), &to_json(&report))
}

fn cmd_cnot(flags: CnotArgs) -> Outcome {
    let cfg: CnotArgs = merge_config(flags.config.as_deref())?;
    let n = flags.n.or(cfg.n).ok_or_else(|| usage("cnot needs --n"))?;
    let topology = flags.topology.or(cfg.topology).unwrap_or(Topology::AllToAll);
    let count = cnot_count(n, topology).map_err(|e| usage(e.to_string()))?;
    emit(flags.out.or(cfg.out).as_deref(), &count.to_string())
}
