//! Time-to-solution measurement and log-log scaling fits.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::batch::{instance_seed, Family, SolverSpec};
use super::fit::{linear_fit, mean_std};
use crate::error::{Error, Result};
use crate::par::Parallelism;
use crate::rng::RngSeed;

/// Measurements shorter than this are repeated and averaged.
pub const MIN_MEASUREMENT_S: f64 = 1e-3;
const MAX_REPEATS: u32 = 100_000;

/// Seconds per call of `f`, measured on a monotonic clock after one
/// discarded warm-up call. Calls faster than [`MIN_MEASUREMENT_S`] are
/// repeated in a batch and averaged.
pub fn time_solver<F: FnMut()>(mut f: F) -> f64 {
    let t0 = Instant::now();
    f();
    let warm = t0.elapsed().as_secs_f64();
    let reps = if warm >= MIN_MEASUREMENT_S {
        1
    } else {
        ((MIN_MEASUREMENT_S / warm.max(1e-9)).ceil() as u32).clamp(1, MAX_REPEATS)
    };
    if reps > 1 {
        log::debug!("call took {warm:.2e} s, batching {reps} repetitions");
    }
    let t0 = Instant::now();
    for _ in 0..reps {
        f();
    }
    t0.elapsed().as_secs_f64() / reps as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsRow {
    pub n: usize,
    pub solver: String,
    pub mean_s: f64,
    pub std_s: f64,
    pub instances: usize,
}

/// Exponent `p` of `time ~ c * n^p`, by least squares on log-log axes.
/// Needs at least three sizes spanning a factor of four.
pub fn fit_exponent(rows: &[TtsRow]) -> Result<f64> {
    let lo = rows.iter().map(|r| r.n).min().unwrap_or(0);
    let hi = rows.iter().map(|r| r.n).max().unwrap_or(0);
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 || hi < 4 * lo.max(1) {
        return Err(Error::Fit(format!(
            "need at least 3 sizes spanning 4x, got {} in [{lo}, {hi}]",
            sizes.len()
        )));
    }
    if rows.iter().any(|r| r.mean_s.is_nan() || r.mean_s <= 0.0) {
        return Err(Error::Fit("non-positive mean time".into()));
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_s.ln()).collect();
    Ok(linear_fit(&xs, &ys)?.0)
}

/// Time `run` on `instances` prepared inputs per size. Preparation is not
/// timed. Returns one row per size labelled `solver`.
pub fn time_sizes<T>(
    solver: &str,
    sizes: &[usize],
    instances: usize,
    mut prepare: impl FnMut(usize, usize) -> Result<T>,
    mut run: impl FnMut(&T),
) -> Result<Vec<TtsRow>> {
    if instances == 0 {
        return Err(Error::InvalidParameter("need at least one instance".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut times = Vec::with_capacity(instances);
        for i in 0..instances {
            let input = prepare(n, i)?;
            times.push(time_solver(|| run(&input)));
        }
        let (mean_s, std_s) = mean_std(&times);
        rows.push(TtsRow {
            n,
            solver: solver.to_string(),
            mean_s,
            std_s,
            instances,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsConfig {
    pub family: Family,
    pub sizes: Vec<usize>,
    pub instances: usize,
    pub solvers: Vec<SolverSpec>,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TtsReport {
    pub rows: Vec<TtsRow>,
    /// Scaling exponent per solver; absent when the sizes cannot support a
    /// fit.
    pub exponents: BTreeMap<String, f64>,
}

/// Time every solver on every generated instance, one call at a time and
/// single threaded.
pub fn tts_benchmark(config: &TtsConfig) -> Result<TtsReport> {
    let mut rows = Vec::new();
    let mut exponents = BTreeMap::new();
    let master = RngSeed(config.master_seed);
    for solver in &config.solvers {
        let label = solver.to_string();
        let solver_rows = time_sizes(
            &label,
            &config.sizes,
            config.instances,
            |n, i| {
                let seed = instance_seed(master, &config.family, n, i);
                Ok((config.family.generate(n, seed)?, seed.derive_str(solver.name())))
            },
            |(g, seed)| {
                if let Err(e) = solver.run(g, *seed, Parallelism::Sequential) {
                    log::error!("{label} n={}: {e}", g.n());
                }
            },
        )?;
        if solver_rows.iter().all(|r| r.mean_s < MIN_MEASUREMENT_S) {
            log::warn!("{label}: every call is below timer resolution; times are averages over batched repetitions");
        }
        match fit_exponent(&solver_rows) {
            Ok(p) => {
                exponents.insert(label, p);
            }
            Err(e) => log::warn!("{label}: no exponent fit: {e}"),
        }
        rows.extend(solver_rows);
    }
    Ok(TtsReport { rows, exponents })
}
