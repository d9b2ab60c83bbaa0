//! Mean approximation ratio from per-start ratios.
//!
//! For a threshold `a`, `Num(N; a)` counts the start nodes of an instance
//! whose energy ratio `E / E_min` is above `a`. Across instances of size
//! `N` the statistic `mean(Num) - std(Num)` is fitted linearly in `N`; the slope
//! `M(a)` says how the number of good starts grows with size. The
//! deterministic estimate is the last threshold before `M` turns negative,
//! the randomized one the last threshold before `M` drops below 1/2.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fit::{linear_fit, mean_std};
use super::persist::PerStartRow;
use crate::cut::approx_ratio;
use crate::error::{Error, Result};

/// Slope tolerance absorbing rounding in the least-squares fit.
const SLOPE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaMode {
    Deterministic,
    Randomized,
}

impl FromStr for AlphaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deterministic" => Ok(AlphaMode::Deterministic),
            "randomized" => Ok(AlphaMode::Randomized),
            _ => Err(Error::InvalidParameter(format!("unknown mode '{s}'"))),
        }
    }
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlphaMode::Deterministic => "deterministic",
            AlphaMode::Randomized => "randomized",
        })
    }
}

/// Approximation ratio of every start node of one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct PerStartInstance {
    pub n: usize,
    pub ratios: Vec<f64>,
}

impl PerStartInstance {
    /// Group per-start rows by instance. Rows without an exact optimum are
    /// rejected.
    ///
    /// Ratios are energy ratios `E / E_min`. With `C + E = W/2` the optimum
    /// energy is `E + C - C_max`, so the rows need no total weight.
    pub fn from_rows(rows: &[PerStartRow]) -> Result<Vec<Self>> {
        let mut by_instance: BTreeMap<(usize, u64, &str), Vec<f64>> = BTreeMap::new();
        for r in rows {
            let opt = r.exact_optimum.ok_or_else(|| {
                Error::Contract(format!("per-start row n={} seed={} has no exact optimum", r.n, r.instance_seed))
            })?;
            let e_min = r.ising_energy + r.cut_value - opt;
            by_instance
                .entry((r.n, r.instance_seed, r.family.as_str()))
                .or_default()
                .push(approx_ratio(r.ising_energy, e_min)?);
        }
        Ok(by_instance
            .into_iter()
            .map(|((n, _, _), ratios)| PerStartInstance { n, ratios })
            .collect())
    }

    fn count_above(&self, threshold: f64) -> usize {
        self.ratios.iter().filter(|&&a| a > threshold).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSweepResult {
    pub mode: AlphaMode,
    /// `(threshold, slope)` over the grid.
    pub grid: Vec<(f64, f64)>,
    pub alpha_bar: f64,
    pub alpha_bar_r: f64,
    /// Set when the slope never crosses zero (or 1/2) inside the grid and
    /// the value is a grid boundary.
    pub alpha_bar_at_boundary: bool,
    pub alpha_bar_r_at_boundary: bool,
}

impl ThresholdSweepResult {
    /// The estimate matching `mode`.
    pub fn headline(&self) -> f64 {
        match self.mode {
            AlphaMode::Deterministic => self.alpha_bar,
            AlphaMode::Randomized => self.alpha_bar_r,
        }
    }
}

/// Thresholds `lo, lo + step, ..., hi`.
pub fn threshold_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !lo.is_finite() || !hi.is_finite() || step.is_nan() || step <= 0.0 || hi < lo {
        return Err(Error::InvalidParameter(format!("bad grid [{lo}, {hi}] step {step}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    // Rounded so that grid points print and compare as their decimal values.
    Ok((0..count)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Last grid value before the first slope below `level`; the flag is set
/// when no crossing exists (or the very first slope is already below).
fn crossing(grid: &[(f64, f64)], level: f64) -> (f64, bool) {
    match grid.iter().position(|&(_, m)| m < level - SLOPE_TOL) {
        Some(0) => (grid[0].0, true),
        Some(i) => (grid[i - 1].0, false),
        None => (grid[grid.len() - 1].0, true),
    }
}

pub fn estimate_alpha_bar(data: &[PerStartInstance], thresholds: &[f64], mode: AlphaMode) -> Result<ThresholdSweepResult> {
    if thresholds.is_empty() {
        return Err(Error::InvalidParameter("empty threshold grid".into()));
    }
    if thresholds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("thresholds must be increasing".into()));
    }
    let mut by_n: BTreeMap<usize, Vec<&PerStartInstance>> = BTreeMap::new();
    for inst in data {
        by_n.entry(inst.n).or_default().push(inst);
    }
    if by_n.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 distinct sizes, got {}", by_n.len())));
    }
    let sizes: Vec<f64> = by_n.keys().map(|&n| n as f64).collect();
    let mut last_counts: Vec<Vec<usize>> = by_n.values().map(|v| vec![usize::MAX; v.len()]).collect();
    let mut grid = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let mut ys = Vec::with_capacity(sizes.len());
        for (insts, last) in by_n.values().zip(last_counts.iter_mut()) {
            let counts: Vec<usize> = insts.iter().map(|inst| inst.count_above(t)).collect();
            if counts.iter().zip(last.iter()).any(|(c, l)| c > l) {
                return Err(Error::Contract(format!("start count increased at threshold {t}")));
            }
            let xs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            let (mean, std) = mean_std(&xs);
            ys.push(mean - std);
            *last = counts;
        }
        let (slope, _, _) = linear_fit(&sizes, &ys)?;
        grid.push((t, slope));
    }
    let (alpha_bar, alpha_bar_at_boundary) = crossing(&grid, 0.0);
    let (alpha_bar_r, alpha_bar_r_at_boundary) = crossing(&grid, 0.5);
    Ok(ThresholdSweepResult {
        mode,
        grid,
        alpha_bar,
        alpha_bar_r,
        alpha_bar_at_boundary,
        alpha_bar_r_at_boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        threshold_grid(0.88, 1.0, 0.0005).unwrap()
    }

    #[test]
    fn rows_become_energy_ratios() {
        // W/2 = 5 and C_max = 8, so E_min = -3.
        let row = |seed, k, cut: f64| PerStartRow {
            family: "complete-u01".into(),
            n: 4,
            instance_seed: seed,
            k,
            cut_value: cut,
            ising_energy: 5.0 - cut,
            exact_optimum: Some(8.0),
        };
        let data = PerStartInstance::from_rows(&[row(1, 0, 8.0), row(1, 1, 7.0), row(2, 0, 6.5)]).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data[0].ratios.len(), 2);
        assert!((data[0].ratios[0] - 1.0).abs() < 1e-12);
        assert!((data[0].ratios[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((data[1].ratios[0] - 0.5).abs() < 1e-12);
        let mut missing = row(3, 0, 6.0);
        missing.exact_optimum = None;
        assert!(matches!(PerStartInstance::from_rows(&[missing]), Err(Error::Contract(_))));
    }

    #[test]
    fn grid_shape() {
        let g = grid();
        assert_eq!(g.len(), 241);
        assert!((g[240] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_optimal_starts_reach_the_top() {
        let data: Vec<PerStartInstance> = (10..=20)
            .step_by(2)
            .flat_map(|n| (0..5).map(move |_| PerStartInstance { n, ratios: vec![1.0; n] }))
            .collect();
        let r = estimate_alpha_bar(&data, &grid(), AlphaMode::Deterministic).unwrap();
        assert_eq!(r.alpha_bar, 1.0);
        assert!(r.alpha_bar_at_boundary);
        // Nothing lies above 1, so the slope drops to zero at the last point.
        assert!((r.alpha_bar_r - 0.9995).abs() < 1e-12);
        assert!(!r.alpha_bar_r_at_boundary);
    }

    #[test]
    fn crossings_inside_grid() {
        // m = 9 - n/20 + i starts at 0.95, n/2 at 0.92, the rest at 0.9.
        // Slopes: 1 below 0.9, 0.45 up to 0.92, -0.05 up to 0.95.
        let data: Vec<PerStartInstance> = [20, 40, 60]
            .iter()
            .flat_map(|&n| {
                (0..3).map(move |i| {
                    let m = 9 - n / 20 + i;
                    let mut ratios = vec![0.9; n];
                    ratios[..m].fill(0.95);
                    ratios[m..m + n / 2].fill(0.92);
                    PerStartInstance { n, ratios }
                })
            })
            .collect();
        let r = estimate_alpha_bar(&data, &grid(), AlphaMode::Randomized).unwrap();
        assert!((r.alpha_bar - 0.9195).abs() < 1e-9, "{}", r.alpha_bar);
        assert!((r.alpha_bar_r - 0.8995).abs() < 1e-9, "{}", r.alpha_bar_r);
        assert!(!r.alpha_bar_at_boundary && !r.alpha_bar_r_at_boundary);
        assert_eq!(r.headline(), r.alpha_bar_r);
    }

    #[test]
    fn one_size_is_an_error() {
        let data = vec![PerStartInstance { n: 10, ratios: vec![1.0; 10] }];
        assert!(estimate_alpha_bar(&data, &grid(), AlphaMode::Deterministic).is_err());
    }
}
