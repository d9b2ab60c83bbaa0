use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::batch::InstanceResult;
use crate::error::{Error, Result};

/// Fraction of results whose energy matches the exact optimum within `tol`.
///
/// Energies and cut values differ by the same constant `W/2`, so the energy
/// gap equals the cut gap `exact_optimum - cut_value`.
pub fn success_rate(results: &[InstanceResult], tol: f64) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::Contract("success rate of an empty batch".into()));
    }
    let mut hits = 0usize;
    for r in results {
        let opt = r.exact_optimum.ok_or_else(|| {
            Error::Contract(format!("result n={} seed={} has no exact optimum", r.n, r.instance_seed))
        })?;
        if (opt - r.cut_value).abs() < tol {
            hits += 1;
        }
    }
    Ok(hits as f64 / results.len() as f64)
}

/// Mean and sample standard deviation of the energy density at one size
/// (see [`InstanceResult::density`]).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Per-size energy densities, averaged per instance first. Sorted by `n`.
pub fn density_table(results: &[InstanceResult]) -> Vec<DensityPoint> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in results {
        by_n.entry(r.n).or_default().push(r.density());
    }
    by_n.into_iter()
        .map(|(n, xs)| {
            let (mean, std) = mean_std(&xs);
            DensityPoint {
                n,
                mean,
                std,
                count: xs.len(),
            }
        })
        .collect()
}

/// Ordinary least squares `y = slope * x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Fit(format!("need at least two points, got {}", xs.len())));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return Err(Error::Fit("design is rank deficient (all x equal)".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok((slope, intercept, (rss / m).sqrt()))
}

/// `mean density = q * N^(-2/3) + limit_value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub q: f64,
    pub limit_value: f64,
    pub residual: f64,
    pub n_range: (usize, usize),
}

impl FitResult {
    pub fn from_points(points: &[DensityPoint]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Fit(format!("need at least 3 distinct sizes, got {}", points.len())));
        }
        let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).powf(-2.0 / 3.0)).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.mean).collect();
        let (q, limit_value, residual) = linear_fit(&xs, &ys)?;
        Ok(FitResult {
            q,
            limit_value,
            residual,
            n_range: (points[0].n, points[points.len() - 1].n),
        })
    }
}

/// Fit the finite-size model to the per-size mean densities with
/// `lo <= n <= hi`.
pub fn fit_density(results: &[InstanceResult], n_range: (usize, usize)) -> Result<FitResult> {
    let points: Vec<DensityPoint> = density_table(results)
        .into_iter()
        .filter(|p| p.n >= n_range.0 && p.n <= n_range.1)
        .collect();
    FitResult::from_points(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(n: usize, energy: f64, exact: Option<f64>, cut: f64) -> InstanceResult {
        InstanceResult {
            family: "sk".into(),
            n,
            k_or_p: String::new(),
            instance_seed: 0,
            solver: "adapt-det".into(),
            params: String::new(),
            cut_value: cut,
            ising_energy: energy,
            exact_optimum: exact,
            ratio: None,
            wall_time_s: 0.0,
            per_start: Vec::new(),
        }
    }

    #[test]
    fn exact_model_recovery() {
        let rs: Vec<InstanceResult> = [40, 60, 100, 140, 200]
            .iter()
            .map(|&n| {
                let d = 1.3 * (n as f64).powf(-2.0 / 3.0) - 0.74;
                result(n, d * n as f64 / 2.0, None, 0.0)
            })
            .collect();
        let fit = fit_density(&rs, (0, usize::MAX)).unwrap();
        assert!((fit.q - 1.3).abs() < 1e-9);
        assert!((fit.limit_value + 0.74).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
        assert_eq!(fit.n_range, (40, 200));
    }

    #[test]
    fn single_size_is_an_error() {
        let rs = vec![result(40, -1.0, None, 0.0), result(40, -2.0, None, 0.0)];
        assert!(matches!(fit_density(&rs, (0, 100)), Err(Error::Fit(_))));
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn success_rate_cases() {
        let rs = vec![result(5, 0.0, Some(6.0), 6.0), result(5, 0.0, Some(6.0), 5.0)];
        assert_eq!(success_rate(&rs, 1e-10).unwrap(), 0.5);
        assert_eq!(success_rate(&rs[..1], 1e-10).unwrap(), 1.0);
        let missing = vec![result(5, 0.0, None, 6.0)];
        assert!(matches!(success_rate(&missing, 1e-10), Err(Error::Contract(_))));
    }

    #[test]
    fn densities_average_per_instance() {
        // Spin-glass energies count each coupling once: twice `ising_energy`.
        let rs = vec![result(10, -3.5, None, 0.0), result(10, -4.0, None, 0.0), result(20, -7.5, None, 0.0)];
        let t = density_table(&rs);
        assert_eq!(t.len(), 2);
        assert!((t[0].mean + 0.75).abs() < 1e-12);
        assert!((t[0].std - (0.005f64).sqrt()).abs() < 1e-12);
        assert_eq!(t[1].count, 1);
    }
}
