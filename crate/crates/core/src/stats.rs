//! Small statistics helpers for trial aggregation and test oracles.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::statistics::Statistics;

use crate::error::{Error, Result};

/// Mean, sample standard deviation and 95% normal confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub ci95: f64,
    pub count: usize,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let count = xs.len();
    let mean = if count == 0 { f64::NAN } else { xs.mean() };
    let std = if count < 2 { 0.0 } else { xs.std_dev() };
    Summary {
        mean,
        std,
        ci95: 1.96 * std / (count.max(1) as f64).sqrt(),
        count,
    }
}

/// Pearson statistic `Σ (obs - exp)² / exp` against a uniform expectation.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

/// Upper `alpha` quantile of the chi-square distribution.
pub fn chi_square_critical(dof: usize, alpha: f64) -> Result<f64> {
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(dist.inverse_cdf(1.0 - alpha))
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("slope needs two or more paired points"));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::invalid("log-log slope needs positive values"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().mean(), ly.iter().mean());
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
