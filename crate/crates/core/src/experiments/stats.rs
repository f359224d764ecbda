use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::ExperimentError;

/// Binomial standard error of a frequency `k/n`.
pub fn binomial_stderr(k: usize, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    let p = k as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Grouped jackknife: replicate `i` belongs to group `i % groups`; `est`
/// receives the kept replicate indices. Returns `None` when any
/// leave-one-group-out estimate is undefined.
pub fn grouped_jackknife<F>(n: usize, groups: usize, est: F) -> Option<f64>
where
    F: Fn(&[usize]) -> Option<f64>,
{
    let g = groups.min(n);
    if g < 2 {
        return None;
    }
    let mut vals = Vec::with_capacity(g);
    for drop in 0..g {
        let kept: Vec<usize> = (0..n).filter(|i| i % g != drop).collect();
        vals.push(est(&kept)?);
    }
    let m = vals.iter().sum::<f64>() / g as f64;
    let ss: f64 = vals.iter().map(|v| (v - m).powi(2)).sum();
    Some(((g as f64 - 1.0) / g as f64 * ss).sqrt())
}

/// Upper tail `P(X ≥ x)` of a chi-square law with `dof` degrees of freedom.
pub fn chi_square_p(x: f64, dof: usize) -> f64 {
    let law = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    1.0 - law.cdf(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Least-squares fit of `log y` against `log x`.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit, ExperimentError> {
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(ExperimentError::Degenerate(format!(
            "scaling fit needs positive values, got ({x}, {y})"
        )));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(ExperimentError::Degenerate(format!(
            "scaling fit needs at least 3 distinct L values, got {}",
            xs.len()
        )));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if points.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(ScalingFit {
        slope,
        intercept,
        stderr,
        points: points.len(),
    })
}
