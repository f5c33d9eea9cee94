use serde::Serialize;

use crate::error::{invalid, Result};

/// Ordinary least squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// `sqrt(SSR / (k - 2))`; zero when only two points are fitted.
    pub residual_std: f64,
    pub slope_stderr: f64,
    pub num_points: usize,
}

pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(invalid(format!("{} xs but {} ys", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(invalid("a slope fit needs at least two points"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(invalid("log-log fit needs finite positive data"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("all x values coincide"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let dof = lx.len().saturating_sub(2);
    let residual_std = if dof > 0 { (ssr / dof as f64).sqrt() } else { 0.0 };
    Ok(SlopeFit {
        slope,
        intercept,
        residual_std,
        slope_stderr: residual_std / sxx.sqrt(),
        num_points: lx.len(),
    })
}
