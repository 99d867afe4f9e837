use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Least-squares line through `(log10 rho, -log10 P_out)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Estimated diversity order.
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval on the slope.
    pub half_width: f64,
    pub points_used: usize,
}

/// Ordinary least squares on `(x, y)` pairs; needs at least 3 distinct `x`.
pub fn fit_line(points: &[(f64, f64)]) -> Option<SlopeFit> {
    let n = points.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(f64::NAN);
    Some(SlopeFit {
        slope,
        intercept,
        half_width: t * se,
        points_used: n,
    })
}

/// Fits the diversity slope from `(rho_db, outages, samples)` triples,
/// keeping only points with at least `min_hits` outages.
pub fn fit_outage_slope(points: &[(f64, u64, u64)], min_hits: u64) -> Option<SlopeFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, hits, _)| hits >= min_hits && hits > 0)
        .map(|&(db, hits, samples)| (db / 10.0, -(hits as f64 / samples as f64).log10()))
        .collect();
    fit_line(&usable)
}

/// Number of points [`fit_outage_slope`] would use.
pub fn usable_points(points: &[(f64, u64, u64)], min_hits: u64) -> usize {
    points.iter().filter(|p| p.1 >= min_hits && p.1 > 0).count()
}
