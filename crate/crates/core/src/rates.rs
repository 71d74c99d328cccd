//! Log-log convergence-rate fits for residual tables.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Residuals at or below this are treated as rounding noise and excluded from fits.
pub const NOISE_FLOOR: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateWindow {
    /// Fit passes only if `slope ≤ max_slope`.
    pub max_slope: f64,
    /// Optional lower bound (for two-sided windows).
    pub min_slope: Option<f64>,
    pub min_r2: f64,
    pub k_min: u32,
}

impl RateWindow {
    pub fn at_most(max_slope: f64) -> Self {
        RateWindow { max_slope, min_slope: None, min_r2: 0.98, k_min: 0 }
    }

    pub fn between(min_slope: f64, max_slope: f64) -> Self {
        RateWindow { max_slope, min_slope: Some(min_slope), min_r2: 0.98, k_min: 0 }
    }

    pub fn from_k(mut self, k_min: u32) -> Self {
        self.k_min = k_min;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Every residual is exactly zero.
    Exact,
    /// Too few residuals above the noise floor to fit.
    Floor,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateReport {
    pub table: Vec<(u32, f64)>,
    pub excluded: Vec<(u32, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub monotone: bool,
    pub window: RateWindow,
    pub verdict: Verdict,
}

impl RateReport {
    /// `Exact` and `Floor` count as passing: the residual vanishes to machine precision.
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, R²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}

/// Fit `residual ≈ C k^slope` on the points with `k ≥ window.k_min`.
pub fn fit_rate(table: &[(u32, f64)], window: RateWindow) -> Result<RateReport> {
    let considered: Vec<(u32, f64)> = table.iter().copied().filter(|(k, _)| *k >= window.k_min).collect();
    if considered.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 points, got {}", considered.len())));
    }
    if considered.iter().any(|(_, r)| !r.is_finite() || *r < 0.0) {
        return Err(Error::Fit("residuals must be finite and non-negative".into()));
    }
    let mut report = RateReport {
        table: table.to_vec(),
        excluded: Vec::new(),
        slope: f64::NAN,
        intercept: f64::NAN,
        r2: f64::NAN,
        monotone: considered.windows(2).all(|w| w[1].1 <= w[0].1),
        window,
        verdict: Verdict::Fail,
    };
    if considered.iter().all(|(_, r)| *r == 0.0) {
        report.verdict = Verdict::Exact;
        return Ok(report);
    }
    let (used, excluded): (Vec<_>, Vec<_>) = considered.into_iter().partition(|(_, r)| *r > NOISE_FLOOR);
    report.excluded = excluded;
    if used.len() < 4 {
        report.verdict = Verdict::Floor;
        return Ok(report);
    }
    let x: Vec<f64> = used.iter().map(|(k, _)| (*k as f64).ln()).collect();
    let y: Vec<f64> = used.iter().map(|(_, r)| r.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&x, &y);
    report.slope = slope;
    report.intercept = intercept;
    report.r2 = r2;
    let in_window = slope <= window.max_slope && window.min_slope.is_none_or(|lo| slope >= lo);
    report.verdict = if in_window && r2 >= window.min_r2 { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<u32> {
        vec![8, 12, 16, 24, 32, 48, 64, 96, 128]
    }

    #[test]
    fn synthetic_slopes() {
        let t1: Vec<_> = grid().into_iter().map(|k| (k, 3.0 / k as f64)).collect();
        let r = fit_rate(&t1, RateWindow::between(-1.15, -0.85)).unwrap();
        assert!((r.slope + 1.0).abs() < 0.02);
        assert_eq!(r.verdict, Verdict::Pass);
        let t2: Vec<_> = grid().into_iter().map(|k| (k, 0.5 / (k as f64).powi(2))).collect();
        let r = fit_rate(&t2, RateWindow::at_most(-1.8)).unwrap();
        assert!((r.slope + 2.0).abs() < 0.02);
    }

    #[test]
    fn noise_floor_and_exact() {
        let t: Vec<_> = grid().into_iter().map(|k| (k, 1e-15 * (1.0 + (k % 3) as f64))).collect();
        let r = fit_rate(&t, RateWindow::at_most(-1.0)).unwrap();
        assert_eq!(r.verdict, Verdict::Floor);
        assert_eq!(r.excluded.len(), t.len());
        let z: Vec<_> = grid().into_iter().map(|k| (k, 0.0)).collect();
        assert_eq!(fit_rate(&z, RateWindow::at_most(-1.0)).unwrap().verdict, Verdict::Exact);
        assert!(fit_rate(&z[..3], RateWindow::at_most(-1.0)).is_err());
    }

    #[test]
    fn k_min_filters_points() {
        let t: Vec<_> = grid().into_iter().map(|k| (k, if k < 16 { 1.0 } else { 1.0 / k as f64 })).collect();
        let r = fit_rate(&t, RateWindow::at_most(-0.9).from_k(16)).unwrap();
        assert!((r.slope + 1.0).abs() < 1e-10);
    }
}
