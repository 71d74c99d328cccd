use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::symbols::{DEFAULT_BAND, DEFAULT_FIT_ORDER, RESIDUAL_GATE};
use crate::toeplitz::DEFAULT_K_GRID;
use crate::{Error, Result};

use super::suites::SUITES;

/// Thresholds of the suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub jet: f64,
    pub toeplitz_jet: f64,
    pub commutator_jet: f64,
    pub residual_gate: f64,
    pub spectrum_pairing: f64,
    pub spectrum_oracle: f64,
    pub norm_slope: (f64, f64),
    pub commutator_slope: f64,
    pub product_slope: f64,
    pub curvature_slope: f64,
    /// Slope that the curvature residual must stay above once `R` is dropped.
    pub uncorrected_slope: f64,
    pub min_r2: f64,
    /// Smallest level entering the slope fits.
    pub rate_k_min: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            jet: 1e-6,
            toeplitz_jet: 1e-8,
            commutator_jet: 1e-5,
            residual_gate: RESIDUAL_GATE,
            spectrum_pairing: 1e-10,
            spectrum_oracle: 1e-12,
            norm_slope: (-1.15, -0.85),
            commutator_slope: -0.85,
            product_slope: -1.8,
            curvature_slope: -1.8,
            uncorrected_slope: -1.2,
            min_r2: 0.98,
            rate_k_min: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub suites: Vec<String>,
    pub k_grid: Vec<u32>,
    /// Levels for exact symbol extraction.
    pub extraction_grid: Vec<u32>,
    pub band: u32,
    pub fit_order: usize,
    pub tolerances: Tolerances,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Twist `m` of `A = O(m)`.
    pub m: i32,
    /// Prefer exact reconstruction in symbol extraction.
    pub exact: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            k_grid: DEFAULT_K_GRID.to_vec(),
            extraction_grid: crate::symbols::extraction_grid(),
            band: DEFAULT_BAND,
            fit_order: DEFAULT_FIT_ORDER,
            tolerances: Tolerances::default(),
            out_dir: PathBuf::from("reports"),
            seed: 20240917,
            m: 0,
            exact: true,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::UnknownSuite(s.clone()));
            }
        }
        for (name, grid) in [("k_grid", &self.k_grid), ("extraction_grid", &self.extraction_grid)] {
            if grid.len() < 4 {
                return Err(Error::Config(format!("{name} needs at least 4 levels")));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] == 0 {
                return Err(Error::Config(format!("{name} must be strictly increasing and positive")));
            }
            if (grid[0] as i64 + self.m as i64) < 0 {
                return Err(Error::Config(format!("{name} has levels with negative degree")));
            }
        }
        if self.band == 0 {
            return Err(Error::Config("band must be positive".into()));
        }
        if self.extraction_grid.len() < self.fit_order + 2 {
            return Err(Error::Config("extraction_grid too short for the fit order".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_uses_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"suites": ["spectrum"], "k_grid": [8, 16, 32, 64]}"#).unwrap();
        assert_eq!(cfg.band, DEFAULT_BAND);
        assert!(cfg.validate().is_ok());
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
        let bad = RunConfig { suites: vec!["nope".into()], ..RunConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::UnknownSuite(_))));
        let short = RunConfig { k_grid: vec![8, 16], ..RunConfig::default() };
        assert!(matches!(short.validate(), Err(Error::Config(_))));
    }
}
