//! Experiment configuration file: parameter overrides, grid and sweep ranges.

use std::path::{Path, PathBuf};

use optoswap::params::PhysicalParams;
use optoswap::phasespace::GridSpec;
use optoswap::{Error, Result};
use serde::{Deserialize, Serialize};

/// Overrides applied on top of the microstring preset. Frequencies are ω/2π in Hz.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub omega_m_hz: Option<f64>,
    pub gamma_hz: Option<f64>,
    pub kappa_hz: Option<f64>,
    pub g0_hz: Option<f64>,
    pub temperature_k: Option<f64>,
    pub eta_l: Option<f64>,
    pub n_photons: Option<[f64; 3]>,
    pub mu: Option<[f64; 3]>,
}

impl ParamOverrides {
    /// Preset at `temperature_k` (unless overridden) with overrides applied.
    pub fn apply(&self, temperature_k: f64) -> Result<PhysicalParams<f64>> {
        let tau = std::f64::consts::TAU;
        let mut p = PhysicalParams::microstring(self.temperature_k.unwrap_or(temperature_k));
        if let Some(v) = self.omega_m_hz {
            p.omega_m = tau * v;
        }
        if let Some(v) = self.gamma_hz {
            p.gamma = tau * v;
        }
        if let Some(v) = self.kappa_hz {
            p.kappa = tau * v;
        }
        if let Some(v) = self.g0_hz {
            p.g0 = tau * v;
        }
        if let Some(v) = self.eta_l {
            p.eta_l = v;
        }
        if let Some(n) = self.n_photons {
            p.photon_numbers = Some(n);
            p.mu = None;
        }
        if let Some(mu) = self.mu {
            p.mu = Some(mu);
        }
        p.validate()?;
        Ok(p)
    }
}

/// Inclusive logarithmic range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl LogRange {
    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max >= self.min && self.points >= 1) {
            return Err(Error::Config(format!(
                "{name}: need 0 < min <= max and points >= 1, got {self:?}"
            )));
        }
        Ok(optoswap::gaussian::log_space(self.min, self.max, self.points))
    }
}

/// Inclusive linear range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl LinRange {
    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        if !(self.min.is_finite() && self.max >= self.min && self.points >= 1) {
            return Err(Error::Config(format!(
                "{name}: need finite min <= max and points >= 1, got {self:?}"
            )));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| if i + 1 == self.points { self.max } else { self.min + step * i as f64 })
            .collect())
    }
}

/// Sweep settings. Every field has a default; each experiment reads only
/// the fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    /// Bath temperatures for `table1`, K.
    pub temperatures_k: Vec<f64>,
    /// Initial thermal phonons before a transfer.
    pub n_initial: f64,
    /// Γ/ω_M axis of `cool-surface`.
    pub gamma_ratio: LogRange,
    /// n_B axis of `cool-surface`.
    pub n_bath: LogRange,
    /// Target Fock numbers for `fock-transfer`.
    pub fock_n: Vec<usize>,
    /// Q_M = ω_M/Γ values for `fock-transfer`.
    pub q_m: Vec<f64>,
    /// Bath occupancy for `fock-transfer`.
    pub transfer_n_bath: f64,
    /// Mean phonon numbers |α|² of the kitten targets.
    pub alpha_sq: Vec<f64>,
    /// Squeezing axis of `kitten`.
    pub xi: LinRange,
    /// Damping ratio of the damped `kitten` setting.
    pub kitten_gamma_ratio: f64,
    pub kitten_n_bath: f64,
    /// ε axis of `tolerance`.
    pub epsilon: LogRange,
    pub tolerance_n_bath: Vec<f64>,
    pub finesse: f64,
    /// Photons per pulse for `heating`.
    pub n_photons: f64,
    pub mc_samples: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            temperatures_k: vec![4.0, 0.05],
            n_initial: 10.0,
            gamma_ratio: LogRange {
                min: 1e-8,
                max: 1e-2,
                points: 64,
            },
            n_bath: LogRange {
                min: 1.0,
                max: 1e6,
                points: 64,
            },
            fock_n: vec![1],
            q_m: vec![1e8, 1e7, 1e6],
            transfer_n_bath: 5e4,
            alpha_sq: vec![0.1, 0.25, 0.5, 0.75],
            xi: LinRange {
                min: -0.6,
                max: 0.2,
                points: 81,
            },
            kitten_gamma_ratio: 2.24e-7,
            kitten_n_bath: 5e3,
            epsilon: LogRange {
                min: 1e-8,
                max: 1e-4,
                points: 9,
            },
            tolerance_n_bath: vec![1e3, 5e3, 1e6],
            finesse: 100.0,
            n_photons: 7.28e9,
            mc_samples: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub params: ParamOverrides,
    pub grid: Option<GridSpec<f64>>,
    #[serde(default)]
    pub sweep: Sweep,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s)
            .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
