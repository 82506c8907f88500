//! Physical parameters of the optomechanical system and the protocol-level
//! quantities derived from them.
//!
//! Angular frequencies are stored in rad/s. Configuration files quote
//! frequencies as ω/2π in Hz under `_hz` keys and are converted on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct PhysicalParams<T> {
    /// Mechanical angular frequency ω_M, rad/s.
    pub omega_m: T,
    /// Mechanical damping rate Γ, rad/s.
    pub gamma: T,
    /// Optical linewidth κ, rad/s.
    pub kappa: T,
    /// Zero-point optomechanical coupling g0, rad/s.
    pub g0: T,
    /// Bath temperature, K.
    pub temperature: T,
    /// Optical efficiency per cycle.
    pub eta_l: T,
    /// Mean photon numbers of the three pulses, if given.
    pub photon_numbers: Option<[T; 3]>,
    /// Pulse strengths μ, if given directly.
    pub mu: Option<[T; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities<T> {
    pub sigma: T,
    pub epsilon: T,
    pub eta_m: T,
    pub n_bath: T,
    /// ω_M/Γ; `None` for an undamped oscillator.
    pub q_m: Option<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulsePlan<T> {
    pub chi: [T; 3],
    pub mu: [T; 3],
}

impl<T: Scalar> PhysicalParams<T> {
    /// Silicon-nitride microstring parameters at the given bath temperature:
    /// ω_M/2π = 100.2 kHz, Γ/2π = 31 mHz, κ/2π = 25.6 MHz, g0/2π = 75 Hz,
    /// lossless optics, unit pulse strengths.
    pub fn microstring(temperature_k: T) -> Self {
        let two_pi = T::lit(std::f64::consts::TAU);
        Self {
            omega_m: two_pi * T::lit(100.2e3),
            gamma: two_pi * T::lit(31e-3),
            kappa: two_pi * T::lit(25.6e6),
            g0: two_pi * T::lit(75.0),
            temperature: temperature_k,
            eta_l: T::one(),
            photon_numbers: None,
            mu: Some([T::one(); 3]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: T| {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        let non_negative = |name, v: T| {
            if v.is_finite() && v >= T::zero() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and >= 0, got {v}")))
            }
        };
        positive("omega_m", self.omega_m)?;
        positive("kappa", self.kappa)?;
        non_negative("g0", self.g0)?;
        non_negative("gamma", self.gamma)?;
        non_negative("temperature", self.temperature)?;
        check_efficiency("eta_l", self.eta_l)?;
        if self.gamma >= T::lit(2.0) * self.omega_m {
            return Err(Error::Overdamped {
                gamma: self.gamma.to_f64_lossy(),
                limit: (T::lit(2.0) * self.omega_m).to_f64_lossy(),
            });
        }
        if let Some(n) = self.photon_numbers {
            for v in n {
                non_negative("n_photons", v)?;
            }
        }
        if let Some(mu) = self.mu {
            for v in mu {
                if !v.is_finite() {
                    return Err(invalid("mu", "must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Interaction strengths χ = −8 g0 √N / κ for the configured photon numbers.
    pub fn chi_from_photons(&self) -> Option<[T; 3]> {
        self.photon_numbers
            .map(|n| n.map(|ni| -T::lit(8.0) * self.g0 * ni.sqrt() / self.kappa))
    }

    /// The pulse plan implied by the configuration: explicit μ wins, then
    /// photon numbers, then the ideal plan μ = (1, 1, 1).
    pub fn pulse_plan(&self, d: &DerivedQuantities<T>) -> Result<PulsePlan<T>> {
        if let Some(mu) = self.mu {
            chi_for_mu(mu, self.eta_l, d.eta_m, d.sigma)
        } else if let Some(chi) = self.chi_from_photons() {
            pulse_strengths(chi, self.eta_l, d.eta_m, d.sigma)
        } else {
            chi_for_mu([T::one(); 3], self.eta_l, d.eta_m, d.sigma)
        }
    }
}

pub(crate) fn check_efficiency<T: Scalar>(name: &'static str, eta: T) -> Result<()> {
    if eta.is_finite() && eta > T::zero() && eta <= T::one() {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie in (0, 1], got {eta}")))
    }
}

/// Equilibrium occupancy 1/(exp(ħω/k_B T) − 1); zero at T = 0.
pub fn bose_einstein<T: Scalar>(omega: T, temperature: T) -> T {
    if temperature <= T::zero() {
        return T::zero();
    }
    let x = T::lit(HBAR) * omega / (T::lit(K_B) * temperature);
    T::one() / x.exp_m1()
}

pub fn derive_quantities<T: Scalar>(p: &PhysicalParams<T>) -> Result<DerivedQuantities<T>> {
    p.validate()?;
    let ratio = p.gamma / (T::lit(2.0) * p.omega_m);
    let sigma = (T::one() - ratio * ratio).sqrt();
    let epsilon = p.gamma / (T::lit(2.0) * sigma * p.omega_m);
    Ok(DerivedQuantities {
        sigma,
        epsilon,
        eta_m: (-T::PI() * epsilon).exp(),
        n_bath: bose_einstein(p.omega_m, p.temperature),
        q_m: (p.gamma > T::zero()).then(|| p.omega_m / p.gamma),
    })
}

impl<T: Scalar> DerivedQuantities<T> {
    /// Derived quantities from the reduced parameters alone (ε and n_B), for
    /// sweeps that never reference absolute frequencies.
    pub fn from_epsilon(epsilon: T, n_bath: T) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= T::zero()) {
            return Err(invalid("epsilon", format!("must be finite and >= 0, got {epsilon}")));
        }
        if !(n_bath.is_finite() && n_bath >= T::zero()) {
            return Err(invalid("n_bath", format!("must be finite and >= 0, got {n_bath}")));
        }
        let sigma = (T::one() + epsilon * epsilon).sqrt().recip();
        Ok(Self {
            sigma,
            epsilon,
            eta_m: (-T::PI() * epsilon).exp(),
            n_bath,
            q_m: (epsilon > T::zero()).then(|| T::one() / (T::lit(2.0) * sigma * epsilon)),
        })
    }

    /// Derived quantities for a damping ratio Γ/ω_M in `[0, 2)`.
    pub fn from_damping_ratio(gamma_ratio: T, n_bath: T) -> Result<Self> {
        if !(gamma_ratio >= T::zero() && gamma_ratio < T::lit(2.0)) {
            return Err(invalid("gamma", format!("Γ/ω_M must lie in [0, 2), got {gamma_ratio}")));
        }
        let half = gamma_ratio * T::lit(0.5);
        let sigma = (T::one() - half * half).sqrt();
        Self::from_epsilon(half / sigma, n_bath)
    }
}

/// μ from χ: μ₂ = −√(η_L η_M) χ₂/σ, μ₁ = −χ₁ μ₂, μ₃ = −χ₃ μ₂.
pub fn pulse_strengths<T: Scalar>(chi: [T; 3], eta_l: T, eta_m: T, sigma: T) -> Result<PulsePlan<T>> {
    check_plan_inputs(&chi, eta_l, eta_m, sigma)?;
    let mu2 = -(eta_l * eta_m).sqrt() * chi[1] / sigma;
    Ok(PulsePlan {
        chi,
        mu: [-chi[0] * mu2, mu2, -chi[2] * mu2],
    })
}

/// Inverse of [`pulse_strengths`].
pub fn chi_for_mu<T: Scalar>(mu: [T; 3], eta_l: T, eta_m: T, sigma: T) -> Result<PulsePlan<T>> {
    check_plan_inputs(&mu, eta_l, eta_m, sigma)?;
    if mu[1] == T::zero() {
        return Err(Error::DegenerateMiddlePulse);
    }
    let chi2 = -mu[1] * sigma / (eta_l * eta_m).sqrt();
    Ok(PulsePlan {
        chi: [-mu[0] / mu[1], chi2, -mu[2] / mu[1]],
        mu,
    })
}

fn check_plan_inputs<T: Scalar>(v: &[T; 3], eta_l: T, eta_m: T, sigma: T) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid("pulse", "strengths must be finite"));
    }
    check_efficiency("eta_l", eta_l)?;
    check_efficiency("eta_m", eta_m)?;
    check_efficiency("sigma", sigma)
}

/// Convention used to convert an interaction strength into a photon number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonConvention {
    /// χ = −8 g0 √N / κ, the adiabatic-elimination result.
    Coefficient8,
    /// χ = −4 g0 √N / κ, gives N = 7.28×10⁹ for the
    /// microstring at χ = −1.
    Coefficient4,
}

/// Mean photon number needed for interaction strength `chi`.
pub fn photons_for_chi<T: Scalar>(chi: T, kappa: T, g0: T, convention: PhotonConvention) -> T {
    let c = match convention {
        PhotonConvention::Coefficient8 => T::lit(8.0),
        PhotonConvention::Coefficient4 => T::lit(4.0),
    };
    let root = chi * kappa / (c * g0);
    root * root
}

/// On-disk parameter file. Frequencies are ω/2π in Hz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub omega_m_hz: f64,
    pub gamma_hz: f64,
    pub kappa_hz: f64,
    pub g0_hz: f64,
    pub temperature_k: f64,
    pub eta_l: f64,
    #[serde(default)]
    pub n_photons: Option<[f64; 3]>,
    #[serde(default)]
    pub mu: Option<[f64; 3]>,
}

impl ParamsFile {
    pub fn into_params<T: Scalar>(&self) -> Result<PhysicalParams<T>> {
        let tau = std::f64::consts::TAU;
        let p = PhysicalParams {
            omega_m: T::lit(tau * self.omega_m_hz),
            gamma: T::lit(tau * self.gamma_hz),
            kappa: T::lit(tau * self.kappa_hz),
            g0: T::lit(tau * self.g0_hz),
            temperature: T::lit(self.temperature_k),
            eta_l: T::lit(self.eta_l),
            photon_numbers: self.n_photons.map(|n| n.map(T::lit)),
            mu: self.mu.map(|m| m.map(T::lit)),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_params<T: Scalar>(p: &PhysicalParams<T>) -> Self {
        let f = |v: T| v.to_f64_lossy() / std::f64::consts::TAU;
        Self {
            omega_m_hz: f(p.omega_m),
            gamma_hz: f(p.gamma),
            kappa_hz: f(p.kappa),
            g0_hz: f(p.g0),
            temperature_k: p.temperature.to_f64_lossy(),
            eta_l: p.eta_l.to_f64_lossy(),
            n_photons: p.photon_numbers.map(|n| n.map(|v| v.to_f64_lossy())),
            mu: p.mu.map(|n| n.map(|v| v.to_f64_lossy())),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| {
            Error::Config(format!("line {} column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
