//! Order-of-magnitude estimate of resonator heating by optical absorption
//! during the three pulses.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::params::{HBAR, K_B};
use crate::scalar::Scalar;

/// Speed of light, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatingParams<T> {
    /// Resonator thickness, m.
    pub thickness: T,
    /// Resonator width, m.
    pub width: T,
    /// Resonator length, m.
    pub length: T,
    /// Mass density, kg/m³.
    pub density: T,
    /// Specific heat capacity, J/(kg·K).
    pub specific_heat: T,
    /// Thermal conductivity, W/(m·K).
    pub conductivity: T,
    /// Fraction of incident power absorbed per pass.
    pub absorbed_fraction: T,
    pub finesse: T,
    /// Pulse central wavelength, m.
    pub wavelength: T,
    /// Mean photons per pulse.
    pub n_photons: T,
    /// Mechanical angular frequency, rad/s.
    pub omega_m: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatingReport<T> {
    /// Energy deposited by one pulse, J.
    pub absorbed_energy: T,
    /// Inverse centre-to-edge thermal relaxation time, rad/s.
    pub thermal_rate: T,
    /// RMS distance heat diffuses over half a mechanical period, m.
    pub diffusion_length: T,
    /// Heated volume, m³.
    pub heated_volume: T,
    pub delta_t: T,
    /// Worst-case rise in bath occupancy over all three pulses.
    pub delta_n_bath: T,
}

/// Material constants, shipped as a named preset table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub density: f64,
    pub specific_heat: f64,
    pub conductivity: f64,
}

const MATERIALS_JSON: &str = include_str!("../data/materials.json");

/// Built-in material presets.
pub fn materials() -> Vec<Material> {
    serde_json::from_str(MATERIALS_JSON).expect("bundled material table is valid")
}

pub fn material(name: &str) -> Option<Material> {
    materials().into_iter().find(|m| m.name.eq_ignore_ascii_case(name))
}

impl<T: Scalar> HeatingParams<T> {
    /// 54 nm × 10 µm × 1 mm silicon-nitride microstring at 100.2 kHz,
    /// absorbed fraction 10⁻⁵, 1559 nm pulses.
    pub fn sin_microstring(finesse: T, n_photons: T) -> Self {
        let sin = material("Si3N4").expect("Si3N4 preset");
        Self {
            thickness: T::lit(54e-9),
            width: T::lit(10e-6),
            length: T::lit(1e-3),
            density: T::lit(sin.density),
            specific_heat: T::lit(sin.specific_heat),
            conductivity: T::lit(sin.conductivity),
            absorbed_fraction: T::lit(1e-5),
            finesse,
            wavelength: T::lit(1559e-9),
            n_photons,
            omega_m: T::lit(std::f64::consts::TAU * 100.2e3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields: [(&'static str, T); 11] = [
            ("thickness", self.thickness),
            ("width", self.width),
            ("length", self.length),
            ("density", self.density),
            ("specific_heat", self.specific_heat),
            ("conductivity", self.conductivity),
            ("absorbed_fraction", self.absorbed_fraction),
            ("finesse", self.finesse),
            ("wavelength", self.wavelength),
            ("n_photons", self.n_photons),
            ("omega_m", self.omega_m),
        ];
        for (name, v) in fields {
            let ok = if name == "n_photons" { v >= T::zero() } else { v > T::zero() };
            if !(ok && v.is_finite()) {
                return Err(invalid(name, format!("must be finite and positive, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn absorption_heating<T: Scalar>(p: &HeatingParams<T>) -> Result<HeatingReport<T>> {
    p.validate()?;
    let pi = T::PI();
    let hbar = T::lit(HBAR);
    let omega_p = T::lit(std::f64::consts::TAU * C_LIGHT) / p.wavelength;
    let heat_capacity = p.density * p.specific_heat;

    let absorbed_energy =
        hbar * omega_p * p.absorbed_fraction * p.n_photons * T::lit(2.0) * p.finesse / pi;
    let half = p.length * T::lit(0.5);
    let thermal_rate = p.conductivity / (heat_capacity * half * half);
    let diffusion_length = (T::lit(2.0) * pi * p.conductivity / (heat_capacity * p.omega_m)).sqrt();
    let heated_volume = p.thickness * p.width * diffusion_length;
    let delta_t = absorbed_energy / (pi * heat_capacity * heated_volume);
    let delta_n_bath = T::lit(3.0) * T::lit(K_B) * delta_t / (hbar * p.omega_m);
    Ok(HeatingReport {
        absorbed_energy,
        thermal_rate,
        diffusion_length,
        heated_volume,
        delta_t,
        delta_n_bath,
    })
}
