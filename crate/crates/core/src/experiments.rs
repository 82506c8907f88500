//! Composite workflows built from the other modules: the two-temperature
//! cooling summary, Fock-state transfer and squeezed kitten preparation.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gaussian::{closed_form_map, cooperativity, minimum_occupancy, pipeline_occupancy, protocol_map_for_mu, ModeState, ProtocolMap};
use crate::optimize::golden_section;
use crate::params::{derive_quantities, photons_for_chi, DerivedQuantities, PhotonConvention, PhysicalParams};
use crate::phasespace::{
    analytic_wigner, fidelity, negativity, transfer_to_mechanics, wigner_grid, FidelityResult, FourierReport,
    GridSpec, Negativity, Parity, StateSpec, WignerGrid,
};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingSummary<T> {
    pub temperature: T,
    pub n_bath: T,
    pub epsilon: T,
    pub q_m: Option<T>,
    pub mu: [T; 3],
    pub chi: [T; 3],
    pub cooperativity: T,
    /// Full covariance pipeline.
    pub n_final: T,
    /// First-order closed form.
    pub n_final_analytic: T,
    /// Photons per pulse for χ₂ with `χ = −8 g0 √N/κ`.
    pub photons_coeff8: T,
    /// Photons per pulse for χ₂ with `χ = −4 g0 √N/κ`.
    pub photons_coeff4: T,
}

pub fn cooling_summary<T: Scalar>(p: &PhysicalParams<T>) -> Result<CoolingSummary<T>> {
    let d = derive_quantities(p)?;
    let plan = p.pulse_plan(&d)?;
    let n_final = pipeline_occupancy(plan.mu, &d, p.eta_l)?;
    let c = cooperativity(plan.mu, d.epsilon, d.sigma, p.eta_l, d.eta_m)?;
    let analytic = if plan.mu == [T::one(); 3] {
        minimum_occupancy(d.epsilon, p.eta_l, d.n_bath)
    } else {
        crate::gaussian::analytic_occupancy(plan.mu, d.epsilon, p.eta_l, d.n_bath)
    };
    Ok(CoolingSummary {
        temperature: p.temperature,
        n_bath: d.n_bath,
        epsilon: d.epsilon,
        q_m: d.q_m,
        mu: plan.mu,
        chi: plan.chi,
        cooperativity: c,
        n_final,
        n_final_analytic: analytic,
        photons_coeff8: photons_for_chi(plan.chi[1], p.kappa, p.g0, PhotonConvention::Coefficient8),
        photons_coeff4: photons_for_chi(plan.chi[1], p.kappa, p.g0, PhotonConvention::Coefficient4),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct TransferOutcome<T> {
    pub wigner: WignerGrid<T>,
    pub fourier: FourierReport<T>,
    pub fidelity: FidelityResult<T>,
    pub negativity: Negativity<T>,
}

/// Transfers `light_in` onto mechanics prepared in `mech_in` and compares the
/// mechanical output with `target`.
pub fn transfer<T: Scalar>(
    pm: &ProtocolMap<T>,
    mech_in: &StateSpec<T>,
    light_in: &StateSpec<T>,
    target: &StateSpec<T>,
    grid: GridSpec<T>,
) -> Result<TransferOutcome<T>> {
    let cf = transfer_to_mechanics(mech_in, light_in, pm)?;
    let (wigner, fourier) = wigner_grid(&cf, grid)?;
    let fid = fidelity(&wigner, &analytic_wigner(target, grid)?)?;
    Ok(TransferOutcome {
        negativity: negativity(&wigner),
        wigner,
        fourier,
        fidelity: fid,
    })
}

/// Sends optical `|n⟩` into mechanics that start thermal with `n_initial`
/// phonons, with unit pulse strengths, and scores the result against `|n⟩`.
pub fn fock_transfer<T: Scalar>(
    d: &DerivedQuantities<T>,
    eta_l: T,
    n_initial: T,
    n: usize,
    grid: GridSpec<T>,
) -> Result<TransferOutcome<T>> {
    let pm = protocol_map_for_mu([T::one(); 3], d, eta_l)?;
    transfer(&pm, &StateSpec::thermal(n_initial), &StateSpec::Fock(n), &StateSpec::Fock(n), grid)
}

/// Decoherence and initial-state choice for squeezed kitten preparation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct KittenSetting<T> {
    pub derived: DerivedQuantities<T>,
    pub eta_l: T,
    pub mech_in: ModeState<T>,
}

impl<T: Scalar> KittenSetting<T> {
    /// Γ = 0, lossless optics, mechanics in vacuum.
    pub fn decoherence_free() -> Self {
        Self {
            derived: DerivedQuantities::from_epsilon(T::zero(), T::zero()).expect("zero damping is valid"),
            eta_l: T::one(),
            mech_in: ModeState::vacuum(),
        }
    }

    pub fn damped(gamma_ratio: T, n_bath: T, n_initial: T) -> Result<Self> {
        Ok(Self {
            derived: DerivedQuantities::from_damping_ratio(gamma_ratio, n_bath)?,
            eta_l: T::one(),
            mech_in: ModeState::thermal(n_initial),
        })
    }

    /// Map with `μ = (1, e^{−ξ}, 1)`.
    pub fn protocol_map(&self, xi: T) -> Result<ProtocolMap<T>> {
        let mu = [T::one(), (-xi).exp(), T::one()];
        if self.derived.epsilon == T::zero() && self.eta_l == T::one() {
            return Ok(ProtocolMap {
                m: closed_form_map(mu, T::zero(), T::one()),
                v_ff: crate::linalg::Mat4::zeros(),
            });
        }
        protocol_map_for_mu(mu, &self.derived, self.eta_l)
    }
}

/// Odd cat with amplitude `alpha`.
pub fn odd_cat<T: Scalar>(alpha: Complex<T>) -> StateSpec<T> {
    StateSpec::Cat {
        alpha,
        parity: Parity::Odd,
    }
}

/// Squeezing that approximately maps `|1⟩` to the odd cat: `ξ = −Re(α²)/3`.
pub fn kitten_estimate<T: Scalar>(alpha: Complex<T>) -> T {
    -(alpha * alpha).re / T::lit(3.0)
}

/// Fidelity of the squeezed transfer of optical `|1⟩` against a precomputed
/// target Wigner grid.
pub fn kitten_fidelity<T: Scalar>(
    setting: &KittenSetting<T>,
    xi: T,
    target: &WignerGrid<T>,
) -> Result<FidelityResult<T>> {
    let pm = setting.protocol_map(xi)?;
    let cf = transfer_to_mechanics(&StateSpec::Gaussian(setting.mech_in), &StateSpec::Fock(1), &pm)?;
    let (w, _) = wigner_grid(&cf, target.grid)?;
    fidelity(&w, target)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KittenOptimum<T> {
    pub xi: T,
    pub infidelity: T,
    pub xi_estimate: T,
}

/// Minimizes the kitten infidelity over `ξ ∈ [lo, hi]` by golden section.
pub fn kitten_optimum<T: Scalar>(
    setting: &KittenSetting<T>,
    alpha: Complex<T>,
    grid: GridSpec<T>,
    lo: T,
    hi: T,
) -> Result<KittenOptimum<T>> {
    let target = analytic_wigner(&odd_cat(alpha), grid)?;
    let infid = |xi: T| {
        kitten_fidelity(setting, xi, &target)
            .map(|f| f.infidelity)
            .unwrap_or_else(|_| T::nan())
    };
    let (xi, infidelity) = golden_section(infid, lo, hi, T::lit(1e-5));
    Ok(KittenOptimum {
        xi,
        infidelity,
        xi_estimate: kitten_estimate(alpha),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoherence_free_kitten_map_is_squeezed_swap() {
        let s = KittenSetting::<f64>::decoherence_free();
        let pm = s.protocol_map(0.2).unwrap();
        let xi = crate::gaussian::squeeze_decompose(&pm).unwrap();
        assert!((xi - 0.2).abs() < 1e-12);
    }

    #[test]
    fn estimate_sign_follows_alpha_phase() {
        assert!((kitten_estimate(Complex::new(0.5f64, 0.0)) + 0.25 / 3.0).abs() < 1e-15);
        assert!((kitten_estimate(Complex::new(0.0f64, 0.5)) - 0.25 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_squeezing_gives_single_quantum() {
        let grid = GridSpec::default();
        let target = analytic_wigner(&StateSpec::Fock(1), grid).unwrap();
        let f = kitten_fidelity(&KittenSetting::<f64>::decoherence_free(), 0.0, &target).unwrap();
        assert!(f.infidelity.abs() < 1e-6);
    }
}
