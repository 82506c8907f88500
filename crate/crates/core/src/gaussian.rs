//! Phase-space transfer matrix of the three-pulse protocol, Gaussian state
//! propagation, and the cooling analytics built on top of it.
//!
//! Quadratures are ordered `(X_M, P_M, X_L, P_L)` with `[X, P] = 2i`, so the
//! vacuum covariance is the identity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{min_heisenberg_eigenvalue, Mat2, Mat4};
use crate::optimize::{bisect, golden_section, nelder_mead_bounded, SimplexOptions};
use crate::params::{check_efficiency, chi_for_mu, DerivedQuantities, PulsePlan};
use crate::scalar::Scalar;

/// Relative tolerance on the smallest eigenvalue of `V + iΩ`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct ProtocolMap<T> {
    pub m: Mat4<T>,
    pub v_ff: Mat4<T>,
}

impl<T: Scalar> ProtocolMap<T> {
    pub fn identity() -> Self {
        Self {
            m: Mat4::identity(),
            v_ff: Mat4::zeros(),
        }
    }

    /// The decoherence-free swap `X_M' = −P_L, P_M' = X_L, X_L' = −P_M, P_L' = X_M`.
    pub fn ideal_swap() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            m: Mat4::from_rows([[z, z, z, -o], [z, z, o, z], [z, -o, z, z], [o, z, z, z]]),
            v_ff: Mat4::zeros(),
        }
    }
}

/// Mean vector and covariance `Re⟨X Xᵀ⟩` of the joint mechanics–light state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct GaussianState<T> {
    pub mean: [T; 4],
    pub cov: Mat4<T>,
}

/// Single-mode Gaussian marginal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct ModeState<T> {
    pub mean: [T; 2],
    pub cov: Mat2<T>,
}

impl<T: Scalar> ModeState<T> {
    pub fn vacuum() -> Self {
        Self::thermal(T::zero())
    }

    pub fn thermal(n: T) -> Self {
        Self {
            mean: [T::zero(); 2],
            cov: Mat2::identity().scale(T::lit(2.0) * n + T::one()),
        }
    }

    /// Coherent state with quadrature means `(x, p)`.
    pub fn coherent(x: T, p: T) -> Self {
        Self {
            mean: [x, p],
            cov: Mat2::identity(),
        }
    }

    /// Squeezed vacuum; `xi > 0` squeezes X.
    pub fn squeezed_vacuum(xi: T) -> Self {
        let e = (T::lit(2.0) * xi).exp();
        Self {
            mean: [T::zero(); 2],
            cov: Mat2::diagonal([e.recip(), e]),
        }
    }

    pub fn occupancy(&self) -> T {
        (self.cov.trace() + self.mean[0] * self.mean[0] + self.mean[1] * self.mean[1]
            - T::lit(2.0))
            * T::lit(0.25)
    }
}

impl<T: Scalar> GaussianState<T> {
    pub fn product(mech: &ModeState<T>, light: &ModeState<T>) -> Self {
        Self {
            mean: [mech.mean[0], mech.mean[1], light.mean[0], light.mean[1]],
            cov: Mat4::direct_sum(&mech.cov, &light.cov),
        }
    }

    pub fn vacuum() -> Self {
        Self::product(&ModeState::vacuum(), &ModeState::vacuum())
    }

    /// Thermal mechanics at `n_bath` and a coherent (vacuum-noise) pulse.
    pub fn thermal_mechanics(n_bath: T) -> Self {
        Self::product(&ModeState::thermal(n_bath), &ModeState::vacuum())
    }

    pub fn mode(&self, index: usize) -> ModeState<T> {
        ModeState {
            mean: [self.mean[2 * index], self.mean[2 * index + 1]],
            cov: self.cov.block(index),
        }
    }

    pub fn mechanics(&self) -> ModeState<T> {
        self.mode(0)
    }

    pub fn light(&self) -> ModeState<T> {
        self.mode(1)
    }

    /// Smallest eigenvalue of `cov + iΩ`.
    pub fn heisenberg_margin(&self) -> T {
        min_heisenberg_eigenvalue(&self.cov)
    }

    pub fn check_physical(&self) -> Result<()> {
        if !self.cov.is_finite() || self.mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite moments".into()));
        }
        let scale = T::one().max(self.cov.max_abs());
        let tol = T::lit(PHYSICALITY_TOL) * scale;
        if self.cov.asymmetry() > tol {
            return Err(Error::InvalidState("covariance is not symmetric".into()));
        }
        let min = self.heisenberg_margin();
        if min < -tol {
            return Err(Error::Unphysical {
                min_eigenvalue: min.to_f64_lossy(),
                tolerance: tol.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// QND interaction `P_M += χ X_L`, `P_L += χ X_M`.
pub fn qnd_map<T: Scalar>(chi: T) -> Mat4<T> {
    let mut m = Mat4::identity();
    m[(1, 2)] = chi;
    m[(3, 0)] = chi;
    m
}

/// One pulse–displace–delay cycle: QND interaction, quarter-period damped
/// mechanical rotation and optical noise rotation with loss. Returns the
/// homogeneous map and the covariance of the injected noise.
pub fn cycle_map<T: Scalar>(
    chi: T,
    eta_l: T,
    d: &DerivedQuantities<T>,
) -> Result<(Mat4<T>, Mat4<T>)> {
    check_efficiency("eta_l", eta_l)?;
    check_efficiency("eta_m", d.eta_m)?;
    if !chi.is_finite() {
        return Err(invalid("chi", "must be finite"));
    }
    let (sigma, eps, eta_m) = (d.sigma, d.epsilon, d.eta_m);
    let rm = eta_m.sqrt();
    let rl = eta_l.sqrt();
    let z = T::zero();
    let m = Mat4::from_rows([
        [eps * rm, rm / sigma, rm * chi / sigma, z],
        [-rm / sigma, -eps * rm, -eps * chi * rm, z],
        [rl * chi, z, z, rl],
        [z, z, -rl, z],
    ]);

    // Thermal increments over a quarter period in the white-noise limit.
    let thermal = T::lit(2.0) * d.n_bath + T::one();
    let var = thermal * (eta_m.recip() - T::one() - T::lit(2.0) * eps * eps);
    let cross = thermal * T::lit(2.0) * eps / sigma;
    let mech = Mat2::from_rows([[var, cross], [cross, var]]).scale(eta_m);
    let vac = Mat2::identity().scale(T::one() - eta_l);
    Ok((m, Mat4::direct_sum(&mech, &vac)))
}

/// Composes `QND(3) · M(2) · M(1)` with its accumulated noise covariance.
pub fn protocol_map<T: Scalar>(
    plan: &PulsePlan<T>,
    d: &DerivedQuantities<T>,
    eta_l: T,
) -> Result<ProtocolMap<T>> {
    let (m1, v1) = cycle_map(plan.chi[0], eta_l, d)?;
    let (m2, v2) = cycle_map(plan.chi[1], eta_l, d)?;
    let q3 = qnd_map(plan.chi[2]);
    let m = q3 * m2 * m1;
    let v_ff = q3.congruence(&(m2.congruence(&v1) + v2)).symmetrized();
    Ok(ProtocolMap { m, v_ff })
}

/// Protocol map for pulse strengths μ.
pub fn protocol_map_for_mu<T: Scalar>(
    mu: [T; 3],
    d: &DerivedQuantities<T>,
    eta_l: T,
) -> Result<ProtocolMap<T>> {
    let plan = chi_for_mu(mu, eta_l, d.eta_m, d.sigma)?;
    protocol_map(&plan, d, eta_l)
}

/// Closed-form transfer matrix in terms of the pulse strengths.
pub fn closed_form_map<T: Scalar>(mu: [T; 3], epsilon: T, eta_l: T) -> Mat4<T> {
    let sigma = (T::one() + epsilon * epsilon).sqrt().recip();
    let eta_m = (-T::PI() * epsilon).exp();
    let [m1, m2, m3] = mu;
    let es = epsilon * sigma;
    let z = T::zero();
    let m23 = (eta_l * m3 + m1 * (eta_m - m3)) / m2;
    let m31 = (eta_m * m3 + m1 * (eta_l - m3)) / m2;
    Mat4::from_rows([
        [m1 - eta_m, z, z, -m2],
        [es * (m3 - m1), m3 - eta_m, m23, m2 * es],
        [-m2 * es, -m2, m1 - eta_l, z],
        [m31, z, z, m3 - eta_l],
    ])
}

/// `mᵀ Ω m − Ω`, zero for a symplectic map.
pub fn symplectic_residual<T: Scalar>(m: &Mat4<T>) -> T {
    let om = crate::linalg::omega4::<T>();
    (m.transpose() * om * *m - om).max_abs()
}

/// `V' = m V mᵀ + V_FF`, `x' = m x`; fails if the output breaks the uncertainty
/// relation beyond tolerance.
pub fn propagate<T: Scalar>(state: &GaussianState<T>, pm: &ProtocolMap<T>) -> Result<GaussianState<T>> {
    state.check_physical()?;
    let out = GaussianState {
        mean: pm.m.mul_vec(&state.mean),
        cov: (pm.m.congruence(&state.cov) + pm.v_ff).symmetrized(),
    };
    out.check_physical()?;
    Ok(out)
}

/// Mean phonon number of the mechanical mode, `(⟨X²⟩ + ⟨P²⟩ − 2)/4`.
pub fn mech_occupancy<T: Scalar>(state: &GaussianState<T>) -> T {
    state.mechanics().occupancy()
}

/// First-order-in-ε expansion of the final occupancy for a thermal
/// mechanical input and a coherent pulse.
pub fn analytic_occupancy<T: Scalar>(mu: [T; 3], epsilon: T, eta_l: T, n_bath: T) -> T {
    let [m1, m2, m3] = mu;
    let one = T::one();
    let two = T::lit(2.0);
    let pe = T::PI() * epsilon;
    let thermal = two * n_bath + one;
    let bath = thermal
        * ((m1 - one) * (m1 + two * pe - one)
            + (m3 - one) * (m3 + two * pe - one)
            + pe * (T::lit(4.0) - m3 * (two - m3)));
    let vacuum = (m3 * m3 - two * eta_l * m1 * m3 * (m3 + pe - one)
        + m1 * m1 * (m3 - one) * (m3 + two * pe - one))
        / (m2 * m2);
    (bath + vacuum + m2 * m2 / eta_l - two) * T::lit(0.25)
}

/// Minimum occupancy at unit pulse strengths.
pub fn minimum_occupancy<T: Scalar>(epsilon: T, eta_l: T, n_bath: T) -> T {
    let pe = T::PI() * epsilon;
    let four = T::lit(4.0);
    pe / four * (T::lit(3.0) * (T::lit(2.0) * n_bath + T::one()) - T::lit(2.0) * eta_l)
        + (eta_l.recip() - T::one()) / four
}

/// Occupancy after the full covariance pipeline for a thermal mechanical
/// input at the bath occupancy and a coherent pulse.
pub fn pipeline_occupancy<T: Scalar>(mu: [T; 3], d: &DerivedQuantities<T>, eta_l: T) -> Result<T> {
    let pm = protocol_map_for_mu(mu, d, eta_l)?;
    let out = propagate(&GaussianState::thermal_mechanics(d.n_bath), &pm)?;
    Ok(mech_occupancy(&out))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalPlan<T> {
    /// `(η_M, (1+η_M)/2 · η_L^{1/4}, η_M)`.
    pub mu_closed_form: [T; 3],
    /// Minimum occupancy at unit pulse strengths.
    pub n_min: T,
    pub mu_numeric: [T; 3],
    /// [`analytic_occupancy`] at `mu_numeric`.
    pub n_numeric: T,
    pub iterations: usize,
}

/// Closed-form optimal pulse strengths alongside a bounded simplex search
/// of [`analytic_occupancy`] over `[0.5, 1.5]³`.
pub fn optimal_plan<T: Scalar>(epsilon: T, eta_l: T, eta_m: T, n_bath: T) -> Result<OptimalPlan<T>> {
    check_efficiency("eta_l", eta_l)?;
    check_efficiency("eta_m", eta_m)?;
    let mu2 = (T::one() + eta_m) * T::lit(0.5) * eta_l.powf(T::lit(0.25));
    let lo = [T::lit(0.5); 3];
    let hi = [T::lit(1.5); 3];
    let found = nelder_mead_bounded(
        |mu: &[T; 3]| analytic_occupancy(*mu, epsilon, eta_l, n_bath),
        [T::one(); 3],
        lo,
        hi,
        SimplexOptions::default(),
    )?;
    Ok(OptimalPlan {
        mu_closed_form: [eta_m, mu2, eta_m],
        n_min: minimum_occupancy(epsilon, eta_l, n_bath),
        mu_numeric: found.x,
        n_numeric: found.value,
        iterations: found.iterations,
    })
}

/// Instantaneous cooperativity time-averaged over the three-pulse sequence.
pub fn cooperativity<T: Scalar>(mu: [T; 3], epsilon: T, sigma: T, eta_l: T, eta_m: T) -> Result<T> {
    if epsilon <= T::zero() {
        return Err(Error::UndampedCooperativity);
    }
    let [m1, m2, m3] = mu;
    let pref = (T::lit(8.0) * T::PI() * epsilon).recip();
    Ok(pref * ((m1 * m1 + m3 * m3) / (m2 * m2) + sigma * sigma * m2 * m2 / (eta_l * eta_m)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingCriteria<T> {
    /// `2/(3πε)`, i.e. `4ω_M/(3πΓ)` to leading order.
    pub damping_bound: T,
    pub below_damping_bound: bool,
    /// `16 C / (3 (2 + 1/η_L))`.
    pub cooperativity_bound: T,
    pub below_cooperativity_bound: bool,
    pub optical_efficiency_ok: bool,
}

pub fn cooling_criteria<T: Scalar>(epsilon: T, eta_l: T, n_bath: T, cooperativity: T) -> CoolingCriteria<T> {
    let damping_bound = T::lit(2.0) / (T::lit(3.0) * T::PI() * epsilon);
    let cooperativity_bound =
        T::lit(16.0) * cooperativity / (T::lit(3.0) * (T::lit(2.0) + eta_l.recip()));
    CoolingCriteria {
        damping_bound,
        below_damping_bound: n_bath < damping_bound,
        cooperativity_bound,
        below_cooperativity_bound: n_bath < cooperativity_bound,
        optical_efficiency_ok: eta_l > T::lit(0.2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingReport<T> {
    pub n_final: T,
    pub n_min_analytic: T,
    pub cooperativity: Option<T>,
    pub criteria: Option<CoolingCriteria<T>>,
    pub mu: [T; 3],
    pub mu_optimal: [T; 3],
}

/// Cooling performance of pulse strengths `mu` against a thermal input.
pub fn cooling_report<T: Scalar>(mu: [T; 3], d: &DerivedQuantities<T>, eta_l: T) -> Result<CoolingReport<T>> {
    let n_final = pipeline_occupancy(mu, d, eta_l)?;
    let c = cooperativity(mu, d.epsilon, d.sigma, eta_l, d.eta_m).ok();
    let plan = optimal_plan(d.epsilon, eta_l, d.eta_m, d.n_bath)?;
    Ok(CoolingReport {
        n_final,
        n_min_analytic: plan.n_min,
        cooperativity: c,
        criteria: c.map(|c| cooling_criteria(d.epsilon, eta_l, d.n_bath, c)),
        mu,
        mu_optimal: plan.mu_closed_form,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceWidth<T> {
    pub mu_at_min: T,
    pub n_min: T,
    pub mu_low: T,
    pub mu_high: T,
    pub width_numeric: T,
    /// `sqrt(6πε)`.
    pub width_analytic: T,
    /// Tolerable fractional photon-number variation, `2 sqrt(6πε)`.
    pub dn_over_n: T,
}

/// Width of the cooling dip along equal pulse strengths, where the
/// occupancy reaches twice its minimum.
pub fn tolerance_width<T: Scalar>(epsilon: T, eta_l: T, n_bath: T) -> Result<ToleranceWidth<T>> {
    if epsilon <= T::zero() {
        return Err(invalid("epsilon", "tolerance width needs epsilon > 0"));
    }
    let d = DerivedQuantities::from_epsilon(epsilon, n_bath)?;
    let occ = |mu: T| pipeline_occupancy([mu; 3], &d, eta_l);
    // Unphysical outputs cannot occur for valid inputs; NaN keeps searches honest if they do.
    let occ_or_nan = |mu: T| occ(mu).unwrap_or_else(|_| T::nan());
    let (mu_at_min, n_min) = golden_section(occ_or_nan, T::lit(0.5), T::lit(1.5), T::lit(1e-12));
    let target = T::lit(2.0) * n_min;
    let half = T::lit(0.5);
    let tol = T::lit(1e-10);
    let mu_low = bisect(|mu| occ_or_nan(mu) - target, mu_at_min - half, mu_at_min, tol)?;
    let mu_high = bisect(|mu| occ_or_nan(mu) - target, mu_at_min, mu_at_min + half, tol)?;
    let width_analytic = (T::lit(6.0) * T::PI() * epsilon).sqrt();
    Ok(ToleranceWidth {
        mu_at_min,
        n_min,
        mu_low,
        mu_high,
        width_numeric: mu_high - mu_low,
        width_analytic,
        dn_over_n: T::lit(2.0) * width_analytic,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCell<T> {
    /// Γ/ω_M.
    pub gamma: T,
    pub n_bath: T,
    pub n_final: T,
    /// Largest bath occupancy permitting ground-state cooling at this damping,
    /// `4ω_M/(3πΓ)`.
    pub cooling_bound: T,
}

/// Logarithmically spaced points `lo..=hi`.
pub fn log_space<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / T::from_usize_lossy(n - 1);
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + step * T::from_usize_lossy(i)).exp()
                    }
                })
                .collect()
        }
    }
}

/// Final occupancy at unit pulse strengths over a grid of damping ratios
/// Γ/ω_M and bath occupancies. Rows are ordered damping-major.
pub fn cooling_surface<T: Scalar>(
    gamma_ratios: &[T],
    n_baths: &[T],
    eta_l: T,
) -> Result<Vec<SurfaceCell<T>>> {
    for &g in gamma_ratios {
        DerivedQuantities::from_damping_ratio(g, T::zero())?;
    }
    gamma_ratios
        .par_iter()
        .flat_map_iter(|&g| n_baths.iter().map(move |&nb| (g, nb)))
        .map(|(g, nb)| {
            let d = DerivedQuantities::from_damping_ratio(g, nb)?;
            let n_final = pipeline_occupancy([T::one(); 3], &d, eta_l)?;
            Ok(SurfaceCell {
                gamma: g,
                n_bath: nb,
                n_final,
                cooling_bound: T::lit(4.0) / (T::lit(3.0) * T::PI() * g),
            })
        })
        .collect()
}

/// Recovers ξ = −ln μ₂ from a lossless squeezed-swap map
/// `diag(μ₂, 1/μ₂, μ₂, 1/μ₂) · swap`.
pub fn squeeze_decompose<T: Scalar>(pm: &ProtocolMap<T>) -> Result<T> {
    let mu2 = -pm.m[(0, 3)];
    if !(mu2 > T::zero()) {
        return Err(Error::NotSqueezedSwap {
            residual: mu2.to_f64_lossy(),
        });
    }
    let s = Mat4::diagonal([mu2, mu2.recip(), mu2, mu2.recip()]);
    let expected = s * ProtocolMap::<T>::ideal_swap().m;
    let residual = (pm.m - expected).max_abs().max(pm.v_ff.max_abs());
    if residual > T::lit(1e-10) * T::one().max(pm.m.max_abs()) {
        return Err(Error::NotSqueezedSwap {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(-mu2.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_quantities, PhysicalParams};
    use approx::assert_relative_eq;

    fn lossless() -> DerivedQuantities<f64> {
        DerivedQuantities::from_epsilon(0.0, 0.0).unwrap()
    }

    #[test]
    fn qnd_identity_and_entries() {
        assert_eq!(qnd_map(0.0f64), Mat4::identity());
        let q = qnd_map(-1.0f64);
        assert_eq!(q[(1, 2)], -1.0);
        assert_eq!(q[(3, 0)], -1.0);
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && (i, j) != (1, 2) && (i, j) != (3, 0))
            .map(|ij| q[ij].abs())
            .sum();
        assert_eq!(off, 0.0);
    }

    #[test]
    fn qnd_maps_add() {
        let (a, b) = (-0.7f64, 1.3f64);
        let diff = (qnd_map(a) * qnd_map(b) - qnd_map(a + b)).max_abs();
        assert!(diff < 1e-15);
    }

    #[test]
    fn lossless_cycle_matrix() {
        let (m, v) = cycle_map(-1.0f64, 1.0, &lossless()).unwrap();
        let expect = Mat4::from_rows([
            [0.0, 1.0, -1.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0, 0.0],
        ]);
        assert_eq!(m, expect);
        assert_eq!(v, Mat4::zeros());
    }

    #[test]
    fn zero_chi_cycle_is_pure_rotation() {
        let (m, _) = cycle_map(0.0f64, 1.0, &lossless()).unwrap();
        let rot = Mat2::from_rows([[0.0, 1.0], [-1.0, 0.0]]);
        assert_eq!(m, Mat4::direct_sum(&rot, &rot));
    }

    #[test]
    fn cycle_mechanical_noise_variance() {
        // (2·10³+1)(1/η_M − 1 − 2ε²)·η_M at ε = 1e-4, evaluated independently.
        let d = DerivedQuantities::from_epsilon(1e-4f64, 1e3).unwrap();
        let (_, v) = cycle_map(-1.0, 1.0, &d).unwrap();
        assert_relative_eq!(v[(0, 0)], 0.628_493_947_501_593_7, max_relative = 1e-12);
        assert_eq!(v[(0, 0)], v[(1, 1)]);
    }

    #[test]
    fn cycle_rejects_bad_efficiency() {
        assert!(cycle_map(-1.0f64, 0.0, &lossless()).is_err());
        assert!(cycle_map(-1.0f64, 1.2, &lossless()).is_err());
    }

    #[test]
    fn unit_strengths_give_ideal_swap() {
        let pm = protocol_map_for_mu([1.0f64; 3], &lossless(), 1.0).unwrap();
        assert!((pm.m - ProtocolMap::ideal_swap().m).max_abs() < 1e-15);
        assert!(symplectic_residual(&pm.m) < 1e-15);
    }

    #[test]
    fn squeezed_swap_matrix() {
        let mu2 = 1.37f64;
        let pm = protocol_map_for_mu([1.0, mu2, 1.0], &lossless(), 1.0).unwrap();
        let expect = Mat4::from_rows([
            [0.0, 0.0, 0.0, -mu2],
            [0.0, 0.0, 1.0 / mu2, 0.0],
            [0.0, -mu2, 0.0, 0.0],
            [1.0 / mu2, 0.0, 0.0, 0.0],
        ]);
        assert!((pm.m - expect).max_abs() < 1e-14);
    }

    #[test]
    fn squeeze_parameters() {
        let xi = |mu2: f64| {
            squeeze_decompose(&protocol_map_for_mu([1.0, mu2, 1.0], &lossless(), 1.0).unwrap()).unwrap()
        };
        assert!(xi(1.0).abs() < 1e-15);
        assert_relative_eq!(xi(std::f64::consts::E), -1.0, max_relative = 1e-14);
        assert_relative_eq!(xi((0.3f64 / 3.0).exp()), -0.1, max_relative = 1e-12);
        let lossy = DerivedQuantities::from_epsilon(1e-3, 10.0).unwrap();
        let pm = protocol_map_for_mu([1.0, 1.2, 1.0], &lossy, 1.0).unwrap();
        assert!(matches!(squeeze_decompose(&pm), Err(Error::NotSqueezedSwap { .. })));
    }

    #[test]
    fn swap_exchanges_vacuum_and_thermal() {
        let swap = ProtocolMap::<f64>::ideal_swap();
        let out = propagate(&GaussianState::vacuum(), &swap).unwrap();
        assert_eq!(out.cov, Mat4::identity());
        let input = GaussianState::product(&ModeState::thermal(10.0), &ModeState::coherent(0.0, 0.0));
        let out = propagate(&input, &swap).unwrap();
        assert_eq!(out.mechanics().cov, Mat2::identity());
        assert_eq!(out.light().cov, Mat2::identity().scale(21.0));
        assert_eq!(mech_occupancy(&out), 0.0);
    }

    #[test]
    fn occupancy_definition() {
        assert_eq!(mech_occupancy(&GaussianState::<f64>::vacuum()), 0.0);
        assert_eq!(mech_occupancy(&GaussianState::thermal_mechanics(5.0f64)), 5.0);
        let coh = GaussianState::product(&ModeState::coherent(2.0f64, 0.0), &ModeState::vacuum());
        assert_eq!(mech_occupancy(&coh), 1.0);
    }

    #[test]
    fn propagate_flags_unphysical_noise() {
        let mut pm = ProtocolMap::<f64>::identity();
        pm.m = Mat4::diagonal([0.5, 0.5, 1.0, 1.0]);
        assert!(matches!(
            propagate(&GaussianState::vacuum(), &pm),
            Err(Error::Unphysical { .. })
        ));
        pm.v_ff = Mat4::diagonal([0.75, 0.75, 0.0, 0.0]);
        assert!(propagate(&GaussianState::vacuum(), &pm).is_ok());
    }

    #[test]
    fn table_hot_row() {
        let d = derive_quantities(&PhysicalParams::<f64>::microstring(4.0)).unwrap();
        let n = pipeline_occupancy([1.0; 3], &d, 1.0).unwrap();
        assert!((n - 0.606).abs() < 5e-3, "{n}");
        let a = analytic_occupancy([1.0; 3], d.epsilon, 1.0, d.n_bath);
        assert!((a - 0.6065).abs() < 5e-4, "{a}");
        assert!((a - n).abs() < 1e-3);
    }

    #[test]
    fn analytic_reduces_to_minimum_formula() {
        let (eps, nb) = (3e-6f64, 2e4);
        let a = analytic_occupancy([1.0; 3], eps, 1.0, nb);
        let expect = std::f64::consts::PI * eps / 4.0 * (3.0 * (2.0 * nb + 1.0) - 2.0);
        assert_relative_eq!(a, expect, max_relative = 1e-12);
        assert_relative_eq!(minimum_occupancy(eps, 1.0, nb), expect, max_relative = 1e-12);
    }

    #[test]
    fn cooperativity_values() {
        let d = derive_quantities(&PhysicalParams::<f64>::microstring(4.0)).unwrap();
        let c = cooperativity([1.0; 3], d.epsilon, d.sigma, 1.0, d.eta_m).unwrap();
        assert_relative_eq!(c, 7.72e5, max_relative = 1e-3);
        let eps = 1e-5;
        let c = cooperativity([1.0; 3], eps, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(c, 3.0 / (8.0 * std::f64::consts::PI * eps), max_relative = 1e-14);
        let c1 = cooperativity([0.0, 1.0, 0.0], eps, 0.9, 0.8, 0.7).unwrap();
        let c2 = cooperativity([0.0, 2.0, 0.0], eps, 0.9, 0.8, 0.7).unwrap();
        assert_relative_eq!(c2 / c1, 4.0, max_relative = 1e-14);
        assert_eq!(cooperativity([1.0; 3], 0.0, 1.0, 1.0, 1.0), Err(Error::UndampedCooperativity));
    }

    #[test]
    fn criteria_flags() {
        let d = derive_quantities(&PhysicalParams::<f64>::microstring(4.0)).unwrap();
        let c = cooperativity([1.0; 3], d.epsilon, d.sigma, 1.0, d.eta_m).unwrap();
        let k = cooling_criteria(d.epsilon, 1.0, d.n_bath, c);
        assert_relative_eq!(k.damping_bound, 1.372e6, max_relative = 1e-3);
        assert!(k.below_damping_bound && k.below_cooperativity_bound && k.optical_efficiency_ok);
        assert_relative_eq!(k.cooperativity_bound, (4.0f64 / 3.0).powi(2) * c, max_relative = 1e-14);
        assert!(!cooling_criteria(1e-7, 0.1, 10.0, 1e5).optical_efficiency_ok);
    }

    #[test]
    fn optimal_plan_lossless_limit() {
        let p = optimal_plan(0.0f64, 1.0, 1.0, 100.0).unwrap();
        assert_eq!(p.mu_closed_form, [1.0; 3]);
        assert_eq!(p.n_min, 0.0);
        for m in p.mu_numeric {
            assert!((m - 1.0).abs() < 1e-4, "{:?}", p.mu_numeric);
        }
    }

    #[test]
    fn optimal_plan_cold_row() {
        let d = derive_quantities(&PhysicalParams::<f64>::microstring(0.05)).unwrap();
        let p = optimal_plan(d.epsilon, 1.0, d.eta_m, d.n_bath).unwrap();
        assert!((p.n_min - 0.008).abs() < 1e-3, "{}", p.n_min);
        assert!(p.n_numeric <= p.n_min + 1e-9);
    }

    #[test]
    fn tolerance_at_q_million() {
        let eps = 1.0 / (2.0 * 1e6) * (1.0f64 + 0.25e-12).sqrt();
        let w = tolerance_width(eps, 1.0, 5e3).unwrap();
        assert!((w.dn_over_n * 100.0 - 0.61).abs() < 0.05, "{}", w.dn_over_n);
        let ratio = w.width_numeric / w.width_analytic;
        assert!((0.8..=1.2).contains(&ratio), "{ratio}");
    }

    #[test]
    fn surface_zero_damping_column() {
        let cells = cooling_surface(&[0.0f64], &[1.0, 1e3, 1e6], 0.8).unwrap();
        for c in cells {
            assert_relative_eq!(c.n_final, 0.25 * (1.0 / 0.8 - 1.0), max_relative = 1e-10);
        }
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1e-8f64, 1e-2, 7);
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], 1e-8);
        assert_eq!(v[6], 1e-2);
        assert_relative_eq!(v[3], 1e-5, max_relative = 1e-12);
    }
}
