//! Brute-force validators that share no code path with the closed forms:
//! Monte-Carlo sampling of the Gaussian channel and a truncated
//! number-basis simulation of the lossless protocol.
//!
//! Both are fixed to `f64`.

use nalgebra::{DMatrix, DVector, SMatrix, SymmetricEigen};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, ProtocolMap};
use crate::linalg::Mat4;
use crate::phasespace::{GridSpec, StateSpec, WignerGrid};

type C64 = Complex<f64>;
type M4 = SMatrix<f64, 4, 4>;

pub const MIN_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Samples per batch; batches are the jackknife blocks.
    pub batch: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            seed: 42,
            batch: 10_000,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < MIN_SAMPLES {
            return Err(crate::error::invalid(
                "n_samples",
                format!("need at least {MIN_SAMPLES}, got {}", self.n_samples),
            ));
        }
        if self.batch < 2 || self.n_samples / self.batch < 2 {
            return Err(crate::error::invalid(
                "batch",
                format!("need at least two batches of two samples, got batch {}", self.batch),
            ));
        }
        Ok(())
    }

    fn batches(&self) -> usize {
        self.n_samples / self.batch
    }

    fn batch_len(&self, k: usize) -> usize {
        if k + 1 == self.batches() {
            self.n_samples - self.batch * k
        } else {
            self.batch
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub cov: Mat4<f64>,
    /// Jackknife standard error of each covariance entry.
    pub std_err: Mat4<f64>,
    pub mech_occupancy: f64,
    pub mech_occupancy_std_err: f64,
    pub n_samples: usize,
    pub batches: usize,
}

impl McEstimate {
    /// Largest `|cov − exact| / std_err` over all entries.
    pub fn max_z_score(&self, exact: &Mat4<f64>) -> f64 {
        let mut z = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let d = (self.cov[(i, j)] - exact[(i, j)]).abs();
                let se = self.std_err[(i, j)];
                z = z.max(if se > 0.0 { d / se } else if d == 0.0 { 0.0 } else { f64::INFINITY });
            }
        }
        z
    }
}

fn to_na(m: &Mat4<f64>) -> M4 {
    M4::from_fn(|i, j| m[(i, j)])
}

fn from_na(m: &M4) -> Mat4<f64> {
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

/// Symmetric square root; rejects matrices with an eigenvalue below
/// `−1e-12 · max(1, ‖V‖)`.
fn psd_sqrt(v: &Mat4<f64>) -> Result<M4> {
    let a = to_na(&v.symmetrized());
    let eig = SymmetricEigen::new(a);
    let scale = 1.0f64.max(v.max_abs());
    let min = eig.eigenvalues.min();
    if min < -1e-12 * scale {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    let d = M4::from_diagonal(&eig.eigenvalues.map(|x| x.max(0.0).sqrt()));
    Ok(eig.eigenvectors * d * eig.eigenvectors.transpose())
}

#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    s1: [f64; 4],
    s2: M4,
}

impl Moments {
    fn zero() -> Self {
        Self {
            n: 0.0,
            s1: [0.0; 4],
            s2: M4::zeros(),
        }
    }

    fn add(&mut self, o: &Self) {
        self.n += o.n;
        for i in 0..4 {
            self.s1[i] += o.s1[i];
        }
        self.s2 += o.s2;
    }

    fn minus(&self, o: &Self) -> Self {
        let mut s1 = self.s1;
        for (a, b) in s1.iter_mut().zip(o.s1) {
            *a -= b;
        }
        Self {
            n: self.n - o.n,
            s1,
            s2: self.s2 - o.s2,
        }
    }

    /// Unbiased sample covariance.
    fn cov(&self) -> M4 {
        M4::from_fn(|i, j| (self.s2[(i, j)] - self.s1[i] * self.s1[j] / self.n) / (self.n - 1.0))
    }
}

fn occupancy(c: &M4) -> f64 {
    (c[(0, 0)] + c[(1, 1)] - 2.0) * 0.25
}

/// Samples `y = m·x + f` with `x ~ N(0, v_in)` and `f ~ N(0, v_ff)` and
/// returns the sample covariance of `y`.
///
/// Batch `k` draws from ChaCha8 stream `k` keyed by `seed`; batch moments are
/// merged in index order, so the result does not depend on the thread count.
pub fn mc_covariance(pm: &ProtocolMap<f64>, v_in: &Mat4<f64>, cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    GaussianState {
        mean: [0.0; 4],
        cov: *v_in,
    }
    .check_physical()?;
    let a = to_na(&pm.m) * psd_sqrt(v_in)?;
    let b = psd_sqrt(&pm.v_ff)?;

    let per_batch: Vec<Moments> = (0..cfg.batches())
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            let mut mom = Moments::zero();
            for _ in 0..cfg.batch_len(k) {
                let z1 = nalgebra::Vector4::from_fn(|_, _| StandardNormal.sample(&mut rng));
                let z2 = nalgebra::Vector4::from_fn(|_, _| StandardNormal.sample(&mut rng));
                let y = a * z1 + b * z2;
                for i in 0..4 {
                    mom.s1[i] += y[i];
                }
                mom.s2 += y * y.transpose();
                mom.n += 1.0;
            }
            mom
        })
        .collect();

    let mut total = Moments::zero();
    for m in &per_batch {
        total.add(m);
    }
    let full = total.cov();

    let nb = per_batch.len() as f64;
    let leave_out: Vec<M4> = per_batch.iter().map(|m| total.minus(m).cov()).collect();
    let mean_lo = leave_out.iter().fold(M4::zeros(), |acc, c| acc + c) / nb;
    let var = leave_out
        .iter()
        .fold(M4::zeros(), |acc, c| acc + (c - mean_lo).component_mul(&(c - mean_lo)))
        * ((nb - 1.0) / nb);
    let occ_lo: Vec<f64> = leave_out.iter().map(occupancy).collect();
    let occ_mean = occ_lo.iter().sum::<f64>() / nb;
    let occ_var = occ_lo.iter().map(|o| (o - occ_mean).powi(2)).sum::<f64>() * ((nb - 1.0) / nb);

    Ok(McEstimate {
        cov: from_na(&full),
        std_err: from_na(&var.map(f64::sqrt)),
        mech_occupancy: occupancy(&full),
        mech_occupancy_std_err: occ_var.sqrt(),
        n_samples: cfg.n_samples,
        batches: per_batch.len(),
    })
}

pub const LEAKAGE_THRESHOLD: f64 = 1e-8;
/// Levels at the top of each truncated mode counted as leaked population.
pub const LEAKAGE_GUARD: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockSimConfig {
    pub dim_m: usize,
    pub dim_l: usize,
    pub chi: [f64; 3],
    pub mech_in: StateSpec<f64>,
    pub light_in: StateSpec<f64>,
    pub grid: GridSpec<f64>,
}

impl FockSimConfig {
    pub fn new(chi: [f64; 3], mech_in: StateSpec<f64>, light_in: StateSpec<f64>) -> Self {
        Self {
            dim_m: 32,
            dim_l: 32,
            chi,
            mech_in,
            light_in,
            grid: GridSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("dim_m", self.dim_m), ("dim_l", self.dim_l)] {
            if d < 8 {
                return Err(crate::error::invalid(name, format!("must be at least 8, got {d}")));
            }
        }
        if self.chi.iter().any(|c| !c.is_finite()) {
            return Err(crate::error::invalid("chi", "must be finite"));
        }
        self.grid.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockSimOutput {
    /// Reduced mechanical density matrix in the number basis.
    pub rho_m: DMatrix<C64>,
    /// Largest population found in the guard levels at any step.
    pub leakage: f64,
    pub wigner: WignerGrid<f64>,
}

/// Number-basis amplitudes of a pure single-mode state, truncated to `dim`.
/// Supports Fock states, cats and coherent states (unit covariance).
pub fn number_amplitudes(spec: &StateSpec<f64>, dim: usize) -> Result<DVector<C64>> {
    spec.validate()?;
    let coherent = |alpha: C64| {
        let mut v = DVector::from_element(dim, C64::new(0.0, 0.0));
        let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..dim {
            if n > 0 {
                c = c * alpha / (n as f64).sqrt();
            }
            v[n] = c;
        }
        v
    };
    match spec {
        StateSpec::Fock(n) if *n < dim => {
            let mut v = DVector::from_element(dim, C64::new(0.0, 0.0));
            v[*n] = C64::new(1.0, 0.0);
            Ok(v)
        }
        StateSpec::Fock(n) => Err(Error::InvalidState(format!("fock({n}) does not fit in {dim} levels"))),
        StateSpec::Cat { alpha, parity } => {
            let s = match parity {
                crate::phasespace::Parity::Even => 1.0,
                crate::phasespace::Parity::Odd => -1.0,
            };
            let v = coherent(*alpha) + coherent(-*alpha) * C64::new(s, 0.0);
            let norm = (2.0 * (1.0 + s * (-2.0 * alpha.norm_sqr()).exp())).sqrt();
            Ok(v / C64::new(norm, 0.0))
        }
        StateSpec::Gaussian(g) => {
            let dev = (g.cov - crate::linalg::Mat2::identity()).max_abs();
            if dev > 1e-12 {
                return Err(Error::InvalidState(
                    "only coherent Gaussian states have a pure number-basis form here".into(),
                ));
            }
            // ⟨X⟩ = 2 Re α, ⟨P⟩ = 2 Im α.
            Ok(coherent(C64::new(g.mean[0], g.mean[1]) * 0.5))
        }
        StateSpec::GaussianPair(_) => Err(Error::InvalidState("oracle inputs are single-mode".into())),
    }
}

fn annihilation(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

/// `S(ξ)|n⟩` with `S(ξ) = exp(½(ξ a² − ξ a†²))`, so `ξ > 0` squeezes X.
pub fn squeezed_number_state(n: usize, xi: f64, dim: usize) -> Result<DVector<C64>> {
    if n >= dim {
        return Err(Error::InvalidState(format!("fock({n}) does not fit in {dim} levels")));
    }
    let big = dim + 48;
    let a = annihilation(big);
    let a2 = &a * &a;
    let k = (&a2 - a2.transpose()) * (0.5 * xi);
    let s = k.exp();
    let col = s.column(n);
    let tail: f64 = col.iter().skip(dim).map(|v| v * v).sum();
    if tail > LEAKAGE_THRESHOLD {
        return Err(Error::TruncationLeakage {
            leakage: tail,
            threshold: LEAKAGE_THRESHOLD,
        });
    }
    Ok(DVector::from_fn(dim, |i, _| C64::new(col[i], 0.0)))
}

pub fn pure_density(psi: &DVector<C64>) -> DMatrix<C64> {
    psi * psi.adjoint()
}

/// `½ Σ |λ_i(ρ − σ)|`.
pub fn trace_distance(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::InvalidState(format!(
            "density matrices differ in shape: {:?} vs {:?}",
            rho.shape(),
            sigma.shape()
        )));
    }
    let d = rho - sigma;
    let h = (&d + d.adjoint()) * C64::new(0.5, 0.0);
    Ok(0.5 * SymmetricEigen::new(h).eigenvalues.iter().map(|v| v.abs()).sum::<f64>())
}

struct XBasis {
    vectors: DMatrix<C64>,
    nodes: Vec<f64>,
}

impl XBasis {
    /// Eigenbasis of the truncated `X = a + a†`.
    fn new(dim: usize) -> Self {
        let a = annihilation(dim);
        let eig = SymmetricEigen::new(&a + a.transpose());
        Self {
            vectors: eig.eigenvectors.map(|v| C64::new(v, 0.0)),
            nodes: eig.eigenvalues.iter().copied().collect(),
        }
    }
}

/// `exp(i(χ/2) X_M X_L)` acting on `ψ[m, l]`.
fn apply_qnd(psi: &DMatrix<C64>, chi: f64, bm: &XBasis, bl: &XBasis) -> DMatrix<C64> {
    let mut c = bm.vectors.transpose() * psi * &bl.vectors;
    for (k, &x) in bm.nodes.iter().enumerate() {
        for (j, &y) in bl.nodes.iter().enumerate() {
            c[(k, j)] *= C64::from_polar(1.0, 0.5 * chi * x * y);
        }
    }
    &bm.vectors * c * bl.vectors.transpose()
}

/// Quarter-period rotation `exp(−iπn/2)` on both modes.
fn apply_rotation(psi: &mut DMatrix<C64>) {
    const PHASES: [C64; 4] = [
        C64::new(1.0, 0.0),
        C64::new(0.0, -1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 1.0),
    ];
    let (dm, dl) = psi.shape();
    for l in 0..dl {
        for m in 0..dm {
            psi[(m, l)] *= PHASES[(m + l) % 4];
        }
    }
}

fn guard_population(psi: &DMatrix<C64>) -> f64 {
    let (dm, dl) = psi.shape();
    let mut p = 0.0;
    for m in 0..dm {
        for l in 0..dl {
            if m >= dm - LEAKAGE_GUARD || l >= dl - LEAKAGE_GUARD {
                p += psi[(m, l)].norm_sqr();
            }
        }
    }
    p
}

/// Runs QND / rotation / QND / rotation / QND on a pure product input and
/// returns the reduced mechanical state with its Wigner function, computed
/// from the number-basis matrix elements.
pub fn fock_protocol_oracle(cfg: &FockSimConfig) -> Result<FockSimOutput> {
    cfg.validate()?;
    let pm = number_amplitudes(&cfg.mech_in, cfg.dim_m)?;
    let pl = number_amplitudes(&cfg.light_in, cfg.dim_l)?;
    let truncation_loss = (1.0 - pm.norm_squared()).abs() + (1.0 - pl.norm_squared()).abs();
    let mut psi = &pm * pl.transpose();
    let bm = XBasis::new(cfg.dim_m);
    let bl = XBasis::new(cfg.dim_l);

    let mut leakage = truncation_loss + guard_population(&psi);
    for (step, &chi) in cfg.chi.iter().enumerate() {
        psi = apply_qnd(&psi, chi, &bm, &bl);
        if step < 2 {
            apply_rotation(&mut psi);
        }
        leakage = leakage.max(truncation_loss + guard_population(&psi));
    }
    if leakage > LEAKAGE_THRESHOLD {
        return Err(Error::TruncationLeakage {
            leakage,
            threshold: LEAKAGE_THRESHOLD,
        });
    }
    let rho_m = &psi * psi.adjoint();
    let wigner = density_wigner(&rho_m, cfg.grid)?;
    Ok(FockSimOutput { rho_m, leakage, wigner })
}

/// Wigner function of a number-basis density matrix:
/// `W = (2π)⁻¹ e^{−r²/2} Σ_{m≥n} c_{mn} (−1)ⁿ √(n!/m!) (x − ip)^{m−n} L_n^{(m−n)}(r²)`
/// with `c_{nn} = ρ_nn` and `c_{mn} = 2ρ_mn` (real part taken) above the diagonal.
pub fn density_wigner(rho: &DMatrix<C64>, grid: GridSpec<f64>) -> Result<WignerGrid<f64>> {
    let d = rho.nrows();
    if rho.ncols() != d {
        return Err(Error::InvalidState("density matrix must be square".into()));
    }
    // coeff[k][n] = (−1)ⁿ √(n!/(n+k)!) ρ_{n+k, n}, doubled for k > 0.
    let coeff: Vec<Vec<C64>> = (0..d)
        .map(|k| {
            (0..d - k)
                .map(|n| {
                    let ratio = (1..=k).fold(1.0, |acc, j| acc / ((n + j) as f64).sqrt());
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    let w = if k == 0 { 1.0 } else { 2.0 };
                    rho[(n + k, n)] * (sign * ratio * w)
                })
                .collect()
        })
        .collect();
    WignerGrid::from_fn(grid, |x, p| {
        let r2 = x * x + p * p;
        let z = C64::new(x, -p);
        let mut zk = C64::new(1.0, 0.0);
        let mut total = 0.0;
        for (k, ck) in coeff.iter().enumerate() {
            let kf = k as f64;
            let (mut l_prev, mut l_cur) = (0.0, 1.0);
            let mut acc = C64::new(0.0, 0.0);
            for (n, c) in ck.iter().enumerate() {
                if n > 0 {
                    let nf = (n - 1) as f64;
                    let next = ((2.0 * nf + 1.0 + kf - r2) * l_cur - (nf + kf) * l_prev) / (nf + 1.0);
                    l_prev = l_cur;
                    l_cur = next;
                }
                acc += c * l_cur;
            }
            total += (acc * zk).re;
            zk *= z;
        }
        total * (-0.5 * r2).exp() / std::f64::consts::TAU
    })
}
