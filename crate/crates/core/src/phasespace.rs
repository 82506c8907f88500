//! Characteristic functions, their pushforward through the protocol channel,
//! and Wigner functions sampled on phase-space grids.
//!
//! Characteristic functions stay closures over closed forms until the final
//! Fourier step. A reciprocal-space point `β` is `(Re β, Im β)` per mode and
//! `W(r) = (2π)^{-2} ∫ χ(β) exp(−i r·Ωβ) d²β` for one mode.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, ModeState, ProtocolMap};
use crate::linalg::{min_heisenberg_eigenvalue_2, omega4, Mat2};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign<T: Scalar>(self) -> T {
        match self {
            Parity::Even => T::one(),
            Parity::Odd => -T::one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
#[serde(rename_all = "snake_case")]
pub enum StateSpec<T> {
    /// Single-mode Gaussian.
    Gaussian(ModeState<T>),
    /// Two-mode (mechanics, light) Gaussian.
    GaussianPair(GaussianState<T>),
    Fock(usize),
    Cat { alpha: Complex<T>, parity: Parity },
}

impl<T: Scalar> StateSpec<T> {
    pub fn vacuum() -> Self {
        Self::Gaussian(ModeState::vacuum())
    }

    pub fn thermal(n: T) -> Self {
        Self::Gaussian(ModeState::thermal(n))
    }

    pub fn odd_cat(alpha: Complex<T>) -> Self {
        Self::Cat {
            alpha,
            parity: Parity::Odd,
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            Self::GaussianPair(_) => 2,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gaussian(s) => {
                let ok = s.cov.is_finite()
                    && s.cov.asymmetry() <= T::lit(1e-12) * T::one().max(s.cov.max_abs())
                    && min_heisenberg_eigenvalue_2(&s.cov) >= -T::lit(1e-9) * T::one().max(s.cov.max_abs());
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidState("single-mode covariance is not physical".into()))
                }
            }
            Self::GaussianPair(s) => s.check_physical(),
            Self::Fock(_) => Ok(()),
            Self::Cat { alpha, .. } => {
                if alpha.re.is_finite() && alpha.im.is_finite() && alpha.norm_sqr() > T::zero() {
                    Ok(())
                } else {
                    Err(Error::InvalidState("cat amplitude must be finite and nonzero".into()))
                }
            }
        }
    }
}

type CfFn<T> = dyn Fn(&[T]) -> Complex<T> + Send + Sync;

/// Evaluable characteristic function over `2·modes` real coordinates.
#[derive(Clone)]
pub struct CharacteristicFunction<T> {
    modes: usize,
    f: Arc<CfFn<T>>,
}

impl<T> fmt::Debug for CharacteristicFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharacteristicFunction")
            .field("modes", &self.modes)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> CharacteristicFunction<T> {
    pub fn new(modes: usize, f: impl Fn(&[T]) -> Complex<T> + Send + Sync + 'static) -> Self {
        Self {
            modes,
            f: Arc::new(f),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Panics if `beta.len() != 2 * modes`.
    pub fn eval(&self, beta: &[T]) -> Complex<T> {
        assert_eq!(beta.len(), 2 * self.modes, "characteristic function arity");
        (self.f)(beta)
    }

    /// Convolves a single-mode state with isotropic Gaussian noise of
    /// quadrature variance `v`.
    pub fn with_isotropic_noise(&self, v: T) -> Self {
        let inner = self.clone();
        let half = T::lit(0.5);
        Self::new(self.modes, move |b| {
            let r2 = b.iter().fold(T::zero(), |a, &x| a + x * x);
            inner.eval(b) * (-half * v * r2).exp()
        })
    }
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)` by upward recurrence.
pub fn laguerre<T: Scalar>(n: usize, k: usize, x: T) -> T {
    let kk = T::from_usize_lossy(k);
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() + kk - x;
    for j in 1..n {
        let jj = T::from_usize_lossy(j);
        let next = ((T::lit(2.0) * jj + T::one() + kk - x) * cur - (jj + kk) * prev) / (jj + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

fn gaussian_cf_eval<T: Scalar>(mean: &[T], cov_row: impl Fn(usize, usize) -> T, b: &[T]) -> Complex<T> {
    // Ωβ for block-diagonal Ω: (β_p, −β_x) per mode.
    let n = b.len();
    let mut ob = vec![T::zero(); n];
    for m in 0..n / 2 {
        ob[2 * m] = b[2 * m + 1];
        ob[2 * m + 1] = -b[2 * m];
    }
    let mut quad = T::zero();
    for i in 0..n {
        for j in 0..n {
            quad = quad + ob[i] * cov_row(i, j) * ob[j];
        }
    }
    let phase = mean.iter().zip(&ob).fold(T::zero(), |a, (&m, &o)| a + m * o);
    Complex::from_polar((-T::lit(0.5) * quad).exp(), phase)
}

/// Closed-form characteristic function of a state family.
pub fn make_cf<T: Scalar>(spec: &StateSpec<T>) -> Result<CharacteristicFunction<T>> {
    spec.validate()?;
    let half = T::lit(0.5);
    Ok(match spec.clone() {
        StateSpec::Gaussian(s) => CharacteristicFunction::new(1, move |b| {
            gaussian_cf_eval(&s.mean, |i, j| s.cov.0[i][j], b)
        }),
        StateSpec::GaussianPair(s) => CharacteristicFunction::new(2, move |b| {
            gaussian_cf_eval(&s.mean, |i, j| s.cov.0[i][j], b)
        }),
        StateSpec::Fock(n) => CharacteristicFunction::new(1, move |b| {
            let r2 = b[0] * b[0] + b[1] * b[1];
            Complex::new((-half * r2).exp() * laguerre(n, 0, r2), T::zero())
        }),
        StateSpec::Cat { alpha, parity } => {
            let s = parity.sign::<T>();
            let overlap = (-T::lit(2.0) * alpha.norm_sqr()).exp();
            let norm = (T::one() + s * overlap).recip();
            CharacteristicFunction::new(1, move |b| {
                let beta = Complex::new(b[0], b[1]);
                let ab = alpha.conj() * beta;
                let ba = beta.conj() * alpha;
                let bracket = (ab - ba).cosh() + (ab + ba).cosh() * (s * overlap);
                bracket * ((-half * beta.norm_sqr()).exp() * norm)
            })
        }
    })
}

/// Pushes a separable mechanics ⊗ light input through the protocol:
/// `χ'(β) = χ_M(γ_M) · χ_L(γ_L) · exp(−½ (Ωβ)ᵀ V_FF (Ωβ))` with `γ = −Ω mᵀ Ω β`.
pub fn evolve_joint_cf<T: Scalar>(
    cf_m: &CharacteristicFunction<T>,
    cf_l: &CharacteristicFunction<T>,
    pm: &ProtocolMap<T>,
) -> Result<CharacteristicFunction<T>> {
    if cf_m.modes() != 1 || cf_l.modes() != 1 {
        return Err(Error::InvalidState("joint evolution needs two single-mode inputs".into()));
    }
    let om = omega4::<T>();
    let pull = -(om * pm.m.transpose() * om);
    let v_ff = pm.v_ff;
    let (cf_m, cf_l) = (cf_m.clone(), cf_l.clone());
    Ok(CharacteristicFunction::new(2, move |b| {
        let beta = [b[0], b[1], b[2], b[3]];
        let g = pull.mul_vec(&beta);
        let ob = om.mul_vec(&beta);
        let quad = ob
            .iter()
            .zip(v_ff.mul_vec(&ob))
            .fold(T::zero(), |a, (&x, y)| a + x * y);
        cf_m.eval(&g[..2]) * cf_l.eval(&g[2..]) * (-T::lit(0.5) * quad).exp()
    }))
}

/// Restriction of a two-mode characteristic function to the mechanical plane.
pub fn reduce_to_mechanics<T: Scalar>(cf2: &CharacteristicFunction<T>) -> Result<CharacteristicFunction<T>> {
    if cf2.modes() != 2 {
        return Err(Error::InvalidState("reduction needs a two-mode characteristic function".into()));
    }
    let cf2 = cf2.clone();
    Ok(CharacteristicFunction::new(1, move |b| {
        cf2.eval(&[b[0], b[1], T::zero(), T::zero()])
    }))
}

/// Mechanical output of the protocol for separable single-mode inputs.
pub fn transfer_to_mechanics<T: Scalar>(
    mech_in: &StateSpec<T>,
    light_in: &StateSpec<T>,
    pm: &ProtocolMap<T>,
) -> Result<CharacteristicFunction<T>> {
    reduce_to_mechanics(&evolve_joint_cf(&make_cf(mech_in)?, &make_cf(light_in)?, pm)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub r_max: T,
    pub n_points: usize,
}

impl<T: Scalar> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            r_max: T::lit(6.0),
            n_points: 256,
        }
    }
}

impl<T: Scalar> GridSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max.is_finite() && self.r_max > T::zero()) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {}", self.r_max)));
        }
        if self.n_points < 4 || !self.n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 4, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> T {
        T::lit(2.0) * self.r_max / T::from_usize_lossy(self.n_points)
    }

    /// Coordinate of sample `i`: `−r_max + i·dr`.
    pub fn coord(&self, i: usize) -> T {
        -self.r_max + self.spacing() * T::from_usize_lossy(i)
    }
}

/// Real quasiprobability sampled at `(x_i, p_j)`, stored `values[i * n + j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> WignerGrid<T> {
    pub fn n(&self) -> usize {
        self.grid.n_points
    }

    pub fn cell_area(&self) -> T {
        let d = self.grid.spacing();
        d * d
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.n() + j]
    }

    /// Value nearest the origin, `(x, p) = (0, 0)`.
    pub fn at_origin(&self) -> T {
        let c = self.n() / 2;
        self.at(c, c)
    }

    pub fn integral(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a + v) * self.cell_area()
    }

    pub fn from_fn(grid: GridSpec<T>, f: impl Fn(T, T) -> T + Sync) -> Result<Self> {
        grid.validate()?;
        let n = grid.n_points;
        let mut values = vec![T::zero(); n * n];
        values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let x = grid.coord(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x, grid.coord(j));
            }
        });
        Ok(Self { grid, values })
    }

    /// Every other sample along both axes.
    pub fn half_resolution(&self) -> Result<Self> {
        let n = self.n();
        let grid = GridSpec {
            r_max: self.grid.r_max,
            n_points: n / 2,
        };
        grid.validate()?;
        let values = (0..n / 2)
            .flat_map(|i| (0..n / 2).map(move |j| (2 * i, 2 * j)))
            .map(|(i, j)| self.at(i, j))
            .collect();
        Ok(Self { grid, values })
    }

    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        check_same_grid(self, other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |a, (&x, &y)| a.max((x - y).abs())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierReport<T> {
    /// Largest `|χ|` on the outer ring of the reciprocal grid.
    pub boundary_max: T,
    /// Set when `boundary_max` exceeds 1e-6.
    pub aliasing_risk: bool,
}

pub const ALIASING_THRESHOLD: f64 = 1e-6;

/// Reciprocal-grid oversampling factor. The DFT returns the Wigner function
/// periodized with period `OVERSAMPLE · 2 r_max`; the output is the central
/// block, so images of the state sit at least `(2·OVERSAMPLE − 1) r_max` away.
pub const OVERSAMPLE: usize = 2;

/// Wigner function of a single-mode characteristic function by 2-D DFT over
/// a reciprocal grid with the same extent as the one conjugate to `grid` and
/// `OVERSAMPLE` times finer spacing.
pub fn wigner_grid<T: Scalar>(
    cf: &CharacteristicFunction<T>,
    grid: GridSpec<T>,
) -> Result<(WignerGrid<T>, FourierReport<T>)> {
    grid.validate()?;
    if cf.modes() != 1 {
        return Err(Error::InvalidState("Wigner grids are single-mode".into()));
    }
    let n = grid.n_points;
    let np = OVERSAMPLE * n;
    let off = (np - n) / 2;
    let dk = T::lit(std::f64::consts::TAU) / (T::from_usize_lossy(np) * grid.spacing());
    let k = |m: usize| (T::from_usize_lossy(m) - T::from_usize_lossy(np / 2)) * dk;

    // g[m][l] = (−1)^{m+l} χ(β_x = −k_l, β_p = k_m); k_m pairs with x, k_l with p.
    let mut data = vec![Complex::<T>::new(T::zero(), T::zero()); np * np];
    data.par_chunks_mut(np).enumerate().for_each(|(m, row)| {
        let km = k(m);
        for (l, v) in row.iter_mut().enumerate() {
            let val = cf.eval(&[-k(l), km]);
            *v = if (m + l) % 2 == 0 { val } else { -val };
        }
    });
    let boundary_max = (0..np)
        .flat_map(|i| [data[i], data[i * np]])
        .fold(T::zero(), |a, c| a.max(c.norm()));

    let fft = FftPlanner::<T>::new().plan_fft_forward(np);
    data.par_chunks_mut(np).for_each(|row| fft.process(row));
    // Only the columns inside the output window need the second pass.
    let mut cols = vec![Complex::<T>::new(T::zero(), T::zero()); n * np];
    cols.par_chunks_mut(np).enumerate().for_each(|(l, col)| {
        for (m, v) in col.iter_mut().enumerate() {
            *v = data[m * np + l + off];
        }
    });
    cols.par_chunks_mut(np).for_each(|row| fft.process(row));

    // cols[l][j + off] holds the sum for (x_j, p_l).
    let scale = dk * dk / (T::lit(4.0) * T::PI() * T::PI());
    let values = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (j, l) = (idx / n, idx % n);
            let v = cols[l * np + j + off].re * scale;
            if (j + l + 2 * off) % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect();
    Ok((
        WignerGrid { grid, values },
        FourierReport {
            boundary_max,
            aliasing_risk: boundary_max > T::lit(ALIASING_THRESHOLD),
        },
    ))
}

/// Closed-form Wigner function sampled directly on the grid.
pub fn analytic_wigner<T: Scalar>(spec: &StateSpec<T>, grid: GridSpec<T>) -> Result<WignerGrid<T>> {
    spec.validate()?;
    let two_pi = T::lit(std::f64::consts::TAU);
    let half = T::lit(0.5);
    match spec.clone() {
        StateSpec::Gaussian(s) => {
            let inv: Mat2<T> = s
                .cov
                .inverse()
                .ok_or_else(|| Error::InvalidState("singular covariance".into()))?;
            let pref = (two_pi * s.cov.det().sqrt()).recip();
            WignerGrid::from_fn(grid, move |x, p| {
                let (dx, dp) = (x - s.mean[0], p - s.mean[1]);
                let q = dx * (inv.0[0][0] * dx + inv.0[0][1] * dp) + dp * (inv.0[1][0] * dx + inv.0[1][1] * dp);
                pref * (-half * q).exp()
            })
        }
        StateSpec::GaussianPair(_) => Err(Error::InvalidState(
            "analytic Wigner grids are single-mode; take a marginal first".into(),
        )),
        StateSpec::Fock(n) => {
            let sign = if n % 2 == 0 { T::one() } else { -T::one() };
            WignerGrid::from_fn(grid, move |x, p| {
                let r2 = x * x + p * p;
                sign / two_pi * (-half * r2).exp() * laguerre(n, 0, r2)
            })
        }
        StateSpec::Cat { alpha, parity } => {
            let s = parity.sign::<T>();
            let overlap = (-T::lit(2.0) * alpha.norm_sqr()).exp();
            let pref = (two_pi * (T::one() + s * overlap)).recip();
            let two = T::lit(2.0);
            WignerGrid::from_fn(grid, move |x, p| {
                let r_dot_a = x * alpha.re + p * alpha.im;
                let r_dot_wa = x * alpha.im - p * alpha.re;
                pref * (-half * (x * x + p * p)).exp()
                    * (overlap * (two * r_dot_a).cosh() + s * (two * r_dot_wa).cos())
            })
        }
    }
}

fn check_same_grid<T: Scalar>(a: &WignerGrid<T>, b: &WignerGrid<T>) -> Result<()> {
    if a.grid != b.grid || a.values.len() != b.values.len() {
        return Err(Error::GridMismatch(format!(
            "{:?} vs {:?}",
            a.grid, b.grid
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult<T> {
    pub fidelity: T,
    pub infidelity: T,
    /// Difference from the same overlap at half resolution.
    pub quadrature_error_estimate: T,
}

fn overlap<T: Scalar>(a: &WignerGrid<T>, b: &WignerGrid<T>) -> T {
    let sum = a
        .values
        .iter()
        .zip(&b.values)
        .fold(T::zero(), |acc, (&x, &y)| acc + x * y);
    T::lit(4.0) * T::PI() * sum * a.cell_area()
}

/// Overlap fidelity `4π ∫ W₁ W₂ d²r`, exact when either state is pure.
pub fn fidelity<T: Scalar>(w1: &WignerGrid<T>, w2: &WignerGrid<T>) -> Result<FidelityResult<T>> {
    check_same_grid(w1, w2)?;
    let f = overlap(w1, w2);
    let err = match (w1.half_resolution(), w2.half_resolution()) {
        (Ok(h1), Ok(h2)) => (overlap(&h1, &h2) - f).abs(),
        _ => T::nan(),
    };
    Ok(FidelityResult {
        fidelity: f,
        infidelity: T::one() - f,
        quadrature_error_estimate: err,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Negativity<T> {
    pub min_value: T,
    pub integrated: T,
}

pub fn negativity<T: Scalar>(w: &WignerGrid<T>) -> Negativity<T> {
    let min_value = w.values.iter().fold(T::infinity(), |a, &v| a.min(v));
    let integrated = w
        .values
        .iter()
        .fold(T::zero(), |a, &v| a + (-v).max(T::zero()))
        * w.cell_area();
    Negativity {
        min_value,
        integrated,
    }
}
