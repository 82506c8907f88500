//! Small fixed-size dense matrices over [`Scalar`].
//!
//! Everything the protocol needs lives in 2×2, 4×4 and (for the physicality
//! test of a two-mode covariance) 8×8 real matrices, so a const-generic array
//! wrapper is enough and keeps the numeric core independent of the scalar type.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Dense `N×N` matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar + Serialize + for<'a> Deserialize<'a>")]
pub struct SquareMatrix<T, const N: usize>(
    #[serde(with = "rows")] pub [[T; N]; N],
);

/// Length-`N` column vector.
pub type Vector<T, const N: usize> = [T; N];

pub type Mat2<T> = SquareMatrix<T, 2>;
pub type Mat4<T> = SquareMatrix<T, 4>;

impl<T: Scalar, const N: usize> SquareMatrix<T, N> {
    pub fn zeros() -> Self {
        Self([[T::zero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = T::one();
        }
        m
    }

    pub fn diagonal(d: [T; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn from_rows(rows: [[T; N]; N]) -> Self {
        Self(rows)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v = *v * s);
        out
    }

    pub fn mul_vec(&self, v: &Vector<T, N>) -> Vector<T, N> {
        let mut out = [T::zero(); N];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row.iter().zip(v).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
        out
    }

    /// `self · v · selfᵀ`, the congruence used for covariance propagation.
    pub fn congruence(&self, v: &Self) -> Self {
        *self * *v * self.transpose()
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flatten()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Largest entrywise deviation from symmetry.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..N {
            for j in (i + 1)..N {
                worst = worst.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        worst
    }

    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        let mut out = *self;
        for i in 0..N {
            for j in (i + 1)..N {
                let s = (self.0[i][j] + self.0[j][i]) * half;
                out.0[i][j] = s;
                out.0[j][i] = s;
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..N).fold(T::zero(), |acc, i| acc + self.0[i][i])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    /// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi sweeps).
    pub fn symmetric_eigenvalues(&self) -> [T; N] {
        let mut a = self.symmetrized().0;
        let tol = T::eps() * T::lit(0.5);
        for _sweep in 0..100 {
            let mut off = T::zero();
            let mut diag = T::zero();
            for i in 0..N {
                diag = diag + a[i][i] * a[i][i];
                for j in (i + 1)..N {
                    off = off + a[i][j] * a[i][j];
                }
            }
            if off <= tol * tol * diag || off == T::zero() {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    if a[p][q] == T::zero() {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..N {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..N {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev = [T::zero(); N];
        for i in 0..N {
            ev[i] = a[i][i];
        }
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }
}

impl<T: Scalar> Mat2<T> {
    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Self([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }
}

impl<T: Scalar> Mat4<T> {
    /// Top-left (mechanical) or bottom-right (optical) 2×2 block.
    pub fn block(&self, mode: usize) -> Mat2<T> {
        let o = 2 * mode;
        Mat2::from_rows([
            [self.0[o][o], self.0[o][o + 1]],
            [self.0[o + 1][o], self.0[o + 1][o + 1]],
        ])
    }

    pub fn direct_sum(a: &Mat2<T>, b: &Mat2<T>) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a.0[i][j];
                m.0[i + 2][j + 2] = b.0[i][j];
            }
        }
        m
    }
}

/// Single-mode symplectic form `[[0, 1], [-1, 0]]`.
pub fn omega2<T: Scalar>() -> Mat2<T> {
    Mat2::from_rows([[T::zero(), T::one()], [-T::one(), T::zero()]])
}

/// Two-mode block-diagonal symplectic form.
pub fn omega4<T: Scalar>() -> Mat4<T> {
    Mat4::direct_sum(&omega2(), &omega2())
}

/// Smallest eigenvalue of the Hermitian matrix `cov + iΩ`, via its real 2N
/// embedding `[[cov, -Ω], [Ω, cov]]`.
pub fn min_heisenberg_eigenvalue<T: Scalar>(cov: &Mat4<T>) -> T {
    let om = omega4::<T>();
    let mut big = SquareMatrix::<T, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            big.0[i][j] = cov.0[i][j];
            big.0[i + 4][j + 4] = cov.0[i][j];
            big.0[i][j + 4] = -om.0[i][j];
            big.0[i + 4][j] = om.0[i][j];
        }
    }
    big.symmetric_eigenvalues()[0]
}

/// Single-mode counterpart of [`min_heisenberg_eigenvalue`]: the closed-form
/// smaller eigenvalue of `cov + iΩ` for a 2×2 symmetric `cov`.
pub fn min_heisenberg_eigenvalue_2<T: Scalar>(cov: &Mat2<T>) -> T {
    let a = cov.0[0][0];
    let d = cov.0[1][1];
    let b = (cov.0[0][1] + cov.0[1][0]) * T::lit(0.5);
    let half_tr = (a + d) * T::lit(0.5);
    let disc = ((a - d) * (a - d) * T::lit(0.25) + b * b + T::one()).sqrt();
    half_tr - disc
}

impl<T: Scalar, const N: usize> Mul for SquareMatrix<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] = out.0[i][j] + a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<T: Scalar, const N: usize> Add for SquareMatrix<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] = out.0[i][j] + rhs.0[i][j];
            }
        }
        out
    }
}

impl<T: Scalar, const N: usize> Sub for SquareMatrix<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar, const N: usize> Neg for SquareMatrix<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T, const N: usize> Index<(usize, usize)> for SquareMatrix<T, N> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T, const N: usize> IndexMut<(usize, usize)> for SquareMatrix<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

mod rows {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S, T, const N: usize>(m: &[[T; N]; N], s: S) -> Result<S::Ok, S::Error>
    where
        S: Serializer,
        T: Serialize,
    {
        let rows: Vec<&[T]> = m.iter().map(|r| r.as_slice()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D, T, const N: usize>(d: D) -> Result<[[T; N]; N], D::Error>
    where
        D: Deserializer<'de>,
        T: Deserialize<'de> + Copy + Default,
    {
        let rows: Vec<Vec<T>> = Vec::deserialize(d)?;
        if rows.len() != N || rows.iter().any(|r| r.len() != N) {
            return Err(D::Error::custom(format!("expected a {N}x{N} matrix")));
        }
        let mut out = [[T::default(); N]; N];
        for (o, r) in out.iter_mut().zip(rows) {
            o.copy_from_slice(&r);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_squares_to_minus_identity() {
        let om = omega4::<f64>();
        assert_eq!(om * om, -Mat4::identity());
        assert_eq!(om.transpose(), -om);
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        let m = Mat4::<f64>::from_rows([
            [4.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 0.0, 0.0],
            [0.0, 0.0, 2.0, 0.5],
            [0.0, 0.0, 0.5, 2.0],
        ]);
        let ev = m.symmetric_eigenvalues();
        let s5 = 5f64.sqrt();
        let expect = [1.5, 2.5, 3.5 - s5 / 2.0, 3.5 + s5 / 2.0];
        let mut e = expect;
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ev.iter().zip(e) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn vacuum_saturates_heisenberg_bound() {
        let v = Mat4::<f64>::identity();
        assert!(min_heisenberg_eigenvalue(&v).abs() < 1e-14);
        assert!(min_heisenberg_eigenvalue_2(&Mat2::<f64>::identity()).abs() < 1e-15);
        let squeezed = Mat4::<f64>::diagonal([0.5, 2.0, 1.0, 1.0]);
        assert!(min_heisenberg_eigenvalue(&squeezed).abs() < 1e-14);
        let bad = Mat4::<f64>::diagonal([0.5, 1.0, 1.0, 1.0]);
        assert!(min_heisenberg_eigenvalue(&bad) < -0.1);
    }

    #[test]
    fn generic_over_f32() {
        let m = Mat2::<f32>::from_rows([[2.0, 1.0], [1.0, 2.0]]);
        let ev = m.symmetric_eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-6 && (ev[1] - 3.0).abs() < 1e-6);
        assert!((m.inverse().unwrap() * m - Mat2::identity()).max_abs() < 1e-6);
    }
}
