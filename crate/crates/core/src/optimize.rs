//! One- and three-dimensional derivative-free searches used for protocol
//! tuning: bounded Nelder–Mead, golden-section minimization and bisection.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexOptions<T> {
    pub initial_step: T,
    /// Stop once the largest vertex-to-best distance drops below this.
    pub diameter_tol: T,
    pub max_iterations: usize,
}

impl<T: Scalar> Default for SimplexOptions<T> {
    fn default() -> Self {
        Self {
            initial_step: T::lit(0.05),
            diameter_tol: T::lit(1e-6),
            max_iterations: 20_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexResult<T, const D: usize> {
    pub x: [T; D],
    pub value: T,
    pub iterations: usize,
    pub diameter: T,
}

fn clamp<T: Scalar, const D: usize>(x: [T; D], lo: &[T; D], hi: &[T; D]) -> [T; D] {
    let mut out = x;
    for i in 0..D {
        out[i] = x[i].max(lo[i]).min(hi[i]);
    }
    out
}

/// Nelder–Mead with box constraints enforced by projecting every trial point.
pub fn nelder_mead_bounded<T, const D: usize, F>(
    f: F,
    start: [T; D],
    lower: [T; D],
    upper: [T; D],
    opts: SimplexOptions<T>,
) -> Result<SimplexResult<T, D>>
where
    T: Scalar,
    F: Fn(&[T; D]) -> T,
{
    let (alpha, gamma, rho, shrink) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));
    let start = clamp(start, &lower, &upper);
    let mut simplex: Vec<([T; D], T)> = Vec::with_capacity(D + 1);
    simplex.push((start, f(&start)));
    for i in 0..D {
        let mut v = start;
        // Step inward if the seed sits on the upper bound.
        v[i] = if v[i] + opts.initial_step <= upper[i] {
            v[i] + opts.initial_step
        } else {
            v[i] - opts.initial_step
        };
        let v = clamp(v, &lower, &upper);
        simplex.push((v, f(&v)));
    }

    let diameter = |s: &[([T; D], T)]| {
        s[1..].iter().fold(T::zero(), |acc, (v, _)| {
            let d = v
                .iter()
                .zip(s[0].0.iter())
                .fold(T::zero(), |a, (x, y)| a.max((*x - *y).abs()));
            acc.max(d)
        })
    };

    for iter in 0..opts.max_iterations {
        // Ties keep the earlier (lower-occupancy-first) ordering stable.
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let diam = diameter(&simplex);
        if diam < opts.diameter_tol {
            return Ok(SimplexResult {
                x: simplex[0].0,
                value: simplex[0].1,
                iterations: iter,
                diameter: diam,
            });
        }
        let n = T::from_usize_lossy(D);
        let mut centroid = [T::zero(); D];
        for (v, _) in &simplex[..D] {
            for i in 0..D {
                centroid[i] = centroid[i] + v[i] / n;
            }
        }
        let along = |t: T| {
            let worst = &simplex[D].0;
            let mut p = [T::zero(); D];
            for i in 0..D {
                p[i] = centroid[i] + t * (worst[i] - centroid[i]);
            }
            clamp(p, &lower, &upper)
        };
        let xr = along(-alpha);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(-gamma);
            let fe = f(&xe);
            simplex[D] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[D - 1].1 {
            simplex[D] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[D].1 {
                let xc = along(-rho);
                (xc, f(&xc))
            } else {
                let xc = along(rho);
                (xc, f(&xc))
            };
            if fc < simplex[D].1.min(fr) {
                simplex[D] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for i in 0..D {
                        v[i] = best[i] + shrink * (v[i] - best[i]);
                    }
                    *fv = f(v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    Err(Error::MinimizerNotConverged {
        iterations: opts.max_iterations,
        diameter: diameter(&simplex).to_f64_lossy(),
        best: simplex[0].1.to_f64_lossy(),
    })
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
pub fn golden_section<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection for `f(x) = 0` on a bracketing interval.
pub fn bisect<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T, tol: T) -> Result<T> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::BracketFailure {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
            f_lo: fa.to_f64_lossy(),
            f_hi: fb.to_f64_lossy(),
        });
    }
    for _ in 0..400 {
        let m = (a + b) * T::lit(0.5);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm > T::zero()) == (fa > T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((a + b) * T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_finds_shifted_quadratic() {
        let f = |x: &[f64; 3]| (x[0] - 0.9).powi(2) + 4.0 * (x[1] - 1.2).powi(2) + (x[2] - 1.0).powi(2);
        let r = nelder_mead_bounded(f, [1.0; 3], [0.5; 3], [1.5; 3], SimplexOptions::default()).unwrap();
        for (a, b) in r.x.iter().zip([0.9, 1.2, 1.0]) {
            assert!((a - b).abs() < 1e-5, "{:?}", r.x);
        }
    }

    #[test]
    fn simplex_respects_bounds() {
        let f = |x: &[f64; 2]| (x[0] - 3.0).powi(2) + x[1] * x[1];
        let r = nelder_mead_bounded(f, [1.0, 1.0], [0.0, -1.0], [1.5, 1.0], SimplexOptions::default()).unwrap();
        assert!((r.x[0] - 1.5).abs() < 1e-6);
        assert!(r.x[1].abs() < 1e-5);
    }

    #[test]
    fn simplex_reports_non_convergence() {
        let opts = SimplexOptions { max_iterations: 3, ..SimplexOptions::default() };
        let err = nelder_mead_bounded(|x: &[f64; 2]| x[0] * x[0] + x[1] * x[1], [1.0, 1.0], [-2.0; 2], [2.0; 2], opts)
            .unwrap_err();
        assert!(matches!(err, Error::MinimizerNotConverged { iterations: 3, .. }));
    }

    #[test]
    fn golden_and_bisect() {
        let (x, fx) = golden_section(|x: f64| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7 && (fx - 1.0).abs() < 1e-14);
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
        assert!(matches!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-9), Err(Error::BracketFailure { .. })));
    }
}
