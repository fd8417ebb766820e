//! Simultaneous polynomial root finding (Aberth–Ehrlich) in MPFR arithmetic.
//!
//! Starting points follow the Newton-polygon construction: the upper convex
//! hull of `(k, ln|c_k|)` gives one circle per hull edge, with as many
//! starting points as the edge is long. The product spectra handled here have
//! moduli spread over hundreds of orders of magnitude, so all radii are kept
//! as logarithms.

use std::f64::consts::PI;

use rug::{Assign, Float};

use super::bigfloat::{ln_abs_float, BigComplex};
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;
const EXTRA_SWEEPS: usize = 2;

/// Roots of the monic polynomial `z^n + c_{n-1} z^{n-1} + … + c_0`.
pub fn aberth(coeffs: &[BigComplex]) -> Result<Vec<BigComplex>> {
    let n = coeffs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = coeffs[0].prec();
    if coeffs[0].is_zero() {
        return Err(Error::DegenerateSample("characteristic polynomial has a zero root".into()));
    }
    let mut z = initial_points(coeffs, prec);
    let mut tol = Float::with_val(prec, 1);
    tol >>= prec / 2;

    let mut converged_at = None;
    for iter in 0..MAX_ITERATIONS {
        let mut max_rel = Float::new(53);
        for i in 0..n {
            let (p, dp) = horner(coeffs, &z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p.div(&dp);
            let mut sum = BigComplex::zero(prec);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let mut d = z[i].clone();
                    d.sub_assign(zj);
                    sum.add_assign(&BigComplex::from_f64(prec, 1.0, 0.0).div(&d));
                }
            }
            let mut den = BigComplex::from_f64(prec, 1.0, 0.0);
            den.sub_assign(&ratio.mul(&sum));
            let w = ratio.div(&den);
            let rel = Float::with_val(53, w.norm() / z[i].norm());
            if rel > max_rel {
                max_rel = rel;
            }
            z[i].sub_assign(&w);
        }
        if !max_rel.is_finite() {
            return Err(Error::Precision {
                bits: prec,
                suggested_bits: prec * 2,
                detail: "root iteration diverged".into(),
            });
        }
        match converged_at {
            None if max_rel < tol => converged_at = Some(iter),
            Some(at) if iter >= at + EXTRA_SWEEPS => return Ok(z),
            _ => {}
        }
    }
    Err(Error::Precision {
        bits: prec,
        suggested_bits: prec * 2,
        detail: format!("root iteration did not converge in {MAX_ITERATIONS} sweeps"),
    })
}

/// `p(z)` and `p'(z)` for the monic polynomial.
fn horner(coeffs: &[BigComplex], z: &BigComplex) -> (BigComplex, BigComplex) {
    let n = coeffs.len();
    let prec = z.prec();
    let mut p = BigComplex::from_f64(prec, 1.0, 0.0);
    let mut dp = BigComplex::zero(prec);
    for k in (0..n).rev() {
        dp = dp.mul(z);
        dp.add_assign(&p);
        p = p.mul(z);
        p.add_assign(&coeffs[k]);
    }
    (p, dp)
}

fn initial_points(coeffs: &[BigComplex], prec: u32) -> Vec<BigComplex> {
    let n = coeffs.len();
    // (k, ln|c_k|) with c_n = 1.
    let logs: Vec<f64> = coeffs.iter().map(|c| ln_abs_float(&c.norm())).chain(std::iter::once(0.0)).collect();

    // Upper convex hull, scanning k = 0..=n.
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..=n {
        if !logs[k].is_finite() {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b as f64 - a as f64) * (logs[k] - logs[a]) - (logs[b] - logs[a]) * (k as f64 - a as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }

    let mut points = Vec::with_capacity(n);
    // Off-axis offset so real polynomials do not start on the real line.
    let offset = 0.4;
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = b - a;
        let log_r = (logs[a] - logs[b]) / m as f64;
        let mut r = Float::with_val(prec, log_r);
        r.exp_mut();
        for j in 0..m {
            let angle = 2.0 * PI * j as f64 / m as f64 + offset + 0.1 * points.len() as f64;
            let mut re = Float::with_val(prec, &r);
            re *= angle.cos();
            let mut im = Float::with_val(prec, &r);
            im *= angle.sin();
            let mut c = BigComplex::zero(prec);
            c.re.assign(re);
            c.im.assign(im);
            points.push(c);
        }
    }
    points
}
