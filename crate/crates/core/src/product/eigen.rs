//! Eigenvalue-based exponents from a rescaled extended-precision product.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::bigfloat::{charpoly, BigComplex, BigMatrix};
use super::roots::aberth;
use crate::ensemble::{DysonIndex, GinibreFactor};
use crate::error::{Error, Result};

/// Default tolerance on `|sin θ|` below which a β = 1 eigenvalue counts as real.
pub const REAL_TOL: f64 = 1e-6;

/// Absolute tolerance for `Σ ln|z_n| = Σ_i ln|det X_i|`.
const DET_TOL: f64 = 1e-9;

/// `Y = e^s Ŷ` accumulated one factor at a time, `max|Ŷ_ij| = 1` after every step.
#[derive(Clone, Debug)]
pub struct ScaledProduct {
    beta: DysonIndex,
    matrix: Option<BigMatrix>,
    log_scale: f64,
    log_det: f64,
    steps: usize,
    prec: u32,
}

impl ScaledProduct {
    pub fn new(beta: DysonIndex, prec: u32) -> Self {
        Self {
            beta,
            matrix: None,
            log_scale: 0.0,
            log_det: 0.0,
            steps: 0,
            prec,
        }
    }

    pub fn push(&mut self, factor: &DMatrix<Complex64>) -> Result<()> {
        let real = self.beta == DysonIndex::Real;
        let next = match &self.matrix {
            None => BigMatrix::from_f64(factor, self.prec, real),
            Some(m) => {
                if factor.ncols() != m.rows() {
                    return Err(Error::Dimension(format!(
                        "factor with {} columns cannot follow a product with {} rows",
                        factor.ncols(),
                        m.rows()
                    )));
                }
                m.left_mul_f64(factor)
            }
        };
        let mut next = next;
        let m = next.max_abs();
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::DegenerateSample(format!("partial product vanished at step {}", self.steps + 1)));
        }
        next.div_scalar(m);
        self.log_scale += m.ln();
        if factor.is_square() {
            self.log_det += factor.clone().lu().determinant().norm().ln();
        } else {
            self.log_det = f64::NAN;
        }
        self.matrix = Some(next);
        self.steps += 1;
        Ok(())
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn matrix(&self) -> Option<&BigMatrix> {
        self.matrix.as_ref()
    }

    /// `Σ_i ln|det X_i|` accumulated in double precision (NaN for rectangular chains).
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Eigenvalue exponents and phases of the current product.
    pub fn eigen(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let m = self
            .matrix
            .as_ref()
            .ok_or_else(|| Error::Dimension("no factors accumulated".into()))?;
        if m.rows() != m.cols() {
            return Err(Error::Dimension(format!(
                "eigenvalues need a square product, got {}×{}",
                m.rows(),
                m.cols()
            )));
        }
        let roots = aberth(&charpoly(m))?;
        let n = roots.len();
        let logs: Vec<f64> = roots.iter().map(BigComplex::ln_abs).collect();

        let identity = logs.iter().sum::<f64>() + n as f64 * self.log_scale;
        if self.log_det.is_finite() && (identity - self.log_det).abs() > DET_TOL {
            return Err(Error::Precision {
                bits: self.prec,
                suggested_bits: 2 * self.prec,
                detail: format!(
                    "eigenvalue log-moduli sum to {identity:.12} but the determinant gives {:.12}",
                    self.log_det
                ),
            });
        }

        let t = self.steps as f64;
        let mut pairs: Vec<(f64, f64)> = roots
            .iter()
            .zip(&logs)
            .map(|(z, &l)| ((l + self.log_scale) / t, z.arg()))
            .collect();
        // Descending in λ; ties keep their original order.
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

        if self.beta == DysonIndex::Quaternion {
            pairs = select_upper_half(&pairs, self.prec)?;
        } else {
            for p in &mut pairs {
                p.1 = p.1.rem_euclid(2.0 * PI);
            }
        }
        Ok(pairs.into_iter().unzip())
    }
}

/// Keeps one representative per conjugate pair, the one with `θ ∈ [0, π]`.
fn select_upper_half(pairs: &[(f64, f64)], prec: u32) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(pairs.len() / 2);
    let mut used = vec![false; pairs.len()];
    for i in 0..pairs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        // Partner: unused root with the closest (λ, −θ).
        let partner = (0..pairs.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                let da = (pairs[a].0 - pairs[i].0).abs() + angle_gap(pairs[a].1, -pairs[i].1);
                let db = (pairs[b].0 - pairs[i].0).abs() + angle_gap(pairs[b].1, -pairs[i].1);
                da.total_cmp(&db)
            })
            .ok_or_else(|| Error::Precision {
                bits: prec,
                suggested_bits: 2 * prec,
                detail: "odd number of quaternionic eigenvalues".into(),
            })?;
        let gap = (pairs[partner].0 - pairs[i].0).abs() + angle_gap(pairs[partner].1, -pairs[i].1);
        if gap > 1e-6 {
            return Err(Error::Precision {
                bits: prec,
                suggested_bits: 2 * prec,
                detail: format!("quaternionic eigenvalues are not conjugate-paired (gap {gap:.3e})"),
            });
        }
        used[partner] = true;
        let theta = pairs[i].1.abs();
        out.push((0.5 * (pairs[i].0 + pairs[partner].0), theta.min(PI)));
    }
    Ok(out)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Counts eigenvalues with `|sin θ| < tol` and snaps their phases to 0 or π.
pub fn classify_real(lambda: &[f64], theta: &mut [f64], tol: f64) -> usize {
    debug_assert_eq!(lambda.len(), theta.len());
    let mut count = 0;
    for th in theta.iter_mut() {
        if th.sin().abs() < tol {
            *th = if th.cos() > 0.0 { 0.0 } else { PI };
            count += 1;
        }
    }
    count
}

/// Eigenvalue exponents `λ_n = ln|z_n|/t` and phases of the product of `factors`.
pub fn eigen_exponents(factors: &[GinibreFactor], precision_bits: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    let first = factors.first().ok_or_else(|| Error::Dimension("empty factor chain".into()))?;
    let mut prod = ScaledProduct::new(first.beta(), precision_bits);
    for f in factors {
        prod.push(f.matrix())?;
    }
    prod.eigen()
}

/// `(Ŷ, s)` with `Y = e^s Ŷ`.
pub fn scaled_product(factors: &[GinibreFactor], precision_bits: u32) -> Result<(BigMatrix, f64)> {
    let first = factors.first().ok_or_else(|| Error::Dimension("empty factor chain".into()))?;
    let mut prod = ScaledProduct::new(first.beta(), precision_bits);
    for f in factors {
        prod.push(f.matrix())?;
    }
    let s = prod.log_scale();
    Ok((prod.matrix.expect("nonempty chain"), s))
}
