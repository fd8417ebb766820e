//! Singular exponents by thin-QR renormalisation of a propagated frame.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ensemble::{DysonIndex, GinibreFactor};
use crate::error::{Error, Result};

/// Orthonormal frame `Q` (thin, `k` columns) with the accumulated `Σ ln|R_nn|`.
///
/// Column `j` of the accumulator keeps its identity across steps, which is
/// what makes per-column statistics (e.g. ordering of two specific exponents)
/// meaningful for square profiles.
#[derive(Clone, Debug)]
pub struct QrAccumulator {
    beta: DysonIndex,
    frame: DMatrix<Complex64>,
    log_diag: Vec<f64>,
    steps: usize,
}

impl QrAccumulator {
    /// Frame of `n` quaternion/complex/real columns embedded in `dim0` rows.
    pub fn new(beta: DysonIndex, n: usize) -> Self {
        let k = beta.embedding_size() * n;
        Self {
            beta,
            frame: DMatrix::identity(k, k),
            log_diag: vec![0.0; k],
            steps: 0,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Applies `B ← X Q`, refactors `B = Q R` with `diag R > 0`, accumulates `ln R_nn`.
    pub fn push(&mut self, factor: &DMatrix<Complex64>) -> Result<()> {
        if factor.ncols() != self.frame.nrows() {
            return Err(Error::Dimension(format!(
                "factor with {} columns cannot act on a frame of {} rows",
                factor.ncols(),
                self.frame.nrows()
            )));
        }
        let b = factor * &self.frame;
        let qr = b.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..r.ncols() {
            let d = r[(j, j)];
            let mag = d.norm();
            if !(mag > 0.0) || !mag.is_finite() {
                return Err(Error::DegenerateSample(format!("rank collapse in column {j} at step {}", self.steps + 1)));
            }
            let phase = d / mag;
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
            self.log_diag[j] += mag.ln();
        }
        self.frame = q;
        self.steps += 1;
        Ok(())
    }

    /// Accumulated `ln|R_nn|` per frame column, divided by the step count.
    pub fn column_exponents(&self) -> Vec<f64> {
        let t = self.steps.max(1) as f64;
        let raw: Vec<f64> = self.log_diag.iter().map(|v| v / t).collect();
        match self.beta {
            DysonIndex::Quaternion => raw.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect(),
            _ => raw,
        }
    }

    /// `γ_1 ≥ … ≥ γ_N`; for β = 4 the 2N values are sorted and paired.
    pub fn exponents(&self) -> Vec<f64> {
        let t = self.steps.max(1) as f64;
        let mut raw: Vec<f64> = self.log_diag.iter().map(|v| v / t).collect();
        sort_descending(&mut raw);
        match self.beta {
            DysonIndex::Quaternion => raw.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect(),
            _ => raw,
        }
    }
}

pub(crate) fn sort_descending(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// `γ_n = ln σ_n / t` of the product of `factors`, sorted descending.
pub fn singular_exponents(factors: &[GinibreFactor]) -> Result<Vec<f64>> {
    let first = factors.first().ok_or_else(|| Error::Dimension("empty factor chain".into()))?;
    let beta = first.beta();
    let k = first.cols();
    let mut acc = QrAccumulator::new(beta, k / beta.embedding_size());
    for f in factors {
        acc.push(f.matrix())?;
    }
    Ok(acc.exponents())
}
