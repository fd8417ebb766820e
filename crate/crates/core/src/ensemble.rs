//! Sampling of rectangular Ginibre factors.
//!
//! Entry normalisation is `E|x|² = 1` per scalar entry in every symmetry
//! class:
//!
//! - β = 1: real entries `N(0, 1)`;
//! - β = 2: complex entries with independent real and imaginary parts `N(0, 1/2)`;
//! - β = 4: quaternion entries `a + bi + cj + dk` with each component `N(0, 1/4)`,
//!   stored in the 2×2 complex embedding `[[a+ib, c+id], [-c+id, a-ib]]`.
//!
//! With this normalisation the exponent means reduce to
//! `½ log(2/β) + ½ ψ(β(ν+n)/2)` without rescaling.
//!
//! Random streams are ChaCha8 keyed by `(seed, realization index)`; Gaussian
//! variates use the ziggurat transform of `rand_distr::StandardNormal`.
//! Variates are drawn row-major (for β = 4: row-major over quaternion blocks,
//! components in the order a, b, c, d).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::product::ProductSpec;

/// Symmetry class of the ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum DysonIndex {
    Real,
    Complex,
    Quaternion,
}

impl DysonIndex {
    pub const ALL: [DysonIndex; 3] = [DysonIndex::Real, DysonIndex::Complex, DysonIndex::Quaternion];

    pub fn from_beta(beta: u8) -> Result<Self> {
        match beta {
            1 => Ok(DysonIndex::Real),
            2 => Ok(DysonIndex::Complex),
            4 => Ok(DysonIndex::Quaternion),
            other => Err(Error::InvalidSpec(format!("Dyson index must be 1, 2 or 4, got {other}"))),
        }
    }

    pub fn beta(self) -> u8 {
        match self {
            DysonIndex::Real => 1,
            DysonIndex::Complex => 2,
            DysonIndex::Quaternion => 4,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.beta())
    }

    /// Complex rows/columns per scalar row/column (2 for the quaternion embedding).
    pub fn embedding_size(self) -> usize {
        match self {
            DysonIndex::Quaternion => 2,
            _ => 1,
        }
    }
}

impl TryFrom<u8> for DysonIndex {
    type Error = Error;

    fn try_from(beta: u8) -> Result<Self> {
        DysonIndex::from_beta(beta)
    }
}

impl From<DysonIndex> for u8 {
    fn from(beta: DysonIndex) -> u8 {
        beta.beta()
    }
}

impl FromStr for DysonIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let beta: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("Dyson index must be 1, 2 or 4, got {s:?}")))?;
        DysonIndex::from_beta(beta)
    }
}

impl fmt::Display for DysonIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.beta())
    }
}

/// Smallest dimension `N` and the rectangularity offsets `ν_1 ≤ … ≤ ν_t`.
///
/// Factor `i` (1-based) has shape `(N+ν_i) × (N+ν_{i-1})` with `ν_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionProfile {
    n: usize,
    nus: Vec<usize>,
}

impl DimensionProfile {
    pub fn new(n: usize, nus: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("N must be positive".into()));
        }
        if nus.is_empty() {
            return Err(Error::InvalidSpec("profile needs at least one factor (t ≥ 1)".into()));
        }
        if let Some(i) = nus.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidSpec(format!(
                "ν must be nondecreasing: ν_{} = {} > ν_{} = {}",
                i + 1,
                nus[i],
                i + 2,
                nus[i + 1]
            )));
        }
        Ok(Self { n, nus })
    }

    /// `t` factors that all share the offset `nu`.
    pub fn constant(n: usize, nu: usize, t: usize) -> Result<Self> {
        Self::new(n, vec![nu; t])
    }

    pub fn square(n: usize, t: usize) -> Result<Self> {
        Self::constant(n, 0, t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nus(&self) -> &[usize] {
        &self.nus
    }

    pub fn t(&self) -> usize {
        self.nus.len()
    }

    pub fn max_nu(&self) -> usize {
        self.nus.last().copied().unwrap_or(0)
    }

    /// Every factor is `N × N`.
    pub fn is_square(&self) -> bool {
        self.max_nu() == 0
    }

    /// Scalar dimensions `N+ν_0, …, N+ν_t`.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.n).chain(self.nus.iter().map(|nu| self.n + nu)).collect()
    }

    /// The first `t` factors of the profile.
    pub fn prefix(&self, t: usize) -> Result<Self> {
        if t == 0 || t > self.t() {
            return Err(Error::InvalidSpec(format!("prefix length {t} outside 1..={}", self.t())));
        }
        Ok(Self { n: self.n, nus: self.nus[..t].to_vec() })
    }

    /// Distinct offsets with their multiplicities, in increasing order.
    pub fn grouped(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &nu in &self.nus {
            match out.last_mut() {
                Some((v, count)) if *v == nu => *count += 1,
                _ => out.push((nu, 1)),
            }
        }
        out
    }
}

/// One random factor in its complex representation.
#[derive(Clone, Debug, PartialEq)]
pub struct GinibreFactor {
    entries: DMatrix<Complex64>,
    beta: DysonIndex,
}

impl GinibreFactor {
    /// Wraps an explicit matrix after checking the class invariants.
    pub fn from_matrix(beta: DysonIndex, entries: DMatrix<Complex64>) -> Result<Self> {
        match beta {
            DysonIndex::Real => {
                if entries.iter().any(|z| z.im != 0.0) {
                    return Err(Error::Domain("real factor with nonzero imaginary part".into()));
                }
            }
            DysonIndex::Quaternion => {
                if entries.nrows() % 2 != 0 || entries.ncols() % 2 != 0 {
                    return Err(Error::Dimension("quaternion factor needs even complex dimensions".into()));
                }
                if !is_symplectic_real(&entries, 0.0) {
                    return Err(Error::Domain("factor violates symplectic reality".into()));
                }
            }
            DysonIndex::Complex => {}
        }
        Ok(Self { entries, beta })
    }

    pub fn beta(&self) -> DysonIndex {
        self.beta
    }

    /// Complex rows (twice the quaternion rows for β = 4).
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }
}

/// Checks `Ω_r · conj(X) · Ω_cᵀ = X` entrywise to absolute tolerance `tol`,
/// with `Ω` block-diagonal in `[[0, 1], [-1, 0]]`.
///
/// Blockwise this says every 2×2 block has the form `[[α, β], [-β̄, ᾱ]]`.
pub fn is_symplectic_real(x: &DMatrix<Complex64>, tol: f64) -> bool {
    if x.nrows() % 2 != 0 || x.ncols() % 2 != 0 {
        return false;
    }
    for bi in (0..x.nrows()).step_by(2) {
        for bj in (0..x.ncols()).step_by(2) {
            let alpha = x[(bi, bj)];
            let beta = x[(bi, bj + 1)];
            if (x[(bi + 1, bj)] + beta.conj()).norm() > tol || (x[(bi + 1, bj + 1)] - alpha.conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Random stream for realization `rep` of an experiment seeded with `seed`.
pub fn realization_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Samples one factor with `rows × cols` scalar entries (quaternions for β = 4).
pub fn sample_factor<R: Rng + ?Sized>(beta: DysonIndex, rows: usize, cols: usize, rng: &mut R) -> Result<GinibreFactor> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!("factor dimensions must be positive, got {rows}×{cols}")));
    }
    let entries = match beta {
        DysonIndex::Real => {
            let mut m = DMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    let x: f64 = rng.sample(StandardNormal);
                    m[(i, j)] = Complex64::new(x, 0.0);
                }
            }
            m
        }
        DysonIndex::Complex => {
            let sd = std::f64::consts::FRAC_1_SQRT_2;
            let mut m = DMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    m[(i, j)] = Complex64::new(sd * re, sd * im);
                }
            }
            m
        }
        DysonIndex::Quaternion => {
            let mut m = DMatrix::zeros(2 * rows, 2 * cols);
            for i in 0..rows {
                for j in 0..cols {
                    let mut comp = [0.0f64; 4];
                    for c in comp.iter_mut() {
                        let g: f64 = rng.sample(StandardNormal);
                        *c = 0.5 * g;
                    }
                    let alpha = Complex64::new(comp[0], comp[1]);
                    let beta = Complex64::new(comp[2], comp[3]);
                    m[(2 * i, 2 * j)] = alpha;
                    m[(2 * i, 2 * j + 1)] = beta;
                    m[(2 * i + 1, 2 * j)] = -beta.conj();
                    m[(2 * i + 1, 2 * j + 1)] = alpha.conj();
                }
            }
            m
        }
    };
    Ok(GinibreFactor { entries, beta })
}

/// Samples `X_1, …, X_t` for `spec`; factor `i` has `(N+ν_i) × (N+ν_{i-1})` scalar entries.
pub fn sample_factor_chain<R: Rng + ?Sized>(spec: &ProductSpec, rng: &mut R) -> Result<Vec<GinibreFactor>> {
    spec.validate()?;
    let dims = spec.profile.dims();
    dims.windows(2)
        .map(|w| sample_factor(spec.beta, w[1], w[0], rng))
        .collect()
}
