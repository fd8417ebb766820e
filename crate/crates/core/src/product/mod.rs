//! Product accumulation `Y(t) = X_t ⋯ X_1` and finite-time exponents.
//!
//! Two routes run side by side on the same factors:
//!
//! - singular exponents `γ_n` from thin-QR renormalisation in double precision;
//! - eigenvalue exponents `λ_n` from a rescaled MPFR product, its
//!   characteristic polynomial and Aberth–Ehrlich roots.
//!
//! Eigenvalues are only extracted for square profiles (`ν ≡ 0`); singular
//! exponents support any profile.

mod bigfloat;
mod eigen;
mod qr;
mod roots;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bigfloat::{charpoly, BigComplex, BigMatrix};
pub use eigen::{classify_real, eigen_exponents, scaled_product, ScaledProduct, REAL_TOL};
pub use qr::{singular_exponents, QrAccumulator};
pub use roots::aberth;

use crate::ensemble::{realization_rng, sample_factor, DimensionProfile, DysonIndex};
use crate::error::{Error, Result};
use crate::theory;

/// Guard bits added to the automatic precision estimate.
pub const GUARD_BITS: u32 = 96;

/// Working precision for the eigenvalue route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Auto,
    Bits(u32),
}

impl std::str::FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Precision::Auto);
        }
        s.parse::<u32>()
            .map(Precision::Bits)
            .map_err(|_| Error::InvalidSpec(format!("precision must be 'auto' or a bit count, got '{s}'")))
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Precision::Auto => f.write_str("auto"),
            Precision::Bits(b) => write!(f, "{b}"),
        }
    }
}

/// Complete description of a Monte Carlo experiment; `t` is the profile length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub beta: DysonIndex,
    pub profile: DimensionProfile,
    pub reps: usize,
    pub seed: u64,
    pub precision: Precision,
}

impl ProductSpec {
    pub fn new(beta: DysonIndex, profile: DimensionProfile, reps: usize, seed: u64, precision: Precision) -> Result<Self> {
        let spec = Self {
            beta,
            profile,
            reps,
            seed,
            precision,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn t(&self) -> usize {
        self.profile.t()
    }

    pub fn validate(&self) -> Result<()> {
        if let Precision::Bits(b) = self.precision {
            if b < 53 {
                return Err(Error::InvalidSpec(format!("precision must be at least 53 bits, got {b}")));
            }
        }
        Ok(())
    }

    /// Bits used by the eigenvalue route.
    pub fn precision_bits(&self) -> u32 {
        match self.precision {
            Precision::Bits(b) => b,
            Precision::Auto => auto_precision(self.beta, &self.profile),
        }
    }
}

/// `⌈m·t·Σ_{n<N} [μ_N − μ_n + 3(σ_n + σ_N)]/ln 2⌉ + 96`, at least `53 + 96`,
/// with `m = 2` for β = 4 (2N roots) and 1 otherwise.
///
/// The constant coefficient of the characteristic polynomial of the rescaled
/// product is the smallest in magnitude; its relative error is roughly the
/// unit roundoff divided by the product of all root moduli below the largest.
/// The `3σ` allowance covers the heavy lower tail of the smallest exponents.
pub fn auto_precision(beta: DysonIndex, profile: &DimensionProfile) -> u32 {
    let n = profile.n();
    let t = profile.t() as f64;
    let mu: Vec<f64> = (1..=n).map(|k| theory::lyapunov_mean_unchecked(beta, profile, k)).collect();
    let sigma: Vec<f64> = (1..=n)
        .map(|k| theory::lyapunov_variance(beta, profile, k, profile.t()).map_or(0.0, f64::sqrt))
        .collect();
    let range: f64 = (0..n.saturating_sub(1))
        .map(|k| mu[n - 1] - mu[k] + 3.0 * (sigma[k] + sigma[n - 1]))
        .sum();
    let mult = if beta == DysonIndex::Quaternion { 2.0 } else { 1.0 };
    let bits = (t * mult * range / std::f64::consts::LN_2).ceil();
    (bits as u32).max(53) + GUARD_BITS
}

/// One realisation's exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    /// `λ_n = ln|z_n|/t`, descending; empty for non-square profiles.
    pub lambda: Vec<f64>,
    /// Phases of the eigenvalues, matched with `lambda`.
    pub theta: Vec<f64>,
    /// `γ_n = ln σ_n/t`, descending.
    pub gamma: Vec<f64>,
    /// QR-column exponents in frame order (column `j` follows one direction through time).
    pub column_gamma: Vec<f64>,
    /// `s` in `Y = e^s Ŷ`.
    pub log_scale: f64,
    /// Eigenvalues classified real (β = 1 only).
    pub real_count: Option<usize>,
    /// Bits used for the eigenvalue route.
    pub precision_bits: u32,
}

impl SpectralSample {
    pub fn has_eigenvalues(&self) -> bool {
        !self.lambda.is_empty()
    }
}

/// Propagates one realisation through both accumulators.
#[derive(Clone, Debug)]
pub struct Realization {
    beta: DysonIndex,
    qr: QrAccumulator,
    product: Option<ScaledProduct>,
}

impl Realization {
    pub fn new(beta: DysonIndex, profile: &DimensionProfile, precision_bits: u32) -> Self {
        Self {
            beta,
            qr: QrAccumulator::new(beta, profile.n()),
            product: profile.is_square().then(|| ScaledProduct::new(beta, precision_bits)),
        }
    }

    pub fn push(&mut self, factor: &nalgebra::DMatrix<num_complex::Complex64>) -> Result<()> {
        self.qr.push(factor)?;
        if let Some(p) = &mut self.product {
            p.push(factor)?;
        }
        Ok(())
    }

    pub fn singular_exponents(&self) -> Vec<f64> {
        self.qr.exponents()
    }

    pub fn sample(&self) -> Result<SpectralSample> {
        let (lambda, mut theta, log_scale, bits) = match &self.product {
            Some(p) => {
                let (l, th) = p.eigen()?;
                (l, th, p.log_scale(), p.precision())
            }
            None => (Vec::new(), Vec::new(), f64::NAN, 0),
        };
        let real_count = (self.beta == DysonIndex::Real && !lambda.is_empty())
            .then(|| classify_real(&lambda, &mut theta, REAL_TOL));
        Ok(SpectralSample {
            lambda,
            theta,
            gamma: self.qr.exponents(),
            column_gamma: self.qr.column_exponents(),
            log_scale,
            real_count,
            precision_bits: bits,
        })
    }
}

/// Realisation `rep` of `spec` at an explicit precision.
pub fn realize_with_bits(spec: &ProductSpec, rep: u64, bits: u32) -> Result<SpectralSample> {
    spec.validate()?;
    let mut rng = realization_rng(spec.seed, rep);
    let mut state = Realization::new(spec.beta, &spec.profile, bits);
    for w in spec.profile.dims().windows(2) {
        let f = sample_factor(spec.beta, w[1], w[0], &mut rng)?;
        state.push(f.matrix())?;
    }
    state.sample()
}

/// Realisation `rep` of `spec`.
pub fn realize(spec: &ProductSpec, rep: u64) -> Result<SpectralSample> {
    realize_with_bits(spec, rep, spec.precision_bits())
}

/// Like [`realize`], retrying once with the suggested precision on a precision failure.
pub fn realize_with_retry(spec: &ProductSpec, rep: u64) -> Result<SpectralSample> {
    match realize(spec, rep) {
        Err(Error::Precision { suggested_bits, .. }) => realize_with_bits(spec, rep, suggested_bits),
        other => other,
    }
}

/// All `spec.reps` realisations in parallel, returned in rep order.
pub fn simulate(spec: &ProductSpec) -> Vec<Result<SpectralSample>> {
    (0..spec.reps as u64)
        .into_par_iter()
        .map(|rep| realize_with_retry(spec, rep))
        .collect()
}

/// Exponents after each step `t' = 1, …, t` of one realisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub step: usize,
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// Step-by-step trace of realisation `rep` at an explicit precision.
pub fn trace_with_bits(spec: &ProductSpec, rep: u64, bits: u32) -> Result<Vec<TracePoint>> {
    spec.validate()?;
    let mut rng = realization_rng(spec.seed, rep);
    let mut state = Realization::new(spec.beta, &spec.profile, bits);
    let mut out = Vec::with_capacity(spec.t());
    for (i, w) in spec.profile.dims().windows(2).enumerate() {
        let f = sample_factor(spec.beta, w[1], w[0], &mut rng)?;
        state.push(f.matrix())?;
        let lambda = match &state.product {
            Some(p) => p.eigen()?.0,
            None => Vec::new(),
        };
        out.push(TracePoint {
            step: i + 1,
            lambda,
            gamma: state.singular_exponents(),
        });
    }
    Ok(out)
}

/// Step-by-step trace, retried once with doubled precision.
pub fn trace(spec: &ProductSpec, rep: u64) -> Result<Vec<TracePoint>> {
    match trace_with_bits(spec, rep, spec.precision_bits()) {
        Err(Error::Precision { suggested_bits, .. }) => trace_with_bits(spec, rep, suggested_bits),
        other => other,
    }
}
