//! Closed-form predictions for the finite-time exponents.
//!
//! Finite-`t` marginals are laws of `λ = shift + (1/2t) Σ_i ln G_i` with
//! `G_i ~ Gamma(a_i)`, one gamma variable per factor:
//!
//! | β | `a_i`                 | shift     |
//! |---|-----------------------|-----------|
//! | 1 | `(ν_i + k)/2`         | `+½ ln 2` |
//! | 2 | `ν_i + (k+ℓ)/2`       | `0`       |
//! | 4 | `2ν_i + (k+ℓ+1)/2`    | `−½ ln 2` |
//!
//! The exponent `λ_n` follows `f_n = f_nn` (β = 2), `f_{2n−1,2n}` (β = 4) and
//! `f_n` (β = 1). Time averages are finite sums over the supplied profile.

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{DimensionProfile, DysonIndex};
use crate::error::{Error, Result};
use crate::permanent::{for_each_permutation, permanent_real, vandermonde_interaction};
use crate::specfun::{
    digamma_unchecked, erfc, log_gamma_unchecked, loggamma_sum_density, meijer_g, normal_cdf, normal_pdf,
    polygamma_unchecked, LogGammaSumDensity, MeijerParams,
};

/// Highest cumulant order supported by [`cumulant`].
pub const MAX_CUMULANT_ORDER: u32 = 4;

/// Largest `N` and `t` accepted by the exact joint density.
pub const MAX_EXACT_N: usize = 4;
pub const MAX_EXACT_T: usize = 4;

/// Means `μ_n` and variances `σ_n²` of the exponents for one ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub beta: DysonIndex,
    pub profile: DimensionProfile,
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
}

impl TheoryPrediction {
    pub fn new(beta: DysonIndex, profile: &DimensionProfile) -> Self {
        let n = profile.n();
        let mu = (1..=n).map(|k| lyapunov_mean_unchecked(beta, profile, k)).collect();
        let sigma2 = (1..=n).map(|k| variance_unchecked(beta, profile, k)).collect();
        Self {
            beta,
            profile: profile.clone(),
            mu,
            sigma2,
        }
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn t(&self) -> usize {
        self.profile.t()
    }

    /// `σ_n` for 1-based `n`.
    pub fn sigma(&self, n: usize) -> f64 {
        self.sigma2[n - 1].sqrt()
    }

    /// Gaussian approximation to `f_n` at `λ` (1-based `n`).
    pub fn gaussian_pdf(&self, n: usize, lambda: f64) -> f64 {
        normal_pdf(lambda, self.mu[n - 1], self.sigma2[n - 1])
    }

    pub fn gaussian_cdf(&self, n: usize, lambda: f64) -> f64 {
        normal_cdf((lambda - self.mu[n - 1]) / self.sigma(n))
    }
}

fn check_index(profile: &DimensionProfile, n: usize) -> Result<()> {
    if n == 0 || n > profile.n() {
        return Err(Error::Domain(format!("index {n} outside 1..={}", profile.n())));
    }
    Ok(())
}

fn profile_prefix(profile: &DimensionProfile, t: usize) -> Result<DimensionProfile> {
    if t == profile.t() {
        Ok(profile.clone())
    } else {
        profile.prefix(t)
    }
}

/// `μ_n = ½ ln(2/β) + (1/2t) Σ_i ψ(β(ν_i + n)/2)`.
pub fn lyapunov_mean(beta: DysonIndex, profile: &DimensionProfile, n: usize) -> Result<f64> {
    check_index(profile, n)?;
    Ok(lyapunov_mean_unchecked(beta, profile, n))
}

pub(crate) fn lyapunov_mean_unchecked(beta: DysonIndex, profile: &DimensionProfile, n: usize) -> f64 {
    let b = beta.as_f64();
    let t = profile.t() as f64;
    let avg: f64 = profile
        .grouped()
        .iter()
        .map(|&(nu, m)| m as f64 * digamma_unchecked(b * (nu + n) as f64 / 2.0))
        .sum::<f64>()
        / t;
    0.5 * (2.0 / b).ln() + 0.5 * avg
}

/// `σ_n² = (1/4t) · (1/t) Σ_i ψ'(β(ν_i + n)/2)`, averaging over the first `t` factors.
pub fn lyapunov_variance(beta: DysonIndex, profile: &DimensionProfile, n: usize, t: usize) -> Result<f64> {
    check_index(profile, n)?;
    Ok(variance_unchecked(beta, &profile_prefix(profile, t)?, n))
}

fn variance_unchecked(beta: DysonIndex, profile: &DimensionProfile, n: usize) -> f64 {
    let b = beta.as_f64();
    let t = profile.t() as f64;
    let avg: f64 = profile
        .grouped()
        .iter()
        .map(|&(nu, m)| m as f64 * polygamma_unchecked(1, b * (nu + n) as f64 / 2.0))
        .sum::<f64>()
        / t;
    avg / (4.0 * t)
}

/// Law of `shift + scale · Σ ln Gamma(a_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalParams {
    pub a: Vec<f64>,
    pub scale: f64,
    pub shift: f64,
}

/// Gamma shapes, scale and shift of `f_kℓ^β` (β = 1 requires `k = ℓ`).
pub fn marginal_params(beta: DysonIndex, profile: &DimensionProfile, k: usize, l: usize) -> Result<MarginalParams> {
    if k == 0 || l == 0 {
        return Err(Error::Domain("marginal indices are 1-based".into()));
    }
    let t = profile.t() as f64;
    let scale = 1.0 / (2.0 * t);
    let (a, shift): (Vec<f64>, f64) = match beta {
        DysonIndex::Real => {
            if k != l {
                return Err(Error::Domain("the real marginal f_k carries a single index".into()));
            }
            (profile.nus().iter().map(|&nu| (nu + k) as f64 / 2.0).collect(), 0.5 * LN_2)
        }
        DysonIndex::Complex => (profile.nus().iter().map(|&nu| nu as f64 + (k + l) as f64 / 2.0).collect(), 0.0),
        DysonIndex::Quaternion => (
            profile
                .nus()
                .iter()
                .map(|&nu| 2.0 * nu as f64 + (k + l + 1) as f64 / 2.0)
                .collect(),
            -0.5 * LN_2,
        ),
    };
    Ok(MarginalParams { a, scale, shift })
}

/// Exact finite-`t` density `f_kℓ^β(λ; t)`.
pub fn finite_t_marginal(beta: DysonIndex, profile: &DimensionProfile, k: usize, l: usize) -> Result<LogGammaSumDensity> {
    let p = marginal_params(beta, profile, k, l)?;
    loggamma_sum_density(&p.a, p.scale, p.shift)
}

/// Marginal indices `(k, ℓ)` describing the exponent `λ_n`.
pub fn exponent_indices(beta: DysonIndex, n: usize) -> (usize, usize) {
    match beta {
        DysonIndex::Quaternion => (2 * n - 1, 2 * n),
        _ => (n, n),
    }
}

/// Exact finite-`t` density `f_n^β` of the `n`-th exponent.
pub fn exponent_marginal(beta: DysonIndex, profile: &DimensionProfile, n: usize) -> Result<LogGammaSumDensity> {
    check_index(profile, n)?;
    let (k, l) = exponent_indices(beta, n);
    finite_t_marginal(beta, profile, k, l)
}

/// `κ_m = Σ_i (2t)^{−m} ψ^{(m−1)}(a_i)` (plus the shift for `m = 1`) over the first `t` factors.
pub fn cumulant(beta: DysonIndex, profile: &DimensionProfile, k: usize, l: usize, t: usize, order: u32) -> Result<f64> {
    if order == 0 || order > MAX_CUMULANT_ORDER {
        return Err(Error::Capability(format!("cumulant order {order} outside 1..={MAX_CUMULANT_ORDER}")));
    }
    let p = marginal_params(beta, &profile_prefix(profile, t)?, k, l)?;
    let sum: f64 = p.a.iter().map(|&a| polygamma_unchecked_any(order - 1, a)).sum();
    let kappa = p.scale.powi(order as i32) * sum;
    Ok(if order == 1 { kappa + p.shift } else { kappa })
}

fn polygamma_unchecked_any(m: u32, x: f64) -> f64 {
    if m == 0 {
        digamma_unchecked(x)
    } else {
        polygamma_unchecked(m, x)
    }
}

/// `ln D_kℓ(t) = Σ_i [ln Γ(ν_i + (k+ℓ)/2) − ½ ln Γ(ν_i + k) − ½ ln Γ(ν_i + ℓ)]` over the first `t` factors.
pub fn log_decoupling_coefficient(profile: &DimensionProfile, k: usize, l: usize, t: usize) -> Result<f64> {
    if k == 0 || l == 0 {
        return Err(Error::Domain("coefficient indices are 1-based".into()));
    }
    if k == l {
        return Ok(0.0);
    }
    let p = profile_prefix(profile, t)?;
    Ok(p.grouped()
        .iter()
        .map(|&(nu, m)| {
            let nu = nu as f64;
            m as f64
                * (log_gamma_unchecked(nu + (k + l) as f64 / 2.0)
                    - 0.5 * log_gamma_unchecked(nu + k as f64)
                    - 0.5 * log_gamma_unchecked(nu + l as f64))
        })
        .sum())
}

/// `D_kℓ^{β=2}(t)`; exactly 1 on the diagonal.
pub fn decoupling_coefficient(beta: DysonIndex, profile: &DimensionProfile, k: usize, l: usize, t: usize) -> Result<f64> {
    if beta != DysonIndex::Complex {
        return Err(Error::Domain("decoupling coefficient D_kℓ is defined for β = 2".into()));
    }
    Ok(log_decoupling_coefficient(profile, k, l, t)?.exp())
}

fn check_permutation(sigma: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len + 1];
    if sigma.len() != len || sigma.iter().any(|&s| s == 0 || s > len || std::mem::replace(&mut seen[s], true)) {
        return Err(Error::Domain(format!("expected a permutation of 1..={len}, got {sigma:?}")));
    }
    Ok(())
}

/// `ln D_σ^{β=4}(t) = Σ_i Σ_n [ln Γ(2ν_i + (σ(n)+σ(n+N)+1)/2) − ln Γ(2ν_i + 2n)]`, `σ` a 1-based permutation of `1..=2N`.
pub fn log_pair_coefficient(profile: &DimensionProfile, sigma: &[usize], t: usize) -> Result<f64> {
    let n = profile.n();
    check_permutation(sigma, 2 * n)?;
    let p = profile_prefix(profile, t)?;
    // Compare the two gamma arguments as exact half-integers so paired permutations give 0 exactly.
    let mut num: Vec<usize> = (0..n).map(|j| sigma[j] + sigma[j + n] + 1).collect();
    let mut den: Vec<usize> = (1..=n).map(|j| 4 * j).collect();
    num.sort_unstable();
    den.sort_unstable();
    if num == den {
        return Ok(0.0);
    }
    Ok(p.grouped()
        .iter()
        .map(|&(nu, m)| {
            let nu2 = 2.0 * nu as f64;
            let s: f64 = num.iter().map(|&a| log_gamma_unchecked(nu2 + a as f64 / 2.0)).sum::<f64>()
                - den.iter().map(|&d| log_gamma_unchecked(nu2 + d as f64 / 2.0)).sum::<f64>();
            m as f64 * s
        })
        .sum())
}

/// `D_σ^{β=4}(t)`.
pub fn pair_coefficient(beta: DysonIndex, profile: &DimensionProfile, sigma: &[usize], t: usize) -> Result<f64> {
    if beta != DysonIndex::Quaternion {
        return Err(Error::Domain("pair coefficient D_σ is defined for β = 4".into()));
    }
    Ok(log_pair_coefficient(profile, sigma, t)?.exp())
}

/// `ln Z_{N,ν}^β`.
pub fn log_normalization(beta: DysonIndex, profile: &DimensionProfile) -> f64 {
    let n = profile.n();
    let t = profile.t() as f64;
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let groups = profile.grouped();
    let gamma_sum = |arg: &dyn Fn(f64, f64) -> f64| -> f64 {
        (1..=n)
            .map(|k| {
                groups
                    .iter()
                    .map(|&(nu, m)| m as f64 * log_gamma_unchecked(arg(nu as f64, k as f64)))
                    .sum::<f64>()
            })
            .sum()
    };
    let nf = n as f64;
    match beta {
        DysonIndex::Real => ln_fact + t * nf * (nf + 1.0) / 4.0 * LN_2 + gamma_sum(&|nu, k| (nu + k) / 2.0),
        DysonIndex::Complex => ln_fact + nf * PI.ln() + gamma_sum(&|nu, k| nu + k),
        DysonIndex::Quaternion => ln_fact + nf * PI.ln() - t * nf * (nf + 1.0) * LN_2 + gamma_sum(&|nu, k| 2.0 * nu + 2.0 * k),
    }
}

/// `ln w_ν^β(z) = ln G^{t,0}_{0,t}(−; βν_1/2, …, βν_t/2 | (β/2)^t |z|²)`.
pub fn log_weight(beta: DysonIndex, profile: &DimensionProfile, z: Complex64) -> Result<f64> {
    let b = beta.as_f64();
    let params = MeijerParams::new(profile.nus().iter().map(|&nu| b * nu as f64 / 2.0).collect())?;
    let t = profile.t() as f64;
    let arg = (t * (b / 2.0).ln() + 2.0 * z.norm().ln()).exp();
    if arg == 0.0 {
        return Err(Error::Domain("weight evaluated at z = 0".into()));
    }
    Ok(meijer_g(&params, arg)?.ln())
}

fn check_exact_domain(beta: DysonIndex, profile: &DimensionProfile, points: &[Complex64]) -> Result<()> {
    if profile.n() > MAX_EXACT_N || profile.t() > MAX_EXACT_T {
        return Err(Error::Capability(format!(
            "exact joint density limited to N ≤ {MAX_EXACT_N}, t ≤ {MAX_EXACT_T}"
        )));
    }
    if points.len() != profile.n() {
        return Err(Error::Dimension(format!("expected {} points, got {}", profile.n(), points.len())));
    }
    for z in points {
        let ok = match beta {
            DysonIndex::Real => z.im == 0.0,
            DysonIndex::Complex => true,
            DysonIndex::Quaternion => z.im >= 0.0,
        } && z.re.is_finite()
            && z.im.is_finite();
        if !ok {
            return Err(Error::Domain(format!("point {z} outside the β = {beta} eigenvalue domain")));
        }
    }
    Ok(())
}

/// `ln P_N^β(z_1, …, z_N; t)`, the exact eigenvalue joint density
/// (β = 1: all-real sector; β = 4: upper-half-plane representatives).
pub fn joint_density_exact(beta: DysonIndex, profile: &DimensionProfile, points: &[Complex64]) -> Result<f64> {
    check_exact_domain(beta, profile, points)?;
    let mut acc = vandermonde_interaction(beta, points) - log_normalization(beta, profile);
    if acc == f64::NEG_INFINITY {
        return Ok(acc);
    }
    for &z in points {
        if z.norm() == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc += log_weight(beta, profile, z)?;
    }
    Ok(acc)
}

/// `ρ_N^β(λ, θ; t) = Π_n t e^{γ t λ_n} P_N^β(e^{tλ_1 + iθ_1}, …)` with `γ = 1` (β = 1) or 2.
pub fn exponent_phase_density_exact(
    beta: DysonIndex,
    profile: &DimensionProfile,
    lambdas: &[f64],
    thetas: &[f64],
) -> Result<f64> {
    if lambdas.len() != thetas.len() {
        return Err(Error::Dimension("λ and θ lengths differ".into()));
    }
    let t = profile.t() as f64;
    let gamma = if beta == DysonIndex::Real { 1.0 } else { 2.0 };
    let points: Vec<Complex64> = lambdas
        .iter()
        .zip(thetas)
        .map(|(&l, &th)| {
            let z = Complex64::from_polar((t * l).exp(), th);
            if beta == DysonIndex::Real {
                Complex64::new(z.re, 0.0)
            } else {
                z
            }
        })
        .collect();
    let log_jac: f64 = lambdas.iter().map(|&l| t.ln() + gamma * t * l).sum();
    Ok((joint_density_exact(beta, profile, &points)? + log_jac).exp())
}

fn phase_weight(beta: DysonIndex, theta: f64) -> Result<f64> {
    match beta {
        DysonIndex::Real => {
            if theta == 0.0 || theta == PI {
                Ok(0.5)
            } else {
                Err(Error::Domain(format!("β = 1 phases must be 0 or π, got {theta}")))
            }
        }
        DysonIndex::Complex => Ok(1.0 / (2.0 * PI)),
        DysonIndex::Quaternion => {
            if (0.0..=PI).contains(&theta) {
                Ok(2.0 * theta.sin().powi(2) / PI)
            } else {
                Err(Error::Domain(format!("β = 4 phases must lie in [0, π], got {theta}")))
            }
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Large-`t` permanental joint density `(1/N!) perm[φ_β(θ_ℓ) f_k(λ_ℓ)]` with Gaussian `f_k`.
pub fn permanental_joint(prediction: &TheoryPrediction, lambdas: &[f64], thetas: &[f64]) -> Result<f64> {
    let n = prediction.n();
    if lambdas.len() != n || thetas.len() != n {
        return Err(Error::Dimension(format!("expected {n} exponents and phases")));
    }
    let phases: Vec<f64> = thetas
        .iter()
        .map(|&th| phase_weight(prediction.beta, th))
        .collect::<Result<_>>()?;
    let m = DMatrix::from_fn(n, n, |k, l| phases[l] * prediction.gaussian_pdf(k + 1, lambdas[l]));
    Ok(permanent_real(&m)? / factorial(n))
}

/// Phase-integrated large-`t` form `(1/N!) perm[f_k(λ_ℓ)]` with Gaussian `f_k`.
pub fn permanental_exponent_density(prediction: &TheoryPrediction, lambdas: &[f64]) -> Result<f64> {
    let n = prediction.n();
    if lambdas.len() != n {
        return Err(Error::Dimension(format!("expected {n} exponents")));
    }
    let m = DMatrix::from_fn(n, n, |k, l| prediction.gaussian_pdf(k + 1, lambdas[l]));
    Ok(permanent_real(&m)? / factorial(n))
}

/// Finite-`t` phase-integrated form `(1/N!) perm[f_k(λ_ℓ)]` with the exact marginals.
pub fn finite_t_permanental_density(beta: DysonIndex, profile: &DimensionProfile, lambdas: &[f64]) -> Result<f64> {
    let n = profile.n();
    if lambdas.len() != n {
        return Err(Error::Dimension(format!("expected {n} exponents")));
    }
    let dens: Vec<LogGammaSumDensity> = (1..=n).map(|k| exponent_marginal(beta, profile, k)).collect::<Result<_>>()?;
    let m = DMatrix::from_fn(n, n, |k, l| dens[k].pdf(lambdas[l]));
    Ok(permanent_real(&m)? / factorial(n))
}

/// `½ erfc[(μ_k − μ_ℓ)/√(2σ_k² + 2σ_ℓ²)]`: probability that an `f_ℓ` variable exceeds an independent `f_k` one.
pub fn ordering_probability(prediction: &TheoryPrediction, k: usize, l: usize) -> Result<f64> {
    let n = prediction.n();
    if k == l || k == 0 || l == 0 || k > n || l > n {
        return Err(Error::Domain(format!("need distinct indices in 1..={n}, got ({k}, {l})")));
    }
    let (mk, ml) = (prediction.mu[k - 1], prediction.mu[l - 1]);
    let (sk, sl) = (prediction.sigma2[k - 1], prediction.sigma2[l - 1]);
    Ok(0.5 * erfc((mk - ml) / (2.0 * sk + 2.0 * sl).sqrt()))
}

/// The same ordering probability with the exact finite-`t` marginals, `∫ f_ℓ(x) F_k(x) dx`.
pub fn exact_ordering_probability(beta: DysonIndex, profile: &DimensionProfile, k: usize, l: usize) -> Result<f64> {
    if k == l {
        return Err(Error::Domain("need distinct indices".into()));
    }
    let fk = exponent_marginal(beta, profile, k)?;
    let fl = exponent_marginal(beta, profile, l)?;
    let (lo, hi) = fl.support();
    let steps = 20_000;
    let h = (hi - lo) / steps as f64;
    let total: f64 = (0..=steps)
        .map(|i| {
            let x = lo + i as f64 * h;
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            w * fl.pdf(x) * fk.cdf(x)
        })
        .sum();
    Ok(total * h)
}

/// Standardised sup distance `sup_x |σ f(μ + σx) − φ(x)|` between a density and its Gaussian.
pub fn gaussian_limit_distance(density: &LogGammaSumDensity) -> f64 {
    let mu = density.mean();
    let sd = density.variance().sqrt();
    let mut best = 0.0f64;
    let steps = 3200;
    for i in 0..=steps {
        let x = -8.0 + 16.0 * i as f64 / steps as f64;
        let phi = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        best = best.max((sd * density.pdf(mu + sd * x) - phi).abs());
    }
    best
}

/// Sum over all permutations `σ ∈ S_m` of `f(σ)` (1-based images).
pub fn sum_over_permutations(m: usize, mut f: impl FnMut(&[usize]) -> f64) -> f64 {
    let mut p: Vec<usize> = (1..=m).collect();
    let mut total = 0.0;
    for_each_permutation(&mut p, 0, &mut |s| total += f(s));
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{polygamma, trigamma, EULER_GAMMA, TRIGAMMA_ONE};

    fn square(n: usize, t: usize) -> DimensionProfile {
        DimensionProfile::square(n, t).unwrap()
    }

    #[test]
    fn reference_means() {
        let p = square(3, 10);
        assert!((lyapunov_mean(DysonIndex::Complex, &p, 1).unwrap() + EULER_GAMMA / 2.0).abs() < 1e-15);
        let real = lyapunov_mean(DysonIndex::Real, &p, 1).unwrap();
        assert!((real - (-EULER_GAMMA / 2.0 - 0.5 * LN_2)).abs() < 1e-14);
        assert!((real + 0.635_181_422_7).abs() < 1e-10);
        let quat = lyapunov_mean(DysonIndex::Quaternion, &p, 1).unwrap();
        assert!((quat - (0.5 * 0.5f64.ln() + 0.5 * (1.0 - EULER_GAMMA))).abs() < 1e-14);
        // mpmath
        let expect = [
            (DysonIndex::Real, [-0.635_181_422_7, 0.057_965_757_8, 0.364_818_577_3]),
            (DysonIndex::Complex, [-0.288_607_832_5, 0.211_392_167_5, 0.461_392_167_5]),
            (DysonIndex::Quaternion, [-0.135_181_422_7, 0.281_485_243_9, 0.506_485_243_9]),
        ];
        for (beta, mus) in expect {
            for (n, m) in mus.iter().enumerate() {
                assert!((lyapunov_mean(beta, &p, n + 1).unwrap() - m).abs() < 1e-9, "β={beta} n={}", n + 1);
            }
        }
    }

    #[test]
    fn reference_variances() {
        let v = lyapunov_variance(DysonIndex::Complex, &square(3, 100), 1, 100).unwrap();
        assert!((v - PI * PI / 2400.0).abs() < 1e-15);
        let v = lyapunov_variance(DysonIndex::Real, &square(3, 200), 2, 200).unwrap();
        assert!((v - TRIGAMMA_ONE / 800.0).abs() < 1e-15);
        let p = DimensionProfile::constant(2, 1, 50).unwrap();
        let v = lyapunov_variance(DysonIndex::Complex, &p, 1, 50).unwrap();
        assert!((v - trigamma(2.0).unwrap() / 200.0).abs() < 1e-15);
        assert!((v - 0.003_224_670_334).abs() < 1e-11);
        assert!(lyapunov_variance(DysonIndex::Complex, &p, 1, 51).is_err());
    }

    #[test]
    fn means_increase_and_variances_scale() {
        for beta in DysonIndex::ALL {
            for p in [square(5, 7), DimensionProfile::new(5, vec![0, 1, 1, 3, 3]).unwrap()] {
                let pred = TheoryPrediction::new(beta, &p);
                assert!(pred.mu.windows(2).all(|w| w[0] < w[1]));
                assert!(pred.sigma2.iter().all(|&s| s > 0.0));
            }
            let a = TheoryPrediction::new(beta, &square(3, 10));
            let b = TheoryPrediction::new(beta, &square(3, 40));
            for (x, y) in a.sigma2.iter().zip(&b.sigma2) {
                assert!((x / y - 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn marginal_means_match_exponent_means() {
        let p = DimensionProfile::new(3, vec![0, 1, 2, 2]).unwrap();
        for beta in DysonIndex::ALL {
            for n in 1..=3 {
                let f = exponent_marginal(beta, &p, n).unwrap();
                assert!((f.mean() - lyapunov_mean(beta, &p, n).unwrap()).abs() < 1e-13);
                assert!((f.variance() - lyapunov_variance(beta, &p, n, 4).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn marginal_closed_form_at_t_one() {
        let f = finite_t_marginal(DysonIndex::Complex, &square(1, 1), 1, 1).unwrap();
        assert!((f.pdf(0.0) - 2.0 / std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn marginal_against_meijer_form() {
        // f_kℓ(λ) = 2t G(ν + (k+ℓ)/2; c e^{2tλ}) / Π Γ(…), c = 1 (β=2), 2^t (β=4), 2^{−t} (β=1).
        let p = DimensionProfile::new(2, vec![0, 1, 1]).unwrap();
        let t = 3.0;
        for (beta, k, l) in [(DysonIndex::Complex, 1, 2), (DysonIndex::Quaternion, 1, 2), (DysonIndex::Real, 2, 2)] {
            let mp = marginal_params(beta, &p, k, l).unwrap();
            let c = match beta {
                DysonIndex::Real => -t * LN_2,
                DysonIndex::Complex => 0.0,
                DysonIndex::Quaternion => t * LN_2,
            };
            let params = MeijerParams::new(mp.a.clone()).unwrap();
            let norm: f64 = mp.a.iter().map(|&a| log_gamma_unchecked(a)).sum();
            let f = finite_t_marginal(beta, &p, k, l).unwrap();
            for lam in [-0.6, -0.2, 0.1, 0.4] {
                let g = meijer_g(&params, (c + 2.0 * t * lam).exp()).unwrap();
                let exact = 2.0 * t * g / norm.exp();
                assert!((f.pdf(lam) - exact).abs() < 1e-8 * exact.max(1e-3), "β={beta} λ={lam}");
            }
        }
    }

    #[test]
    fn decoupling_coefficients() {
        let p = square(3, 20);
        for t in [1, 5, 20] {
            for k in 1..=3 {
                assert_eq!(decoupling_coefficient(DysonIndex::Complex, &p, k, k, t).unwrap(), 1.0);
            }
        }
        let d = decoupling_coefficient(DysonIndex::Complex, &square(2, 1), 1, 2, 1).unwrap();
        assert!((d - PI.sqrt() / 2.0).abs() < 1e-14);
        let slope = (PI.sqrt() / 2.0).ln();
        for t in 1..=20 {
            assert!((log_decoupling_coefficient(&p, 1, 2, t).unwrap() - t as f64 * slope).abs() < 1e-12);
        }
        assert!(decoupling_coefficient(DysonIndex::Real, &p, 1, 2, 3).is_err());
    }

    #[test]
    fn gamma_inequality() {
        for nu in 0..=3 {
            for t in [1, 7, 20] {
                let p = DimensionProfile::constant(6, nu, t).unwrap();
                for k in 1..=6 {
                    for l in 1..=6 {
                        let d = log_decoupling_coefficient(&p, k, l, t).unwrap();
                        if k == l {
                            assert_eq!(d, 0.0);
                        } else {
                            assert!(d < 0.0, "ν={nu} t={t} k={k} l={l}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pair_coefficients() {
        let p = DimensionProfile::new(2, vec![0, 1, 1]).unwrap();
        // Pair permutations: {σ(n), σ(n+N)} = {2m−1, 2m}.
        for sigma in [[1, 3, 2, 4], [2, 4, 1, 3], [3, 2, 4, 1], [4, 1, 3, 2]] {
            assert_eq!(pair_coefficient(DysonIndex::Quaternion, &p, &sigma, 3).unwrap(), 1.0);
        }
        let mut below = 0;
        let total = sum_over_permutations(4, |s| {
            let d = log_pair_coefficient(&p, s, 3).unwrap();
            assert!(d <= 0.0);
            if d < 0.0 {
                below += 1;
            }
            1.0
        });
        assert_eq!(total, 24.0);
        assert_eq!(below, 24 - 8);
        // Non-pair coefficients decay geometrically for square profiles.
        let sq = square(2, 10);
        let a = log_pair_coefficient(&sq, &[1, 2, 3, 4], 5).unwrap();
        let b = log_pair_coefficient(&sq, &[1, 2, 3, 4], 10).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 && a < 0.0);
        assert!(log_pair_coefficient(&p, &[1, 1, 2, 3], 3).is_err());
    }

    #[test]
    fn cumulants() {
        let p = square(3, 100);
        for beta in DysonIndex::ALL {
            let (k, l) = exponent_indices(beta, 2);
            let f = finite_t_marginal(beta, &p, k, l).unwrap();
            assert!((cumulant(beta, &p, k, l, 100, 1).unwrap() - f.mean()).abs() < 1e-14);
            assert!((cumulant(beta, &p, k, l, 100, 2).unwrap() - f.variance()).abs() < 1e-16);
        }
        let p4 = square(1, 400);
        let std3 = |t: usize| {
            let k3 = cumulant(DysonIndex::Complex, &p4, 1, 1, t, 3).unwrap();
            let k2 = cumulant(DysonIndex::Complex, &p4, 1, 1, t, 2).unwrap();
            k3 / k2.powf(1.5)
        };
        assert!((std3(100) / std3(400) - 2.0).abs() < 1e-6);
        let k4 = cumulant(DysonIndex::Complex, &p4, 1, 1, 400, 4).unwrap();
        assert!((k4 - polygamma(3, 1.0).unwrap() * 400.0 / 800f64.powi(4)).abs() < 1e-20);
        assert!(matches!(cumulant(DysonIndex::Complex, &p4, 1, 1, 400, 5), Err(Error::Capability(_))));
    }

    #[test]
    fn single_complex_gaussian_density() {
        let v = joint_density_exact(DysonIndex::Complex, &square(1, 1), &[Complex64::new(1.0, 0.0)]).unwrap();
        assert!((v.exp() - (-1.0f64).exp() / PI).abs() < 1e-10);
        let z = Complex64::new(0.3, -0.4);
        let v = joint_density_exact(DysonIndex::Complex, &square(2, 2), &[z, z]).unwrap();
        assert_eq!(v, f64::NEG_INFINITY);
        assert!(matches!(
            joint_density_exact(DysonIndex::Real, &square(1, 1), &[Complex64::new(0.0, 1.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            joint_density_exact(DysonIndex::Complex, &square(5, 1), &[z; 5]),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn single_real_and_quaternion_densities() {
        // N = 1, t = 1: real Gaussian x has density e^{−x²/2}/√(2π).
        let v = joint_density_exact(DysonIndex::Real, &square(1, 1), &[Complex64::new(0.7, 0.0)]).unwrap();
        assert!((v.exp() - normal_pdf(0.7, 0.0, 1.0)).abs() < 1e-10);
        // N = 1 quaternion q with components N(0, ¼): eigenvalue a ± i|v|, |v|² ~ Gamma(3/2, ¼).
        // Density on the upper half-plane: (16/π) y² e^{−2(x²+y²)}.
        let z = Complex64::new(0.3, 0.5);
        let v = joint_density_exact(DysonIndex::Quaternion, &square(1, 1), &[z]).unwrap();
        let exact = 16.0 / PI * z.im * z.im * (-2.0 * z.norm_sqr()).exp();
        assert!((v.exp() - exact).abs() < 1e-10, "{} vs {exact}", v.exp());
    }

    #[test]
    fn permanental_forms() {
        let pred = TheoryPrediction::new(DysonIndex::Complex, &square(1, 50));
        let v = permanental_joint(&pred, &[-0.3], &[1.0]).unwrap();
        assert!((v - pred.gaussian_pdf(1, -0.3) / (2.0 * PI)).abs() < 1e-15);

        let q = TheoryPrediction::new(DysonIndex::Quaternion, &square(2, 50));
        let l = [0.25, -0.1];
        let at = |th: f64| permanental_joint(&q, &l, &[th, PI / 2.0]).unwrap();
        assert!(at(PI / 2.0) > at(1.0) && at(PI / 2.0) > at(2.5));
        let expected = 2.0 / PI;
        assert!((at(PI / 2.0) / permanental_exponent_density(&q, &l).unwrap() - expected * expected).abs() < 1e-12);

        // Phase integration multiplies by 2π per coordinate for β = 2.
        let c = TheoryPrediction::new(DysonIndex::Complex, &square(3, 200));
        let l = [0.2, -0.25, 0.45];
        let joint = permanental_joint(&c, &l, &[0.1, 2.0, 4.0]).unwrap();
        let integrated = permanental_exponent_density(&c, &l).unwrap();
        assert!((joint * (2.0 * PI).powi(3) - integrated).abs() < 1e-12 * integrated);

        let r = TheoryPrediction::new(DysonIndex::Real, &square(2, 50));
        assert!(permanental_joint(&r, &[0.0, 0.1], &[0.0, 1.0]).is_err());
        let sum: f64 = [[0.0, 0.0], [0.0, PI], [PI, 0.0], [PI, PI]]
            .iter()
            .map(|th| permanental_joint(&r, &[0.0, 0.1], th).unwrap())
            .sum();
        assert!((sum - permanental_exponent_density(&r, &[0.0, 0.1]).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn ordering_probabilities() {
        let p = square(2, 10);
        let pred = TheoryPrediction::new(DysonIndex::Real, &p);
        let v = ordering_probability(&pred, 1, 2).unwrap();
        assert!(v > 0.5 && v < 1.0);
        assert!((ordering_probability(&pred, 2, 1).unwrap() + v - 1.0).abs() < 1e-15);
        let mut last = 0.0;
        for t in [1, 5, 20, 80, 320] {
            let pr = TheoryPrediction::new(DysonIndex::Real, &square(2, t));
            let v = ordering_probability(&pr, 1, 2).unwrap();
            assert!(v > last);
            last = v;
        }
        let mut same = pred.clone();
        same.mu[1] = same.mu[0];
        assert_eq!(ordering_probability(&same, 1, 2).unwrap(), 0.5);
        let exact = exact_ordering_probability(DysonIndex::Real, &p, 1, 2).unwrap();
        assert!(exact > 0.5 && exact < 1.0);
    }

    #[test]
    fn gaussian_concentration_at_large_t() {
        for beta in DysonIndex::ALL {
            let p = square(3, 400);
            let pred = TheoryPrediction::new(beta, &p);
            for n in 1..=3 {
                let f = exponent_marginal(beta, &p, n).unwrap();
                let s = pred.sigma(n);
                let mass = f.cdf(pred.mu[n - 1] + 3.0 * s) - f.cdf(pred.mu[n - 1] - 3.0 * s);
                assert!(mass > 0.99, "β={beta} n={n}: {mass}");
            }
        }
    }
}
