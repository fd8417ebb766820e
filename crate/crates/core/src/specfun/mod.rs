//! Special functions behind the analytic predictions.

mod density;
mod gamma;
mod meijer;

pub use density::{loggamma_sum_density, LogGammaSumDensity};
pub use gamma::{
    digamma, gamma, log_gamma, log_gamma_complex, polygamma, trigamma, EULER_GAMMA, MAX_POLYGAMMA_ORDER,
    TRIGAMMA_ONE,
};
pub use meijer::{check_moment_identity, meijer_g, MeijerParams};

pub(crate) use gamma::{digamma_unchecked, log_gamma_complex_unchecked, log_gamma_unchecked, polygamma_unchecked};

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Gaussian density with mean `mean` and variance `var`.
pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    (-0.5 * d * d / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Modified Bessel function `K_0(x)` for `x > 0`, from `∫_0^∞ e^{−x cosh u} du`.
pub fn bessel_k0(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    // The integrand decays doubly exponentially; the trapezoid rule converges geometrically.
    let upper = ((745.0 / x).max(1.0) * 2.0).acosh() + 1.0;
    let h = 0.02;
    let n = (upper / h).ceil() as usize;
    let mut sum = 0.5 * (-x).exp();
    for i in 1..=n {
        sum += (-x * (i as f64 * h).cosh()).exp();
    }
    sum * h
}
