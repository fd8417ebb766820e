//! Log-gamma and polygamma functions for real and complex arguments.
//!
//! Every function lifts the argument with the recurrence `Γ(x+1) = xΓ(x)`
//! until it is large enough for the Stirling / asymptotic series, then sums
//! the series with Bernoulli coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `B_2, B_4, …, B_20`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

const LIFT_LOG_GAMMA: f64 = 10.0;
const LIFT_POLYGAMMA: f64 = 16.0;

/// Highest polygamma order supported by [`polygamma`].
pub const MAX_POLYGAMMA_ORDER: u32 = 6;

fn check_positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} requires a finite positive argument, got {x}")))
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive(x, "log_gamma")?;
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    let mut y = x;
    let mut prod = 1.0;
    let mut shift = 0.0;
    while y < LIFT_LOG_GAMMA {
        prod *= y;
        if prod > 1e280 {
            shift += prod.ln();
            prod = 1.0;
        }
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate().take(8) {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += b / (two_k * (two_k - 1.0)) * pow;
        pow *= inv2;
    }
    (y - 0.5) * y.ln() - y + HALF_LN_2PI + series - prod.ln() - shift
}

/// Digamma `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(x: f64) -> f64 {
    let mut y = x;
    let mut acc = 0.0;
    while y < LIFT_POLYGAMMA {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    let mut pow = inv2;
    for (k, b) in BERNOULLI.iter().enumerate().take(8) {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += b / two_k * pow;
        pow *= inv2;
    }
    acc + y.ln() - 0.5 / y - series
}

/// Trigamma `ψ'(x)` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    polygamma(1, x)
}

/// Polygamma `ψ^{(m)}(x)` for `x > 0` and `m ≤ MAX_POLYGAMMA_ORDER`; `m = 0` is the digamma.
pub fn polygamma(m: u32, x: f64) -> Result<f64> {
    check_positive(x, "polygamma")?;
    if m > MAX_POLYGAMMA_ORDER {
        return Err(Error::Capability(format!(
            "polygamma order {m} exceeds supported maximum {MAX_POLYGAMMA_ORDER}"
        )));
    }
    if m == 0 {
        return Ok(digamma_unchecked(x));
    }
    Ok(polygamma_unchecked(m, x))
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

pub(crate) fn polygamma_unchecked(m: u32, x: f64) -> f64 {
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let m_fact = factorial(m);
    let mut y = x;
    let mut lifted = 0.0;
    while y < LIFT_POLYGAMMA {
        lifted += y.powi(-(m as i32 + 1));
        y += 1.0;
    }
    // Asymptotic expansion at large y, written as a sum of positive magnitudes.
    let mut series = factorial(m - 1) / y.powi(m as i32) + m_fact / (2.0 * y.powi(m as i32 + 1));
    let inv2 = 1.0 / (y * y);
    let mut pow = y.powi(-(m as i32 + 2));
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2 * (k as u32 + 1);
        // (2k+m-1)! / (2k)!
        let ratio = (two_k + 1..=two_k + m - 1).fold(1.0, |acc, j| acc * f64::from(j));
        series += b * ratio * pow;
        pow *= inv2;
    }
    sign * (series + m_fact * lifted)
}

/// Principal branch of `ln Γ(z)` for `Re z > 0`, continuous in `z`.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::Domain(format!("complex log_gamma requires Re z > 0, got {z}")));
    }
    Ok(log_gamma_complex_unchecked(z))
}

pub(crate) fn log_gamma_complex_unchecked(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < LIFT_LOG_GAMMA {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate().take(8) {
        let two_k = 2.0 * (k as f64 + 1.0);
        series += pow * (b / (two_k * (two_k - 1.0)));
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series - shift
}

/// `Γ(x)` for moderate positive arguments (overflows beyond ~171).
pub fn gamma(x: f64) -> Result<f64> {
    Ok(log_gamma(x)?.exp())
}

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ψ'(1) = π²/6`.
pub const TRIGAMMA_ONE: f64 = PI * PI / 6.0;
