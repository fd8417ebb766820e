//! `G^{t,0}_{0,t}(−; b_1, …, b_t | z)` by quadrature of its Mellin–Barnes integral.
//!
//! Along the vertical line `u = c + iy` with `c < min b_i`,
//!
//! ```text
//! G(z) = (1/π) ∫_0^∞ Re[ z^{c+iy} Π Γ(b_i − c − iy) ] dy ,
//! ```
//!
//! and the integrand decays like `exp(−tπ|y|/2)`, so the trapezoid rule
//! converges geometrically in the step. The abscissa sits at
//! `c = min b − max(½, x*)` where `ψ(x*) = ln z / t` locates the real saddle
//! of `z^u Γ(b−u)^t`; this keeps the integrand free of cancellation for large
//! `z`. The step is picked from the width of the pole-free strip around the
//! contour, and the grid is truncated once the integrand falls 1e-18 below
//! its value at `y = 0` (its maximum, as `|Γ(x − iy)|` decreases in `|y|`).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{digamma_unchecked, log_gamma_complex_unchecked, log_gamma_unchecked, polygamma_unchecked};
use crate::error::{Error, Result};

/// Largest number of lower parameters accepted.
pub const MAX_MEIJER_ORDER: usize = 8;

const MAX_NODES: usize = 2_000_000;

/// `ln(1e18)`: truncation depth relative to the peak.
const TRUNCATION_DEPTH: f64 = 41.45;

/// Lower parameters `b_1, …, b_t` of `G^{t,0}_{0,t}` (the upper row is empty).
#[derive(Clone, Debug, PartialEq)]
pub struct MeijerParams {
    b: Vec<f64>,
}

impl MeijerParams {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::Domain("Meijer G needs at least one lower parameter".into()));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("Meijer G parameters must be finite".into()));
        }
        Ok(Self { b })
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn t(&self) -> usize {
        self.b.len()
    }

    /// Parameters shifted by `c`: `z^c G(b; z) = G(b + c; z)`.
    pub fn shifted(&self, c: f64) -> Self {
        Self { b: self.b.iter().map(|b| b + c).collect() }
    }

    fn min(&self) -> f64 {
        self.b.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Distinct values with multiplicities.
    fn grouped(&self) -> Vec<(f64, f64)> {
        let mut sorted = self.b.clone();
        sorted.sort_by(f64::total_cmp);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for b in sorted {
            match out.last_mut() {
                Some((v, m)) if *v == b => *m += 1.0,
                _ => out.push((b, 1.0)),
            }
        }
        out
    }
}

/// Solves `ψ(x) = target` for `x ≥ ½`, clamping at ½.
fn saddle_distance(target: f64) -> f64 {
    if digamma_unchecked(0.5) >= target {
        return 0.5;
    }
    let mut lo = 0.5;
    let mut hi = target.exp() + 1.0;
    let mut x = hi.min(target.exp() + 0.5);
    for _ in 0..100 {
        let f = digamma_unchecked(x) - target;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - f / polygamma_unchecked(1, x);
        x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (hi - lo) < 1e-12 * hi || f.abs() < 1e-14 {
            break;
        }
    }
    x.max(0.5)
}

/// Evaluates `G^{t,0}_{0,t}(−; b | z)` for `z > 0`.
pub fn meijer_g(params: &MeijerParams, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Meijer G argument must be positive and finite, got {z}")));
    }
    if params.t() > MAX_MEIJER_ORDER {
        return Err(Error::Capability(format!(
            "Meijer G with {} parameters exceeds the supported order {MAX_MEIJER_ORDER}",
            params.t()
        )));
    }
    let groups = params.grouped();
    let t = params.t() as f64;
    let ln_z = z.ln();
    let d = saddle_distance(ln_z / t);
    let c = params.min() - d;

    let log_peak = c * ln_z + groups.iter().map(|&(b, m)| m * log_gamma_unchecked(b - c)).sum::<f64>();
    if log_peak < -800.0 {
        return Ok(0.0);
    }

    // Step from the strip of analyticity: shifting the line by `a` in either
    // direction changes the integrand scale by exp(ln_r).
    let a = 0.8 * d;
    let ln_r_right = a * ln_z
        + groups
            .iter()
            .map(|&(b, m)| m * (log_gamma_unchecked(b - c - a) - log_gamma_unchecked(b - c)))
            .sum::<f64>();
    let ln_r_left = -a * ln_z
        + groups
            .iter()
            .map(|&(b, m)| m * (log_gamma_unchecked(b - c + a) - log_gamma_unchecked(b - c)))
            .sum::<f64>();
    let ln_r = ln_r_right.max(ln_r_left).max(0.0);
    let h = (2.0 * PI * a / (TRUNCATION_DEPTH + 2.0 + ln_r)).min(1.0);

    let log_term = |y: f64| -> Complex64 {
        let mut s = Complex64::new(c * ln_z - log_peak, y * ln_z);
        for &(b, m) in &groups {
            s += log_gamma_complex_unchecked(Complex64::new(b - c, -y)) * m;
        }
        s
    };

    let mut total = 0.5 * log_term(0.0).exp().re;
    let mut k = 1usize;
    loop {
        let s = log_term(k as f64 * h);
        if s.re < -TRUNCATION_DEPTH {
            break;
        }
        total += s.exp().re;
        k += 1;
        if k > MAX_NODES {
            return Err(Error::Accuracy(format!(
                "Meijer G quadrature did not truncate within {MAX_NODES} nodes (t = {}, z = {z}, step = {h:.3e}, \
                 integrand at cutoff = 1e{:.1} of peak)",
                params.t(),
                s.re / std::f64::consts::LN_10
            )));
        }
    }
    Ok(h / PI * total * log_peak.exp())
}

/// Returns `(lhs, rhs)` of `∫_0^∞ r^{s−1} G(zr) dr = z^{−s} Π Γ(b_i + s)`.
///
/// The left side is computed by trapezoid quadrature in `x = ln r` of
/// `e^{sx} G(z e^x)`, an analytic integrand with exponential left tail and
/// super-exponential right tail; the right side from log-gamma values.
pub fn check_moment_identity(params: &MeijerParams, z: f64, s: f64) -> Result<(f64, f64)> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("moment identity needs z > 0, got {z}")));
    }
    let shifted: Vec<f64> = params.b().iter().map(|b| b + s).collect();
    if shifted.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::Domain(format!(
            "moment integral diverges: need b_i + s > 0 for all i (b = {:?}, s = {s})",
            params.b()
        )));
    }
    let ln_rhs = -s * z.ln() + shifted.iter().map(|&a| log_gamma_unchecked(a)).sum::<f64>();
    let rhs = ln_rhs.exp();

    // e^{sx} G(z e^x) / rhs is the density of ln(Π Γ_i / z) with Γ_i ~ Gamma(b_i + s).
    let mean = shifted.iter().map(|&a| digamma_unchecked(a)).sum::<f64>() - z.ln();
    let sd = shifted.iter().map(|&a| polygamma_unchecked(1, a)).sum::<f64>().sqrt();
    let a_min = shifted.iter().copied().fold(f64::INFINITY, f64::min);
    let lo = mean - (12.0 * sd).max(45.0 / a_min);
    let hi = mean + 12.0 * sd + 6.0;
    let h = (sd / 20.0).min(0.05);
    let n = ((hi - lo) / h).ceil() as usize;

    let mut sum = 0.0;
    for k in 0..=n {
        let x = lo + k as f64 * h;
        let g = meijer_g(params, z * x.exp())?;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        sum += w * (s * x).exp() * g;
    }
    Ok((sum * h, rhs))
}
