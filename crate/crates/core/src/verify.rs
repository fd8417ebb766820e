//! Self-checks of the special functions, permanents and analytic coefficients.
//!
//! Each suite is deterministic and returns one [`CheckResult`] per comparison.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::DimensionProfile;
use crate::error::Result;
use crate::permanent::{permanent_naive, permanent_ryser};
use crate::specfun::{
    bessel_k0, check_moment_identity, digamma, log_gamma, meijer_g, trigamma, MeijerParams, EULER_GAMMA,
    TRIGAMMA_ONE,
};
use crate::theory::log_decoupling_coefficient;

/// Relative tolerance of the Meijer and permanent checks.
pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn relative(suite: &str, name: String, value: f64, reference: f64, tolerance: f64) -> Self {
        let error = if reference == 0.0 {
            value.abs()
        } else {
            ((value - reference) / reference).abs()
        };
        Self {
            suite: suite.into(),
            name,
            value,
            reference,
            error,
            tolerance,
            passed: error <= tolerance,
        }
    }

    fn absolute(suite: &str, name: String, value: f64, reference: f64, tolerance: f64) -> Self {
        let error = (value - reference).abs();
        Self {
            suite: suite.into(),
            name,
            value,
            reference,
            error,
            tolerance,
            passed: error <= tolerance,
        }
    }
}

/// Closed forms for t = 1, 2; shift and moment identities for random parameters with t ≤ 4.
pub fn meijer_suite(seed: u64) -> Result<Vec<CheckResult>> {
    const SUITE: &str = "meijer";
    let mut out = Vec::new();
    for z in [0.05, 0.5, 1.0, 3.0, 12.0] {
        let g1 = meijer_g(&MeijerParams::new(vec![0.0])?, z)?;
        out.push(CheckResult::relative(SUITE, format!("t=1 exp z={z}"), g1, (-z).exp(), IDENTITY_TOL));
        let g2 = meijer_g(&MeijerParams::new(vec![0.0, 0.0])?, z)?;
        let k0 = 2.0 * bessel_k0(2.0 * z.sqrt());
        out.push(CheckResult::relative(SUITE, format!("t=2 bessel z={z}"), g2, k0, IDENTITY_TOL));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..24 {
        let t = 1 + case % 4;
        let b: Vec<f64> = (0..t).map(|_| rng.random_range(0.0..3.0)).collect();
        let params = MeijerParams::new(b.clone())?;
        let z = rng.random_range(0.1..8.0f64);
        let c = rng.random_range(0.0..2.0f64);
        let lhs = z.powf(c) * meijer_g(&params, z)?;
        let rhs = meijer_g(&params.shifted(c), z)?;
        out.push(CheckResult::relative(SUITE, format!("shift b={b:.3?} z={z:.3} c={c:.3}"), lhs, rhs, IDENTITY_TOL));

        let s = rng.random_range(0.5..2.5f64);
        let (lhs, rhs) = check_moment_identity(&params, z, s)?;
        out.push(CheckResult::relative(SUITE, format!("moment b={b:.3?} z={z:.3} s={s:.3}"), lhs, rhs, IDENTITY_TOL));
    }
    Ok(out)
}

/// Ryser against the permutation sum for every order up to 7.
pub fn permanent_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in 1..=7 {
        let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a = permanent_ryser(&m)?;
        let b = permanent_naive(&m)?;
        let error = (a - b).norm() / b.norm().max(f64::MIN_POSITIVE);
        out.push(CheckResult {
            suite: "permanent".into(),
            name: format!("ryser vs naive n={n}"),
            value: a.norm(),
            reference: b.norm(),
            error,
            tolerance: 1e-10,
            passed: error <= 1e-10,
        });
    }
    Ok(out)
}

/// `D_kk = 1` exactly and `ln D_12(t)` linear in `t` with slope `ln(√π/2)` for ν ≡ 0.
pub fn decoupling_suite() -> Result<Vec<CheckResult>> {
    const SUITE: &str = "decoupling";
    let mut out = Vec::new();
    let n = 4;
    let t_max = 64;
    let profile = DimensionProfile::square(n, t_max)?;
    for k in 1..=n {
        for t in [1, 7, t_max] {
            let d = log_decoupling_coefficient(&profile, k, k, t)?.exp();
            let mut r = CheckResult::absolute(SUITE, format!("D_{k}{k}(t={t})"), d, 1.0, 0.0);
            r.passed = d == 1.0;
            out.push(r);
        }
    }
    let slope = (std::f64::consts::PI.sqrt() / 2.0).ln();
    for t in [1, 2, 10, t_max] {
        let v = log_decoupling_coefficient(&profile, 1, 2, t)?;
        out.push(CheckResult::relative(SUITE, format!("ln D_12(t={t})"), v, slope * t as f64, 1e-12));
    }
    Ok(out)
}

/// Reference values of the gamma family.
pub fn specfun_suite() -> Result<Vec<CheckResult>> {
    const SUITE: &str = "specfun";
    Ok(vec![
        CheckResult::absolute(SUITE, "digamma(1)".into(), digamma(1.0)?, -EULER_GAMMA, 1e-14),
        CheckResult::relative(SUITE, "trigamma(1)".into(), trigamma(1.0)?, TRIGAMMA_ONE, 1e-13),
        CheckResult::relative(
            SUITE,
            "lnGamma(1/2)".into(),
            log_gamma(0.5)?,
            0.5 * std::f64::consts::PI.ln(),
            1e-14,
        ),
        CheckResult::absolute(SUITE, "lnGamma(10)".into(), log_gamma(10.0)?, 362_880f64.ln(), 1e-12),
    ])
}

/// All suites with a fixed seed.
pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = specfun_suite()?;
    out.extend(meijer_suite(seed)?);
    out.extend(permanent_suite(seed)?);
    out.extend(decoupling_suite()?);
    Ok(out)
}
