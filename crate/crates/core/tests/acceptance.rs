//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs with a custom harness so the lines are always printed:
//! `cargo test -p ginibre --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use ginibre::permanent::{permanent_naive, permanent_ryser};
use ginibre::product::simulate;
use ginibre::specfun::{bessel_k0, check_moment_identity, meijer_g, MeijerParams};
use ginibre::stats::{ks_statistic, sine_squared_cdf, summarize, KsLevel};
use ginibre::theory::{
    decoupling_coefficient, exact_ordering_probability, exponent_phase_density_exact, finite_t_marginal,
    finite_t_permanental_density, gaussian_limit_distance, joint_density_exact, log_decoupling_coefficient,
    ordering_probability,
};
use ginibre::{DimensionProfile, DysonIndex, Precision, ProductSpec, SpectralSample, TheoryPrediction};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: usize = 3;
const T: usize = 200;
const REPS: usize = 4000;
const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

struct Run {
    beta: DysonIndex,
    prediction: TheoryPrediction,
    samples: Vec<SpectralSample>,
}

impl Run {
    fn new(beta: DysonIndex) -> Run {
        let profile = DimensionProfile::square(N, T).unwrap();
        let spec = ProductSpec::new(beta, profile.clone(), REPS, SEED + beta.beta() as u64, Precision::Auto).unwrap();
        let samples: Vec<SpectralSample> = simulate(&spec)
            .into_iter()
            .enumerate()
            .map(|(rep, r)| r.unwrap_or_else(|e| panic!("β={beta} rep {rep}: {e}")))
            .collect();
        Run {
            beta,
            prediction: TheoryPrediction::new(beta, &profile),
            samples,
        }
    }

    /// Sorted position `j` (descending) corresponds to `μ_{N−j}`.
    fn theory_index(j: usize) -> usize {
        N - j
    }

    fn column(&self, j: usize, pick: impl Fn(&SpectralSample) -> &Vec<f64>) -> Vec<f64> {
        self.samples.iter().map(|s| pick(s)[j]).collect()
    }
}

fn criterion_means(runs: &[Run]) -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for run in runs {
        for j in 0..N {
            let n = Run::theory_index(j);
            let mu = run.prediction.mu[n - 1];
            let bound = 3.0 * run.prediction.sigma(n) / (REPS as f64).sqrt();
            for values in [run.column(j, |s| &s.lambda), run.column(j, |s| &s.gamma)] {
                let m = summarize(&values).unwrap().mean;
                worst = worst.max((m - mu).abs() / bound);
                ok &= (m - mu).abs() < bound;
            }
        }
    }
    Outcome::new(ok, format!("max |mean − μ_n| = {worst:.3} × (3σ_n/√{REPS})"))
}

fn criterion_variances(runs: &[Run]) -> Outcome {
    let mut ok = true;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for run in runs {
        for j in 0..N {
            let n = Run::theory_index(j);
            let ratio = summarize(&run.column(j, |s| &s.lambda)).unwrap().std_dev() / run.prediction.sigma(n);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            ok &= (0.93..=1.07).contains(&ratio);
        }
    }
    Outcome::new(ok, format!("sd(λ_n)/σ_n ∈ [{lo:.4}, {hi:.4}], required [0.93, 1.07]"))
}

fn criterion_real_collapse(real: &Run) -> Outcome {
    let full = real.samples.iter().filter(|s| s.real_count == Some(N)).count();
    let frac = full as f64 / REPS as f64;
    Outcome::new(frac >= 0.999, format!("fully real realizations {full}/{REPS} = {frac:.4}, required ≥ 0.999"))
}

fn criterion_phases(complex: &Run, quaternion: &Run) -> Outcome {
    let th2: Vec<f64> = complex.samples.iter().flat_map(|s| s.theta.iter().copied()).collect();
    let d2 = ks_statistic(&th2, |x| (x / (2.0 * PI)).clamp(0.0, 1.0));
    let c2 = KsLevel::OnePercent.critical(th2.len());
    let th4: Vec<f64> = quaternion.samples.iter().flat_map(|s| s.theta.iter().copied()).collect();
    let d4 = ks_statistic(&th4, sine_squared_cdf);
    let c4 = KsLevel::OnePercent.critical(th4.len());
    Outcome::new(
        d2 < c2 && d4 < c4,
        format!("β=2 KS {d2:.4} (crit {c2:.4}); β=4 KS {d4:.4} (crit {c4:.4})"),
    )
}

fn criterion_equivalence(runs: &[Run]) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for run in runs {
        let good = run
            .samples
            .iter()
            .filter(|s| {
                (0..N).all(|j| (s.lambda[j] - s.gamma[j]).abs() < 5.0 * run.prediction.sigma(Run::theory_index(j)))
            })
            .count();
        let frac = good as f64 / REPS as f64;
        ok &= frac >= 0.99;
        detail.push(format!("β={} {frac:.4}", run.beta));
    }
    Outcome::new(ok, format!("fraction with max_n |λ_n − γ_n|/σ_n < 5: {}; required ≥ 0.99", detail.join(", ")))
}

fn criterion_gaussian_rate() -> Outcome {
    let distance = |t: usize| {
        let p = DimensionProfile::square(N, t).unwrap();
        gaussian_limit_distance(&finite_t_marginal(DysonIndex::Complex, &p, 1, 1).unwrap())
    };
    let (d25, d400) = (distance(25), distance(400));
    let ratio = d25 / d400;
    Outcome::new(
        (2.8..=5.7).contains(&ratio),
        format!("d(25) = {d25:.4e}, d(400) = {d400:.4e}, ratio {ratio:.3}, required [2.8, 5.7]"),
    )
}

fn criterion_decoupling() -> Outcome {
    let p = DimensionProfile::square(N, 100).unwrap();
    let slope = (PI.sqrt() / 2.0).ln();
    let mut worst = 0.0f64;
    for t in 1..=100 {
        let v = log_decoupling_coefficient(&p, 1, 2, t).unwrap();
        worst = worst.max((v - slope * t as f64).abs() / (slope * t as f64).abs());
    }
    let diag = (1..=N).all(|k| [1, 10, 100].iter().all(|&t| decoupling_coefficient(DysonIndex::Complex, &p, k, k, t).unwrap() == 1.0));
    Outcome::new(
        diag && worst < 1e-12,
        format!("D_kk == 1: {diag}; max relative deviation of ln D_12(t) from t·ln(√π/2): {worst:.2e}"),
    )
}

fn criterion_meijer() -> Outcome {
    let tol = 1e-8;
    let mut worst = 0.0f64;
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    for z in [0.01, 0.2, 1.0, 4.0, 20.0] {
        worst = worst.max(rel(meijer_g(&MeijerParams::new(vec![0.0]).unwrap(), z).unwrap(), (-z).exp()));
        let k0 = 2.0 * bessel_k0(2.0 * z.sqrt());
        worst = worst.max(rel(meijer_g(&MeijerParams::new(vec![0.0, 0.0]).unwrap(), z).unwrap(), k0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = 10;
    for _ in 0..50 {
        let t = rng.random_range(1..=4);
        let b: Vec<f64> = (0..t).map(|_| rng.random_range(0.0..4.0)).collect();
        let p = MeijerParams::new(b).unwrap();
        let z = rng.random_range(0.05..10.0f64);
        let c = rng.random_range(-0.5..2.0f64);
        if p.b().iter().all(|&x| x + c >= 0.0) {
            let lhs = z.powf(c) * meijer_g(&p, z).unwrap();
            worst = worst.max(rel(lhs, meijer_g(&p.shifted(c), z).unwrap()));
            checks += 1;
        }
        let s = rng.random_range(0.2..3.0f64);
        let (lhs, rhs) = check_moment_identity(&p, z, s).unwrap();
        worst = worst.max(rel(lhs, rhs));
        checks += 1;
    }
    Outcome::new(worst < tol, format!("{checks} checks, max relative error {worst:.2e}, required < {tol:.0e}"))
}

/// `∫ P(z_1, z_2) d²z_1 d²z_2` for β = 2, N = 2, t = 4.
///
/// Radii on a log grid; the density depends on the phases only through
/// `|z_1 − z_2|²`, a degree-one trigonometric polynomial in the relative
/// angle, so a two-point angular trapezoid is exact.
fn normalization_n2() -> f64 {
    let p = DimensionProfile::square(2, 4).unwrap();
    let (lo, hi, h) = (-24.0, 9.0, 0.08);
    let steps = ((hi - lo) / h) as usize;
    let us: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * h).collect();
    let angles = [0.0, PI];
    let mut total = 0.0;
    for &u1 in &us {
        for &u2 in &us {
            let (r1, r2) = (u1.exp(), u2.exp());
            let mut ang = 0.0;
            for &phi in &angles {
                let pts = [Complex64::new(r1, 0.0), Complex64::from_polar(r2, phi)];
                ang += joint_density_exact(DysonIndex::Complex, &p, &pts).unwrap().exp();
            }
            // d²z = r² du dφ for each point; ∫ dφ_1 = 2π, relative angle averaged over the nodes.
            total += (r1 * r1) * (r2 * r2) * 2.0 * PI * (2.0 * PI * ang / angles.len() as f64);
        }
    }
    total * h * h
}

fn criterion_permanental() -> Outcome {
    let norm = normalization_n2();
    let p = DimensionProfile::square(2, 4).unwrap();
    let m = 16;
    let mut worst = 0.0f64;
    for lambdas in [[0.1, -0.2], [0.3, 0.25], [-0.6, 0.5], [0.0, 0.0], [0.8, -1.1]] {
        let mut acc = 0.0;
        for a in 0..m {
            for b in 0..m {
                let th = [2.0 * PI * a as f64 / m as f64, 2.0 * PI * b as f64 / m as f64];
                acc += exponent_phase_density_exact(DysonIndex::Complex, &p, &lambdas, &th).unwrap();
            }
        }
        let integrated = acc * (2.0 * PI / m as f64).powi(2);
        let perm = finite_t_permanental_density(DysonIndex::Complex, &p, &lambdas).unwrap();
        worst = worst.max(((integrated - perm) / perm).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut ryser = true;
    for n in 1..=7 {
        let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let (x, y) = (permanent_ryser(&a).unwrap(), permanent_naive(&a).unwrap());
        ryser &= (x - y).norm() <= 1e-10 * y.norm();
    }
    Outcome::new(
        (norm - 1.0).abs() < 1e-3 && worst < 1e-6 && ryser,
        format!("∫P = {norm:.8}; phase-integrated vs permanent max rel {worst:.2e}; Ryser ≡ naive n ≤ 7: {ryser}"),
    )
}

fn criterion_ordering() -> Outcome {
    let reps = 10_000;
    let t = 10;
    let profile = DimensionProfile::square(2, t).unwrap();
    let spec = ProductSpec::new(DysonIndex::Real, profile.clone(), reps, SEED + 10, Precision::Auto).unwrap();
    // QR columns keep their labels through time: column 0 follows f_2, column 1 follows f_1.
    let inversions = simulate(&spec)
        .into_iter()
        .map(|r| r.unwrap())
        .filter(|s| s.column_gamma[1] > s.column_gamma[0])
        .count();
    let freq = inversions as f64 / reps as f64;
    let pred = TheoryPrediction::new(DysonIndex::Real, &profile);
    let p = ordering_probability(&pred, 2, 1).unwrap();
    let se = (p * (1.0 - p) / reps as f64).sqrt();
    let exact = exact_ordering_probability(DysonIndex::Real, &profile, 2, 1).unwrap();
    Outcome::new(
        (freq - p).abs() < 3.0 * se,
        format!(
            "inversion frequency {freq:.4} vs erfc formula {p:.4} (3 SE = {:.4}); exact finite-t law gives {exact:.4}",
            3.0 * se
        ),
    )
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        // Test discovery by `cargo test -- --list`.
        for i in 1..=10 {
            println!("criterion_{i}: test");
        }
        return ExitCode::SUCCESS;
    }

    let start = Instant::now();
    let runs: Vec<Run> = DysonIndex::ALL.into_iter().map(Run::new).collect();
    eprintln!("Monte Carlo runs ({} × {REPS} reps, N={N}, t={T}) took {:.1?}", runs.len(), start.elapsed());
    let by = |b: DysonIndex| runs.iter().find(|r| r.beta == b).unwrap();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("Lyapunov means", Box::new(|| criterion_means(&runs))),
        ("Lyapunov variances", Box::new(|| criterion_variances(&runs))),
        ("real-eigenvalue collapse", Box::new(|| criterion_real_collapse(by(DysonIndex::Real)))),
        (
            "phase laws",
            Box::new(|| criterion_phases(by(DysonIndex::Complex), by(DysonIndex::Quaternion))),
        ),
        ("eigen/singular equivalence", Box::new(|| criterion_equivalence(&runs))),
        ("Gaussian limit rate", Box::new(criterion_gaussian_rate)),
        ("decoupling coefficients", Box::new(criterion_decoupling)),
        ("Meijer identities", Box::new(criterion_meijer)),
        ("permanental consistency", Box::new(criterion_permanental)),
        ("ordering probability", Box::new(criterion_ordering)),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let out = check();
        if !out.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{}] {name}: {}",
            i + 1,
            if out.passed { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed ({:.1?})", criteria.len() - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
