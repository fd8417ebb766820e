//! Subcommand implementations: run the simulation, write rows and the sidecar.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use ginibre::product::{simulate, trace, TracePoint};
use ginibre::theory::lyapunov_variance;
use ginibre::verify::{run_all, CheckResult};
use ginibre::{Error, SpectralSample, TheoryPrediction};
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, RunConfig, VerifyArgs};

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(String),
    Numerical(String),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::Verification(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes `rows` as CSV (plus a sidecar when writing to a file) or as one JSON document.
fn emit<R: Serialize>(config: &RunConfig, header: &[&str], rows: &[R], meta: serde_json::Value) -> Result<(), Failure> {
    let mut out = open_output(config.out.as_deref())?;
    match config.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut out);
            w.write_record(header)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            drop(w);
            out.flush()?;
            if let Some(path) = &config.out {
                let doc = json!({ "config": config, "meta": meta });
                let mut side = BufWriter::new(File::create(sidecar_path(path))?);
                serde_json::to_writer_pretty(&mut side, &doc)?;
                side.write_all(b"\n")?;
                side.flush()?;
            }
        }
        Format::Json => {
            let doc = json!({ "config": config, "meta": meta, "columns": header, "rows": rows });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
    }
    Ok(())
}

fn theory_meta(config: &RunConfig) -> serde_json::Value {
    let pred = TheoryPrediction::new(config.spec.beta, &config.spec.profile);
    let sigma: Vec<f64> = (1..=pred.n()).map(|n| pred.sigma(n)).collect();
    json!({ "mu": pred.mu, "sigma": sigma })
}

/// Sorted position `j` (descending) carries index `n = N − j`, matching `μ_n`.
fn label(n_total: usize, j: usize) -> usize {
    n_total - j
}

struct Collected {
    samples: Vec<(usize, SpectralSample)>,
    failures: Vec<serde_json::Value>,
}

fn collect(config: &RunConfig) -> Result<Collected, Failure> {
    let mut samples = Vec::with_capacity(config.reps);
    let mut failures = Vec::new();
    for (rep, r) in simulate(&config.spec).into_iter().enumerate() {
        match r {
            Ok(s) => samples.push((rep, s)),
            Err(e @ (Error::Precision { .. } | Error::DegenerateSample(_) | Error::Accuracy(_))) => {
                failures.push(json!({ "rep": rep, "error": e.to_string() }))
            }
            Err(e) => return Err(Failure::Usage(e.to_string())),
        }
    }
    Ok(Collected { samples, failures })
}

fn require_square(config: &RunConfig) -> Result<(), Failure> {
    if config.spec.profile.is_square() {
        Ok(())
    } else {
        Err(Failure::Usage(
            "eigenvalues need ν_t = 0 (the product must be square); use `exponents` for singular exponents".into(),
        ))
    }
}

fn finish(failures: &[serde_json::Value]) -> Result<(), Failure> {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("{} realization(s) failed after retry", failures.len())))
    }
}

#[derive(Serialize)]
struct ScatterRow {
    rep: usize,
    n: usize,
    modulus_rescaled: f64,
    theta: f64,
}

pub fn scatter(config: &RunConfig) -> Result<(), Failure> {
    require_square(config)?;
    let Collected { samples, failures } = collect(config)?;
    let n_total = config.spec.profile.n();
    let rows: Vec<ScatterRow> = samples
        .iter()
        .flat_map(|(rep, s)| {
            s.lambda.iter().zip(&s.theta).enumerate().map(move |(j, (&l, &th))| ScatterRow {
                rep: *rep,
                n: label(n_total, j),
                modulus_rescaled: l.exp(),
                theta: th,
            })
        })
        .collect();
    let mut meta = theory_meta(config);
    meta["failures"] = json!(failures);
    if config.spec.beta == ginibre::DysonIndex::Real {
        let real: usize = samples.iter().filter_map(|(_, s)| s.real_count).sum();
        meta["real_fraction"] = json!(real as f64 / (samples.len() * n_total).max(1) as f64);
    }
    emit(config, &["rep", "n", "modulus_rescaled", "theta"], &rows, meta)?;
    finish(&failures)
}

#[derive(Serialize)]
struct ExponentRow {
    rep: usize,
    n: usize,
    lambda: Option<f64>,
    gamma: f64,
    theta: Option<f64>,
}

pub fn exponents(config: &RunConfig) -> Result<(), Failure> {
    let Collected { samples, failures } = collect(config)?;
    let n_total = config.spec.profile.n();
    let rows: Vec<ExponentRow> = samples
        .iter()
        .flat_map(|(rep, s)| {
            (0..n_total).map(move |j| ExponentRow {
                rep: *rep,
                n: label(n_total, j),
                lambda: s.lambda.get(j).copied(),
                gamma: s.gamma[j],
                theta: s.theta.get(j).copied(),
            })
        })
        .collect();
    let mut meta = theory_meta(config);
    meta["failures"] = json!(failures);
    emit(config, &["rep", "n", "lambda", "gamma", "theta"], &rows, meta)?;
    finish(&failures)
}

#[derive(Serialize)]
struct TraceRow {
    step: usize,
    n: usize,
    lambda: Option<f64>,
    gamma: f64,
}

pub fn convergence(config: &RunConfig) -> Result<(), Failure> {
    let points: Vec<TracePoint> = trace(&config.spec, 0).map_err(|e| match e {
        Error::Precision { .. } | Error::DegenerateSample(_) | Error::Accuracy(_) => Failure::Numerical(e.to_string()),
        other => Failure::Usage(other.to_string()),
    })?;
    let n_total = config.spec.profile.n();
    let rows: Vec<TraceRow> = points
        .iter()
        .flat_map(|p| {
            (0..n_total).map(move |j| TraceRow {
                step: p.step,
                n: label(n_total, j),
                lambda: p.lambda.get(j).copied(),
                gamma: p.gamma[j],
            })
        })
        .collect();
    let pred = TheoryPrediction::new(config.spec.beta, &config.spec.profile);
    let profile = &config.spec.profile;
    let band: Vec<serde_json::Value> = (1..=config.t)
        .map(|step| {
            let sigma: Vec<f64> = (1..=n_total)
                .map(|n| lyapunov_variance(config.spec.beta, profile, n, step).map(f64::sqrt))
                .collect::<Result<_, _>>()
                .expect("valid index");
            json!({ "step": step, "sigma": sigma })
        })
        .collect();
    let meta = json!({ "mu": pred.mu, "band": band });
    emit(config, &["step", "n", "lambda", "gamma"], &rows, meta)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    seed: u64,
    passed: usize,
    failed: usize,
    checks: &'a [CheckResult],
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let checks = run_all(args.seed).map_err(|e| Failure::Numerical(e.to_string()))?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut out = open_output(args.out.as_deref())?;
    match args.format {
        Format::Json => {
            let report = VerifyReport {
                seed: args.seed,
                passed: checks.len() - failed,
                failed,
                checks: &checks,
            };
            serde_json::to_writer_pretty(&mut out, &report)?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for c in &checks {
                w.serialize(c)?;
            }
            w.flush()?;
        }
    }
    out.flush()?;
    if failed > 0 {
        return Err(Failure::Verification(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}
