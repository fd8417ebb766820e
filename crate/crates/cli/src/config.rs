//! Command-line arguments and the resolved run configuration.

use std::path::PathBuf;
use std::str::FromStr;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ginibre::{DimensionProfile, DysonIndex, Precision, ProductSpec};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "ginibre", version, about = "Finite-time exponents of products of Ginibre matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rescaled eigenvalues |z|^{1/t} and phases, one row per eigenvalue.
    Scatter(RunArgs),
    /// Eigenvalue and singular exponents per realization, with a theory sidecar.
    Exponents(RunArgs),
    /// Exponents after every step of a single realization.
    Convergence(RunArgs),
    /// Identity and oracle checks of the numerical kernels.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum NuArg {
    Constant(usize),
    List(Vec<usize>),
}

impl FromStr for NuArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("invalid ν value {v:?}"));
        if s.contains(',') {
            Ok(NuArg::List(s.split(',').map(parse).collect::<Result<_, _>>()?))
        } else {
            Ok(NuArg::Constant(parse(s)?))
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Dyson index: 1 (real), 2 (complex) or 4 (quaternion).
    #[arg(long, default_value_t = 2, value_parser = PossibleValuesParser::new(["1", "2", "4"]).map(|s| s.parse::<u8>().unwrap()))]
    pub beta: u8,
    /// Matrix size N.
    #[arg(long = "dim", default_value_t = 3)]
    pub n: usize,
    /// ν_i: a single value for every factor, or a comma-separated list of length t.
    #[arg(long, default_value = "0")]
    pub nu: NuArg,
    /// Number of factors t (defaults to the length of an explicit ν list, else 200).
    #[arg(long = "time")]
    pub t: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// `auto` or a bit count ≥ 53.
    #[arg(long, default_value = "auto")]
    pub precision: Precision,
    /// Output file; standard output when omitted. A `.meta.json` sidecar is written next to CSV files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Resolved configuration, echoed into every sidecar.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub beta: u8,
    pub n: usize,
    pub nu: NuArg,
    pub t: usize,
    pub reps: usize,
    pub seed: u64,
    pub precision: String,
    pub precision_bits: u32,
    pub format: Format,
    pub version: &'static str,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub spec: ProductSpec,
}

impl RunConfig {
    pub fn resolve(subcommand: &'static str, args: &RunArgs) -> Result<Self, String> {
        let beta = DysonIndex::from_beta(args.beta).map_err(|e| e.to_string())?;
        let profile = match &args.nu {
            NuArg::Constant(nu) => DimensionProfile::constant(args.n, *nu, args.t.unwrap_or(200)),
            NuArg::List(list) => {
                if let Some(t) = args.t {
                    if t != list.len() {
                        return Err(format!("--time {t} disagrees with {} ν values", list.len()));
                    }
                }
                DimensionProfile::new(args.n, list.clone())
            }
        }
        .map_err(|e| e.to_string())?;
        let spec = ProductSpec::new(beta, profile, args.reps, args.seed, args.precision).map_err(|e| e.to_string())?;
        Ok(Self {
            subcommand,
            beta: args.beta,
            n: args.n,
            nu: args.nu.clone(),
            t: spec.t(),
            reps: args.reps,
            seed: args.seed,
            precision: args.precision.to_string(),
            precision_bits: spec.precision_bits(),
            format: args.format,
            version: env!("CARGO_PKG_VERSION"),
            out: args.out.clone(),
            spec,
        })
    }
}
