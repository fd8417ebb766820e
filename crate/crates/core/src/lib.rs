//! Simulation and theory for products of independent rectangular Ginibre
//! matrices in the three symmetry classes (real, complex, quaternionic).
//!
//! The crate is organised bottom-up:
//!
//! - [`ensemble`] samples the factors,
//! - [`product`] accumulates `Y(t) = X_t ⋯ X_1` and extracts finite-time
//!   exponents from eigenvalues (arbitrary precision) and singular values
//!   (thin-QR renormalisation),
//! - [`specfun`] provides the special functions (polygamma, erfc, Meijer G,
//!   log-gamma-sum densities),
//! - [`theory`] collects the closed-form predictions,
//! - [`permanent`] and [`stats`] are supporting numerics,
//! - [`verify`] bundles the identity and oracle checks used by the CLI.

pub mod ensemble;
pub mod error;
pub mod permanent;
pub mod product;
pub mod specfun;
pub mod stats;
pub mod theory;
pub mod verify;

pub use ensemble::{DimensionProfile, DysonIndex, GinibreFactor};
pub use error::{Error, Result};
pub use product::{Precision, ProductSpec, SpectralSample};
pub use theory::TheoryPrediction;
