//! Empirical summaries and Kolmogorov–Smirnov comparisons.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ensemble::DysonIndex;
use crate::error::{Error, Result};

/// Sample moments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Unbiased (`n − 1`) variance.
    pub variance: f64,
    /// Adjusted Fisher–Pearson skewness; 0 for constant samples or `n < 3`.
    pub skewness: f64,
    pub count: usize,
}

impl Summary {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

pub fn summarize(samples: &[f64]) -> Result<Summary> {
    let mut acc = MomentAccumulator::default();
    samples.iter().for_each(|&x| acc.push(x));
    acc.summary()
}

/// Streaming central moments up to third order; merges associatively.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MomentAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
}

impl MomentAccumulator {
    pub fn push(&mut self, x: f64) {
        self.merge(&MomentAccumulator {
            n: 1,
            mean: x,
            m2: 0.0,
            m3: 0.0,
        });
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let m2 = self.m2 + other.m2 + delta * delta * na * nb / n;
        let m3 = self.m3
            + other.m3
            + delta.powi(3) * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        self.mean += delta * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn summary(&self) -> Result<Summary> {
        if self.n < 2 {
            return Err(Error::InsufficientData(format!("need at least 2 samples, got {}", self.n)));
        }
        let n = self.n as f64;
        let variance = self.m2 / (n - 1.0);
        let skewness = if self.n < 3 || self.m2 == 0.0 {
            0.0
        } else {
            let g1 = (self.m3 / n) / (self.m2 / n).powf(1.5);
            g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
        };
        Ok(Summary {
            mean: self.mean,
            variance,
            skewness,
            count: self.n as usize,
        })
    }
}

/// Fixed-edge histogram; counts outside the edges are dropped but tallied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub outside: u64,
}

impl Histogram {
    pub fn with_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("histogram edges must be strictly increasing, at least two".into()));
        }
        let bins = edges.len() - 1;
        Ok(Self {
            edges,
            counts: vec![0; bins],
            total: 0,
            outside: 0,
        })
    }

    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(lo < hi) {
            return Err(Error::Domain(format!("invalid histogram range [{lo}, {hi}] with {bins} bins")));
        }
        Self::with_edges((0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect())
    }

    /// Freedman–Diaconis binning over the sample range, filled with `samples`.
    pub fn freedman_diaconis(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientData("Freedman–Diaconis binning needs two samples".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
        let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
        let width = 2.0 * iqr / (samples.len() as f64).cbrt();
        let bins = if width > 0.0 && hi > lo {
            (((hi - lo) / width).ceil() as usize).clamp(1, 10_000)
        } else {
            1
        };
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let mut h = Self::uniform(lo, hi, bins)?;
        samples.iter().for_each(|&x| h.add(x));
        Ok(h)
    }

    pub fn add(&mut self, x: f64) {
        self.total += 1;
        let last = *self.edges.last().expect("edges");
        if !(x >= self.edges[0] && x <= last) {
            self.outside += 1;
            return;
        }
        // Right-closed last bin.
        let idx = match self.edges.partition_point(|&e| e <= x) {
            0 => 0,
            i => (i - 1).min(self.counts.len() - 1),
        };
        self.counts[idx] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.edges != other.edges {
            return Err(Error::Domain("cannot merge histograms with different edges".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
        self.outside += other.outside;
        Ok(())
    }

    /// Normalised density per bin (relative to all added samples).
    pub fn density(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(&c, w)| c as f64 / (self.total.max(1) as f64 * (w[1] - w[0])))
            .collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

/// Significance levels with fixed Kolmogorov critical coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KsLevel {
    OnePercent,
    FivePercent,
}

impl KsLevel {
    pub fn coefficient(self) -> f64 {
        match self {
            KsLevel::OnePercent => 1.63,
            KsLevel::FivePercent => 1.36,
        }
    }

    /// One-sample critical value `c/√n`.
    pub fn critical(self, n: usize) -> f64 {
        self.coefficient() / (n as f64).sqrt()
    }

    /// Two-sample critical value `c·√((n+m)/(nm))`.
    pub fn critical_two_sample(self, n: usize, m: usize) -> f64 {
        let (n, m) = (n as f64, m as f64);
        self.coefficient() * ((n + m) / (n * m)).sqrt()
    }
}

/// `sup_x |F_n(x) − F(x)|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        // Ties form a single jump.
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let f = cdf(sorted[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    d
}

/// Two-sample statistic `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// CDF of the phase density `2 sin²θ/π` on `[0, π]`.
pub fn sine_squared_cdf(theta: f64) -> f64 {
    let th = theta.clamp(0.0, PI);
    (th - th.sin() * th.cos()) / PI
}

/// Outcome of a phase-law check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTestReport {
    pub beta: DysonIndex,
    pub count: usize,
    /// KS statistic (β = 2, 4) or fraction of phases exactly at 0 or π (β = 1).
    pub statistic: f64,
    /// 1% KS critical value (β = 2, 4) or the minimum real fraction 0.999 (β = 1).
    pub threshold: f64,
    pub passed: bool,
}

/// Minimum fraction of β = 1 phases on `{0, π}` for the real-collapse check.
pub const REAL_FRACTION_THRESHOLD: f64 = 0.999;

/// β = 2: uniform on `[0, 2π)`; β = 4: `2 sin²θ/π` on `[0, π]`; β = 1: fraction on `{0, π}`.
pub fn phase_histogram_test(beta: DysonIndex, thetas: &[f64]) -> Result<PhaseTestReport> {
    if thetas.is_empty() {
        return Err(Error::InsufficientData("no phases".into()));
    }
    let n = thetas.len();
    let (statistic, threshold, passed) = match beta {
        DysonIndex::Complex => {
            let d = ks_statistic(thetas, |x| (x / (2.0 * PI)).clamp(0.0, 1.0));
            let c = KsLevel::OnePercent.critical(n);
            (d, c, d < c)
        }
        DysonIndex::Quaternion => {
            let d = ks_statistic(thetas, sine_squared_cdf);
            let c = KsLevel::OnePercent.critical(n);
            (d, c, d < c)
        }
        DysonIndex::Real => {
            let frac = thetas.iter().filter(|&&t| t == 0.0 || t == PI).count() as f64 / n as f64;
            (frac, REAL_FRACTION_THRESHOLD, frac >= REAL_FRACTION_THRESHOLD)
        }
    };
    Ok(PhaseTestReport {
        beta,
        count: n,
        statistic,
        threshold,
        passed,
    })
}
