use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{CoefficientDistribution, SamplingScheme};

/// Version tag written into every serialized summary.
pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

/// The ensemble a campaign samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleDescriptor {
    pub n: usize,
    pub d: usize,
    pub dist: CoefficientDistribution,
    pub scheme: SamplingScheme,
    /// Symmetric two-strategy games, coefficients `C(d-1, k) xi_k`.
    pub symmetric: bool,
}

impl EnsembleDescriptor {
    pub fn new(
        n: usize,
        d: usize,
        dist: CoefficientDistribution,
        scheme: SamplingScheme,
        symmetric: bool,
    ) -> Self {
        Self { n, d, dist, scheme, symmetric }
    }

    /// Upper bound on the count of isolated positive solutions (Bezout).
    pub fn max_count(&self) -> usize {
        (self.d.saturating_sub(1)).saturating_pow(self.n.saturating_sub(1) as u32)
    }

    pub fn conforming(&self) -> bool {
        self.symmetric || self.scheme.conforming(self.n)
    }
}

/// Mergeable accumulator of equilibrium counts.
///
/// All totals are integers, so merging is exact, associative and
/// commutative; derived statistics are computed on demand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    schema_version: u32,
    descriptor: EnsembleDescriptor,
    /// Master seeds of the pooled campaigns, sorted and deduplicated.
    seeds: Vec<u64>,
    samples: u64,
    sum: u64,
    sum_sq: u64,
    /// `histogram[m]` = number of samples with count `m`.
    histogram: Vec<u64>,
    degenerate: u64,
}

impl MonteCarloSummary {
    pub fn empty(descriptor: EnsembleDescriptor, seed: u64) -> Self {
        Self {
            schema_version: SUMMARY_SCHEMA_VERSION,
            descriptor,
            seeds: vec![seed],
            samples: 0,
            sum: 0,
            sum_sq: 0,
            histogram: vec![0; descriptor.max_count() + 1],
            degenerate: 0,
        }
    }

    pub fn record(&mut self, count: usize) {
        if count >= self.histogram.len() {
            self.histogram.resize(count + 1, 0);
        }
        self.histogram[count] += 1;
        self.samples += 1;
        self.sum += count as u64;
        self.sum_sq += (count as u64) * (count as u64);
    }

    pub fn record_degenerate(&mut self) {
        self.degenerate += 1;
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    pub fn descriptor(&self) -> &EnsembleDescriptor {
        &self.descriptor
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn sum(&self) -> u64 {
        self.sum
    }

    pub fn sum_sq(&self) -> u64 {
        self.sum_sq
    }

    pub fn histogram(&self) -> &[u64] {
        &self.histogram
    }

    pub fn degenerate(&self) -> u64 {
        self.degenerate
    }

    /// Redraws per accepted sample.
    pub fn degenerate_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.degenerate as f64 / self.samples as f64
        }
    }

    pub fn mean(&self) -> Option<f64> {
        (self.samples > 0).then(|| self.sum as f64 / self.samples as f64)
    }

    /// Unbiased sample variance, from exact integer totals.
    pub fn variance(&self) -> Option<f64> {
        if self.samples < 2 {
            return None;
        }
        let n = self.samples as u128;
        let s = self.sum as u128;
        let num = n * self.sum_sq as u128 - s * s;
        Some(num as f64 / (n * (n - 1)) as f64)
    }

    pub fn std_dev(&self) -> Option<f64> {
        self.variance().map(f64::sqrt)
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> Option<f64> {
        self.variance().map(|v| (v / self.samples as f64).sqrt())
    }

    /// Empirical `p_m`; the entries sum to one.
    pub fn pm(&self) -> Vec<f64> {
        let n = self.samples.max(1) as f64;
        self.histogram.iter().map(|&c| c as f64 / n).collect()
    }

    /// Binomial standard error of each empirical `p_m`.
    pub fn pm_se(&self) -> Vec<f64> {
        let n = self.samples.max(1) as f64;
        self.pm().iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Self = serde_json::from_str(s)?;
        if v.schema_version != SUMMARY_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "summary schema version {} (expected {SUMMARY_SCHEMA_VERSION})",
                v.schema_version
            )));
        }
        if v.histogram.iter().sum::<u64>() != v.samples {
            return Err(Error::Schema("histogram total differs from sample count".into()));
        }
        Ok(v)
    }
}

/// Exact additive merge of two summaries of the same ensemble.
pub fn merge(a: &MonteCarloSummary, b: &MonteCarloSummary) -> Result<MonteCarloSummary> {
    if a.descriptor != b.descriptor {
        return Err(Error::DescriptorMismatch);
    }
    let mut histogram = a.histogram.clone();
    if b.histogram.len() > histogram.len() {
        histogram.resize(b.histogram.len(), 0);
    }
    for (h, &x) in histogram.iter_mut().zip(&b.histogram) {
        *h += x;
    }
    let mut seeds: Vec<u64> = a.seeds.iter().chain(&b.seeds).copied().collect();
    seeds.sort_unstable();
    seeds.dedup();
    Ok(MonteCarloSummary {
        schema_version: SUMMARY_SCHEMA_VERSION,
        descriptor: a.descriptor,
        seeds,
        samples: a.samples + b.samples,
        sum: a.sum + b.sum,
        sum_sq: a.sum_sq + b.sum_sq,
        histogram,
        degenerate: a.degenerate + b.degenerate,
    })
}
