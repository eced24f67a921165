//! Monte Carlo campaigns over sampled games, closed-form references, and
//! mergeable count summaries.

mod campaign;
mod summary;

pub use campaign::{
    run_campaign, run_signed_campaign, CampaignConfig, SignedSummary, DEGENERATE_RATE_LIMIT,
    MAX_RETRIES,
};
pub use summary::{merge, EnsembleDescriptor, MonteCarloSummary, SUMMARY_SCHEMA_VERSION};

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expected number of internal equilibria, `(d-1)^((n-1)/2) / 2^(n-1)`.
pub fn expected_count_closed_form(d: usize, n: usize) -> f64 {
    let e = (n as f64 - 1.0) / 2.0;
    (d as f64 - 1.0).powf(e) / 2f64.powi(n as i32 - 1)
}

/// Lower bound `sqrt(d-1)/2` and leading-order asymptotic `sqrt((d-1)/2)`
/// of the expected count for symmetric two-strategy games.
pub fn symmetric_reference(d: usize) -> (f64, f64) {
    let m = d as f64 - 1.0;
    (m.sqrt() / 2.0, (m / 2.0).sqrt())
}

/// `4^(n-1) Var(N) / (d-1)^((n-1)/2)` from the empirical variance.
pub fn variance_ratio(summary: &MonteCarloSummary) -> Result<f64> {
    if summary.samples() < 2 {
        return Err(Error::InsufficientSamples { have: summary.samples(), need: 2 });
    }
    let n = summary.descriptor().n;
    let d = summary.descriptor().d;
    let var = summary.variance().unwrap_or(0.0);
    Ok(4f64.powi(n as i32 - 1) * var / (d as f64 - 1.0).powf((n as f64 - 1.0) / 2.0))
}

/// Minimum sample count for [`clt_diagnostics`].
pub const CLT_MIN_SAMPLES: u64 = 1000;

/// Standardized sample moments of
/// `(2^(n-1) N - (d-1)^((n-1)/2)) / (d-1)^((n-1)/4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub samples: u64,
    pub mean: f64,
    /// Standard error of `mean`.
    pub mean_se: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Skewness `m3 / m2^1.5` and excess kurtosis `m4 / m2^2 - 3` with
/// population (biased) central moments.
pub fn shape_moments(values: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = values.collect();
    let w: f64 = pts.iter().map(|p| p.1).sum();
    if w <= 0.0 {
        return None;
    }
    let mean = pts.iter().map(|&(x, c)| x * c).sum::<f64>() / w;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &(x, c) in &pts {
        let e = x - mean;
        let e2 = e * e;
        m2 += c * e2;
        m3 += c * e2 * e;
        m4 += c * e2 * e2;
    }
    m2 /= w;
    m3 /= w;
    m4 /= w;
    if m2 <= 0.0 {
        return None;
    }
    Some((mean, m2, m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0))
}

/// CLT diagnostics computed from the count histogram.
pub fn clt_diagnostics(summary: &MonteCarloSummary) -> Result<CltReport> {
    let samples = summary.samples();
    if samples < CLT_MIN_SAMPLES {
        return Err(Error::InsufficientSamples { have: samples, need: CLT_MIN_SAMPLES });
    }
    let n = summary.descriptor().n as f64;
    let dm = summary.descriptor().d as f64 - 1.0;
    let scale = 2f64.powf(n - 1.0);
    let centre = dm.powf((n - 1.0) / 2.0);
    let spread = dm.powf((n - 1.0) / 4.0);
    let pts = summary
        .histogram()
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(m, &c)| ((scale * m as f64 - centre) / spread, c as f64));
    let (mean, var, skewness, excess_kurtosis) = shape_moments(pts).ok_or_else(|| {
        Error::UndefinedMoments("all samples have the same count".into())
    })?;
    let unbiased = var * samples as f64 / (samples as f64 - 1.0);
    Ok(CltReport {
        samples,
        mean,
        mean_se: (unbiased / samples as f64).sqrt(),
        variance: unbiased,
        skewness,
        excess_kurtosis,
    })
}

/// Central interval of sample skewness and excess kurtosis for `samples`
/// iid Gaussian draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullBand {
    pub level: f64,
    pub skewness: (f64, f64),
    pub excess_kurtosis: (f64, f64),
}

impl NullBand {
    pub fn contains(&self, report: &CltReport) -> bool {
        (self.skewness.0..=self.skewness.1).contains(&report.skewness)
            && (self.excess_kurtosis.0..=self.excess_kurtosis.1).contains(&report.excess_kurtosis)
    }
}

/// Simulated null band: `replicates` batches of `samples` standard normal
/// draws, the `level` central quantile range of each statistic.
pub fn gaussian_null_band(samples: usize, replicates: usize, level: f64, seed: u64) -> Result<NullBand> {
    if samples < 4 || replicates < 10 || !(0.0 < level && level < 1.0) {
        return Err(Error::Contract(format!(
            "null band needs samples >= 4, replicates >= 10, level in (0,1); got {samples}, {replicates}, {level}"
        )));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut skews = Vec::with_capacity(replicates);
    let mut kurts = Vec::with_capacity(replicates);
    let mut buf = vec![0.0; samples];
    for _ in 0..replicates {
        for x in buf.iter_mut() {
            *x = StandardNormal.sample(&mut rng);
        }
        let (_, _, s, k) = shape_moments(buf.iter().map(|&x| (x, 1.0))).expect("continuous draws");
        skews.push(s);
        kurts.push(k);
    }
    let tail = (1.0 - level) / 2.0;
    let q = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        let at = |p: f64| v[((p * (v.len() - 1) as f64).round() as usize).min(v.len() - 1)];
        (at(tail), at(1.0 - tail))
    };
    Ok(NullBand { level, skewness: q(&mut skews), excess_kurtosis: q(&mut kurts) })
}

/// `sqrt(se_a^2 + se_b^2)`.
pub fn combined_se(a: &MonteCarloSummary, b: &MonteCarloSummary) -> f64 {
    let sa = a.standard_error().unwrap_or(0.0);
    let sb = b.standard_error().unwrap_or(0.0);
    (sa * sa + sb * sb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{CoefficientDistribution, SamplingScheme};

    fn desc(n: usize, d: usize) -> EnsembleDescriptor {
        EnsembleDescriptor::new(n, d, CoefficientDistribution::Gaussian, SamplingScheme::AggregateA, false)
    }

    #[test]
    fn closed_forms() {
        assert_eq!(expected_count_closed_form(5, 2), 1.0);
        assert_eq!(expected_count_closed_form(2, 4), 0.125);
        assert_eq!(expected_count_closed_form(10, 3), 2.25);
        assert_eq!(expected_count_closed_form(2, 2), 0.5);
        let (lo, asy) = symmetric_reference(5);
        assert_eq!(lo, 1.0);
        assert!((asy - 2f64.sqrt()).abs() < 1e-15);
        let (lo, asy) = symmetric_reference(2);
        assert_eq!(lo, 0.5);
        assert!((asy - 0.5f64.sqrt()).abs() < 1e-15);
        for d in [2, 3, 7, 100, 201] {
            let (lo, asy) = symmetric_reference(d);
            assert!((lo / asy - 0.5f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn variance_ratio_cases() {
        let mut s = MonteCarloSummary::empty(desc(2, 10), 1);
        for _ in 0..10 {
            s.record(3);
        }
        assert_eq!(variance_ratio(&s).unwrap(), 0.0);
        let one = {
            let mut t = MonteCarloSummary::empty(desc(2, 10), 1);
            t.record(1);
            t
        };
        assert!(matches!(variance_ratio(&one), Err(Error::InsufficientSamples { .. })));

        // counts 0 and 2 in equal numbers: sample variance 4/3 for 4 samples
        let mut t = MonteCarloSummary::empty(desc(2, 5), 1);
        for c in [0, 2, 0, 2] {
            t.record(c);
        }
        assert!((variance_ratio(&t).unwrap() - 4.0 * (4.0 / 3.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn clt_moments_from_histogram() {
        let mut s = MonteCarloSummary::empty(desc(2, 17), 1);
        for _ in 0..2000 {
            s.record(2);
        }
        assert!(matches!(clt_diagnostics(&s), Err(Error::UndefinedMoments(_))));
        let mut few = MonteCarloSummary::empty(desc(2, 17), 1);
        few.record(1);
        assert!(matches!(clt_diagnostics(&few), Err(Error::InsufficientSamples { .. })));

        // symmetric two-point law centred on E[N] = 2: zero skewness, excess kurtosis -2
        let mut t = MonteCarloSummary::empty(desc(2, 17), 1);
        for i in 0..2000 {
            t.record(if i % 2 == 0 { 1 } else { 3 });
        }
        let r = clt_diagnostics(&t).unwrap();
        assert!(r.mean.abs() < 1e-12);
        assert!(r.skewness.abs() < 1e-12);
        assert!((r.excess_kurtosis + 2.0).abs() < 1e-12);
        // 2N has variance 4 around 4; spread (d-1)^(1/4) = 2
        assert!((r.variance - 4.0 / 4.0 * 2000.0 / 1999.0).abs() < 1e-12);
    }

    #[test]
    fn null_band_is_reasonable() {
        let b = gaussian_null_band(10_000, 400, 0.99, 7).unwrap();
        // asymptotic sd of skewness sqrt(6/N) = 0.0245, of kurtosis sqrt(24/N) = 0.049
        assert!(b.skewness.0 < -0.04 && b.skewness.0 > -0.09);
        assert!(b.skewness.1 > 0.04 && b.skewness.1 < 0.09);
        assert!(b.excess_kurtosis.0 < -0.08 && b.excess_kurtosis.1 > 0.08);
        assert!(gaussian_null_band(2, 100, 0.99, 1).is_err());
    }
}
