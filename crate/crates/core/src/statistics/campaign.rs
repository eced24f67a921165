use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::summary::{merge, EnsembleDescriptor, MonteCarloSummary};
use crate::error::{Error, Result};
use crate::game_model::{to_univariate, UnivariatePoly};
use crate::polysolve::{count_internal_equilibria, count_signed_roots, solvable, DEFAULT_MATCH_TOL};
use crate::sampling::{GameSampler, SeededStream, UnivariateSampler};

/// Largest tolerated ratio of degenerate redraws to accepted samples.
pub const DEGENERATE_RATE_LIMIT: f64 = 1e-3;

/// Redraws allowed for a single sample index before the campaign aborts.
pub const MAX_RETRIES: u64 = 64;

const CHUNK: u64 = 256;

/// What to sample, how many times, and with which seed and pool size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub descriptor: EnsembleDescriptor,
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; does not affect results.
    pub workers: usize,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        let e = &self.descriptor;
        if self.samples == 0 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if e.symmetric && e.n != 2 {
            return Err(Error::Config(format!(
                "symmetric games are two-strategy only, got n = {}",
                e.n
            )));
        }
        if !solvable(e.n, e.d) {
            return Err(Error::Unsolvable { n: e.n, d: e.d });
        }
        Ok(())
    }
}

enum Source {
    Game(GameSampler),
    Univariate(UnivariateSampler),
}

impl Source {
    fn new(e: &EnsembleDescriptor) -> Result<Self> {
        Ok(if e.symmetric {
            Source::Univariate(UnivariateSampler::symmetric(e.d, e.dist)?)
        } else {
            Source::Game(GameSampler::new(e.n, e.d, e.dist, e.scheme)?)
        })
    }

    fn univariate(&self, stream: SeededStream) -> Result<UnivariatePoly> {
        let mut rng = stream.rng();
        match self {
            Source::Univariate(s) => Ok(s.sample(&mut rng)),
            Source::Game(g) => to_univariate(&g.sample(&mut rng).system),
        }
    }

    /// Positive count, or `None` for a degenerate draw.
    fn count(&self, stream: SeededStream) -> Result<Option<usize>> {
        match self {
            Source::Game(g) if g.n() != 2 => {
                let game = g.sample(&mut stream.rng());
                let r = count_internal_equilibria(&game.system, DEFAULT_MATCH_TOL)?;
                Ok((!r.degenerate).then_some(r.count))
            }
            _ => Ok(self.signed(stream)?.map(|(p, _)| p)),
        }
    }

    /// Positive and negative counts of a univariate draw.
    fn signed(&self, stream: SeededStream) -> Result<Option<(usize, usize)>> {
        let p = self.univariate(stream)?;
        match count_signed_roots(&p) {
            Ok(c) => Ok(Some((c.positive, c.negative))),
            Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Draw sample `index`, redrawing degenerate instances from the retry
/// substreams. Returns the outcome and the number of redraws.
fn draw<T>(
    seed: u64,
    index: u64,
    mut attempt: impl FnMut(SeededStream) -> Result<Option<T>>,
) -> Result<(T, u64)> {
    for retry in 0..=MAX_RETRIES {
        if let Some(v) = attempt(SeededStream::new(seed, index).with_retry(retry))? {
            return Ok((v, retry));
        }
    }
    Err(Error::DegenerateRate { rate: 1.0, limit: DEGENERATE_RATE_LIMIT })
}

/// Split `0..samples` into fixed chunks, fold each chunk into its own
/// accumulator on the pool, and combine in chunk order.
fn sharded<A: Send>(
    cfg: &CampaignConfig,
    init: impl Fn() -> A + Sync,
    step: impl Fn(&mut A, u64) -> Result<()> + Sync,
    combine: impl Fn(A, A) -> Result<A>,
) -> Result<A> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let chunks = cfg.samples.div_ceil(CHUNK);
    let parts: Vec<A> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                for i in c * CHUNK..((c + 1) * CHUNK).min(cfg.samples) {
                    step(&mut acc, i)?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<A>>>()
    })?;
    parts.into_iter().try_fold(init(), combine)
}

fn check_rate(s: &MonteCarloSummary) -> Result<()> {
    let rate = s.degenerate_rate();
    if rate > DEGENERATE_RATE_LIMIT {
        return Err(Error::DegenerateRate { rate, limit: DEGENERATE_RATE_LIMIT });
    }
    Ok(())
}

/// Monte Carlo estimate of the positive-root (internal equilibrium) count
/// distribution. The summary is a pure function of the configuration minus
/// the worker count.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<MonteCarloSummary> {
    cfg.validate()?;
    let source = Source::new(&cfg.descriptor)?;
    let summary = sharded(
        cfg,
        || MonteCarloSummary::empty(cfg.descriptor, cfg.seed),
        |acc, i| {
            let (count, redraws) = draw(cfg.seed, i, |s| source.count(s))?;
            for _ in 0..redraws {
                acc.record_degenerate();
            }
            acc.record(count);
            Ok(())
        },
        |a, b| merge(&a, &b),
    )?;
    check_rate(&summary)?;
    Ok(summary)
}

/// Positive, negative and total real-root counts of univariate draws,
/// with the paired difference `negative - positive` kept exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedSummary {
    pub positive: MonteCarloSummary,
    pub negative: MonteCarloSummary,
    pub total: MonteCarloSummary,
    pub diff_sum: i64,
    pub diff_sq: u64,
}

impl SignedSummary {
    fn empty(cfg: &CampaignConfig) -> Self {
        let e = cfg.descriptor;
        Self {
            positive: MonteCarloSummary::empty(e, cfg.seed),
            negative: MonteCarloSummary::empty(e, cfg.seed),
            total: MonteCarloSummary::empty(e, cfg.seed),
            diff_sum: 0,
            diff_sq: 0,
        }
    }

    fn merge(a: Self, b: Self) -> Result<Self> {
        Ok(Self {
            positive: merge(&a.positive, &b.positive)?,
            negative: merge(&a.negative, &b.negative)?,
            total: merge(&a.total, &b.total)?,
            diff_sum: a.diff_sum + b.diff_sum,
            diff_sq: a.diff_sq + b.diff_sq,
        })
    }

    /// Mean and standard error of `negative - positive`.
    pub fn paired_difference(&self) -> Option<(f64, f64)> {
        let n = self.positive.samples();
        if n < 2 {
            return None;
        }
        let nf = n as f64;
        let mean = self.diff_sum as f64 / nf;
        let num = n as i128 * self.diff_sq as i128 - (self.diff_sum as i128).pow(2);
        let var = num as f64 / (nf * (nf - 1.0));
        Some((mean, (var / nf).sqrt()))
    }
}

/// Campaign over univariate ensembles (`n = 2` games or symmetric games)
/// that records positive and negative roots separately.
pub fn run_signed_campaign(cfg: &CampaignConfig) -> Result<SignedSummary> {
    cfg.validate()?;
    if cfg.descriptor.n != 2 {
        return Err(Error::Config("signed campaigns need n = 2".into()));
    }
    let source = Source::new(&cfg.descriptor)?;
    let summary = sharded(
        cfg,
        || SignedSummary::empty(cfg),
        |acc, i| {
            let ((p, q), redraws) = draw(cfg.seed, i, |s| source.signed(s))?;
            for _ in 0..redraws {
                acc.positive.record_degenerate();
                acc.negative.record_degenerate();
                acc.total.record_degenerate();
            }
            acc.positive.record(p);
            acc.negative.record(q);
            acc.total.record(p + q);
            let diff = q as i64 - p as i64;
            acc.diff_sum += diff;
            acc.diff_sq += (diff * diff) as u64;
            Ok(())
        },
        SignedSummary::merge,
    )?;
    check_rate(&summary.positive)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{CoefficientDistribution, SamplingScheme};

    fn cfg(n: usize, d: usize, scheme: SamplingScheme, samples: u64, workers: usize) -> CampaignConfig {
        CampaignConfig {
            descriptor: EnsembleDescriptor::new(n, d, CoefficientDistribution::Gaussian, scheme, false),
            samples,
            seed: 42,
            workers,
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        let a = run_campaign(&cfg(2, 6, SamplingScheme::AggregateA, 1000, 1)).unwrap();
        let b = run_campaign(&cfg(2, 6, SamplingScheme::AggregateA, 1000, 3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples(), 1000);
        assert_eq!(a.histogram().iter().sum::<u64>(), 1000);
    }

    #[test]
    fn signed_totals_add_up() {
        let whole = run_signed_campaign(&cfg(2, 8, SamplingScheme::ScaledKss, 600, 2)).unwrap();
        assert_eq!(whole.positive.samples(), 600);
        assert_eq!(
            whole.total.sum(),
            whole.positive.sum() + whole.negative.sum()
        );
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            run_campaign(&cfg(3, 4, SamplingScheme::AggregateA, 10, 1)),
            Err(Error::Unsolvable { n: 3, d: 4 })
        ));
        assert!(run_campaign(&cfg(2, 4, SamplingScheme::AggregateA, 0, 1)).is_err());
        assert!(run_campaign(&cfg(2, 4, SamplingScheme::AggregateA, 10, 0)).is_err());
        let mut c = cfg(3, 2, SamplingScheme::AggregateA, 10, 1);
        c.descriptor.symmetric = true;
        assert!(run_campaign(&c).is_err());
        assert!(run_signed_campaign(&cfg(3, 2, SamplingScheme::AggregateA, 10, 1)).is_err());
    }

    #[test]
    fn small_regimes_run() {
        let s = run_campaign(&cfg(4, 2, SamplingScheme::AggregateA, 2000, 2)).unwrap();
        assert!(s.histogram().len() == 2);
        let s = run_campaign(&cfg(3, 3, SamplingScheme::AggregateA, 300, 2)).unwrap();
        assert!(s.mean().unwrap() > 0.2 && s.mean().unwrap() < 0.9);
    }
}
