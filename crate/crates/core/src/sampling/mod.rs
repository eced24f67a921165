//! Coefficient distributions and samplers for the random-game ensembles.
//!
//! Three ways to draw a game's coefficient system are supported:
//!
//! * `aggregateA`: iid payoff differences per ordered tuple, summed over
//!   composition classes;
//! * `payoffB`: iid raw payoffs per strategy and tuple, differenced against
//!   the last strategy and then summed. For `n > 2` the differences of one
//!   tuple are correlated through the shared last row, so the sample is
//!   tagged non-conforming;
//! * `scaledKSS`: each coefficient drawn directly as `sqrt(multinomial) * xi`.

mod stream;

pub use stream::{splitmix64, SeededStream};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game_model::{
    binomial_f64, CoefficientSystem, ExponentSpace, TupleClasses, UnivariatePoly,
};

/// Centered, symmetric law of a single coefficient draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientDistribution {
    /// Standard normal.
    Gaussian,
    /// +1 or -1 with equal probability.
    Rademacher,
    /// Uniform on [-1, 1]; variance 1/3, left unnormalized since root
    /// counts do not change under positive rescaling.
    Uniform,
}

impl CoefficientDistribution {
    pub const ALL: [CoefficientDistribution; 3] = [Self::Gaussian, Self::Rademacher, Self::Uniform];

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Gaussian => rng.sample(StandardNormal),
            Self::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::Uniform => rng.gen::<f64>() * 2.0 - 1.0,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Gaussian | Self::Rademacher => 1.0,
            Self::Uniform => 1.0 / 3.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Rademacher => "rademacher",
            Self::Uniform => "uniform",
        }
    }
}

impl fmt::Display for CoefficientDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoefficientDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "rademacher" => Ok(Self::Rademacher),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::Config(format!("unknown distribution '{other}'"))),
        }
    }
}

/// How a game's coefficient system is assembled from draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SamplingScheme {
    #[serde(rename = "aggregateA")]
    AggregateA,
    #[serde(rename = "payoffB")]
    PayoffB,
    #[serde(rename = "scaledKSS")]
    ScaledKss,
}

impl SamplingScheme {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AggregateA => "aggregateA",
            Self::PayoffB => "payoffB",
            Self::ScaledKss => "scaledKSS",
        }
    }

    /// Whether the scheme yields independent coefficients with multinomial
    /// variances (up to a common scale) for this strategy count.
    pub fn conforming(&self, n: usize) -> bool {
        !matches!(self, Self::PayoffB) || n == 2
    }
}

impl fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplingScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aggregateA" => Ok(Self::AggregateA),
            "payoffB" => Ok(Self::PayoffB),
            "scaledKSS" => Ok(Self::ScaledKss),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// One scalar draw.
pub fn sample_scalar<R: Rng + ?Sized>(dist: CoefficientDistribution, rng: &mut R) -> f64 {
    dist.sample(rng)
}

/// A sampled coefficient system together with its conformity tag.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGame {
    pub system: CoefficientSystem,
    /// False for `payoffB` with `n > 2`, whose root statistics are not
    /// covered by the Kostlan-Shub-Smale correspondence.
    pub conforming: bool,
}

/// Reusable game sampler; tables depending only on `(n, d)` are built once.
#[derive(Debug, Clone)]
pub struct GameSampler {
    n: usize,
    d: usize,
    dist: CoefficientDistribution,
    scheme: SamplingScheme,
    classes: Option<TupleClasses>,
    weights: Vec<f64>,
}

impl GameSampler {
    pub fn new(
        n: usize,
        d: usize,
        dist: CoefficientDistribution,
        scheme: SamplingScheme,
    ) -> Result<Self> {
        let space = ExponentSpace::new(n, d)?;
        let classes = match scheme {
            SamplingScheme::AggregateA | SamplingScheme::PayoffB => Some(TupleClasses::new(n, d)?),
            SamplingScheme::ScaledKss => None,
        };
        let weights = space.indices().iter().map(|k| k.multinomial_f64().sqrt()).collect();
        Ok(Self { n, d, dist, scheme, classes, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn conforming(&self) -> bool {
        self.scheme.conforming(self.n)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SampledGame {
        let len = self.weights.len();
        let coeffs = match (self.scheme, &self.classes) {
            (SamplingScheme::AggregateA, Some(classes)) => (0..self.n - 1)
                .map(|_| {
                    let mut b = vec![0.0; len];
                    for t in 0..classes.len() {
                        b[classes.class_of(t)] += self.dist.sample(rng);
                    }
                    b
                })
                .collect(),
            (SamplingScheme::PayoffB, Some(classes)) => {
                let t = classes.len();
                let alpha: Vec<f64> = (0..self.n * t).map(|_| self.dist.sample(rng)).collect();
                let last = &alpha[(self.n - 1) * t..];
                (0..self.n - 1)
                    .map(|i| {
                        let mut b = vec![0.0; len];
                        for (tuple, (a, l)) in alpha[i * t..(i + 1) * t].iter().zip(last).enumerate() {
                            b[classes.class_of(tuple)] += a - l;
                        }
                        b
                    })
                    .collect()
            }
            _ => (0..self.n - 1)
                .map(|_| self.weights.iter().map(|w| w * self.dist.sample(rng)).collect())
                .collect(),
        };
        SampledGame {
            system: CoefficientSystem::from_parts(self.n, self.d, coeffs),
            conforming: self.conforming(),
        }
    }
}

/// One game drawn from the substream `stream`.
pub fn sample_game(
    n: usize,
    d: usize,
    dist: CoefficientDistribution,
    scheme: SamplingScheme,
    stream: SeededStream,
) -> Result<SampledGame> {
    let sampler = GameSampler::new(n, d, dist, scheme)?;
    Ok(sampler.sample(&mut stream.rng()))
}

/// Univariate sampler `c_k * xi_k` with fixed weights `c_k`.
#[derive(Debug, Clone)]
pub struct UnivariateSampler {
    weights: Vec<f64>,
    dist: CoefficientDistribution,
}

impl UnivariateSampler {
    /// Elliptic (Kostlan) weights `sqrt(C(degree, k))`.
    pub fn kss(degree: usize, dist: CoefficientDistribution) -> Result<Self> {
        if degree < 1 {
            return Err(Error::Contract("KSS polynomial needs degree >= 1".into()));
        }
        let weights = (0..=degree)
            .map(|k| binomial_f64(degree as u32, k as u32).sqrt())
            .collect();
        Ok(Self { weights, dist })
    }

    /// Symmetric-game weights `C(d - 1, k)`.
    pub fn symmetric(d: usize, dist: CoefficientDistribution) -> Result<Self> {
        if d < 2 {
            return Err(Error::Contract("symmetric game needs d >= 2".into()));
        }
        let weights = (0..d).map(|k| binomial_f64((d - 1) as u32, k as u32)).collect();
        Ok(Self { weights, dist })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> UnivariatePoly {
        let coeffs = self.weights.iter().map(|w| w * self.dist.sample(rng)).collect();
        UnivariatePoly::new(coeffs).expect("finite weights and draws")
    }
}

pub fn sample_kss_univariate(
    degree: usize,
    dist: CoefficientDistribution,
    stream: SeededStream,
) -> Result<UnivariatePoly> {
    Ok(UnivariateSampler::kss(degree, dist)?.sample(&mut stream.rng()))
}

pub fn sample_symmetric_univariate(
    d: usize,
    dist: CoefficientDistribution,
    stream: SeededStream,
) -> Result<UnivariatePoly> {
    Ok(UnivariateSampler::symmetric(d, dist)?.sample(&mut stream.rng()))
}
