//! Probabilities `p_m` of exactly `m` internal equilibria in a `d`-player
//! two-strategy game with Gaussian coefficients, by integrating the joint
//! density of the roots over real/complex root configurations.
//!
//! A configuration with `m` positive roots, `d - 1 - m - 2k` negative roots
//! and `k` conjugate pairs `r e^{+-i alpha}` contributes
//!
//! ```text
//! 2^k / (m! k! (d-1-m-2k)!) * Gamma(d/2) / (pi^{d/2} prod_i sqrt(delta_i))
//!     * r_1..r_k * (sum_i sigma_i^2 / delta_i)^{-d/2} * Delta
//! ```
//!
//! with `delta_i = C(d-1, i)`, `sigma` the elementary symmetric polynomials
//! of the roots and `Delta` the product of their pairwise distances.

mod cubature;

pub use cubature::{adaptive, gauss_kronrod15, stratified_mc, Estimate};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::game_model::binomial_f64;

/// Largest `d` accepted by [`pm_component`]; the integral has dimension `d - 1`.
pub const MAX_QUADRATURE_D: usize = 5;

/// Relative imaginary residue tolerated in the expanded `sigma_j`.
const IMAG_RESIDUE: f64 = 1e-10;

/// Roots of a real polynomial of degree `d - 1`, grouped by kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootConfiguration {
    /// Positive real roots.
    pub positive: Vec<f64>,
    /// Negative real roots (stored as negative numbers).
    pub negative: Vec<f64>,
    /// Conjugate pairs `(r, alpha)` for `r e^{+-i alpha}`, `r > 0`,
    /// `alpha` in `[0, pi]`.
    pub pairs: Vec<(f64, f64)>,
}

impl RootConfiguration {
    pub fn new(positive: Vec<f64>, negative: Vec<f64>, pairs: Vec<(f64, f64)>) -> Result<Self> {
        if positive.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Contract("positive roots must be finite and > 0".into()));
        }
        if negative.iter().any(|&x| !(x < 0.0 && x.is_finite())) {
            return Err(Error::Contract("negative roots must be finite and < 0".into()));
        }
        if pairs
            .iter()
            .any(|&(r, a)| !(r > 0.0 && r.is_finite() && (0.0..=PI).contains(&a)))
        {
            return Err(Error::Contract("pairs need r > 0 and alpha in [0, pi]".into()));
        }
        Ok(Self { positive, negative, pairs })
    }

    /// Number of roots counted with conjugates, `d - 1`.
    pub fn degree(&self) -> usize {
        self.positive.len() + self.negative.len() + 2 * self.pairs.len()
    }

    /// All roots as complex numbers, each pair contributing both conjugates.
    pub fn roots(&self) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = self
            .positive
            .iter()
            .chain(&self.negative)
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        for &(r, a) in &self.pairs {
            let z = Complex64::from_polar(r, a);
            v.push(z);
            v.push(z.conj());
        }
        v
    }
}

/// Elementary symmetric polynomials `sigma_0..sigma_{d-1}` of the roots and
/// the Vandermonde factor `Delta = prod_{i<j} |z_i - z_j|`.
pub fn sigma_delta(config: &RootConfiguration) -> Result<(Vec<f64>, f64)> {
    let roots = config.roots();
    sigma_delta_roots(&roots)
}

fn sigma_delta_roots(roots: &[Complex64]) -> Result<(Vec<f64>, f64)> {
    // e[j] = sigma_j, built by multiplying in one root at a time
    let mut e = vec![Complex64::new(0.0, 0.0); roots.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (i, z) in roots.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let prev = e[j - 1];
            e[j] += prev * z;
        }
    }
    let mut sigma = Vec::with_capacity(e.len());
    for (j, s) in e.iter().enumerate() {
        if s.im.abs() > IMAG_RESIDUE * s.norm().max(1.0) {
            return Err(Error::Contract(format!(
                "sigma_{j} has imaginary residue {:.3e}; configuration is not conjugate-closed",
                s.im
            )));
        }
        sigma.push(s.re);
    }
    let mut delta = 1.0;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            delta *= (roots[i] - roots[j]).norm();
        }
    }
    Ok((sigma, delta))
}

fn check_mk(d: usize, m: usize, k: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::Contract(format!("need d >= 2, got {d}")));
    }
    let n = d - 1;
    if m + 2 * k > n {
        return Err(Error::Contract(format!("m + 2k = {} exceeds d - 1 = {n}", m + 2 * k)));
    }
    Ok(n - m - 2 * k)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `Gamma(d/2) / (pi^{d/2} prod_i sqrt(C(d-1, i)))`.
fn gaussian_constant(d: usize) -> f64 {
    let n = (d - 1) as u32;
    let prod: f64 = (0..=n).map(|i| binomial_f64(n, i).sqrt()).product();
    gamma(d as f64 / 2.0) / (PI.powf(d as f64 / 2.0) * prod)
}

fn combinatorial_prefactor(m: usize, k: usize, neg: usize) -> f64 {
    2f64.powi(k as i32) / (factorial(m) * factorial(k) * factorial(neg))
}

/// `sum_i sigma_i^2 / delta_i`.
fn weighted_norm(sigma: &[f64]) -> f64 {
    let n = (sigma.len() - 1) as u32;
    sigma
        .iter()
        .enumerate()
        .map(|(i, s)| s * s / binomial_f64(n, i as u32))
        .sum()
}

fn check_config(d: usize, m: usize, k: usize, config: &RootConfiguration) -> Result<usize> {
    let neg = check_mk(d, m, k)?;
    if config.positive.len() != m || config.negative.len() != neg || config.pairs.len() != k {
        return Err(Error::Contract(format!(
            "configuration has ({}, {}, {}) roots, expected ({m}, {neg}, {k})",
            config.positive.len(),
            config.negative.len(),
            config.pairs.len()
        )));
    }
    Ok(neg)
}

/// The full Gaussian integrand of `p_{m, 2k, d-1-m-2k}` at one configuration,
/// prefactors included.
pub fn pm_integrand_gaussian(d: usize, m: usize, k: usize, config: &RootConfiguration) -> Result<f64> {
    let neg = check_config(d, m, k, config)?;
    let (sigma, delta) = sigma_delta(config)?;
    let rs: f64 = config.pairs.iter().map(|p| p.0).product();
    Ok(combinatorial_prefactor(m, k, neg)
        * gaussian_constant(d)
        * rs
        * weighted_norm(&sigma).powf(-(d as f64) / 2.0)
        * delta)
}

/// Joint density of the coefficient vector `(b_0, .., b_{d-1})`.
pub trait CoefficientDensity {
    fn density(&self, b: &[f64]) -> f64;
}

/// Independent `b_k ~ N(0, C(d-1, k))`, the law of Gaussian game coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKss {
    pub d: usize,
}

impl CoefficientDensity for GaussianKss {
    fn density(&self, b: &[f64]) -> f64 {
        let n = (self.d - 1) as u32;
        b.iter()
            .enumerate()
            .map(|(k, &x)| {
                let v = binomial_f64(n, k as u32);
                (-x * x / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
            })
            .product()
    }
}

/// The general-density integrand of `p_{m, 2k, d-1-m-2k}` at one
/// configuration and scale `a`, prefactors included.
///
/// The density is evaluated at the coefficients of `a * prod (y - z_j)`,
/// that is `b_k = a (-1)^{d-1-k} sigma_{d-1-k}`. Integrating over `a` in
/// `R` gives the configuration's contribution.
pub fn pm_integrand_general(
    d: usize,
    m: usize,
    k: usize,
    config: &RootConfiguration,
    a: f64,
    density: &dyn CoefficientDensity,
) -> Result<f64> {
    let neg = check_config(d, m, k, config)?;
    let (sigma, delta) = sigma_delta(config)?;
    let n = d - 1;
    let b: Vec<f64> = (0..=n)
        .map(|j| {
            let s = sigma[n - j];
            if (n - j) % 2 == 1 { -a * s } else { a * s }
        })
        .collect();
    let rs: f64 = config.pairs.iter().map(|p| p.0).product();
    Ok(combinatorial_prefactor(m, k, neg) * rs * density.density(&b) * a.abs().powi(n as i32) * delta)
}

/// Integration method for [`pm_component`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMethod {
    Cubature,
    StratifiedMc,
}

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Absolute error target for each component integral.
    pub tolerance: f64,
    /// Region bisections allowed per component (cubature).
    pub max_refinements: usize,
    pub method: QuadMethod,
    /// Integrand evaluations per component (stratified Monte Carlo).
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-5,
            max_refinements: 200_000,
            method: QuadMethod::Cubature,
            mc_samples: 1_000_000,
            seed: 0,
        }
    }
}

/// `u / (1 - u)` and its derivative.
#[inline]
fn half_line(u: f64) -> (f64, f64) {
    let w = 1.0 - u;
    (u / w, 1.0 / (w * w))
}

/// Integrand of `p_{m,2k,.}` on the unit cube.
///
/// Real roots of each sign are integrated in increasing order (the
/// integrand is symmetric in them, so this cancels `m!` and the negative
/// factorial) with gaps `u / (1 - u)`; pair moduli use `s / (1 - s)` and
/// angles `pi * v`.
fn cube_integrand(d: usize, m: usize, k: usize) -> Result<impl Fn(&[f64]) -> f64> {
    let neg = check_mk(d, m, k)?;
    let constant = combinatorial_prefactor(m, k, neg) * gaussian_constant(d) * factorial(m) * factorial(neg)
        * PI.powi(k as i32);
    Ok(move |t: &[f64]| {
        let mut roots = Vec::with_capacity(d - 1);
        let mut jac = constant;
        let mut acc = 0.0;
        for &u in &t[..m] {
            let (g, dg) = half_line(u);
            acc += g;
            jac *= dg;
            roots.push(Complex64::new(acc, 0.0));
        }
        acc = 0.0;
        for &u in &t[m..m + neg] {
            let (g, dg) = half_line(u);
            acc += g;
            jac *= dg;
            roots.push(Complex64::new(-acc, 0.0));
        }
        for j in 0..k {
            let (r, dr) = half_line(t[m + neg + 2 * j]);
            let alpha = PI * t[m + neg + 2 * j + 1];
            jac *= dr * r;
            let z = Complex64::from_polar(r, alpha);
            roots.push(z);
            roots.push(z.conj());
        }
        if !jac.is_finite() || jac == 0.0 {
            return 0.0;
        }
        match sigma_delta_roots(&roots) {
            Ok((sigma, delta)) => {
                let v = jac * weighted_norm(&sigma).powf(-(d as f64) / 2.0) * delta;
                if v.is_finite() { v } else { 0.0 }
            }
            Err(_) => 0.0,
        }
    })
}

/// One term `p_{m, 2k, d-1-m-2k}` with its error estimate.
pub fn pm_component(d: usize, m: usize, k: usize, cfg: &QuadConfig) -> Result<Estimate> {
    check_mk(d, m, k)?;
    if d > MAX_QUADRATURE_D {
        return Err(Error::Contract(format!(
            "quadrature supports d <= {MAX_QUADRATURE_D}, got {d}"
        )));
    }
    if !(cfg.tolerance > 0.0) {
        return Err(Error::Contract("quadrature tolerance must be positive".into()));
    }
    let f = cube_integrand(d, m, k)?;
    let dim = d - 1;
    let est = match cfg.method {
        QuadMethod::Cubature => adaptive(dim, f, cfg.tolerance, cfg.max_refinements),
        QuadMethod::StratifiedMc => {
            let seed = cfg.seed ^ ((m as u64) << 8 | k as u64);
            stratified_mc(dim, f, cfg.mc_samples, seed)
        }
    };
    if est.error > cfg.tolerance {
        return Err(Error::QuadratureTolerance { estimate: est.error, tolerance: cfg.tolerance });
    }
    Ok(est)
}

/// How a [`PmTable`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PmMethod {
    Quadrature,
    MonteCarlo,
}

/// `p_0 .. p_{d-1}` with per-entry absolute error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmTable {
    pub d: usize,
    pub p: Vec<f64>,
    pub error: Vec<f64>,
    pub method: PmMethod,
}

impl PmTable {
    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn total_error(&self) -> f64 {
        self.error.iter().sum()
    }

    /// `sum_m m p_m`.
    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }

    pub fn mean_error(&self) -> f64 {
        self.error.iter().enumerate().map(|(m, e)| m as f64 * e).sum()
    }
}

/// All `p_m`, `m = 0..d-1`, as sums of their components.
pub fn pm_distribution(d: usize, cfg: &QuadConfig) -> Result<PmTable> {
    if !(2..=MAX_QUADRATURE_D).contains(&d) {
        return Err(Error::Contract(format!(
            "quadrature supports 2 <= d <= {MAX_QUADRATURE_D}, got {d}"
        )));
    }
    let n = d - 1;
    let mut p = vec![0.0; d];
    let mut error = vec![0.0; d];
    for m in 0..=n {
        for k in 0..=(n - m) / 2 {
            let e = pm_component(d, m, k, cfg)?;
            p[m] += e.value;
            error[m] += e.error;
        }
    }
    let method = match cfg.method {
        QuadMethod::Cubature => PmMethod::Quadrature,
        QuadMethod::StratifiedMc => PmMethod::MonteCarlo,
    };
    Ok(PmTable { d, p, error, method })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(tol: f64) -> QuadConfig {
        QuadConfig { tolerance: tol, ..QuadConfig::default() }
    }

    #[test]
    fn sigma_delta_examples() {
        let c = RootConfiguration::new(vec![1.0, 2.0], vec![], vec![]).unwrap();
        let (s, d) = sigma_delta(&c).unwrap();
        assert_eq!(s, vec![1.0, 3.0, 2.0]);
        assert_eq!(d, 1.0);

        let c = RootConfiguration::new(vec![], vec![], vec![(1.0, PI / 2.0)]).unwrap();
        let (s, d) = sigma_delta(&c).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-15 && s[1].abs() < 1e-15 && (s[2] - 1.0).abs() < 1e-15);
        assert!((d - 2.0).abs() < 1e-15);

        let c = RootConfiguration::new(vec![0.5], vec![-3.0], vec![(2.0, 1.0)]).unwrap();
        assert_eq!(sigma_delta(&c).unwrap().0[0], 1.0);
    }

    #[test]
    fn sigma_matches_expanded_polynomial() {
        let c = RootConfiguration::new(vec![0.7, 1.9], vec![-0.4], vec![(1.3, 2.2)]).unwrap();
        let (s, _) = sigma_delta(&c).unwrap();
        // coefficients of prod (y - z), highest first, equal (-1)^j sigma_j
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        for z in c.roots() {
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (i, &p) in poly.iter().enumerate() {
                next[i] += p;
                next[i + 1] -= p * z;
            }
            poly = next;
        }
        for (j, p) in poly.iter().enumerate() {
            let signed = if j % 2 == 0 { s[j] } else { -s[j] };
            assert!((p.re - signed).abs() < 1e-10 && p.im.abs() < 1e-10);
        }
    }

    #[test]
    fn imaginary_residue_is_rejected() {
        let roots = [Complex64::new(0.0, 1.0)];
        assert!(sigma_delta_roots(&roots).is_err());
        assert!(RootConfiguration::new(vec![-1.0], vec![], vec![]).is_err());
        assert!(RootConfiguration::new(vec![], vec![], vec![(1.0, 4.0)]).is_err());
    }

    #[test]
    fn integrand_d2_closed_form() {
        for x in [0.1, 1.0, 3.5] {
            let c = RootConfiguration::new(vec![x], vec![], vec![]).unwrap();
            let v = pm_integrand_gaussian(2, 1, 0, &c).unwrap();
            assert!((v - 1.0 / (PI * (1.0 + x * x))).abs() < 1e-15);
        }
        let c = RootConfiguration::new(vec![1.0, 1.0], vec![], vec![]).unwrap();
        assert_eq!(pm_integrand_gaussian(3, 2, 0, &c).unwrap(), 0.0);
        assert!(pm_integrand_gaussian(3, 2, 1, &c).is_err());
    }

    #[test]
    fn general_density_reduces_to_gaussian() {
        let c = RootConfiguration::new(vec![0.8], vec![-1.7], vec![(0.9, 1.1)]).unwrap();
        let d = 5;
        let density = GaussianKss { d };
        // integrate over a in R via a = s/(1-s) on both half lines
        let half = adaptive(
            1,
            |s| {
                let (a, da) = half_line(s[0]);
                da * pm_integrand_general(d, 1, 1, &c, a, &density).unwrap()
            },
            1e-14,
            200,
        );
        let both = 2.0 * half.value;
        let g = pm_integrand_gaussian(d, 1, 1, &c).unwrap();
        assert!((both - g).abs() < 1e-10 * g, "{both} vs {g}");
    }

    #[test]
    fn d2_components() {
        let c = cfg(1e-8);
        let a = pm_component(2, 1, 0, &c).unwrap();
        let b = pm_component(2, 0, 0, &c).unwrap();
        assert!((a.value - 0.5).abs() < 1e-7);
        assert!((b.value - 0.5).abs() < 1e-7);
        let t = pm_distribution(2, &c).unwrap();
        assert!((t.p[0] - 0.5).abs() < 1e-6 && (t.p[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn d3_distribution() {
        let t = pm_distribution(3, &cfg(1e-6)).unwrap();
        assert!((t.total() - 1.0).abs() < 1e-4, "{:?}", t);
        assert!((t.mean() - 2f64.sqrt() / 2.0).abs() < 1e-4, "{:?}", t);
        // sign symmetry p_m = p_{d-1-m} for real roots only
        let a = pm_component(3, 2, 0, &cfg(1e-6)).unwrap().value;
        let b = pm_component(3, 0, 0, &cfg(1e-6)).unwrap().value;
        assert!((a - b).abs() < 1e-5);
    }

    #[test]
    fn contracts() {
        assert!(pm_component(6, 0, 0, &cfg(1e-3)).is_err());
        assert!(pm_component(3, 2, 1, &cfg(1e-3)).is_err());
        assert!(pm_component(3, 1, 0, &cfg(0.0)).is_err());
        let tight = QuadConfig { tolerance: 1e-15, max_refinements: 2, ..QuadConfig::default() };
        assert!(matches!(pm_component(3, 1, 0, &tight), Err(Error::QuadratureTolerance { .. })));
    }

    #[test]
    fn config_json() {
        let c: QuadConfig = serde_json::from_str(
            r#"{"tolerance":1e-4,"max_refinements":1000,"method":"stratified-mc","mc_samples":5000}"#,
        )
        .unwrap();
        assert_eq!(c.method, QuadMethod::StratifiedMc);
        assert_eq!(c.seed, 0);
    }
}
