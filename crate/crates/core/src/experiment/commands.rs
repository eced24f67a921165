use serde_json::{json, Value};

use super::{Command, ExperimentConfig, Table};
use crate::error::Result;
use crate::polysolve::{count_internal_equilibria, DEFAULT_MATCH_TOL};
use crate::quadrature::{pm_distribution, QuadConfig};
use crate::sampling::{sample_game, CoefficientDistribution, SeededStream};
use crate::statistics::{
    clt_diagnostics, expected_count_closed_form, gaussian_null_band, run_campaign,
    symmetric_reference, variance_ratio, CampaignConfig, EnsembleDescriptor, MonteCarloSummary,
};

/// Replicates used for the simulated Gaussian null band.
const NULL_BAND_REPLICATES: usize = 1000;
/// Central level of the null band.
const NULL_BAND_LEVEL: f64 = 0.99;

fn f(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

fn campaign(
    cfg: &ExperimentConfig,
    d: usize,
    dist: CoefficientDistribution,
    symmetric: bool,
) -> Result<MonteCarloSummary> {
    run_campaign(&CampaignConfig {
        descriptor: EnsembleDescriptor::new(cfg.n, d, dist, cfg.scheme_or_default(), symmetric),
        samples: cfg.sample_count(),
        seed: cfg.seed,
        workers: cfg.workers,
    })
}

/// Compute the table and the JSON results for one configuration.
pub(super) fn run(cfg: &ExperimentConfig) -> Result<(Table, Value)> {
    match cfg.command {
        Command::ExpectedCount => expected_count(cfg),
        Command::VarianceScan => variance_scan(cfg),
        Command::CltCheck => clt_check(cfg),
        Command::Distribution => distribution(cfg),
        Command::PmAnalytic => pm_analytic(cfg),
        Command::Universality => universality(cfg),
        Command::SymmetricCompare => symmetric_compare(cfg),
        Command::SampleGame => sample_games(cfg),
    }
}

fn expected_count(cfg: &ExperimentConfig) -> Result<(Table, Value)> {
    let mut t = Table::new(&[
        "n",
        "d",
        "samples",
        "mean_equilibria",
        "se_equilibria",
        "reference_mean_equilibria",
        "z_score",
        "degenerate_redraws",
    ]);
    let mut summaries = vec![];
    for d in cfg.d_values() {
        let s = campaign(cfg, d, cfg.dist_or_default(), cfg.symmetric)?;
        let mean = s.mean().unwrap_or(f64::NAN);
        let se = s.standard_error();
        let reference = if cfg.symmetric {
            symmetric_reference(d).1
        } else {
            expected_count_closed_form(d, cfg.n)
        };
        let z = se.filter(|&e| e > 0.0).map(|e| (mean - reference) / e);
        t.push(vec![
            cfg.n.to_string(),
            d.to_string(),
            s.samples().to_string(),
            f(mean),
            opt(se),
            f(reference),
            opt(z),
            s.degenerate().to_string(),
        ]);
        summaries.push(s);
    }
    Ok((t, json!({ "summaries": summaries })))
}

fn variance_scan(cfg: &ExperimentConfig) -> Result<(Table, Value)> {
    let mut t = Table::new(&[
        "d",
        "samples",
        "mean_equilibria",
        "variance_equilibria",
        "variance_ratio",
        "reference_mean_equilibria",
    ]);
    let mut summaries = vec![];
    for d in cfg.d_values() {
        let s = campaign(cfg, d, cfg.dist_or_default(), false)?;
        t.push(vec![
            d.to_string(),
            s.samples().to_string(),
            opt(s.mean()),
            opt(s.variance()),
            f(variance_ratio(&s)?),
            f(expected_count_closed_form(d, cfg.n)),
        ]);
        summaries.push(s);
    }
    Ok((t, json!({ "summaries": summaries })))
}

fn clt_check(cfg: &ExperimentConfig) -> Result<(Table, Value)> {
    let mut t = Table::new(&[
        "d",
        "samples",
        "standardized_mean",
        "standardized_mean_se",
        "standardized_variance",
        "skewness",
        "excess_kurtosis",
        "null_skewness_low",
        "null_skewness_high",
        "null_excess_kurtosis_low",
        "null_excess_kurtosis_high",
        "inside_null_band",
    ]);
    let mut results = vec![];
    for d in cfg.d_values() {
        let s = campaign(cfg, d, cfg.dist_or_default(), false)?;
        let r = clt_diagnostics(&s)?;
        let band = gaussian_null_band(
            s.samples() as usize,
            NULL_BAND_REPLICATES,
            NULL_BAND_LEVEL,
            cfg.seed ^ d as u64,
        )?;
        t.push(vec![
            d.to_string(),
            r.samples.to_string(),
            f(r.mean),
            f(r.mean_se),
            f(r.variance),
            f(r.skewness),
            f(r.excess_kurtosis),
            f(band.skewness.0),
            f(band.skewness.1),
            f(band.excess_kurtosis.0),
            f(band.excess_kurtosis.1),
            band.contains(&r).to_string(),
        ]);
        results.push(json!({ "summary": s, "clt": r, "null_band": band }));
    }
    Ok((t, json!({ "results": results })))
}

fn distribution(cfg: &ExperimentConfig) -> Result<(Table, Value)> {
    let d = cfg.d_values()[0];
    let s = campaign(cfg, d, cfg.dist_or_default(), cfg.symmetric)?;
    let mut t = Table::new(&["m", "p_m_empirical", "se"]);
    let max = s.descriptor().max_count();
    let (pm, se) = (s.pm(), s.pm_se());
    for m in 0..=max {
        t.push(vec![
            m.to_string(),
            f(pm.get(m).copied().unwrap_or(0.0)),
            f(se.get(m).copied().unwrap_or(0.0)),
        ]);
    }
    Ok((t, json!({ "summary": s })))
}

fn pm_analytic(cfg: &ExperimentConfig) -> Result<(Table, Value)> {
    let d = cfg.d_values()[0];
    let mut q = QuadConfig { seed: cfg.seed, ..QuadConfig::default() };
    if let Some(tol) = cfg.tolerance {
        q.tolerance = tol;
    }
    let table = pm_distribution(d, &q)?;
    let mut t = Table::new(&["m", "p_m", "error"]);
    for (m, (p, e)) in table.p.iter().zip(&table.error).enumerate() {
        t.push(vec![m.to_string(), f(*p), f(*e)]);
    }
    Ok((t, json!({ "quadrature": q, "table": table })))
}

fn universality(cfg: &ExperimentConfig) -> Result<(Table, Value)> {
    let dists = match cfg.dist {
        Some(d) => vec![d],
        None => CoefficientDistribution::ALL.to_vec(),
    };
    let mut t = Table::new(&[
        "d",
        "dist",
        "samples",
        "mean_equilibria",
        "se_equilibria",
        "mean_over_sqrt_d_minus_1",
        "reference_ratio",
    ]);
    let mut summaries = vec![];
    for d in cfg.d_values() {
        for &dist in &dists {
            let s = campaign(cfg, d, dist, false)?;
            let mean = s.mean().unwrap_or(f64::NAN);
            let root = (d as f64 - 1.0).sqrt();
            t.push(vec![
                d.to_string(),
                dist.name().to_string(),
                s.samples().to_string(),
                f(mean),
                opt(s.standard_error()),
                f(mean / root),
                f(0.5),
            ]);
            summaries.push(s);
        }
    }
    Ok((t, json!({ "summaries": summaries })))
}

fn symmetric_compare(cfg: &ExperimentConfig) -> Result<(Table, Value)> {
    let mut t = Table::new(&[
        "d",
        "samples",
        "symmetric_mean_equilibria",
        "symmetric_se",
        "general_mean_equilibria",
        "general_se",
        "lower_bound_sqrt_d_minus_1_over_2",
        "asymptotic_sqrt_d_minus_1_over_2",
        "symmetric_over_asymptotic",
    ]);
    let mut summaries = vec![];
    for d in cfg.d_values() {
        let sym = campaign(cfg, d, cfg.dist_or_default(), true)?;
        let gen = campaign(cfg, d, cfg.dist_or_default(), false)?;
        let (lower, asym) = symmetric_reference(d);
        let m = sym.mean().unwrap_or(f64::NAN);
        t.push(vec![
            d.to_string(),
            sym.samples().to_string(),
            f(m),
            opt(sym.standard_error()),
            opt(gen.mean()),
            opt(gen.standard_error()),
            f(lower),
            f(asym),
            f(m / asym),
        ]);
        summaries.push(json!({ "symmetric": sym, "general": gen }));
    }
    Ok((t, json!({ "summaries": summaries })))
}

fn sample_games(cfg: &ExperimentConfig) -> Result<(Table, Value)> {
    let tol = cfg.tolerance.unwrap_or(DEFAULT_MATCH_TOL);
    let mut t = Table::new(&["sample", "n", "d", "count", "degenerate", "exact_arithmetic", "conforming"]);
    let mut games = vec![];
    for d in cfg.d_values() {
        for i in 0..cfg.sample_count() {
            let g = sample_game(
                cfg.n,
                d,
                cfg.dist_or_default(),
                cfg.scheme_or_default(),
                SeededStream::new(cfg.seed, i),
            )?;
            let r = count_internal_equilibria(&g.system, tol)?;
            t.push(vec![
                i.to_string(),
                cfg.n.to_string(),
                d.to_string(),
                r.count.to_string(),
                r.degenerate.to_string(),
                r.exact_arithmetic.to_string(),
                g.conforming.to_string(),
            ]);
            games.push(json!({ "sample": i, "d": d, "system": g.system, "report": r }));
        }
    }
    Ok((t, json!({ "games": games })))
}
