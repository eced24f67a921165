//! Acceptance criteria. Prints one PASS/FAIL line per criterion. Exits
//! nonzero on any failure only when `ACCEPTANCE_STRICT=1` is set.

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use egt_roots::experiment::{run_experiment, Command, ExperimentConfig};
use egt_roots::game_model::UnivariatePoly;
use egt_roots::polysolve::{companion_oracle, real_root_signs, sturm_count_positive};
use egt_roots::quadrature::{pm_distribution, QuadConfig};
use egt_roots::sampling::{
    sample_kss_univariate, CoefficientDistribution, SamplingScheme, SeededStream,
};
use egt_roots::statistics::{
    clt_diagnostics, combined_se, expected_count_closed_form, gaussian_null_band, run_campaign,
    run_signed_campaign, symmetric_reference, variance_ratio, CampaignConfig, EnsembleDescriptor,
    MonteCarloSummary,
};
use egt_roots::Result;

use CoefficientDistribution::{Gaussian, Rademacher, Uniform};
use SamplingScheme::{AggregateA, ScaledKss};

const SE_BOUND: f64 = 3.0;

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn cfg(
    n: usize,
    d: usize,
    dist: CoefficientDistribution,
    scheme: SamplingScheme,
    symmetric: bool,
    samples: u64,
    seed: u64,
) -> CampaignConfig {
    CampaignConfig {
        descriptor: EnsembleDescriptor::new(n, d, dist, scheme, symmetric),
        samples,
        seed,
        workers: workers(),
    }
}

fn mean_se(s: &MonteCarloSummary) -> (f64, f64) {
    (s.mean().unwrap_or(f64::NAN), s.standard_error().unwrap_or(f64::NAN))
}

fn within(mean: f64, se: f64, target: f64) -> bool {
    (mean - target).abs() <= SE_BOUND * se
}

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn expected_count_two_strategies() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for d in [2, 3, 4, 5, 8, 10, 16] {
        let s = run_campaign(&cfg(2, d, Gaussian, AggregateA, false, 100_000, 101))?;
        let (m, se) = mean_se(&s);
        let r = expected_count_closed_form(d, 2);
        ok &= within(m, se, r);
        notes.push(format!("d={d} {m:.4}±{se:.4} vs {r:.4}"));
    }
    Ok((ok, notes.join(", ")))
}

fn expected_count_two_players() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for n in [2, 3, 4, 5] {
        let s = run_campaign(&cfg(n, 2, Gaussian, AggregateA, false, 100_000, 102))?;
        let (m, se) = mean_se(&s);
        let r = 0.5f64.powi(n as i32 - 1);
        ok &= within(m, se, r);
        notes.push(format!("n={n} {m:.4}±{se:.4} vs {r:.4}"));
    }
    Ok((ok, notes.join(", ")))
}

fn expected_count_bivariate() -> Outcome {
    let s = run_campaign(&cfg(3, 3, Gaussian, AggregateA, false, 10_000, 103))?;
    let (m, se) = mean_se(&s);
    Ok((within(m, se, 0.5), format!("n=3 d=3 {m:.4}±{se:.4} vs 0.5, {} degenerate redraws", s.degenerate())))
}

fn total_real_roots() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for d in [5, 10, 20] {
        let s = run_signed_campaign(&cfg(2, d, Gaussian, ScaledKss, false, 100_000, 104))?;
        let (m, se) = mean_se(&s.total);
        let target = (d as f64 - 1.0).sqrt();
        let (diff, diff_se) = s.paired_difference().expect("enough samples");
        ok &= within(m, se, target) && within(diff, diff_se, 0.0);
        notes.push(format!("d={d} total {m:.4}±{se:.4} vs {target:.4}, neg-pos {diff:.4}±{diff_se:.4}"));
    }
    Ok((ok, notes.join(", ")))
}

fn pm_quadrature_vs_sampling() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for d in [2, 3, 4] {
        let q = pm_distribution(d, &QuadConfig::default())?;
        let s = run_campaign(&cfg(2, d, Gaussian, AggregateA, false, 100_000, 105))?;
        let (pm, se) = (s.pm(), s.pm_se());
        let mut worst: f64 = 0.0;
        for m in 0..d {
            let emp = pm.get(m).copied().unwrap_or(0.0);
            let sem = se.get(m).copied().unwrap_or(0.0);
            let gap = (q.p[m] - emp).abs() - (SE_BOUND * sem + q.error[m]);
            worst = worst.max(gap);
            ok &= gap <= 0.0;
        }
        if d == 2 {
            let half = q.p.iter().all(|p| (p - 0.5).abs() <= 1e-6);
            ok &= half;
            notes.push(format!("d=2 p=({:.8}, {:.8})", q.p[0], q.p[1]));
        }
        let shown: Vec<String> = q.p.iter().zip(&pm).map(|(a, b)| format!("{a:.4}/{b:.4}")).collect();
        notes.push(format!("d={d} quad/emp [{}] worst excess {worst:.2e}", shown.join(" ")));
    }
    Ok((ok, notes.join(", ")))
}

fn universality() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for d in [20, 50, 100] {
        let ss: Vec<MonteCarloSummary> = [Gaussian, Rademacher, Uniform]
            .iter()
            .map(|&dist| run_campaign(&cfg(2, d, dist, ScaledKss, false, 100_000, 106)))
            .collect::<Result<_>>()?;
        let root = (d as f64 - 1.0).sqrt();
        let ratios: Vec<f64> = ss.iter().map(|s| s.mean().unwrap() / root).collect();
        ok &= ratios.iter().all(|r| (0.47..=0.53).contains(r));
        for i in 0..3 {
            for j in i + 1..3 {
                let gap = (ss[i].mean().unwrap() - ss[j].mean().unwrap()).abs();
                ok &= gap < SE_BOUND * combined_se(&ss[i], &ss[j]);
            }
        }
        notes.push(format!("d={d} ratios {:.4}/{:.4}/{:.4}", ratios[0], ratios[1], ratios[2]));
    }
    Ok((ok, notes.join(", ")))
}

fn variance_and_clt() -> Outcome {
    let mut ratios = vec![];
    for d in [50, 100, 200] {
        let s = run_campaign(&cfg(2, d, Gaussian, ScaledKss, false, 100_000, 107))?;
        ratios.push(variance_ratio(&s)?);
    }
    let stable = ratios.windows(2).all(|w| ((w[1] - w[0]) / w[0]).abs() < 0.2);
    let s = run_campaign(&cfg(2, 200, Gaussian, ScaledKss, false, 10_000, 108))?;
    let r = clt_diagnostics(&s)?;
    let band = gaussian_null_band(10_000, 2000, 0.99, 109)?;
    let inside = band.contains(&r);
    Ok((
        stable && inside,
        format!(
            "variance ratios {:.4}/{:.4}/{:.4}; d=200 skewness {:.4} in [{:.4}, {:.4}], excess kurtosis {:.4} in [{:.4}, {:.4}]",
            ratios[0],
            ratios[1],
            ratios[2],
            r.skewness,
            band.skewness.0,
            band.skewness.1,
            r.excess_kurtosis,
            band.excess_kurtosis.0,
            band.excess_kurtosis.1
        ),
    ))
}

fn symmetric_games() -> Outcome {
    let mut ok = true;
    let mut notes = vec![];
    for d in [2, 5, 10, 20, 50, 100, 200] {
        let s = run_campaign(&cfg(2, d, Gaussian, AggregateA, true, 100_000, 110))?;
        let (m, se) = mean_se(&s);
        let (lower, asym) = symmetric_reference(d);
        ok &= m >= lower - SE_BOUND * se;
        if d >= 100 {
            ok &= (0.9..=1.1).contains(&(m / asym));
        }
        notes.push(format!("d={d} {m:.4}±{se:.4} lower {lower:.4} ratio {:.4}", m / asym));
    }
    Ok((ok, notes.join(", ")))
}

fn sturm_matches_oracle() -> Outcome {
    let total = 10_000u64;
    let (mut degenerate, mut mismatches) = (0u64, 0u64);
    for i in 0..total {
        let degree = 1 + (i % 20) as usize;
        let p: UnivariatePoly = sample_kss_univariate(degree, Gaussian, SeededStream::new(111, i))?;
        let r = match sturm_count_positive(&p) {
            Ok(r) if !r.degenerate => r,
            _ => {
                degenerate += 1;
                continue;
            }
        };
        let (pos, _) = real_root_signs(&companion_oracle(&p)?);
        if pos != r.count {
            mismatches += 1;
        }
    }
    let rate = degenerate as f64 / total as f64;
    Ok((
        mismatches == 0 && rate < 1e-3,
        format!("{total} polynomials, {mismatches} mismatches, degenerate rate {rate}"),
    ))
}

fn reproducible_csv() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| egt_roots::Error::Io(e.to_string()))?;
    let b = tempfile::tempdir().map_err(|e| egt_roots::Error::Io(e.to_string()))?;
    let mut ok = true;
    let mut checked = vec![];
    for c in [Command::ExpectedCount, Command::Distribution, Command::SymmetricCompare, Command::SampleGame] {
        let mut outs = vec![];
        for (dir, w) in [(&a, 1), (&b, 3)] {
            let mut e = ExperimentConfig::new(c);
            e.samples = Some(if c == Command::SampleGame { 5 } else { 3000 });
            e.ds = if c == Command::Distribution || c == Command::SampleGame { vec![4] } else { vec![3, 7, 12] };
            e.seed = 112;
            e.workers = w;
            e.out = dir.path().to_path_buf();
            outs.push(fs::read(run_experiment(&e)?.csv)?);
        }
        ok &= outs[0] == outs[1];
        checked.push(c.name());
    }
    Ok((ok, format!("workers 1 vs 3 byte-identical for {}", checked.join(", "))))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("expected count, n=2", expected_count_two_strategies),
        ("expected count, d=2", expected_count_two_players),
        ("expected count, n=3 d=3", expected_count_bivariate),
        ("total real roots of KSS polynomials", total_real_roots),
        ("p_m quadrature vs sampling", pm_quadrature_vs_sampling),
        ("universality across coefficient laws", universality),
        ("variance ratio and CLT shape", variance_and_clt),
        ("symmetric games", symmetric_games),
        ("Sturm vs companion oracle", sturm_matches_oracle),
        ("reproducible CSV", reproducible_csv),
    ];
    let mut failed = vec![];
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed.push((i + 1).to_string());
        }
        println!(
            "criterion {:>2} {} {name} ({:.1}s): {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failing criteria: {}", failed.join(", "));
    }
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if failed.is_empty() || !strict {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
