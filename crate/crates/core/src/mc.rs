//! Monte Carlo engine, exhaustive enumeration, and the synthetic population
//! generator used to check the first-order theory against simulation.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr_free::standard_normal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{
    derive_seed, draw_systematic, realize_nonresponse, Mechanism, SystematicSample,
};
use crate::error::{Error, Result};
use crate::estimate::{evaluate, EstimatorSpec};
use crate::moments::{compute_moments, interval, mean, Population, PopulationMoments};
use crate::theory::{mse_first_order, MseReport, Setting};

/// Box-Muller normals, so the generator needs nothing beyond `rand`.
mod rand_distr_free {
    use rand::Rng;

    pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisParams {
    pub population_size: usize,
    pub sample_size: usize,
    pub target_rho: f64,
    /// Intraclass correlation within systematic samples; used when `sorted`.
    pub target_intra: f64,
    pub sorted: bool,
    pub nr_fraction: f64,
    pub seed: u64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub cv_x: f64,
    pub cv_y: f64,
}

impl Default for SynthesisParams {
    fn default() -> Self {
        Self {
            population_size: 800,
            sample_size: 16,
            target_rho: 0.87,
            target_intra: 0.6,
            sorted: true,
            nr_fraction: 0.25,
            seed: 7,
            mean_x: 100.0,
            mean_y: 280.0,
            cv_x: 0.1,
            cv_y: 0.1,
        }
    }
}

/// Centre `v` in place; when `groups` is given, centre within each
/// systematic sample (`groups` = interval k, unit `p` belongs to `p % k`).
fn centre(v: &mut [f64], groups: Option<usize>) {
    match groups {
        None => {
            let m = mean(v);
            v.iter_mut().for_each(|x| *x -= m);
        }
        Some(k) => {
            for start in 0..k {
                let members: Vec<usize> = (start..v.len()).step_by(k).collect();
                let m = members.iter().map(|&i| v[i]).sum::<f64>() / members.len() as f64;
                members.iter().for_each(|&i| v[i] -= m);
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unit-RMS pair `(u, v)` with sample correlation exactly `rho`, both
/// centred as requested.
fn correlated_pair<R: Rng>(
    rng: &mut R,
    len: usize,
    rho: f64,
    groups: Option<usize>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut u: Vec<f64> = (0..len).map(|_| standard_normal(rng)).collect();
    let mut z: Vec<f64> = (0..len).map(|_| standard_normal(rng)).collect();
    centre(&mut u, groups);
    centre(&mut z, groups);
    let uu = dot(&u, &u);
    if uu == 0.0 {
        return Err(Error::Infeasible("degenerate draw".into()));
    }
    let proj = dot(&z, &u) / uu;
    z.iter_mut().zip(&u).for_each(|(zi, ui)| *zi -= proj * ui);
    let zz = dot(&z, &z);
    if zz == 0.0 {
        return Err(Error::Infeasible("degenerate draw".into()));
    }
    let (su, sz) = ((len as f64 / uu).sqrt(), (len as f64 / zz).sqrt());
    u.iter_mut().for_each(|x| *x *= su);
    z.iter_mut().for_each(|x| *x *= sz);
    let c = (1.0 - rho * rho).sqrt();
    let v = u.iter().zip(&z).map(|(a, b)| rho * a + c * b).collect();
    Ok((u, v))
}

/// Standardised `(x, y)` deviations at population positions.
fn deviations<R: Rng>(rng: &mut R, p: &SynthesisParams, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let big_n = p.population_size;
    if !p.sorted {
        return correlated_pair(rng, big_n, p.target_rho, None);
    }
    let n = p.sample_size as f64;
    // share of variance between samples giving the target intraclass correlation
    let between = (p.target_intra * (n - 1.0) + 1.0) / n;
    let (mut bx, mut by) = correlated_pair(rng, k, p.target_rho, None)?;
    // smooth trend: between-sample effects ascending in the start index
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| bx[a].total_cmp(&bx[b]));
    (bx, by) = (
        order.iter().map(|&i| bx[i]).collect(),
        order.iter().map(|&i| by[i]).collect(),
    );
    let (wx, wy) = correlated_pair(rng, big_n, p.target_rho, Some(k))?;
    let (sb, sw) = (between.sqrt(), (1.0 - between).sqrt());
    let dx = (0..big_n).map(|i| sb * bx[i % k] + sw * wx[i]).collect();
    let dy = (0..big_n).map(|i| sb * by[i % k] + sw * wy[i]).collect();
    Ok((dx, dy))
}

/// Bivariate population with exact unit-level correlation `target_rho`.
///
/// When `sorted`, every unit is a between-sample effect plus a within-sample
/// effect, each pair orthogonalised so that both intraclass correlations equal
/// `target_intra` exactly; the between effects ascend with the start index.
/// Otherwise units are i.i.d. and intraclass correlations are near zero.
pub fn synthesize_population(p: &SynthesisParams) -> Result<Population> {
    let big_n = p.population_size;
    let k = interval(big_n, p.sample_size)?;
    if p.target_rho.is_nan() || p.target_rho.abs() >= 1.0 {
        return Err(Error::Infeasible(format!(
            "|rho| must be < 1, got {}",
            p.target_rho
        )));
    }
    let lower = if p.sample_size > 1 {
        -1.0 / (p.sample_size as f64 - 1.0)
    } else {
        -1.0
    };
    if p.sorted && !(p.target_intra > lower && p.target_intra < 1.0) {
        return Err(Error::Infeasible(format!(
            "intraclass target {} outside ({lower}, 1)",
            p.target_intra
        )));
    }
    if p.sorted && k < 3 {
        return Err(Error::Infeasible("sorted construction needs k >= 3".into()));
    }
    if !(0.0..1.0).contains(&p.nr_fraction) {
        return Err(Error::Infeasible(format!(
            "nr_fraction {} outside [0, 1)",
            p.nr_fraction
        )));
    }
    if !(p.cv_x > 0.0 && p.cv_y > 0.0) || p.mean_x == 0.0 || p.mean_y == 0.0 {
        return Err(Error::Infeasible(
            "means must be nonzero and CVs positive".into(),
        ));
    }

    const ATTEMPTS: u64 = 16;
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(p.seed, attempt, 0));
        let (dx, dy) = match deviations(&mut rng, p, k) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let (sx, sy) = (p.cv_x * p.mean_x.abs(), p.cv_y * p.mean_y.abs());
        let x: Vec<f64> = dx.iter().map(|d| p.mean_x + sx * d).collect();
        let y: Vec<f64> = dy.iter().map(|d| p.mean_y + sy * d).collect();
        // ratio-type estimators need a sign-definite auxiliary variable
        if x.iter().any(|v| v.signum() != p.mean_x.signum()) {
            continue;
        }
        let members = (p.nr_fraction * big_n as f64).round() as usize;
        let stratum = if members == 0 {
            None
        } else {
            let mut flags = vec![false; big_n];
            index::sample(&mut rng, big_n, members)
                .into_iter()
                .for_each(|i| flags[i] = true);
            Some(flags)
        };
        return Population::new(y, x, stratum);
    }
    Err(Error::Infeasible(format!(
        "auxiliary values changed sign in {ATTEMPTS} attempts; lower cv_x"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StartSelection {
    UniformRandom,
    /// Replication `r` uses start `r mod k + 1`.
    #[default]
    ExhaustiveCycle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub sample_size: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub mechanism: Mechanism,
    pub k_rate: f64,
    pub l_factor: f64,
    pub estimators: Vec<EstimatorSpec>,
    pub start_selection: StartSelection,
    #[serde(default)]
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub estimator: EstimatorSpec,
    pub name: String,
    pub replications_used: usize,
    pub failures: usize,
    pub empirical_bias: f64,
    pub empirical_mse: f64,
    pub monte_carlo_se: f64,
    pub theoretical_bias: f64,
    pub theoretical_mse: f64,
    /// empirical / theoretical MSE.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub replication: usize,
    pub start: usize,
    pub n2: usize,
    pub h2: usize,
    pub l_factor: f64,
    /// One entry per estimator; `None` where evaluation failed.
    pub estimates: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub config: SimulationConfig,
    /// Moments fed to the first-order formulas.
    pub moments: PopulationMoments,
    pub true_mean_y: f64,
    pub mean_nonrespondents: f64,
    pub mean_realized_l: f64,
    pub rows: Vec<EmpiricalRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
}

impl EmpiricalReport {
    pub fn theory(&self) -> Vec<MseReport> {
        let setting = Setting::new(&self.moments, self.config.k_rate, self.config.l_factor)
            .expect("validated when the report was built");
        self.rows
            .iter()
            .map(|r| mse_first_order(&r.estimator, &setting).expect("validated"))
            .collect()
    }
}

/// Neumaier-compensated sum in slice order.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

struct RepOutcome {
    start: usize,
    n2: usize,
    h2: usize,
    l_factor: f64,
    values: Vec<std::result::Result<f64, String>>,
}

/// Moments the first-order formulas should use for this configuration.
///
/// Under Bernoulli non-response the non-responding group is a random subset
/// of units, so its mean square is `S_Y^2`.
pub fn theory_moments(pop: &Population, cfg: &SimulationConfig) -> Result<PopulationMoments> {
    let mut m = compute_moments(pop, cfg.sample_size)?;
    match cfg.mechanism {
        Mechanism::Stratum => {
            let fraction = pop.stratum_fraction().ok_or(Error::MissingStratum)?;
            if (fraction - cfg.k_rate).abs() > 1e-9 {
                return Err(Error::Config(format!(
                    "stratum fraction {fraction} differs from K = {}; use the bernoulli mechanism \
                     for other rates",
                    cfg.k_rate
                )));
            }
        }
        Mechanism::Bernoulli { rate } => {
            if (rate - cfg.k_rate).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "bernoulli rate {rate} differs from K = {}",
                    cfg.k_rate
                )));
            }
            m.s2_y2 = Some(m.s2_y);
        }
    }
    Ok(m)
}

pub fn run_replications(pop: &Population, cfg: &SimulationConfig) -> Result<EmpiricalReport> {
    if cfg.replications == 0 {
        return Err(Error::Config("replications must be >= 1".into()));
    }
    if cfg.estimators.is_empty() {
        return Err(Error::Config("no estimators selected".into()));
    }
    let moments = theory_moments(pop, cfg)?;
    let setting = Setting::new(&moments, cfg.k_rate, cfg.l_factor)?;
    let theory: Vec<MseReport> = cfg
        .estimators
        .iter()
        .map(|e| mse_first_order(e, &setting))
        .collect::<Result<_>>()?;

    let k = moments.interval;
    let samples: Vec<SystematicSample> = (1..=k)
        .map(|start| draw_systematic(pop, cfg.sample_size, start))
        .collect::<Result<_>>()?;
    let x_pop = pop.mean_x();
    let y_pop = pop.mean_y();

    let outcomes: Vec<RepOutcome> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| -> Result<RepOutcome> {
            let start = match cfg.start_selection {
                StartSelection::ExhaustiveCycle => r % k + 1,
                StartSelection::UniformRandom => {
                    ChaCha8Rng::seed_from_u64(derive_seed(cfg.base_seed, r as u64, 0))
                        .gen_range(1..=k)
                }
            };
            let sample = &samples[start - 1];
            let seed = derive_seed(cfg.base_seed, r as u64, start as u64);
            let outcome = realize_nonresponse(sample, pop, cfg.mechanism, cfg.l_factor, seed)?;
            let values = cfg
                .estimators
                .iter()
                .map(|spec| {
                    evaluate(spec, sample, &outcome, pop, x_pop)
                        .map(|e| e.value)
                        .map_err(|e| e.to_string())
                })
                .collect();
            Ok(RepOutcome {
                start,
                n2: outcome.n2(),
                h2: outcome.h2(),
                l_factor: outcome.l_factor,
                values,
            })
        })
        .collect::<Result<_>>()?;

    let reps = cfg.replications as f64;
    let mut rows = Vec::with_capacity(cfg.estimators.len());
    for (e, (spec, th)) in cfg.estimators.iter().zip(&theory).enumerate() {
        let mut errors = Vec::with_capacity(outcomes.len());
        let mut failures = 0usize;
        let mut first_failure = None;
        for o in &outcomes {
            match &o.values[e] {
                Ok(v) => errors.push(v - y_pop),
                Err(msg) => {
                    failures += 1;
                    first_failure.get_or_insert_with(|| msg.clone());
                }
            }
        }
        if failures * 100 > cfg.replications {
            return Err(Error::DomainErrorRate {
                estimator: spec.name().to_string(),
                failed: failures,
                total: cfg.replications,
                first: first_failure.unwrap_or_default(),
            });
        }
        let used = errors.len();
        let m = used as f64;
        let bias = compensated_sum(errors.iter().copied()) / m;
        let squares: Vec<f64> = errors.iter().map(|d| d * d).collect();
        let mse = compensated_sum(squares.iter().copied()) / m;
        let se = if used > 1 {
            let var = compensated_sum(squares.iter().map(|s| (s - mse).powi(2))) / (m - 1.0);
            (var / m).sqrt()
        } else {
            0.0
        };
        rows.push(EmpiricalRow {
            estimator: *spec,
            name: spec.name().to_string(),
            replications_used: used,
            failures,
            empirical_bias: bias,
            empirical_mse: mse,
            monte_carlo_se: se,
            theoretical_bias: th.bias,
            theoretical_mse: th.mse,
            ratio: mse / th.mse,
        });
    }

    let trace = cfg.trace.then(|| {
        outcomes
            .iter()
            .enumerate()
            .map(|(r, o)| TraceRecord {
                replication: r,
                start: o.start,
                n2: o.n2,
                h2: o.h2,
                l_factor: o.l_factor,
                estimates: o.values.iter().map(|v| v.as_ref().ok().copied()).collect(),
            })
            .collect()
    });

    Ok(EmpiricalReport {
        config: cfg.clone(),
        moments,
        true_mean_y: y_pop,
        mean_nonrespondents: compensated_sum(outcomes.iter().map(|o| o.n2 as f64)) / reps,
        mean_realized_l: compensated_sum(outcomes.iter().map(|o| o.l_factor)) / reps,
        rows,
        trace,
    })
}

/// Exact variance of the systematic sample mean over all `k` samples,
/// `(1/k) sum_i (ybar_i - Y)^2`.
pub fn enumerate_variance(pop: &Population, sample_size: usize) -> Result<f64> {
    let k = pop.interval(sample_size)?;
    let y_pop = pop.mean_y();
    let total = (0..k)
        .map(|start| {
            let ybar = pop.y()[start..].iter().step_by(k).sum::<f64>() / sample_size as f64;
            (ybar - y_pop).powi(2)
        })
        .sum::<f64>();
    Ok(total / k as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub estimator: EstimatorSpec,
    pub empirical_mse: f64,
    pub theoretical_mse: f64,
    pub monte_carlo_se: f64,
    pub z_score: f64,
    pub relative_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub all_pass: bool,
}

/// Pass when `|z| <= 3` or the relative gap is at most 5%.
pub fn compare_theory_empirical(emp: &EmpiricalReport, theory: &[MseReport]) -> Result<Comparison> {
    if emp.rows.len() != theory.len()
        || emp
            .rows
            .iter()
            .zip(theory)
            .any(|(r, t)| r.estimator != t.estimator)
    {
        return Err(Error::Config(
            "empirical and theoretical estimator lists do not match".into(),
        ));
    }
    let rows: Vec<ComparisonRow> = emp
        .rows
        .iter()
        .zip(theory)
        .map(|(r, t)| {
            let gap = r.empirical_mse - t.mse;
            let z_score = if r.monte_carlo_se > 0.0 {
                gap / r.monte_carlo_se
            } else if gap == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(gap)
            };
            let relative_gap = if t.mse != 0.0 { gap / t.mse } else { gap };
            ComparisonRow {
                name: r.name.clone(),
                estimator: r.estimator,
                empirical_mse: r.empirical_mse,
                theoretical_mse: t.mse,
                monte_carlo_se: r.monte_carlo_se,
                z_score,
                relative_gap,
                pass: z_score.abs() <= 3.0 || relative_gap.abs() <= 0.05,
            }
        })
        .collect();
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(Comparison { rows, all_pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::systematic_correlations;
    use crate::theory::variance_hh;

    fn toy() -> Population {
        Population::new(vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 3.0, 5.0, 9.0], None).unwrap()
    }

    #[test]
    fn enumerate_toy() {
        assert!((enumerate_variance(&toy(), 2).unwrap() - 0.25).abs() < 1e-15);
        let flat = Population::new(vec![3.0; 6], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], None).unwrap();
        assert_eq!(enumerate_variance(&flat, 3).unwrap(), 0.0);
    }

    #[test]
    fn single_replication_is_squared_error() {
        let cfg = SimulationConfig {
            sample_size: 2,
            replications: 1,
            base_seed: 1,
            mechanism: Mechanism::Bernoulli { rate: 0.0 },
            k_rate: 0.0,
            l_factor: 2.0,
            estimators: vec![EstimatorSpec::HhMean],
            start_selection: StartSelection::ExhaustiveCycle,
            trace: true,
        };
        let rep = run_replications(&toy(), &cfg).unwrap();
        // start 1 -> y = {1, 3}, mean 2, Y = 2.5
        assert!((rep.rows[0].empirical_mse - 0.25).abs() < 1e-15);
        assert_eq!(rep.rows[0].monte_carlo_se, 0.0);
        assert_eq!(rep.trace.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn exhaustive_cycle_is_exact() {
        let cfg = SimulationConfig {
            sample_size: 2,
            replications: 2,
            base_seed: 5,
            mechanism: Mechanism::Bernoulli { rate: 0.0 },
            k_rate: 0.0,
            l_factor: 2.0,
            estimators: vec![EstimatorSpec::HhMean],
            start_selection: StartSelection::ExhaustiveCycle,
            trace: false,
        };
        let rep = run_replications(&toy(), &cfg).unwrap();
        assert!((rep.rows[0].empirical_mse - 0.25).abs() < 1e-15);
        assert!(rep.rows[0].empirical_bias.abs() < 1e-15);
        let cmp = compare_theory_empirical(&rep, &rep.theory()).unwrap();
        assert!(cmp.rows[0].relative_gap.abs() < 1e-12);
        assert!(cmp.all_pass);
    }

    #[test]
    fn stratum_rate_must_match() {
        let pop = Population::new(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2.0, 3.0, 5.0, 9.0],
            Some(vec![true, false, false, false]),
        )
        .unwrap();
        let mut cfg = SimulationConfig {
            sample_size: 2,
            replications: 4,
            base_seed: 5,
            mechanism: Mechanism::Stratum,
            k_rate: 0.1,
            l_factor: 2.0,
            estimators: vec![EstimatorSpec::HhMean],
            start_selection: StartSelection::ExhaustiveCycle,
            trace: false,
        };
        assert!(run_replications(&pop, &cfg).is_err());
        cfg.k_rate = 0.25;
        assert!(run_replications(&pop, &cfg).is_ok());
    }

    #[test]
    fn domain_error_rate_aborts() {
        // negative x makes x*/X negative for half of the samples
        let pop =
            Population::new(vec![1.0, 2.0, 3.0, 4.0], vec![-5.0, 1.0, 2.0, 6.0], None).unwrap();
        let cfg = SimulationConfig {
            sample_size: 2,
            replications: 10,
            base_seed: 5,
            mechanism: Mechanism::Bernoulli { rate: 0.0 },
            k_rate: 0.0,
            l_factor: 2.0,
            estimators: vec![EstimatorSpec::T3 { w: 0.5 }],
            start_selection: StartSelection::ExhaustiveCycle,
            trace: false,
        };
        assert!(matches!(
            run_replications(&pop, &cfg),
            Err(Error::DomainErrorRate { failed: 5, .. })
        ));
    }

    #[test]
    fn synthetic_counts_and_targets() {
        let p = SynthesisParams::default();
        let pop = synthesize_population(&p).unwrap();
        assert_eq!(pop.len(), 800);
        assert_eq!(
            pop.nr_stratum().unwrap().iter().filter(|&&f| f).count(),
            200
        );
        let m = compute_moments(&pop, 16).unwrap();
        assert!((m.rho - 0.87).abs() < 1e-9);
        assert!((m.rho_x_intra - 0.6).abs() < 1e-9);
        assert!((m.rho_y_intra - 0.6).abs() < 1e-9);
        let v = variance_hh(&m, 0.0, 1.0).unwrap();
        assert!((enumerate_variance(&pop, 16).unwrap() - v).abs() / v < 1e-9);
    }

    #[test]
    fn unsorted_has_no_intraclass_structure() {
        let p = SynthesisParams {
            target_rho: 0.0,
            sorted: false,
            ..SynthesisParams::default()
        };
        let pop = synthesize_population(&p).unwrap();
        let (ry, rx) = systematic_correlations(&pop, 16).unwrap();
        assert!(ry.abs() < 0.05 && rx.abs() < 0.05, "{ry} {rx}");
    }

    #[test]
    fn synthesis_is_seeded() {
        let p = SynthesisParams::default();
        assert_eq!(
            synthesize_population(&p).unwrap(),
            synthesize_population(&p).unwrap()
        );
        let q = SynthesisParams { seed: 8, ..p };
        assert_ne!(
            synthesize_population(&p).unwrap(),
            synthesize_population(&q).unwrap()
        );
    }

    #[test]
    fn infeasible_targets() {
        let base = SynthesisParams::default();
        for p in [
            SynthesisParams {
                target_rho: 1.0,
                ..base
            },
            SynthesisParams {
                target_intra: 1.0,
                ..base
            },
            SynthesisParams { cv_x: 5.0, ..base },
            SynthesisParams {
                sample_size: 17,
                ..base
            },
        ] {
            assert!(synthesize_population(&p).is_err(), "{p:?}");
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }
}
