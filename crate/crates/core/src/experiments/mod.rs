//! Seeded Monte Carlo harness over grids of instance sizes.
//!
//! Every replicate draws its clouds from `SeedSpec::new(master_seed, stream)`
//! with `stream = n_index * replicates + replicate`, so records do not depend
//! on the number of workers or on execution order.

mod config;
mod fit;
mod output;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{preset, ConfigFile, ExperimentConfig, Problem, DEFAULT_N_GRID, DEFAULT_REPLICATES, DEFAULT_SEED, PRESETS};
pub use fit::{loglog_fit, SlopeFit};
pub use output::{
    read_summary_csv, write_concentration_csv, write_density_csv, write_maxedge_csv, write_records_csv,
    write_summary_csv, SummaryRow,
};

use crate::btsp::{alternating_two_opt_descent, btsp_cost, max_btsp_edge, nearest_neighbor_alternating};
use crate::error::{invalid, Result};
use crate::geometry::{check_density_event, sample_uniform_pair, DensityConfig, PointCloud, SeedSpec};
use crate::matching::{matching_cost, max_matching_edge, solve_matching_exact};
use crate::tsp::{max_tour_edge, nearest_neighbor_tour, tour_cost, two_opt_descent};

/// Below this many replicates the concentration report carries a warning.
pub const RECOMMENDED_CONCENTRATION_REPLICATES: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolverLabel {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "2-opt-stable")]
    TwoOptStable,
}

impl fmt::Display for SolverLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverLabel::Exact => "exact",
            SolverLabel::TwoOptStable => "2-opt-stable",
        })
    }
}

/// `n^{1 - q/d}`, the expected order of a q-cost.
pub fn energy_scale(n: usize, d: usize, q: f64) -> f64 {
    (n as f64).powf(1.0 - q / d as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QCost {
    pub q: f64,
    pub cost: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateRecord {
    pub problem: Problem,
    pub d: usize,
    pub p: f64,
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub p_cost: f64,
    pub q_costs: Vec<QCost>,
    pub max_edge: f64,
    pub event_a: bool,
    pub event_b: bool,
    pub solver: SolverLabel,
}

fn seed_for(cfg: &ExperimentConfig, n_index: usize, replicate: usize) -> SeedSpec {
    SeedSpec::new(cfg.master_seed, (n_index * cfg.replicates + replicate) as u64)
}

fn density_config(cfg: &ExperimentConfig, n: usize) -> Result<DensityConfig> {
    let auto = DensityConfig::for_cloud(cfg.alpha, n, cfg.d)?;
    DensityConfig::new(cfg.alpha, cfg.density_grid, cfg.density_levels.unwrap_or(auto.radius_levels))
}

/// Cost of the structure found on one instance, as a function of the exponent.
enum Optimizer {
    Matching(crate::matching::Matching),
    Tour(crate::tsp::Tour),
    Alternating(crate::btsp::AlternatingTour),
}

fn run_one(cfg: &ExperimentConfig, n_index: usize, replicate: usize) -> Result<ReplicateRecord> {
    let n = cfg.n_grid[n_index];
    let seed = seed_for(cfg, n_index, replicate);
    let (x, y) = sample_uniform_pair(n, cfg.d, seed)?;
    let p = cfg.p;

    let (opt, p_cost, max_edge, solver) = match cfg.problem {
        Problem::Matching => {
            let sol = solve_matching_exact(&x, &y, p)?;
            let me = max_matching_edge(&x, &y, &sol.matching)?;
            (Optimizer::Matching(sol.matching), sol.cost, me, SolverLabel::Exact)
        }
        Problem::Tsp => {
            let sol = two_opt_descent(&x, &nearest_neighbor_tour(&x, 0)?, p)?;
            let me = max_tour_edge(&x, &sol.tour)?;
            (Optimizer::Tour(sol.tour), sol.cost, me, SolverLabel::TwoOptStable)
        }
        Problem::Btsp => {
            let sol = alternating_two_opt_descent(&x, &y, &nearest_neighbor_alternating(&x, &y)?, p)?;
            let me = max_btsp_edge(&x, &y, &sol.tour)?;
            (Optimizer::Alternating(sol.tour), sol.cost, me, SolverLabel::TwoOptStable)
        }
    };

    let q_costs = cfg
        .q_list
        .iter()
        .map(|&q| {
            let cost = match &opt {
                Optimizer::Matching(m) => matching_cost(&x, &y, m, q)?,
                Optimizer::Tour(t) => tour_cost(&x, t, q)?,
                Optimizer::Alternating(t) => btsp_cost(&x, &y, t, q)?,
            };
            Ok(QCost {
                q,
                cost,
                normalized: cost / energy_scale(n, cfg.d, q),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let event_a = check_density_event(&x, &density_config(cfg, n)?).event_holds;
    let threshold = (n as f64).powf(1.0 - cfg.alpha_prime * p / cfg.d as f64);

    Ok(ReplicateRecord {
        problem: cfg.problem,
        d: cfg.d,
        p,
        n,
        replicate,
        seed: seed.derived_seed(),
        p_cost,
        q_costs,
        max_edge,
        event_a,
        event_b: p_cost <= threshold,
        solver,
    })
}

/// Runs `task` over every `(n_index, replicate)` on a pool of `cfg.workers`
/// threads; the output is ordered by n, then replicate.
fn par_grid<T: Send>(
    cfg: &ExperimentConfig,
    task: impl Fn(usize, usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    cfg.validate()?;
    let keys: Vec<(usize, usize)> = (0..cfg.n_grid.len())
        .flat_map(|i| (0..cfg.replicates).map(move |r| (i, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    pool.install(|| keys.par_iter().map(|&(i, r)| task(i, r)).collect())
}

/// One record per `(n, replicate)`, in grid order.
pub fn run_replicates(cfg: &ExperimentConfig) -> Result<Vec<ReplicateRecord>> {
    par_grid(cfg, |i, r| run_one(cfg, i, r))
}

fn group_by_n(records: &[ReplicateRecord]) -> Vec<(usize, Vec<&ReplicateRecord>)> {
    let mut groups: Vec<(usize, Vec<&ReplicateRecord>)> = Vec::new();
    for rec in records {
        match groups.iter_mut().find(|(n, _)| *n == rec.n) {
            Some((_, g)) => g.push(rec),
            None => groups.push((rec.n, vec![rec])),
        }
    }
    groups
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation with the `k - 1` denominator; zero for one value.
fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Linear-interpolation quantile of an already sorted slice.
fn quantile(sorted: &[f64], level: f64) -> f64 {
    let pos = level * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QSummary {
    pub n: usize,
    pub q: f64,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

/// How far a normalized curve strays from constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Flatness {
    pub q: f64,
    pub max_over_min: f64,
    pub fit: Option<SlopeFit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferReport {
    pub records: Vec<ReplicateRecord>,
    pub summaries: Vec<QSummary>,
    pub flatness: Vec<Flatness>,
}

/// Per-`(n, q)` mean and sample std of normalized q-costs, ordered by n then q.
pub fn summarize_transfer(records: &[ReplicateRecord]) -> Vec<QSummary> {
    let mut out = Vec::new();
    for (n, group) in group_by_n(records) {
        let qs: Vec<f64> = group[0].q_costs.iter().map(|c| c.q).collect();
        for (k, q) in qs.into_iter().enumerate() {
            let vals: Vec<f64> = group.iter().map(|r| r.q_costs[k].normalized).collect();
            out.push(QSummary {
                n,
                q,
                mean: mean(&vals),
                std: sample_std(&vals),
                count: vals.len(),
            });
        }
    }
    out
}

pub fn flatness(summaries: &[QSummary]) -> Vec<Flatness> {
    let mut qs: Vec<f64> = Vec::new();
    for s in summaries {
        if !qs.contains(&s.q) {
            qs.push(s.q);
        }
    }
    qs.into_iter()
        .map(|q| {
            let (ns, means): (Vec<f64>, Vec<f64>) =
                summaries.iter().filter(|s| s.q == q).map(|s| (s.n as f64, s.mean)).unzip();
            let hi = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = means.iter().cloned().fold(f64::INFINITY, f64::min);
            Flatness {
                q,
                max_over_min: hi / lo,
                fit: loglog_fit(&ns, &means).ok(),
            }
        })
        .collect()
}

pub fn run_transfer_experiment(cfg: &ExperimentConfig) -> Result<TransferReport> {
    let records = run_replicates(cfg)?;
    let summaries = summarize_transfer(&records);
    let flatness = flatness(&summaries);
    Ok(TransferReport {
        records,
        summaries,
        flatness,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxEdgeSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q90: f64,
    pub event_a_freq: f64,
    pub event_b_freq: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxEdgeReport {
    pub records: Vec<ReplicateRecord>,
    pub per_n: Vec<MaxEdgeSummary>,
    /// Fit of log mean max-edge against log n; `None` on a one-point grid.
    pub fit: Option<SlopeFit>,
}

pub fn summarize_maxedge(records: &[ReplicateRecord]) -> (Vec<MaxEdgeSummary>, Option<SlopeFit>) {
    let per_n: Vec<MaxEdgeSummary> = group_by_n(records)
        .into_iter()
        .map(|(n, group)| {
            let mut edges: Vec<f64> = group.iter().map(|r| r.max_edge).collect();
            edges.sort_by(f64::total_cmp);
            let k = group.len() as f64;
            MaxEdgeSummary {
                n,
                mean: mean(&edges),
                median: quantile(&edges, 0.5),
                q90: quantile(&edges, 0.9),
                event_a_freq: group.iter().filter(|r| r.event_a).count() as f64 / k,
                event_b_freq: group.iter().filter(|r| r.event_b).count() as f64 / k,
            }
        })
        .collect();
    let (ns, ms): (Vec<f64>, Vec<f64>) = per_n.iter().map(|s| (s.n as f64, s.mean)).unzip();
    let fit = loglog_fit(&ns, &ms).ok();
    (per_n, fit)
}

pub fn run_maxedge_experiment(cfg: &ExperimentConfig) -> Result<MaxEdgeReport> {
    let records = run_replicates(cfg)?;
    let (per_n, fit) = summarize_maxedge(&records);
    Ok(MaxEdgeReport { records, per_n, fit })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationSummary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationReport {
    pub records: Vec<ReplicateRecord>,
    pub per_n: Vec<ConcentrationSummary>,
    /// Fit of log std against log n; `None` when some std is zero.
    pub fit: Option<SlopeFit>,
    pub warning: Option<String>,
}

/// Mean and sample std of `p_cost / n^{1-p/d}` per n. Fails with fewer than
/// two replicates at some n.
pub fn summarize_concentration(records: &[ReplicateRecord]) -> Result<(Vec<ConcentrationSummary>, Option<SlopeFit>)> {
    let mut per_n = Vec::new();
    for (n, group) in group_by_n(records) {
        if group.len() < 2 {
            return Err(invalid(format!("n = {n}: a standard deviation needs at least 2 replicates")));
        }
        let vals: Vec<f64> = group.iter().map(|r| r.p_cost / energy_scale(n, r.d, r.p)).collect();
        per_n.push(ConcentrationSummary {
            n,
            mean: mean(&vals),
            std: sample_std(&vals),
        });
    }
    let (ns, ss): (Vec<f64>, Vec<f64>) = per_n.iter().map(|s| (s.n as f64, s.std)).unzip();
    let fit = loglog_fit(&ns, &ss).ok();
    Ok((per_n, fit))
}

pub fn run_concentration_experiment(cfg: &ExperimentConfig) -> Result<ConcentrationReport> {
    if cfg.replicates < 2 {
        return Err(invalid("concentration needs at least 2 replicates"));
    }
    let records = run_replicates(cfg)?;
    let (per_n, fit) = summarize_concentration(&records)?;
    let warning = (cfg.replicates < RECOMMENDED_CONCENTRATION_REPLICATES).then(|| {
        format!(
            "only {} replicates; at least {RECOMMENDED_CONCENTRATION_REPLICATES} are recommended for std estimates",
            cfg.replicates
        )
    });
    Ok(ConcentrationReport {
        records,
        per_n,
        fit,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityFrequency {
    pub n: usize,
    pub frequency: f64,
    pub replicates: usize,
    /// Smallest `count / (n r^d)` seen over all replicates.
    pub worst_ratio: f64,
}

/// Frequency of the discretized density event on the X cloud of each replicate.
pub fn run_density_experiment(cfg: &ExperimentConfig) -> Result<Vec<DensityFrequency>> {
    run_density_experiment_with(cfg, |n, d, seed| Ok(sample_uniform_pair(n, d, seed)?.0))
}

/// As [`run_density_experiment`] with a caller-supplied cloud source.
pub fn run_density_experiment_with(
    cfg: &ExperimentConfig,
    source: impl Fn(usize, usize, SeedSpec) -> Result<PointCloud> + Sync,
) -> Result<Vec<DensityFrequency>> {
    let reports = par_grid(cfg, |i, r| {
        let n = cfg.n_grid[i];
        let cloud = source(n, cfg.d, seed_for(cfg, i, r))?;
        Ok((n, check_density_event(&cloud, &density_config(cfg, n)?)))
    })?;
    Ok(reports
        .chunks(cfg.replicates)
        .map(|chunk| DensityFrequency {
            n: chunk[0].0,
            frequency: chunk.iter().filter(|(_, rep)| rep.event_holds).count() as f64 / chunk.len() as f64,
            replicates: chunk.len(),
            worst_ratio: chunk.iter().map(|(_, rep)| rep.worst_ratio).fold(f64::INFINITY, f64::min),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(problem: Problem, p: f64, q_list: Vec<f64>) -> ExperimentConfig {
        ConfigFile {
            problem: Some(problem),
            p: Some(p),
            q_list: Some(q_list),
            n_grid: Some(vec![8, 16]),
            replicates: Some(3),
            workers: Some(2),
            ..Default::default()
        }
        .resolve()
        .unwrap()
    }

    fn synthetic(n: usize, replicate: usize, p_cost: f64) -> ReplicateRecord {
        ReplicateRecord {
            problem: Problem::Matching,
            d: 3,
            p: 1.0,
            n,
            replicate,
            seed: 0,
            p_cost,
            q_costs: Vec::new(),
            max_edge: 0.0,
            event_a: true,
            event_b: true,
            solver: SolverLabel::Exact,
        }
    }

    #[test]
    fn records_cover_grid_in_order() {
        for problem in [Problem::Matching, Problem::Tsp, Problem::Btsp] {
            let cfg = small(problem, 1.0, vec![1.0, 2.0]);
            let recs = run_replicates(&cfg).unwrap();
            let keys: Vec<(usize, usize)> = recs.iter().map(|r| (r.n, r.replicate)).collect();
            assert_eq!(keys, vec![(8, 0), (8, 1), (8, 2), (16, 0), (16, 1), (16, 2)]);
            let want = if problem == Problem::Matching {
                SolverLabel::Exact
            } else {
                SolverLabel::TwoOptStable
            };
            assert!(recs.iter().all(|r| r.solver == want));
        }
    }

    #[test]
    fn q_equal_p_row_is_the_normalized_p_cost() {
        let cfg = small(Problem::Matching, 2.0, vec![2.0, 3.0]);
        for r in run_replicates(&cfg).unwrap() {
            let c = r.q_costs[0];
            assert!((c.cost - r.p_cost).abs() <= 1e-12 * r.p_cost);
            assert!((c.normalized - r.p_cost / energy_scale(r.n, 3, 2.0)).abs() <= 1e-12 * c.normalized);
        }
    }

    #[test]
    fn worker_count_does_not_change_records() {
        let mut cfg = small(Problem::Tsp, 1.0, vec![1.0]);
        cfg.workers = 1;
        let a = run_replicates(&cfg).unwrap();
        cfg.workers = 4;
        assert_eq!(a, run_replicates(&cfg).unwrap());
        cfg.master_seed += 1;
        assert_ne!(a, run_replicates(&cfg).unwrap());
    }

    #[test]
    fn summaries_use_sample_std() {
        let mut recs: Vec<ReplicateRecord> = (0..3).map(|r| synthetic(8, r, 0.0)).collect();
        for (r, v) in recs.iter_mut().zip([1.0, 2.0, 3.0]) {
            r.q_costs = vec![QCost {
                q: 1.0,
                cost: v,
                normalized: v,
            }];
        }
        let s = summarize_transfer(&recs);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean, 2.0);
        assert!((s[0].std - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_cost_has_zero_std() {
        let recs: Vec<ReplicateRecord> = [8, 16, 32]
            .iter()
            .flat_map(|&n| (0..4).map(move |r| synthetic(n, r, 5.0 * energy_scale(n, 3, 1.0))))
            .collect();
        let (per_n, fit) = summarize_concentration(&recs).unwrap();
        assert!(per_n.iter().all(|s| s.std == 0.0 && (s.mean - 5.0).abs() < 1e-12));
        assert!(fit.is_none());
        assert!(summarize_concentration(&recs[..1]).is_err());
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert!((quantile(&v, 0.9) - 4.6).abs() < 1e-12);
        assert_eq!(quantile(&[7.0], 0.9), 7.0);
    }

    #[test]
    fn maxedge_fit_on_exact_power_law() {
        let recs: Vec<ReplicateRecord> = [64usize, 128, 256, 512]
            .iter()
            .map(|&n| ReplicateRecord {
                max_edge: (n as f64).powf(-1.0 / 3.0),
                ..synthetic(n, 0, 1.0)
            })
            .collect();
        let (per_n, fit) = summarize_maxedge(&recs);
        assert_eq!(per_n.len(), 4);
        assert!((fit.unwrap().slope + 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn density_on_grid_cloud_is_certain() {
        let mut cfg = small(Problem::Matching, 1.0, vec![1.0]);
        cfg.n_grid = vec![512];
        cfg.alpha = 0.5;
        let grid = |n: usize, d: usize, _seed: SeedSpec| {
            let m = (n as f64).powf(1.0 / d as f64).round() as usize;
            let pts: Vec<Vec<f64>> = (0..m.pow(d as u32))
                .map(|mut k| {
                    (0..d)
                        .map(|_| {
                            let c = k % m;
                            k /= m;
                            (c as f64 + 0.5) / m as f64
                        })
                        .collect()
                })
                .collect();
            PointCloud::from_points(&pts)
        };
        let freq = run_density_experiment_with(&cfg, grid).unwrap();
        assert_eq!(freq[0].frequency, 1.0);
        assert_eq!(freq[0].replicates, 3);
    }
}
