use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Matching,
    Tsp,
    Btsp,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Matching => "matching",
            Problem::Tsp => "tsp",
            Problem::Btsp => "btsp",
        }
    }

    /// Smallest instance size the solver path accepts.
    pub fn min_n(self) -> usize {
        match self {
            Problem::Matching => 1,
            Problem::Tsp => 3,
            Problem::Btsp => 2,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matching" => Ok(Problem::Matching),
            "tsp" => Ok(Problem::Tsp),
            "btsp" => Ok(Problem::Btsp),
            _ => Err(invalid(format!("unknown problem {s:?} (matching, tsp, btsp)"))),
        }
    }
}

/// Partial configuration as read from a TOML file or assembled from flags.
/// Unset fields fall back to defaults in [`ConfigFile::resolve`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: Option<Problem>,
    pub d: Option<usize>,
    pub p: Option<f64>,
    pub q_list: Option<Vec<f64>>,
    pub n_grid: Option<Vec<usize>>,
    pub replicates: Option<usize>,
    pub master_seed: Option<u64>,
    pub alpha: Option<f64>,
    pub alpha_prime: Option<f64>,
    pub workers: Option<usize>,
    pub density_grid: Option<usize>,
    pub density_levels: Option<usize>,
}

pub const DEFAULT_N_GRID: [usize; 6] = [128, 256, 512, 1024, 2048, 4096];
pub const DEFAULT_REPLICATES: usize = 64;
pub const DEFAULT_SEED: u64 = 2024;

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: ConfigFile) -> ConfigFile {
        ConfigFile {
            problem: over.problem.or(self.problem),
            d: over.d.or(self.d),
            p: over.p.or(self.p),
            q_list: over.q_list.or(self.q_list),
            n_grid: over.n_grid.or(self.n_grid),
            replicates: over.replicates.or(self.replicates),
            master_seed: over.master_seed.or(self.master_seed),
            alpha: over.alpha.or(self.alpha),
            alpha_prime: over.alpha_prime.or(self.alpha_prime),
            workers: over.workers.or(self.workers),
            density_grid: over.density_grid.or(self.density_grid),
            density_levels: over.density_levels.or(self.density_levels),
        }
    }

    /// Fills defaults and validates.
    ///
    /// `alpha` defaults to `0.9 p / (p + d)`, inside the admissible range
    /// `(0, p / (p + d))`, and `alpha_prime` to `alpha (p + d) / p`.
    pub fn resolve(self) -> Result<ExperimentConfig> {
        let problem = self.problem.unwrap_or(Problem::Matching);
        let d = self.d.unwrap_or(3);
        let p = self.p.unwrap_or(1.0);
        let alpha = self.alpha.unwrap_or(0.9 * p / (p + d as f64));
        let cfg = ExperimentConfig {
            problem,
            d,
            p,
            q_list: self.q_list.unwrap_or_else(|| vec![p]),
            n_grid: self.n_grid.unwrap_or_else(|| DEFAULT_N_GRID.to_vec()),
            replicates: self.replicates.unwrap_or(DEFAULT_REPLICATES),
            master_seed: self.master_seed.unwrap_or(DEFAULT_SEED),
            alpha,
            alpha_prime: self.alpha_prime.unwrap_or(alpha * (p + d as f64) / p),
            workers: self.workers.unwrap_or_else(default_workers),
            density_grid: self.density_grid.unwrap_or(crate::geometry::DensityConfig::DEFAULT_GRID),
            density_levels: self.density_levels,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Named configurations shipped with the harness.
pub fn preset(name: &str) -> Option<ConfigFile> {
    let grid = |v: &[usize]| Some(v.to_vec());
    let base = ConfigFile {
        problem: Some(Problem::Matching),
        d: Some(3),
        n_grid: grid(&DEFAULT_N_GRID),
        replicates: Some(DEFAULT_REPLICATES),
        master_seed: Some(DEFAULT_SEED),
        ..ConfigFile::default()
    };
    let critical = ConfigFile {
        d: Some(4),
        p: Some(8.0),
        q_list: Some(vec![8.0, 9.0, 10.0]),
        n_grid: grid(&[64, 128, 256, 512, 1024]),
        replicates: Some(16),
        ..base.clone()
    };
    Some(match name {
        "transfer-d3-p1" | "concentration-d3-p1" => ConfigFile {
            p: Some(1.0),
            q_list: Some(vec![1.0, 2.0, 3.0]),
            ..base
        },
        "maxedge-d3-p2" => ConfigFile {
            p: Some(2.0),
            q_list: Some(vec![2.0]),
            ..base
        },
        "density-d3" => ConfigFile {
            p: Some(1.0),
            alpha: Some(0.5),
            // the coupled value alpha (p + d) / p = 2 is out of range; event B is unused here
            alpha_prime: Some(0.9),
            n_grid: grid(&[256, 512, 1024, 2048, 4096]),
            replicates: Some(100),
            ..base
        },
        "critical-tsp" => ConfigFile {
            problem: Some(Problem::Tsp),
            ..critical
        },
        "critical-matching" => critical,
        _ => return None,
    })
}

pub const PRESETS: [&str; 6] = [
    "transfer-d3-p1",
    "maxedge-d3-p2",
    "concentration-d3-p1",
    "density-d3",
    "critical-tsp",
    "critical-matching",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub d: usize,
    pub p: f64,
    pub q_list: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub master_seed: u64,
    /// Density exponent of the ball event: radii above `n^{-alpha/d}`.
    pub alpha: f64,
    /// Cost-threshold exponent: `p_cost <= n^{1 - alpha_prime p / d}`.
    pub alpha_prime: f64,
    pub workers: usize,
    pub density_grid: usize,
    /// Radius levels of the density check; `None` picks every dyadic level up to 1.
    pub density_levels: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("d must be at least 1"));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(invalid(format!("p = {} must be >= 1", self.p)));
        }
        if self.q_list.is_empty() || self.q_list.iter().any(|q| !(*q >= 1.0 && q.is_finite())) {
            return Err(invalid(format!("q_list {:?} must be nonempty with q >= 1", self.q_list)));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!("n_grid {:?} must be strictly increasing", self.n_grid)));
        }
        let min_n = self.problem.min_n();
        if self.n_grid[0] < min_n {
            return Err(invalid(format!("{} needs n >= {min_n}", self.problem)));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates must be positive"));
        }
        for (name, a) in [("alpha", self.alpha), ("alpha_prime", self.alpha_prime)] {
            if !(a > 0.0 && a < 1.0) {
                return Err(invalid(format!("{name} = {a} must lie in (0, 1)")));
            }
        }
        if self.workers == 0 || self.density_grid == 0 || self.density_levels == Some(0) {
            return Err(invalid("workers, density_grid and density_levels must be positive"));
        }
        Ok(())
    }

    /// Human-readable dump of every resolved field.
    pub fn describe(&self) -> String {
        let levels = self
            .density_levels
            .map_or_else(|| "auto (dyadic radii up to 1)".to_string(), |l| l.to_string());
        format!(
            "problem      = {}\nd            = {}\np            = {}\nq_list       = {:?}\nn_grid       = {:?}\n\
             replicates   = {}\nmaster_seed  = {}\nalpha        = {}\nalpha_prime  = {}\nworkers      = {}\n\
             density_grid = {}\ndensity_lvls = {}\n",
            self.problem,
            self.d,
            self.p,
            self.q_list,
            self.n_grid,
            self.replicates,
            self.master_seed,
            self.alpha,
            self.alpha_prime,
            self.workers,
            self.density_grid,
            levels
        )
    }
}
