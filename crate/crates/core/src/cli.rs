//! Command-line front end. Exit codes: 0 success, 1 a verification check
//! failed, 2 usage or input error.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::btsp::{self, AlternatingTour};
use crate::energy::{edge_energy_constants, EdgeEnergyReport};
use crate::experiments::{
    self, preset, ConfigFile, ExperimentConfig, Problem, ReplicateRecord,
};
use crate::geometry::{check_density_event, sample_uniform_cloud, DensityConfig, PointCloud, SeedSpec};
use crate::matching::{self, Matching};
use crate::plot;
use crate::tsp::{self, Tour};

type CliResult<T> = anyhow::Result<T>;

const EXIT_OK: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "eucopt", version, about = "Random Euclidean matching and tour experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a uniform point cloud in the unit cube.
    Sample(SampleArgs),
    /// Solve one instance and print its cost.
    Solve {
        #[command(subcommand)]
        problem: SolveCommand,
    },
    /// Check stability, edge-energy and density properties.
    Verify(VerifyArgs),
    /// Run a seeded Monte Carlo experiment and write CSV files.
    Experiment(ExperimentArgs),
    /// Render a summary CSV as an SVG chart.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent stream under the same seed, e.g. 1 for a second cloud.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
}

#[derive(Args, Debug)]
struct CommonSolve {
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Use the exact solver; refused above its size cap.
    #[arg(long)]
    exact: bool,
    /// Solution file; printed to standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SolveCommand {
    Matching {
        #[command(flatten)]
        clouds: PairArgs,
        #[command(flatten)]
        common: CommonSolve,
    },
    Tsp {
        #[arg(long)]
        cloud: PathBuf,
        #[command(flatten)]
        common: CommonSolve,
    },
    Btsp {
        #[command(flatten)]
        clouds: PairArgs,
        #[command(flatten)]
        common: CommonSolve,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    TwoOpt,
    EdgeEnergy,
    Density,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    Matching,
    Tsp,
    Btsp,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Matching => Problem::Matching,
            ProblemArg::Tsp => Problem::Tsp,
            ProblemArg::Btsp => Problem::Btsp,
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Structure the solution file describes.
    problem: Option<ProblemArg>,
    /// Single cloud (tsp, density, recount).
    #[arg(long, conflicts_with = "x")]
    cloud: Option<PathBuf>,
    #[arg(long)]
    x: Option<PathBuf>,
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long)]
    solution: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, value_delimiter = ',')]
    checks: Vec<Check>,
    /// Density exponent; defaults to 0.9 p / (p + d).
    #[arg(long)]
    alpha: Option<f64>,
    /// Only report the number of points in each cloud.
    #[arg(long)]
    recount: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Transfer,
    Maxedge,
    Concentration,
    Density,
    Critical,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    kind: Kind,
    /// TOML file with any subset of the configuration keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named base configuration; defaults to the one matching the kind.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    problem: Option<ProblemArg>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha_prime: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    density_grid: Option<usize>,
    #[arg(long)]
    density_levels: Option<usize>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    summary: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, out: &mut impl Write) -> CliResult<i32> {
    match cmd {
        Command::Sample(a) => cmd_sample(a, out),
        Command::Solve { problem } => cmd_solve(problem, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Experiment(a) => cmd_experiment(a, out),
        Command::Plot(a) => cmd_plot(a, out),
    }
}

/// Rounds to 12 significant digits and prints the shortest form of the result.
pub fn format_cost(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded}")
}

fn read_cloud(path: &Path) -> CliResult<PointCloud> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    PointCloud::read(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_sample(a: SampleArgs, out: &mut impl Write) -> CliResult<i32> {
    writeln!(out, "# n = {}\n# d = {}\n# seed = {}\n# stream = {}\n# out = {}", a.n, a.d, a.seed, a.stream, a.out.display())?;
    if a.n == 0 || a.d == 0 {
        bail!("--n and --d must be positive");
    }
    let cloud = sample_uniform_cloud(a.n, a.d, SeedSpec::new(a.seed, a.stream))?;
    write_file(&a.out, cloud.to_text().as_bytes())?;
    Ok(EXIT_OK)
}

fn emit_solution(path: &Option<PathBuf>, text: &str, out: &mut impl Write) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn cmd_solve(cmd: SolveCommand, out: &mut impl Write) -> CliResult<i32> {
    match cmd {
        SolveCommand::Matching { clouds, common } => {
            let (x, y) = (read_cloud(&clouds.x)?, read_cloud(&clouds.y)?);
            print_solve_header(out, "matching", &common, x.len(), x.dim(), "exact")?;
            let sol = matching::solve_matching_exact(&x, &y, common.p)?;
            writeln!(out, "cost = {}", format_cost(sol.cost))?;
            emit_solution(&common.out, &sol.matching.to_text(), out)?;
        }
        SolveCommand::Tsp { cloud, common } => {
            let c = read_cloud(&cloud)?;
            if common.exact && c.len() > tsp::HELD_KARP_MAX_N {
                bail!("--exact tsp supports n <= {}, got {}", tsp::HELD_KARP_MAX_N, c.len());
            }
            let solver = if common.exact { "exact" } else { "2-opt-stable" };
            print_solve_header(out, "tsp", &common, c.len(), c.dim(), solver)?;
            let sol = if common.exact {
                tsp::held_karp(&c, common.p)?
            } else {
                tsp::two_opt_descent(&c, &tsp::nearest_neighbor_tour(&c, 0)?, common.p)?
            };
            writeln!(out, "cost = {}", format_cost(sol.cost))?;
            emit_solution(&common.out, &sol.tour.to_text(), out)?;
        }
        SolveCommand::Btsp { clouds, common } => {
            let (x, y) = (read_cloud(&clouds.x)?, read_cloud(&clouds.y)?);
            if common.exact && x.len() > btsp::BRUTE_FORCE_MAX_N {
                bail!("--exact btsp supports n <= {}, got {}", btsp::BRUTE_FORCE_MAX_N, x.len());
            }
            let solver = if common.exact { "exact" } else { "2-opt-stable" };
            print_solve_header(out, "btsp", &common, x.len(), x.dim(), solver)?;
            let sol = if common.exact {
                btsp::brute_force_btsp(&x, &y, common.p)?
            } else {
                let t0 = btsp::nearest_neighbor_alternating(&x, &y)?;
                btsp::alternating_two_opt_descent(&x, &y, &t0, common.p)?
            };
            writeln!(out, "cost = {}", format_cost(sol.cost))?;
            emit_solution(&common.out, &sol.tour.to_text(), out)?;
        }
    }
    Ok(EXIT_OK)
}

fn print_solve_header(out: &mut impl Write, problem: &str, c: &CommonSolve, n: usize, d: usize, solver: &str) -> CliResult<()> {
    writeln!(out, "# problem = {problem}\n# n = {n}\n# d = {d}\n# p = {}\n# solver = {solver}", c.p)?;
    Ok(())
}

enum Solution {
    Matching(Matching),
    Tour(Tour),
    Alternating(AlternatingTour),
}

fn report_edge_energy(out: &mut impl Write, r: &EdgeEnergyReport) -> CliResult<bool> {
    let ok = r.holds && r.pairs_hold();
    if ok {
        writeln!(out, "edge-energy: PASS worst slack {:e}", r.worst_slack)?;
    } else if let Some(v) = r.pair_violations.first() {
        writeln!(
            out,
            "edge-energy: FAIL worst slack {:e}; pair ({}, {}) lhs {:e} rhs {:e}",
            r.worst_slack, v.edge, v.partner, v.lhs, v.rhs
        )?;
    } else {
        writeln!(out, "edge-energy: FAIL worst slack {:e}", r.worst_slack)?;
    }
    Ok(ok)
}

fn cmd_verify(a: VerifyArgs, out: &mut impl Write) -> CliResult<i32> {
    let x_path = a.cloud.clone().or_else(|| a.x.clone());
    let Some(x_path) = x_path else {
        bail!("give --cloud or --x");
    };
    let x = read_cloud(&x_path)?;
    let y = a.y.as_deref().map(read_cloud).transpose()?;

    if a.recount {
        writeln!(out, "# recount = true")?;
        writeln!(out, "{}: n = {} d = {}", x_path.display(), x.len(), x.dim())?;
        if let (Some(py), Some(cy)) = (&a.y, &y) {
            writeln!(out, "{}: n = {} d = {}", py.display(), cy.len(), cy.dim())?;
        }
        return Ok(EXIT_OK);
    }

    let problem = a.problem.map(Problem::from);
    let checks = if a.checks.is_empty() {
        if problem.is_some() {
            vec![Check::TwoOpt, Check::EdgeEnergy, Check::Density]
        } else {
            vec![Check::Density]
        }
    } else {
        a.checks.clone()
    };
    let alpha = a.alpha.unwrap_or(0.9 * a.p / (a.p + x.dim() as f64));
    writeln!(
        out,
        "# problem = {}\n# p = {}\n# alpha = {alpha}\n# checks = {:?}",
        problem.map_or("none", Problem::as_str),
        a.p,
        checks
    )?;

    let needs_solution = checks.iter().any(|c| *c != Check::Density);
    let solution = if needs_solution {
        let Some(problem) = problem else {
            bail!("two-opt and edge-energy checks need a problem argument");
        };
        let Some(path) = &a.solution else {
            bail!("two-opt and edge-energy checks need --solution");
        };
        let text = read_text(path)?;
        let sol = match problem {
            Problem::Matching => Solution::Matching(Matching::from_text(&text)?),
            Problem::Tsp => Solution::Tour(Tour::from_text(&text)?),
            Problem::Btsp => Solution::Alternating(AlternatingTour::from_text(&text)?),
        };
        if problem != Problem::Tsp && y.is_none() {
            bail!("{problem} needs --x and --y");
        }
        Some(sol)
    } else {
        None
    };

    let mut all_ok = true;
    for check in checks {
        let ok = match (check, &solution) {
            (Check::Density, _) => {
                let cfg = DensityConfig::for_cloud(alpha, x.len(), x.dim())?;
                let rep = check_density_event(&x, &cfg);
                match &rep.witness {
                    None => writeln!(out, "density: PASS worst ratio {} over {} balls", rep.worst_ratio, rep.balls_tested)?,
                    Some(w) => writeln!(
                        out,
                        "density: FAIL worst ratio {}; witness center {:?} radius {} count {}",
                        rep.worst_ratio, w.center, w.radius, w.count
                    )?,
                }
                rep.event_holds
            }
            (Check::TwoOpt, Some(sol)) => verify_two_opt(out, sol, &x, y.as_ref(), a.p)?,
            (Check::EdgeEnergy, Some(sol)) => {
                if !(a.p > 1.0) {
                    writeln!(out, "edge-energy: SKIP (needs p > 1)")?;
                    continue;
                }
                let consts = edge_energy_constants(a.p)?;
                let rep = match sol {
                    Solution::Matching(m) => matching::verify_local_edge_energy(&x, y.as_ref().unwrap(), m, a.p, &consts),
                    Solution::Tour(t) => tsp::verify_tsp_edge_energy(&x, t, a.p, &consts),
                    Solution::Alternating(t) => btsp::verify_btsp_edge_energy(&x, y.as_ref().unwrap(), t, a.p, &consts),
                };
                match rep {
                    Ok(r) => report_edge_energy(out, &r)?,
                    Err(crate::Error::NotTwoOptStable { violations }) => {
                        writeln!(out, "edge-energy: FAIL solution is not 2-opt stable ({violations} violations)")?;
                        false
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            (_, None) => unreachable!("solution loaded whenever a structural check is requested"),
        };
        all_ok &= ok;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_FAIL })
}

fn verify_two_opt(out: &mut impl Write, sol: &Solution, x: &PointCloud, y: Option<&PointCloud>, p: f64) -> CliResult<bool> {
    // (first violating pair, worst deficit, count)
    let found: Option<((usize, usize), f64, usize)> = match sol {
        Solution::Matching(m) => {
            let v = matching::verify_matching_two_opt(x, y.unwrap(), m, p)?;
            v.first().map(|f| ((f.i, f.j), v.iter().map(|s| s.deficit).fold(0.0, f64::max), v.len()))
        }
        Solution::Tour(t) => {
            let v = tsp::verify_tour_two_opt(x, t, p)?;
            v.first().map(|f| ((f.a, f.b), v.iter().map(|s| s.deficit).fold(0.0, f64::max), v.len()))
        }
        Solution::Alternating(t) => {
            let v = btsp::verify_alternating_swap(x, y.unwrap(), t, p)?;
            v.first().map(|f| ((f.k, f.m), v.iter().map(|s| -s.delta).fold(0.0, f64::max), v.len()))
        }
    };
    match found {
        None => {
            writeln!(out, "two-opt: PASS")?;
            Ok(true)
        }
        Some(((i, j), worst, count)) => {
            writeln!(out, "two-opt: FAIL {count} violating pairs, first ({i}, {j}), worst deficit {worst:e}")?;
            Ok(false)
        }
    }
}

fn default_preset(kind: Kind) -> &'static str {
    match kind {
        Kind::Transfer => "transfer-d3-p1",
        Kind::Maxedge => "maxedge-d3-p2",
        Kind::Concentration => "concentration-d3-p1",
        Kind::Density => "density-d3",
        Kind::Critical => "critical-matching",
    }
}

fn resolve_experiment(a: &ExperimentArgs) -> CliResult<(ConfigFile, bool)> {
    let name = a.preset.as_deref().unwrap_or(default_preset(a.kind));
    let Some(mut cfg) = preset(name) else {
        bail!("unknown preset {name:?}; known: {}", experiments::PRESETS.join(", "));
    };
    let mut problem_fixed = a.preset.is_some() || a.problem.is_some();
    if let Some(path) = &a.config {
        let file = ConfigFile::from_toml(&read_text(path)?)?;
        problem_fixed |= file.problem.is_some();
        cfg = cfg.overlay(file);
    }
    let flags = ConfigFile {
        problem: a.problem.map(Problem::from),
        d: a.d,
        p: a.p,
        q_list: a.q.clone(),
        n_grid: a.n_grid.clone(),
        replicates: a.replicates,
        master_seed: a.seed,
        alpha: a.alpha,
        alpha_prime: a.alpha_prime,
        workers: a.workers,
        density_grid: a.density_grid,
        density_levels: a.density_levels,
    };
    Ok((cfg.overlay(flags), problem_fixed))
}

fn cmd_experiment(a: ExperimentArgs, out: &mut impl Write) -> CliResult<i32> {
    let (file_cfg, problem_fixed) = resolve_experiment(&a)?;
    // The critical kind covers exact matching and 2-opt-stable tours unless a problem was chosen.
    let problems: Vec<Problem> = if a.kind == Kind::Critical && !problem_fixed {
        vec![Problem::Matching, Problem::Tsp]
    } else {
        vec![file_cfg.problem.unwrap_or(Problem::Matching)]
    };
    let configs = problems
        .iter()
        .map(|&problem| {
            ConfigFile {
                problem: Some(problem),
                ..file_cfg.clone()
            }
            .resolve()
        })
        .collect::<crate::Result<Vec<ExperimentConfig>>>()?;

    writeln!(out, "# kind = {:?}\n# out = {}", a.kind, a.out.display())?;
    for cfg in &configs {
        for line in cfg.describe().lines() {
            writeln!(out, "# {line}")?;
        }
    }
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    out.flush()?;

    for cfg in &configs {
        let suffix = if configs.len() > 1 { format!("_{}", cfg.problem) } else { String::new() };
        let path = |stem: &str| a.out.join(format!("{stem}{suffix}.csv"));
        match a.kind {
            Kind::Transfer | Kind::Critical => {
                let rep = experiments::run_transfer_experiment(cfg)?;
                write_records(&path("records"), &rep.records)?;
                let mut buf = Vec::new();
                experiments::write_summary_csv(&mut buf, cfg.problem, cfg.d, cfg.p, &rep.summaries)?;
                write_file(&path("summary"), &buf)?;
                writeln!(out, "{} summary (mean of cost / n^(1-q/d), sample std):", cfg.problem)?;
                writeln!(out, "{:>8} {:>6} {:>14} {:>14}", "n", "q", "mean", "std")?;
                for s in &rep.summaries {
                    writeln!(out, "{:>8} {:>6} {:>14.6e} {:>14.6e}", s.n, s.q, s.mean, s.std)?;
                }
                writeln!(out, "{:>6} {:>12} {:>10}", "q", "max/min", "slope")?;
                for f in &rep.flatness {
                    let slope = f.fit.map_or("n/a".to_string(), |s| format!("{:.4}", s.slope));
                    writeln!(out, "{:>6} {:>12.4} {:>10}", f.q, f.max_over_min, slope)?;
                }
            }
            Kind::Maxedge => {
                let rep = experiments::run_maxedge_experiment(cfg)?;
                write_records(&path("records"), &rep.records)?;
                let mut buf = Vec::new();
                experiments::write_maxedge_csv(&mut buf, &rep.per_n)?;
                write_file(&path("maxedge"), &buf)?;
                writeln!(out, "{:>8} {:>12} {:>12} {:>12} {:>8} {:>8}", "n", "mean", "median", "q90", "A", "B")?;
                for s in &rep.per_n {
                    writeln!(
                        out,
                        "{:>8} {:>12.6} {:>12.6} {:>12.6} {:>8.3} {:>8.3}",
                        s.n, s.mean, s.median, s.q90, s.event_a_freq, s.event_b_freq
                    )?;
                }
                print_fit(out, "max-edge slope", rep.fit)?;
            }
            Kind::Concentration => {
                let rep = experiments::run_concentration_experiment(cfg)?;
                if let Some(w) = &rep.warning {
                    eprintln!("warning: {w}");
                }
                write_records(&path("records"), &rep.records)?;
                let mut buf = Vec::new();
                experiments::write_concentration_csv(&mut buf, &rep.per_n)?;
                write_file(&path("concentration"), &buf)?;
                writeln!(out, "{:>8} {:>14} {:>14}", "n", "mean", "std")?;
                for s in &rep.per_n {
                    writeln!(out, "{:>8} {:>14.6e} {:>14.6e}", s.n, s.mean, s.std)?;
                }
                print_fit(out, "std slope", rep.fit)?;
            }
            Kind::Density => {
                let freq = experiments::run_density_experiment(cfg)?;
                let mut buf = Vec::new();
                experiments::write_density_csv(&mut buf, &freq)?;
                write_file(&path("density"), &buf)?;
                writeln!(out, "{:>8} {:>10} {:>12}", "n", "frequency", "worst ratio")?;
                for f in &freq {
                    writeln!(out, "{:>8} {:>10.3} {:>12.4}", f.n, f.frequency, f.worst_ratio)?;
                }
            }
        }
    }
    Ok(EXIT_OK)
}

fn write_records(path: &Path, records: &[ReplicateRecord]) -> CliResult<()> {
    let mut buf = Vec::new();
    experiments::write_records_csv(&mut buf, records)?;
    write_file(path, &buf)
}

fn print_fit(out: &mut impl Write, label: &str, fit: Option<experiments::SlopeFit>) -> CliResult<()> {
    match fit {
        Some(f) => writeln!(
            out,
            "{label}: {:.4} (stderr {:.4}, residual std {:.4}, {} points)",
            f.slope, f.slope_stderr, f.residual_std, f.num_points
        )?,
        None => writeln!(out, "{label}: n/a")?,
    }
    Ok(())
}

fn cmd_plot(a: PlotArgs, out: &mut impl Write) -> CliResult<i32> {
    writeln!(out, "# summary = {}\n# out = {}", a.summary.display(), a.out.display())?;
    let f = fs::File::open(&a.summary).with_context(|| format!("opening {}", a.summary.display()))?;
    let rows = experiments::read_summary_csv(f)?;
    let svg = plot::render_svg(&rows)?;
    write_file(&a.out, svg.as_bytes())?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_formatting() {
        assert_eq!(format_cost(0.02), "0.02");
        assert_eq!(format_cost(0.020000000000000004), "0.02");
        assert_eq!(format_cost(4.0), "4");
        assert_eq!(format_cost(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_cost(0.0), "0");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["eucopt", "frobnicate"]), 2);
        assert_eq!(run(["eucopt", "sample", "--n", "x", "--d", "3", "--out", "/dev/null"]), 2);
    }
}
