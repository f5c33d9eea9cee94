//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//! Runs sequentially (no libtest harness) so the runtime limits measure one
//! criterion at a time.

mod common;

use std::time::{Duration, Instant};

use common::{alternating_min, matching_min, pair, rel_close, tour_min};
use eucopt::btsp;
use eucopt::energy::edge_energy_constants;
use eucopt::experiments::{self, preset, ExperimentConfig, ReplicateRecord};
use eucopt::geometry::{PointCloud, SeedSpec};
use eucopt::matching;
use eucopt::tsp;

const SEED: u64 = 20_240_601;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

struct Suite {
    failures: Vec<u32>,
}

impl Suite {
    fn run(&mut self, id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let ok = out.ok && in_time;
        let limit_txt = limit.map_or(String::new(), |l| format!(" < {} s", l.as_secs()));
        println!(
            "[{}] criterion {id:>2} {name}: {} ({:.1} s{limit_txt})",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
        if !ok {
            self.failures.push(id);
        }
    }
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn full_config(name: &str, workers: usize) -> ExperimentConfig {
    let mut cfg = preset(name).unwrap().resolve().unwrap();
    cfg.workers = workers;
    cfg
}

fn records_csv(records: &[ReplicateRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    experiments::write_records_csv(&mut buf, records).unwrap();
    buf
}

fn summary_csv(cfg: &ExperimentConfig, s: &[experiments::QSummary]) -> Vec<u8> {
    let mut buf = Vec::new();
    experiments::write_summary_csv(&mut buf, cfg.problem, cfg.d, cfg.p, s).unwrap();
    buf
}

fn crit1() -> Outcome {
    let ps = [1.0, 1.5, 2.0, 4.0];
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for i in 0..200usize {
        let (n, d, p) = (2 + i % 6, 1 + (i / 6) % 3, ps[(i / 18) % 4]);
        let (x, y) = pair(n, d, SEED, i as u64);
        let exact = matching::solve_matching_exact(&x, &y, p).unwrap().cost;
        let brute = matching::brute_force_matching(&x, &y, p).unwrap().cost;
        let oracle = matching_min(&x, &y, p);
        let rel = (exact - brute).abs() / brute.max(1e-300);
        worst = worst.max(rel);
        if !rel_close(exact, brute, 1e-9) || !rel_close(brute, oracle, 1e-9) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("200 instances, {bad} mismatches, worst relative gap {worst:.1e}"))
}

fn crit2() -> Outcome {
    let mut bad_hk = 0;
    let mut bad_local = 0;
    let mut equal = 0;
    for i in 0..200usize {
        let (n, d, p) = (4 + i % 6, 1 + (i / 6) % 3, [1.0, 2.0, 3.0][(i / 18) % 3]);
        let c = common::cloud(n, d, SEED, 1000 + i as u64);
        let hk = tsp::held_karp(&c, p).unwrap().cost;
        if !rel_close(hk, tour_min(&c, p), 1e-9) {
            bad_hk += 1;
        }
        let local = tsp::two_opt_descent(&c, &tsp::nearest_neighbor_tour(&c, 0).unwrap(), p).unwrap().cost;
        if local < hk * (1.0 - 1e-12) {
            bad_local += 1;
        }
        if rel_close(local, hk, 1e-9) {
            equal += 1;
        }
    }
    outcome(
        bad_hk == 0 && bad_local == 0,
        format!("Held-Karp mismatches {bad_hk}, descent below optimum {bad_local}, descent optimal on {equal}/200"),
    )
}

fn crit3() -> Outcome {
    let mut bad = 0;
    let mut equal = 0;
    for i in 0..100usize {
        let (n, p) = (2 + i % 4, [1.0, 2.0][(i / 4) % 2]);
        let (x, y) = pair(n, 2, SEED, 2000 + i as u64);
        let bf = btsp::brute_force_btsp(&x, &y, p).unwrap();
        let t0 = btsp::nearest_neighbor_alternating(&x, &y).unwrap();
        let local = btsp::alternating_two_opt_descent(&x, &y, &t0, p).unwrap().cost;
        let stable = btsp::verify_alternating_swap(&x, &y, &bf.tour, p).unwrap().is_empty();
        if local < bf.cost * (1.0 - 1e-12) || !stable || !rel_close(bf.cost, alternating_min(&x, &y, p), 1e-9) {
            bad += 1;
        }
        if rel_close(local, bf.cost, 1e-9) {
            equal += 1;
        }
    }
    outcome(bad == 0, format!("{bad} failures, descent optimal on {equal}/100"))
}

fn crit4() -> Outcome {
    let mut fails = [0usize; 5];
    // Per problem: nonempty balls seen and the largest lhs / rhs among them.
    let mut tight = [(0usize, 0.0f64); 3];
    let mut track = |k: usize, r: &eucopt::energy::EdgeEnergyReport| {
        for e in r.per_edge.iter().filter(|e| e.count > 0) {
            tight[k].0 += 1;
            tight[k].1 = tight[k].1.max(e.lhs / e.rhs);
        }
    };
    for i in 0..100usize {
        let n = 10 + (i * 7) % 90;
        let p_any = [1.0, 1.5, 2.0, 4.0][i % 4];
        let p_ee = [1.5, 2.0, 4.0][i % 3];
        let consts = edge_energy_constants(p_ee).unwrap();
        let (x, y) = pair(n, 1 + i % 3, SEED, 3000 + i as u64);

        // (a) and (c): exact matchings.
        let m = matching::solve_matching_exact(&x, &y, p_any).unwrap().matching;
        if !matching::verify_matching_two_opt(&x, &y, &m, p_any).unwrap().is_empty() {
            fails[0] += 1;
        }
        let m = matching::solve_matching_exact(&x, &y, p_ee).unwrap().matching;
        let r = matching::verify_local_edge_energy(&x, &y, &m, p_ee, &consts).unwrap();
        track(0, &r);
        if !(r.holds && r.pairs_hold()) {
            fails[2] += 1;
        }

        // (b) and (d): descent tours and Held-Karp optima.
        let t = tsp::two_opt_descent(&x, &tsp::nearest_neighbor_tour(&x, i % n).unwrap(), p_any).unwrap().tour;
        let small = common::cloud(5 + i % 8, 2, SEED, 3500 + i as u64);
        let hk = tsp::held_karp(&small, p_any).unwrap().tour;
        if !tsp::verify_tour_two_opt(&x, &t, p_any).unwrap().is_empty()
            || !tsp::verify_tour_two_opt(&small, &hk, p_any).unwrap().is_empty()
        {
            fails[1] += 1;
        }
        let t = tsp::two_opt_descent(&x, &tsp::nearest_neighbor_tour(&x, 0).unwrap(), p_ee).unwrap().tour;
        let r = tsp::verify_tsp_edge_energy(&x, &t, p_ee, &consts).unwrap();
        track(1, &r);
        if !(r.holds && r.pairs_hold()) {
            fails[3] += 1;
        }

        // (e): stable alternating tours.
        let t0 = btsp::nearest_neighbor_alternating(&x, &y).unwrap();
        let bt = btsp::alternating_two_opt_descent(&x, &y, &t0, p_ee).unwrap().tour;
        let r = btsp::verify_btsp_edge_energy(&x, &y, &bt, p_ee, &consts).unwrap();
        track(2, &r);
        if !(r.holds && r.pairs_hold()) {
            fails[4] += 1;
        }
    }
    outcome(
        fails.iter().all(|&f| f == 0),
        format!(
            "failures (a..e) {fails:?}; nonempty balls / max lhs:rhs matching {} / {:.3}, tsp {} / {:.3}, btsp {} / {:.3}",
            tight[0].0, tight[0].1, tight[1].0, tight[1].1, tight[2].0, tight[2].1
        ),
    )
}

fn crit5() -> Outcome {
    let h = 1e-6;
    let (mut good, mut total) = (0usize, 0usize);
    for i in 0..50u64 {
        let p = [2.0, 3.0, 4.0][i as usize % 3];
        let mut src = SeedSpec::new(SEED, 5000 + i).rng();
        // Keep every coordinate at least 0.01 from the faces so +-h stays in the cube.
        let mut draw = || (0..18).map(|_| 0.01 + 0.98 * src.next_f64()).collect::<Vec<f64>>();
        let (xf, yf) = (draw(), draw());
        let x = PointCloud::from_flat(3, xf.clone()).unwrap();
        let y = PointCloud::from_flat(3, yf.clone()).unwrap();
        let m = matching::solve_matching_exact(&x, &y, p).unwrap().matching;
        let (gx, gy) = matching::matching_cost_gradient(&x, &y, &m, p).unwrap();
        let opt = |xs: &[f64], ys: &[f64]| {
            let a = PointCloud::from_flat(3, xs.to_vec()).unwrap();
            let b = PointCloud::from_flat(3, ys.to_vec()).unwrap();
            matching::solve_matching_exact(&a, &b, p).unwrap().cost
        };
        for side in 0..2 {
            for k in 0..18 {
                let analytic = if side == 0 { gx[k / 3][k % 3] } else { gy[k / 3][k % 3] };
                let shifted = |s: f64| {
                    let (mut a, mut b) = (xf.clone(), yf.clone());
                    if side == 0 {
                        a[k] += s;
                    } else {
                        b[k] += s;
                    }
                    opt(&a, &b)
                };
                let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
                let rel = (fd - analytic).abs() / analytic.abs().max(fd.abs()).max(1e-300);
                total += 1;
                if rel <= 1e-5 {
                    good += 1;
                }
            }
        }
    }
    let frac = good as f64 / total as f64;
    outcome(frac >= 0.95, format!("{good}/{total} coordinates within 1e-5 ({:.2}%)", 100.0 * frac))
}

fn crit6(report: &experiments::TransferReport) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for f in &report.flatness {
        let slope = f.fit.map_or(f64::NAN, |s| s.slope);
        ok &= f.max_over_min <= 2.0 && (-0.15..=0.15).contains(&slope);
        parts.push(format!("q={} max/min {:.3} slope {:+.4}", f.q, f.max_over_min, slope));
    }
    outcome(ok, parts.join("; "))
}

fn crit7() -> Outcome {
    let cfg = full_config("maxedge-d3-p2", 1);
    let rep = experiments::run_maxedge_experiment(&cfg).unwrap();
    let bound = -0.5 * cfg.p / (cfg.d as f64 * (cfg.p + cfg.d as f64));
    let fit = rep.fit.unwrap();
    let means: Vec<String> = rep.per_n.iter().map(|s| format!("{}:{:.4}", s.n, s.mean)).collect();
    outcome(
        fit.slope <= bound,
        format!("slope {:.4} <= {bound:.4} (stderr {:.4}); mean max-edge {}", fit.slope, fit.slope_stderr, means.join(" ")),
    )
}

fn crit8(records: &[ReplicateRecord]) -> Outcome {
    // Same configuration as criterion 6, so its records are reused.
    let (per_n, fit) = experiments::summarize_concentration(records).unwrap();
    let stds: Vec<String> = per_n.iter().map(|s| format!("{}:{:.4}", s.n, s.std)).collect();
    match fit {
        Some(f) => outcome(
            f.slope <= -0.05,
            format!("slope of log std {:.4} <= -0.05 (stderr {:.4}); std {}", f.slope, f.slope_stderr, stds.join(" ")),
        ),
        None => outcome(false, "a standard deviation was zero"),
    }
}

fn crit9() -> Outcome {
    let mut cfg = full_config("density-d3", 1);
    cfg.n_grid = vec![4096];
    cfg.replicates = 100;
    let f = &experiments::run_density_experiment(&cfg).unwrap()[0];
    outcome(
        f.frequency >= 0.95,
        format!("event A frequency {:.2} over {} replicates at n = 4096 (worst ratio {:.3})", f.frequency, f.replicates, f.worst_ratio),
    )
}

fn crit10() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["critical-matching", "critical-tsp"] {
        let cfg = full_config(name, 1);
        let rep = experiments::run_transfer_experiment(&cfg).unwrap();
        let finite = rep.summaries.iter().all(|s| s.mean.is_finite() && s.std.is_finite() && s.mean > 0.0)
            && rep.records.iter().all(|r| r.q_costs.iter().all(|c| c.normalized.is_finite()));
        let ordered = rep.summaries.windows(2).all(|w| w[0].n <= w[1].n);
        let complete = rep.summaries.len() == cfg.n_grid.len() * cfg.q_list.len();
        ok &= finite && ordered && complete;
        let ratios: Vec<String> = rep.flatness.iter().map(|f| format!("q={} {:.2}", f.q, f.max_over_min)).collect();
        parts.push(format!("{}: finite {finite}, ordered {ordered}, max/min {}", cfg.problem, ratios.join(" ")));
    }
    outcome(ok, parts.join("; "))
}

fn main() {
    let mut suite = Suite { failures: Vec::new() };
    suite.run(1, "matching oracle equivalence", secs(10), crit1);
    suite.run(2, "TSP oracle equivalence", secs(30), crit2);
    suite.run(3, "bTSP oracle equivalence", secs(30), crit3);
    suite.run(4, "local inequality suite", secs(120), crit4);
    suite.run(5, "gradient check", secs(60), crit5);

    let cfg1 = full_config("transfer-d3-p1", 1);
    assert_eq!(
        preset("transfer-d3-p1").unwrap().resolve().unwrap(),
        preset("concentration-d3-p1").unwrap().resolve().unwrap()
    );
    let mut transfer = None;
    suite.run(6, "transfer flatness", secs(900), || {
        let rep = experiments::run_transfer_experiment(&cfg1).unwrap();
        let out = crit6(&rep);
        transfer = Some(rep);
        out
    });
    let transfer = transfer.unwrap();
    suite.run(7, "max-edge scaling", secs(900), crit7);
    suite.run(8, "concentration direction", secs(900), || crit8(&transfer.records));
    suite.run(9, "density event frequency", secs(300), crit9);
    suite.run(10, "critical-regime preset", secs(1200), crit10);
    suite.run(11, "reproducibility across worker counts", None, || {
        let cfg8 = ExperimentConfig { workers: 8, ..cfg1.clone() };
        let rerun = experiments::run_transfer_experiment(&cfg8).unwrap();
        let same_records = records_csv(&transfer.records) == records_csv(&rerun.records);
        let same_summary = summary_csv(&cfg1, &transfer.summaries) == summary_csv(&cfg8, &rerun.summaries);
        outcome(
            same_records && same_summary,
            format!(
                "1-worker vs 8-worker CSV: records identical {same_records}, summary identical {same_summary} ({} bytes)",
                records_csv(&rerun.records).len()
            ),
        )
    });

    if suite.failures.is_empty() {
        println!("acceptance: all 11 criteria passed");
    } else {
        println!("acceptance: failed criteria {:?}", suite.failures);
        std::process::exit(1);
    }
}
