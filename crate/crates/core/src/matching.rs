//! Euclidean bipartite matching with p-costs.

use std::fmt::Write as _;

use crate::energy::{pair_holds, EdgeEnergyConstants, EdgeEnergyEntry, EdgeEnergyReport, PairViolation};
use crate::error::{invalid, Error, Result};
use crate::geometry::{dist, pdist_unchecked, Ball, PointCloud};
use crate::lap;

pub const BRUTE_FORCE_MAX_N: usize = 10;

/// A permutation pairing `X_i` with `Y_{sigma(i)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching(Vec<usize>);

impl Matching {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; sigma.len()];
        for &j in &sigma {
            if j >= sigma.len() || std::mem::replace(&mut seen[j], true) {
                return Err(invalid(format!("{sigma:?} is not a permutation")));
            }
        }
        Ok(Self(sigma))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn target(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Matching {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Matching(inv)
    }

    /// One target index per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for j in &self.0 {
            let _ = writeln!(out, "{j}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let sigma = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<usize>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("bad index {l:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sigma)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingSolution {
    pub matching: Matching,
    pub cost: f64,
    pub p: f64,
}

fn check_instance(x: &PointCloud, y: &PointCloud) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(())
}

fn check_matching(x: &PointCloud, y: &PointCloud, m: &Matching) -> Result<()> {
    check_instance(x, y)?;
    if m.len() != x.len() {
        return Err(Error::SizeMismatch {
            left: x.len(),
            right: m.len(),
        });
    }
    Ok(())
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("exponent {p} must be a finite real >= 1")))
    }
}

/// `sum_i |X_i - Y_sigma(i)|^p`.
pub fn matching_cost(x: &PointCloud, y: &PointCloud, m: &Matching, p: f64) -> Result<f64> {
    check_matching(x, y, m)?;
    check_exponent(p)?;
    Ok(cost_unchecked(x, y, m.as_slice(), p))
}

/// The q-energy of a fixed matching; the same sum as [`matching_cost`] with
/// exponent `q`.
pub fn matching_qcost(x: &PointCloud, y: &PointCloud, m: &Matching, q: f64) -> Result<f64> {
    matching_cost(x, y, m, q)
}

fn cost_unchecked(x: &PointCloud, y: &PointCloud, sigma: &[usize], p: f64) -> f64 {
    sigma
        .iter()
        .enumerate()
        .map(|(i, &j)| pdist_unchecked(x.point(i), y.point(j), p))
        .sum()
}

/// Dense `n x n` matrix of `|X_i - Y_j|^p`.
pub fn cost_matrix(x: &PointCloud, y: &PointCloud, p: f64) -> Vec<f64> {
    let n = x.len();
    let mut c = Vec::with_capacity(n * n);
    for xi in x.points() {
        c.extend(y.points().map(|yj| pdist_unchecked(xi, yj, p)));
    }
    c
}

/// Globally optimal matching by shortest augmenting paths.
pub fn solve_matching_exact(x: &PointCloud, y: &PointCloud, p: f64) -> Result<MatchingSolution> {
    check_instance(x, y)?;
    check_exponent(p)?;
    let n = x.len();
    let sigma = lap::solve(&cost_matrix(x, y, p), n);
    let cost = cost_unchecked(x, y, &sigma, p);
    Ok(MatchingSolution {
        matching: Matching(sigma),
        cost,
        p,
    })
}

/// Exhaustive minimum over all `n!` permutations, visited in lexicographic
/// order; the first minimizer found is kept.
pub fn brute_force_matching(x: &PointCloud, y: &PointCloud, p: f64) -> Result<MatchingSolution> {
    check_instance(x, y)?;
    check_exponent(p)?;
    let n = x.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            what: "brute-force matching",
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let c = cost_matrix(x, y, p);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_cost = f64::INFINITY;
    loop {
        let cost: f64 = perm.iter().enumerate().map(|(i, &j)| c[i * n + j]).sum();
        if cost < best_cost - 1e-12 * (1.0 + best_cost.abs()) || best_cost.is_infinite() {
            best_cost = cost;
            best.copy_from_slice(&perm);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let cost = cost_unchecked(x, y, &best, p);
    Ok(MatchingSolution {
        matching: Matching(best),
        cost,
        p,
    })
}

/// Advances to the next permutation in lexicographic order; false after the last.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Per-point gradients `(d/dX, d/dY)`.
pub type Gradient = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Gradient of the cost of a fixed matching with respect to every point:
/// `p |x_i - y_s(i)|^{p-2} (x_i - y_s(i))` for `X`, the negation for the paired `Y`.
pub fn matching_cost_gradient(
    x: &PointCloud,
    y: &PointCloud,
    m: &Matching,
    p: f64,
) -> Result<Gradient> {
    check_matching(x, y, m)?;
    if !(p > 1.0) {
        return Err(invalid(format!("gradient needs p > 1, got {p}")));
    }
    let d = x.dim();
    let mut gx = vec![vec![0.0; d]; x.len()];
    let mut gy = vec![vec![0.0; d]; y.len()];
    for (i, &j) in m.as_slice().iter().enumerate() {
        let (xi, yj) = (x.point(i), y.point(j));
        let len = dist(xi, yj);
        if len == 0.0 {
            if p < 2.0 {
                return Err(Error::SingularEdge { edge: i, p });
            }
            continue;
        }
        let scale = p * len.powf(p - 2.0);
        for k in 0..d {
            let g = scale * (xi[k] - yj[k]);
            gx[i][k] = g;
            gy[j][k] = -g;
        }
    }
    Ok((gx, gy))
}

/// A pair `(i, j)` whose swap would lower the cost, with `deficit = lhs - rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapViolation {
    pub i: usize,
    pub j: usize,
    pub deficit: f64,
}

/// Checks the pairwise swap inequality
/// `|x_i - y_s(i)|^p + |x_j - y_s(j)|^p <= |x_i - y_s(j)|^p + |x_j - y_s(i)|^p`
/// for every `i < j`.
pub fn verify_matching_two_opt(
    x: &PointCloud,
    y: &PointCloud,
    m: &Matching,
    p: f64,
) -> Result<Vec<SwapViolation>> {
    check_matching(x, y, m)?;
    check_exponent(p)?;
    let s = m.as_slice();
    let n = s.len();
    let edge: Vec<f64> = (0..n).map(|i| pdist_unchecked(x.point(i), y.point(s[i]), p)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = edge[i] + edge[j];
            let rhs = pdist_unchecked(x.point(i), y.point(s[j]), p)
                + pdist_unchecked(x.point(j), y.point(s[i]), p);
            if lhs > rhs + 1e-9 * (1.0 + lhs) {
                out.push(SwapViolation {
                    i,
                    j,
                    deficit: lhs - rhs,
                });
            }
        }
    }
    Ok(out)
}

/// Evaluates `N_{B_i} |x_i - y_s(i)|^p <= C sum_{x_j in B_i} |x_j - y_s(j)|^p`
/// on every edge, plus the per-pair form `|x_i - y_s(i)|^p <= C |x_j - y_s(j)|^p`.
pub fn verify_local_edge_energy(
    x: &PointCloud,
    y: &PointCloud,
    m: &Matching,
    p: f64,
    consts: &EdgeEnergyConstants,
) -> Result<EdgeEnergyReport> {
    check_matching(x, y, m)?;
    if !(p > 1.0) {
        return Err(invalid(format!("edge-energy check needs p > 1, got {p}")));
    }
    let unstable = verify_matching_two_opt(x, y, m, p)?;
    if !unstable.is_empty() {
        return Err(Error::NotTwoOptStable {
            violations: unstable.len(),
        });
    }
    let s = m.as_slice();
    let energy: Vec<f64> = (0..s.len())
        .map(|i| pdist_unchecked(x.point(i), y.point(s[i]), p))
        .collect();
    let c = consts.c_pair;
    let mut entries = Vec::with_capacity(s.len());
    let mut violations = Vec::new();
    for i in 0..s.len() {
        let (xi, yi) = (x.point(i), y.point(s[i]));
        let ball = Ball::at_midpoint(xi, yi, consts.ball_radius(dist(xi, yi)));
        let inside: Vec<usize> = (0..x.len()).filter(|&j| ball.contains(x.point(j))).collect();
        for &j in &inside {
            let rhs = c * energy[j];
            if !pair_holds(energy[i], rhs) {
                violations.push(PairViolation {
                    edge: i,
                    partner: j,
                    lhs: energy[i],
                    rhs,
                });
            }
        }
        entries.push(EdgeEnergyEntry {
            edge: i,
            count: inside.len(),
            lhs: inside.len() as f64 * energy[i],
            rhs: c * inside.iter().map(|&j| energy[j]).sum::<f64>(),
            ball,
        });
    }
    Ok(EdgeEnergyReport::from_entries(entries, violations))
}

/// Longest edge length (not p-powered).
pub fn max_matching_edge(x: &PointCloud, y: &PointCloud, m: &Matching) -> Result<f64> {
    check_matching(x, y, m)?;
    Ok(m.as_slice()
        .iter()
        .enumerate()
        .map(|(i, &j)| dist(x.point(i), y.point(j)))
        .fold(0.0, f64::max))
}
