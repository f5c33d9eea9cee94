//! Monopartite Euclidean TSP with p-costs.

use std::fmt::Write as _;

use crate::energy::{pair_holds, EdgeEnergyConstants, EdgeEnergyEntry, EdgeEnergyReport, PairViolation};
use crate::error::{invalid, Error, Result};
use crate::geometry::{dist, pdist_unchecked, Ball, PointCloud};

pub const HELD_KARP_MAX_N: usize = 16;

/// Improvement threshold for accepting a descent move.
pub(crate) const MOVE_EPS: f64 = 1e-12;

/// A Hamiltonian cycle stored in canonical form: it starts at vertex 0 and
/// its second vertex is smaller than its last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tour(Vec<usize>);

impl Tour {
    /// Validates a cyclic order and canonicalizes it.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n < 3 {
            return Err(invalid(format!("a tour needs at least 3 vertices, got {n}")));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(invalid(format!("{order:?} is not a permutation")));
            }
        }
        Ok(Self(canonical(order)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    /// Cyclic edges `(order[k], order[k+1])`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.0.len();
        (0..n).map(move |k| (self.0[k], self.0[(k + 1) % n]))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.0 {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let order = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<usize>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("bad vertex {l:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(order)
    }
}

fn canonical(mut order: Vec<usize>) -> Vec<usize> {
    let n = order.len();
    let start = order.iter().position(|&v| v == 0).unwrap();
    order.rotate_left(start);
    if order[1] > order[n - 1] {
        order[1..].reverse();
    }
    order
}

#[derive(Clone, Debug, PartialEq)]
pub struct TourSolution {
    pub tour: Tour,
    pub cost: f64,
    pub p: f64,
    pub two_opt_stable: bool,
}

fn check(cloud: &PointCloud, t: &Tour, p: f64) -> Result<()> {
    if t.len() != cloud.len() {
        return Err(Error::SizeMismatch {
            left: cloud.len(),
            right: t.len(),
        });
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("exponent {p} must be a finite real >= 1")));
    }
    Ok(())
}

/// Cyclic sum of p-powered edge lengths.
pub fn tour_cost(cloud: &PointCloud, t: &Tour, p: f64) -> Result<f64> {
    check(cloud, t, p)?;
    Ok(order_cost(cloud, t.order(), p))
}

fn order_cost(cloud: &PointCloud, order: &[usize], p: f64) -> f64 {
    let n = order.len();
    (0..n)
        .map(|k| pdist_unchecked(cloud.point(order[k]), cloud.point(order[(k + 1) % n]), p))
        .sum()
}

/// Greedy tour from `start`: always move to the closest unvisited vertex,
/// the smaller index on ties.
pub fn nearest_neighbor_tour(cloud: &PointCloud, start: usize) -> Result<Tour> {
    let n = cloud.len();
    if n < 3 {
        return Err(invalid(format!("a tour needs at least 3 vertices, got {n}")));
    }
    if start >= n {
        return Err(invalid(format!("start vertex {start} out of range")));
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    visited[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let here = cloud.point(cur);
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (v, _) in visited.iter().enumerate().filter(|(_, seen)| !**seen) {
            let d = crate::geometry::dist_sq(here, cloud.point(v));
            if d < best_d {
                best_d = d;
                best = v;
            }
        }
        visited[best] = true;
        order.push(best);
        cur = best;
    }
    Tour::new(order)
}

/// Dense matrix of `|x_u - x_v|^p`.
pub(crate) fn pmatrix(cloud: &PointCloud, p: f64) -> Vec<f64> {
    let n = cloud.len();
    let mut w = vec![0.0; n * n];
    for u in 0..n {
        for v in u + 1..n {
            let c = pdist_unchecked(cloud.point(u), cloud.point(v), p);
            w[u * n + v] = c;
            w[v * n + u] = c;
        }
    }
    w
}

/// Reverses the cyclic stretch `order[i..=j]` (indices mod n, `i` to `j`
/// walking forward) by swapping inward from both ends.
pub(crate) fn reverse_cyclic<T>(order: &mut [T], i: usize, j: usize) {
    let n = order.len();
    let len = (j + n - i) % n + 1;
    let (mut a, mut b) = (i, j);
    for _ in 0..len / 2 {
        order.swap(a, b);
        a = (a + 1) % n;
        b = (b + n - 1) % n;
    }
}

/// Applies the 2-opt move on positions `a < b`, replacing edges `(a, a+1)`
/// and `(b, b+1)` by `(a, b)` and `(a+1, b+1)`. Reverses whichever of the two
/// equivalent segments is shorter.
pub(crate) fn apply_two_opt<T>(order: &mut [T], a: usize, b: usize) {
    let n = order.len();
    let inner = b - a;
    if inner <= n - inner {
        reverse_cyclic(order, a + 1, b);
    } else {
        reverse_cyclic(order, (b + 1) % n, a);
    }
}

/// First-improvement 2-opt: scans position pairs `(a, b)` in lexicographic
/// order and applies every move that lowers the cost by more than `1e-12`,
/// repeating full passes until one finds nothing.
pub fn two_opt_descent(cloud: &PointCloud, t0: &Tour, p: f64) -> Result<TourSolution> {
    check(cloud, t0, p)?;
    let n = cloud.len();
    let mut order = t0.order().to_vec();
    if n >= 4 {
        let w = pmatrix(cloud, p);
        let wt = |u: usize, v: usize| w[u * n + v];
        loop {
            let mut improved = false;
            for a in 0..n - 2 {
                for b in a + 2..n {
                    if a == 0 && b == n - 1 {
                        continue;
                    }
                    let (ta, ta1, tb, tb1) = (order[a], order[a + 1], order[b], order[(b + 1) % n]);
                    let delta = wt(ta, tb) + wt(ta1, tb1) - wt(ta, ta1) - wt(tb, tb1);
                    if delta < -MOVE_EPS {
                        apply_two_opt(&mut order, a, b);
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    let tour = Tour(canonical(order));
    let cost = order_cost(cloud, tour.order(), p);
    Ok(TourSolution {
        tour,
        cost,
        p,
        two_opt_stable: true,
    })
}

/// Exact optimum by dynamic programming over vertex subsets, O(n^2 2^n).
pub fn held_karp(cloud: &PointCloud, p: f64) -> Result<TourSolution> {
    let n = cloud.len();
    if n < 3 {
        return Err(invalid(format!("a tour needs at least 3 vertices, got {n}")));
    }
    if n > HELD_KARP_MAX_N {
        return Err(Error::TooLarge {
            what: "Held-Karp",
            n,
            max: HELD_KARP_MAX_N,
        });
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("exponent {p} must be a finite real >= 1")));
    }
    let w = pmatrix(cloud, p);
    // Subsets of vertices 1..n as bitmasks over n - 1 bits; dp[mask][v] is the
    // cheapest path from 0 through `mask` ending at `v` (v in mask).
    let m = n - 1;
    let full = 1usize << m;
    let mut dp = vec![f64::INFINITY; full * m];
    let mut parent = vec![usize::MAX; full * m];
    for v in 0..m {
        dp[(1 << v) * m + v] = w[v + 1];
    }
    for mask in 1..full {
        for v in 0..m {
            let cur = dp[mask * m + v];
            if mask & (1 << v) == 0 || cur.is_infinite() {
                continue;
            }
            for u in 0..m {
                if mask & (1 << u) != 0 {
                    continue;
                }
                let next = mask | (1 << u);
                let cand = cur + w[(v + 1) * n + u + 1];
                if cand < dp[next * m + u] {
                    dp[next * m + u] = cand;
                    parent[next * m + u] = v;
                }
            }
        }
    }
    let last_mask = full - 1;
    let last = (0..m)
        .min_by(|&a, &b| {
            (dp[last_mask * m + a] + w[(a + 1) * n]).total_cmp(&(dp[last_mask * m + b] + w[(b + 1) * n]))
        })
        .unwrap();
    let mut order = Vec::with_capacity(n);
    let (mut mask, mut v) = (last_mask, last);
    while v != usize::MAX {
        order.push(v + 1);
        let pv = parent[mask * m + v];
        mask &= !(1 << v);
        v = pv;
    }
    order.push(0);
    order.reverse();
    let tour = Tour(canonical(order));
    let cost = order_cost(cloud, tour.order(), p);
    let two_opt_stable = n < 4 || verify_tour_two_opt(cloud, &tour, p)?.is_empty();
    Ok(TourSolution {
        tour,
        cost,
        p,
        two_opt_stable,
    })
}

/// A pair of tour positions whose 2-opt reconnection is cheaper.
#[derive(Clone, Debug, PartialEq)]
pub struct TourSwapViolation {
    pub a: usize,
    pub b: usize,
    pub deficit: f64,
}

/// Checks `|x_a - x_{a+1}|^p + |x_b - x_{b+1}|^p <= |x_a - x_b|^p + |x_{a+1} - x_{b+1}|^p`
/// on every pair of non-adjacent tour edges (positions in the canonical order).
pub fn verify_tour_two_opt(cloud: &PointCloud, t: &Tour, p: f64) -> Result<Vec<TourSwapViolation>> {
    check(cloud, t, p)?;
    let n = t.len();
    let o = t.order();
    let w = |u: usize, v: usize| pdist_unchecked(cloud.point(u), cloud.point(v), p);
    let mut out = Vec::new();
    if n < 4 {
        return Ok(out);
    }
    for a in 0..n - 2 {
        for b in a + 2..n {
            if a == 0 && b == n - 1 {
                continue;
            }
            let (ta, ta1, tb, tb1) = (o[a], o[a + 1], o[b], o[(b + 1) % n]);
            let lhs = w(ta, ta1) + w(tb, tb1);
            let rhs = w(ta, tb) + w(ta1, tb1);
            if lhs > rhs + 1e-9 * (1.0 + lhs) {
                out.push(TourSwapViolation {
                    a,
                    b,
                    deficit: lhs - rhs,
                });
            }
        }
    }
    Ok(out)
}

/// Local edge-to-energy check on a 2-opt stable tour.
///
/// Each vertex in the ball `B_e` around the midpoint of edge `e` contributes
/// its successor edge. The summed form is checked against
/// `2 C sum |successor edge|^p` (edges may be counted from both endpoints);
/// the per-pair form `|e|^p <= C |successor edge|^p` is checked for every
/// vertex in the ball. `C` is [`EdgeEnergyConstants::c_cycle`].
pub fn verify_tsp_edge_energy(
    cloud: &PointCloud,
    t: &Tour,
    p: f64,
    consts: &EdgeEnergyConstants,
) -> Result<EdgeEnergyReport> {
    check(cloud, t, p)?;
    if !(p > 1.0) {
        return Err(invalid(format!("edge-energy check needs p > 1, got {p}")));
    }
    let unstable = verify_tour_two_opt(cloud, t, p)?;
    if !unstable.is_empty() {
        return Err(Error::NotTwoOptStable {
            violations: unstable.len(),
        });
    }
    let n = t.len();
    let o = t.order();
    let succ_energy: Vec<f64> = (0..n)
        .map(|k| pdist_unchecked(cloud.point(o[k]), cloud.point(o[(k + 1) % n]), p))
        .collect();
    let c = consts.c_cycle();
    let mut entries = Vec::with_capacity(n);
    let mut violations = Vec::new();
    for a in 0..n {
        let (u, v) = (cloud.point(o[a]), cloud.point(o[(a + 1) % n]));
        let ball = Ball::at_midpoint(u, v, consts.ball_radius(dist(u, v)));
        let inside: Vec<usize> = (0..n).filter(|&b| ball.contains(cloud.point(o[b]))).collect();
        let lhs_edge = succ_energy[a];
        for &b in &inside {
            let rhs = c * succ_energy[b];
            if !pair_holds(lhs_edge, rhs) {
                violations.push(PairViolation {
                    edge: a,
                    partner: b,
                    lhs: lhs_edge,
                    rhs,
                });
            }
        }
        entries.push(EdgeEnergyEntry {
            edge: a,
            count: inside.len(),
            lhs: inside.len() as f64 * lhs_edge,
            rhs: 2.0 * c * inside.iter().map(|&b| succ_energy[b]).sum::<f64>(),
            ball,
        });
    }
    Ok(EdgeEnergyReport::from_entries(entries, violations))
}

pub fn max_tour_edge(cloud: &PointCloud, t: &Tour) -> Result<f64> {
    check(cloud, t, 1.0)?;
    Ok(t.edges()
        .map(|(u, v)| dist(cloud.point(u), cloud.point(v)))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PointCloud {
        PointCloud::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn canonical_form() {
        let t = Tour::new(vec![2, 3, 0, 1]).unwrap();
        assert_eq!(t.order(), &[0, 1, 2, 3]);
        let t = Tour::new(vec![3, 2, 1, 0]).unwrap();
        assert_eq!(t.order(), &[0, 1, 2, 3]);
        assert!(Tour::new(vec![0, 1]).is_err());
        assert!(Tour::new(vec![0, 1, 1]).is_err());
    }

    #[test]
    fn square_costs() {
        let c = square();
        let perimeter = Tour::new(vec![0, 1, 2, 3]).unwrap();
        assert!((tour_cost(&c, &perimeter, 1.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((tour_cost(&c, &perimeter, 2.0).unwrap() - 4.0).abs() < 1e-12);
        let coincident = PointCloud::from_flat(2, vec![0.5; 8]).unwrap();
        assert_eq!(tour_cost(&coincident, &perimeter, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn nearest_neighbor_on_a_line() {
        let c = PointCloud::from_flat(1, vec![0.0, 0.1, 0.2, 0.9]).unwrap();
        let t = nearest_neighbor_tour(&c, 0).unwrap();
        assert_eq!(t.order(), &[0, 1, 2, 3]);
        let tri = PointCloud::from_flat(1, vec![0.3, 0.1, 0.8]).unwrap();
        assert_eq!(nearest_neighbor_tour(&tri, 2).unwrap().order(), &[0, 1, 2]);
    }

    #[test]
    fn nearest_neighbor_tie_prefers_smaller_index() {
        // From 0.5, vertices 1 (0.4) and 2 (0.6) are equidistant.
        let c = PointCloud::from_flat(1, vec![0.5, 0.25, 0.75, 0.0]).unwrap();
        let t = nearest_neighbor_tour(&c, 0).unwrap();
        // 0 -> 1 -> 3 -> 2 in visiting order.
        assert_eq!(t.order(), &[0, 1, 3, 2]);
    }

    #[test]
    fn descent_uncrosses_the_square() {
        let c = square();
        let crossed = Tour::new(vec![0, 2, 1, 3]).unwrap();
        let before = tour_cost(&c, &crossed, 1.0).unwrap();
        assert!((before - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(!verify_tour_two_opt(&c, &crossed, 1.0).unwrap().is_empty());
        let sol = two_opt_descent(&c, &crossed, 1.0).unwrap();
        assert!((sol.cost - 4.0).abs() < 1e-12);
        assert_eq!(sol.tour.order(), &[0, 1, 2, 3]);
        let again = two_opt_descent(&c, &sol.tour, 1.0).unwrap();
        assert_eq!(again.tour, sol.tour);
    }

    #[test]
    fn held_karp_square_and_triangle() {
        let sol = held_karp(&square(), 1.0).unwrap();
        assert!((sol.cost - 4.0).abs() < 1e-12);
        assert!(sol.two_opt_stable);
        let tri = PointCloud::from_flat(1, vec![0.3, 0.1, 0.8]).unwrap();
        let sol = held_karp(&tri, 2.0).unwrap();
        assert_eq!(sol.tour.order(), &[0, 1, 2]);
        let big = PointCloud::from_flat(1, vec![0.5; 17]).unwrap();
        assert!(matches!(held_karp(&big, 1.0), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn max_edge_examples() {
        let c = square();
        let perimeter = Tour::new(vec![0, 1, 2, 3]).unwrap();
        let crossed = Tour::new(vec![0, 2, 1, 3]).unwrap();
        assert!((max_tour_edge(&c, &perimeter).unwrap() - 1.0).abs() < 1e-12);
        assert!((max_tour_edge(&c, &crossed).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let coincident = PointCloud::from_flat(2, vec![0.5; 8]).unwrap();
        assert_eq!(max_tour_edge(&coincident, &perimeter).unwrap(), 0.0);
    }

    #[test]
    fn reverse_cyclic_wraps() {
        let mut v = vec![0, 1, 2, 3, 4, 5];
        reverse_cyclic(&mut v, 4, 1);
        assert_eq!(v, vec![5, 4, 2, 3, 1, 0]);
    }

    #[test]
    fn edge_energy_rejects_crossed_tour() {
        let k = crate::energy::edge_energy_constants(2.0).unwrap();
        let crossed = Tour::new(vec![0, 2, 1, 3]).unwrap();
        assert!(verify_tsp_edge_energy(&square(), &crossed, 2.0, &k).is_err());
    }

    #[test]
    fn tour_text_round_trip() {
        let t = Tour::new(vec![0, 3, 1, 2]).unwrap();
        assert_eq!(Tour::from_text(&t.to_text()).unwrap(), t);
    }
}
