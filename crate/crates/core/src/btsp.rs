//! Bipartite (alternating) Euclidean TSP with p-costs.
//!
//! A tour is an explicit cyclic sequence of `2n` vertices alternating between
//! the two clouds. Descent moves may reorder the `X` vertices, so the
//! permutation encoding `x_0 -> y_s(0) -> x_1 -> ...` is only an I/O
//! convention (see [`from_sigma`] and [`AlternatingTour::to_sigma`]).
//!
//! Two tour edges can be swapped for an alternating reconnection only when
//! they run in opposite directions, one `x -> y` and one `y -> x`. In
//! sequence positions that means an odd gap `m - k`; the reconnection
//! reverses `s[k+1..=m]`. [`admissible_reconnection`] derives this
//! structurally.

use std::fmt;
use std::fmt::Write as _;

use crate::energy::{pair_holds, EdgeEnergyConstants, EdgeEnergyEntry, EdgeEnergyReport, PairViolation};
use crate::error::{invalid, Error, Result};
use crate::geometry::{dist, dist_sq, pdist_unchecked, Ball, PointCloud};
use crate::matching::next_permutation;
use crate::tsp::{apply_two_opt, MOVE_EPS};

pub const BRUTE_FORCE_MAX_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    X(usize),
    Y(usize),
}

impl Vertex {
    pub fn is_x(self) -> bool {
        matches!(self, Vertex::X(_))
    }

    pub fn index(self) -> usize {
        match self {
            Vertex::X(i) | Vertex::Y(i) => i,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::X(i) => write!(f, "X {i}"),
            Vertex::Y(j) => write!(f, "Y {j}"),
        }
    }
}

/// Alternating Hamiltonian cycle in canonical form: `X 0` first, and the
/// orientation whose second vertex has the smaller `Y` index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlternatingTour {
    seq: Vec<Vertex>,
}

impl AlternatingTour {
    pub fn new(seq: Vec<Vertex>) -> Result<Self> {
        validate(&seq)?;
        Ok(Self {
            seq: canonical(seq),
        })
    }

    /// Number of points per side.
    pub fn n(&self) -> usize {
        self.seq.len() / 2
    }

    pub fn sequence(&self) -> &[Vertex] {
        &self.seq
    }

    /// Cyclic edges `(s_k, s_{k+1})`; even `k` are the `x -> y` edges.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let len = self.seq.len();
        (0..len).map(move |k| (self.seq[k], self.seq[(k + 1) % len]))
    }

    /// Recovers `sigma` when the `X` vertices appear in index order in one of
    /// the two orientations.
    pub fn to_sigma(&self) -> Option<Vec<usize>> {
        let read = |seq: &[Vertex]| -> Option<Vec<usize>> {
            let mut sigma = Vec::with_capacity(seq.len() / 2);
            for (i, pair) in seq.chunks_exact(2).enumerate() {
                if pair[0] != Vertex::X(i) {
                    return None;
                }
                sigma.push(pair[1].index());
            }
            Some(sigma)
        };
        read(&self.seq).or_else(|| {
            // Opposite orientation: X 0, s_{2n-1}, s_{2n-2}, ...
            let mut rev = self.seq.clone();
            rev[1..].reverse();
            read(&rev)
        })
    }

    /// Lines `X i` / `Y j` in cyclic order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.seq {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut seq = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let (side, idx) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| bad(format!("expected \"X i\" or \"Y j\", got {line:?}")))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|e| bad(format!("bad index in {line:?}: {e}")))?;
            seq.push(match side {
                "X" => Vertex::X(idx),
                "Y" => Vertex::Y(idx),
                _ => return Err(bad(format!("unknown side {side:?}"))),
            });
        }
        Self::new(seq)
    }
}

fn validate(seq: &[Vertex]) -> Result<()> {
    let len = seq.len();
    if len < 4 || !len.is_multiple_of(2) {
        return Err(invalid(format!(
            "an alternating tour needs 2n >= 4 vertices, got {len}"
        )));
    }
    let n = len / 2;
    let mut seen_x = vec![false; n];
    let mut seen_y = vec![false; n];
    for (k, v) in seq.iter().enumerate() {
        if v.is_x() == seq[(k + 1) % len].is_x() {
            return Err(invalid(format!("positions {k} and {} do not alternate", (k + 1) % len)));
        }
        let seen = if v.is_x() { &mut seen_x } else { &mut seen_y };
        if v.index() >= n || std::mem::replace(&mut seen[v.index()], true) {
            return Err(invalid(format!("vertex {v} is out of range or repeated")));
        }
    }
    Ok(())
}

fn canonical(mut seq: Vec<Vertex>) -> Vec<Vertex> {
    let start = seq.iter().position(|&v| v == Vertex::X(0)).unwrap();
    seq.rotate_left(start);
    let last = seq.len() - 1;
    if seq[1].index() > seq[last].index() {
        seq[1..].reverse();
    }
    seq
}

/// The cycle `x_0 -> y_s(0) -> x_1 -> y_s(1) -> ... -> x_0`, canonicalized.
pub fn from_sigma(sigma: &[usize]) -> Result<AlternatingTour> {
    crate::matching::Matching::new(sigma.to_vec())?;
    let seq = sigma
        .iter()
        .enumerate()
        .flat_map(|(i, &j)| [Vertex::X(i), Vertex::Y(j)])
        .collect();
    AlternatingTour::new(seq)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BtspSolution {
    pub tour: AlternatingTour,
    pub cost: f64,
    pub p: f64,
    pub stable: bool,
}

fn check(x: &PointCloud, y: &PointCloud, t: Option<&AlternatingTour>, p: f64) -> Result<()> {
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
    if x.len() < 2 {
        return Err(invalid("bipartite tours need n >= 2"));
    }
    if let Some(t) = t {
        if t.n() != x.len() {
            return Err(Error::SizeMismatch {
                left: x.len(),
                right: t.n(),
            });
        }
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("exponent {p} must be a finite real >= 1")));
    }
    Ok(())
}

fn point<'a>(x: &'a PointCloud, y: &'a PointCloud, v: Vertex) -> &'a [f64] {
    match v {
        Vertex::X(i) => x.point(i),
        Vertex::Y(j) => y.point(j),
    }
}

fn edge_p(x: &PointCloud, y: &PointCloud, a: Vertex, b: Vertex, p: f64) -> f64 {
    pdist_unchecked(point(x, y, a), point(x, y, b), p)
}

/// Sum of p-powers over the `2n` cyclic edges.
pub fn btsp_cost(x: &PointCloud, y: &PointCloud, t: &AlternatingTour, p: f64) -> Result<f64> {
    check(x, y, Some(t), p)?;
    Ok(seq_cost(x, y, &t.seq, p))
}

fn seq_cost(x: &PointCloud, y: &PointCloud, seq: &[Vertex], p: f64) -> f64 {
    let len = seq.len();
    (0..len)
        .map(|k| edge_p(x, y, seq[k], seq[(k + 1) % len], p))
        .sum()
}

/// Greedy alternating tour: start at `X 0` and repeatedly step to the nearest
/// unvisited vertex of the other cloud, smaller index on ties.
pub fn nearest_neighbor_alternating(x: &PointCloud, y: &PointCloud) -> Result<AlternatingTour> {
    check(x, y, None, 1.0)?;
    let n = x.len();
    let mut used_x = vec![false; n];
    let mut used_y = vec![false; n];
    let mut seq = Vec::with_capacity(2 * n);
    let mut cur = Vertex::X(0);
    used_x[0] = true;
    seq.push(cur);
    for _ in 1..2 * n {
        let here = point(x, y, cur);
        let (other, used) = if cur.is_x() { (y, &mut used_y) } else { (x, &mut used_x) };
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, _) in used.iter().enumerate().filter(|(_, u)| !**u) {
            let d = dist_sq(here, other.point(j));
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        used[best] = true;
        cur = if cur.is_x() { Vertex::Y(best) } else { Vertex::X(best) };
        seq.push(cur);
    }
    AlternatingTour::new(seq)
}

/// Cached `|x_i - y_j|^p`.
struct CrossWeights {
    n: usize,
    w: Vec<f64>,
}

impl CrossWeights {
    fn new(x: &PointCloud, y: &PointCloud, p: f64) -> Self {
        Self {
            n: x.len(),
            w: crate::matching::cost_matrix(x, y, p),
        }
    }

    #[inline]
    fn get(&self, a: Vertex, b: Vertex) -> f64 {
        match (a, b) {
            (Vertex::X(i), Vertex::Y(j)) | (Vertex::Y(j), Vertex::X(i)) => self.w[i * self.n + j],
            _ => unreachable!("alternating tours only join X to Y"),
        }
    }
}

/// Edge-position pairs `(k, m)`, `k < m`, that admit an alternating 2-opt
/// move: odd gap and not cyclically adjacent.
fn admissible_pairs(len: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..len).flat_map(move |k| {
        (k + 3..len)
            .step_by(2)
            .filter(move |&m| !(k == 0 && m == len - 1))
            .map(move |m| (k, m))
    })
}

/// First-improvement descent over admissible alternating 2-opt moves.
pub fn alternating_two_opt_descent(
    x: &PointCloud,
    y: &PointCloud,
    t0: &AlternatingTour,
    p: f64,
) -> Result<BtspSolution> {
    check(x, y, Some(t0), p)?;
    let w = CrossWeights::new(x, y, p);
    let mut seq = t0.seq.clone();
    let len = seq.len();
    loop {
        let mut improved = false;
        for (k, m) in admissible_pairs(len) {
            let (sk, sk1, sm, sm1) = (seq[k], seq[k + 1], seq[m], seq[(m + 1) % len]);
            let delta = w.get(sk, sm) + w.get(sk1, sm1) - w.get(sk, sk1) - w.get(sm, sm1);
            if delta < -MOVE_EPS {
                apply_two_opt(&mut seq, k, m);
                debug_assert!(validate(&seq).is_ok());
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let tour = AlternatingTour {
        seq: canonical(seq),
    };
    let cost = seq_cost(x, y, &tour.seq, p);
    Ok(BtspSolution {
        tour,
        cost,
        p,
        stable: true,
    })
}

/// Exhaustive minimum over all distinct alternating Hamiltonian cycles.
/// Ties go to the lexicographically smallest canonical sequence.
pub fn brute_force_btsp(x: &PointCloud, y: &PointCloud, p: f64) -> Result<BtspSolution> {
    check(x, y, None, p)?;
    let n = x.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            what: "brute-force bipartite TSP",
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let w = CrossWeights::new(x, y, p);
    let mut xs: Vec<usize> = (1..n).collect();
    let mut best: Option<(f64, Vec<Vertex>)> = None;
    let mut seq = vec![Vertex::X(0); 2 * n];
    loop {
        let mut ys: Vec<usize> = (0..n).collect();
        loop {
            // Each undirected cycle appears once with ys[0] < ys[n-1].
            if ys[0] < ys[n - 1] {
                for i in 0..n {
                    seq[2 * i] = Vertex::X(if i == 0 { 0 } else { xs[i - 1] });
                    seq[2 * i + 1] = Vertex::Y(ys[i]);
                }
                let cost: f64 = (0..2 * n).map(|k| w.get(seq[k], seq[(k + 1) % (2 * n)])).sum();
                let better = match &best {
                    None => true,
                    Some((bc, bs)) => {
                        let tol = 1e-12 * (1.0 + bc.abs());
                        cost < bc - tol || (cost <= bc + tol && seq < *bs)
                    }
                };
                if better {
                    best = Some((cost, seq.clone()));
                }
            }
            if !next_permutation(&mut ys) {
                break;
            }
        }
        if !next_permutation(&mut xs) {
            break;
        }
    }
    let (_, seq) = best.expect("at least one cycle exists for n >= 2");
    let tour = AlternatingTour { seq };
    let cost = seq_cost(x, y, &tour.seq, p);
    let stable = verify_alternating_swap(x, y, &tour, p)?.is_empty();
    Ok(BtspSolution {
        tour,
        cost,
        p,
        stable,
    })
}

/// Tries both ways of reconnecting after removing edges at positions `k < m`
/// and returns the ones that form a single alternating Hamiltonian cycle.
pub fn admissible_reconnection(t: &AlternatingTour, k: usize, m: usize) -> Vec<AlternatingTour> {
    let seq = &t.seq;
    let len = seq.len();
    assert!(k < m && m < len, "edge positions must satisfy k < m < 2n");
    let mut kept: Vec<(Vertex, Vertex)> = (0..len)
        .filter(|&e| e != k && e != m)
        .map(|e| (seq[e], seq[(e + 1) % len]))
        .collect();
    let (a, a1, b, b1) = (seq[k], seq[k + 1], seq[m], seq[(m + 1) % len]);
    let options = [[(a, b), (a1, b1)], [(a, b1), (a1, b)]];
    let mut out = Vec::new();
    for added in options {
        kept.extend_from_slice(&added);
        if let Some(cycle) = single_alternating_cycle(&kept, t.n()) {
            let candidate = AlternatingTour::new(cycle).expect("traversal yields a valid tour");
            if !out.contains(&candidate) {
                out.push(candidate);
            }
        }
        kept.truncate(kept.len() - 2);
    }
    out
}

fn single_alternating_cycle(edges: &[(Vertex, Vertex)], n: usize) -> Option<Vec<Vertex>> {
    let slot = |v: Vertex| if v.is_x() { v.index() } else { n + v.index() };
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); 2 * n];
    for &(u, v) in edges {
        if u.is_x() == v.is_x() || u == v {
            return None;
        }
        adj[slot(u)].push(v);
        adj[slot(v)].push(u);
    }
    if adj.iter().any(|a| a.len() != 2) {
        return None;
    }
    let mut cycle = vec![Vertex::X(0)];
    let mut prev = Vertex::X(0);
    let mut cur = adj[0][0];
    while cur != Vertex::X(0) {
        cycle.push(cur);
        let nb = &adj[slot(cur)];
        let next = if nb[0] != prev { nb[0] } else { nb[1] };
        prev = cur;
        cur = next;
        if cycle.len() > 2 * n {
            return None;
        }
    }
    (cycle.len() == 2 * n).then_some(cycle)
}

/// An admissible reconnection of edges `k` and `m` that lowers the cost.
#[derive(Clone, Debug, PartialEq)]
pub struct AlternatingSwapViolation {
    pub k: usize,
    pub m: usize,
    /// New minus old cost; negative.
    pub delta: f64,
}

/// Evaluates the admissible reconnection of every pair of opposite-direction
/// edges and reports the ones that lower the cost.
pub fn verify_alternating_swap(
    x: &PointCloud,
    y: &PointCloud,
    t: &AlternatingTour,
    p: f64,
) -> Result<Vec<AlternatingSwapViolation>> {
    check(x, y, Some(t), p)?;
    let seq = &t.seq;
    let len = seq.len();
    let w = |a, b| edge_p(x, y, a, b, p);
    let mut out = Vec::new();
    for (k, m) in admissible_pairs(len) {
        let (sk, sk1, sm, sm1) = (seq[k], seq[k + 1], seq[m], seq[(m + 1) % len]);
        let old = w(sk, sk1) + w(sm, sm1);
        let delta = w(sk, sm) + w(sk1, sm1) - old;
        if delta < -1e-9 * (1.0 + old) {
            out.push(AlternatingSwapViolation { k, m, delta });
        }
    }
    Ok(out)
}

/// Local edge-to-energy check on a stable alternating tour.
///
/// Balls sit on the `x -> y` edges and count `X` points only. For `x_j` in
/// the ball of `e = (x_i, y)`, the admissible move pairs `e` with the edge
/// entering `x_j`, so that edge is the one charged on the right-hand side.
/// Per edge: `N_B |e|^p <= C sum_j |y_pred(j) - x_j|^p` with
/// `C = c_cycle`; the per-pair form is checked as well.
pub fn verify_btsp_edge_energy(
    x: &PointCloud,
    y: &PointCloud,
    t: &AlternatingTour,
    p: f64,
    consts: &EdgeEnergyConstants,
) -> Result<EdgeEnergyReport> {
    check(x, y, Some(t), p)?;
    if !(p > 1.0) {
        return Err(invalid(format!("edge-energy check needs p > 1, got {p}")));
    }
    let unstable = verify_alternating_swap(x, y, t, p)?;
    if !unstable.is_empty() {
        return Err(Error::NotTwoOptStable {
            violations: unstable.len(),
        });
    }
    let seq = &t.seq;
    let len = seq.len();
    let n = t.n();
    let mut pos_x = vec![0; n];
    for (k, v) in seq.iter().enumerate() {
        if let Vertex::X(i) = v {
            pos_x[*i] = k;
        }
    }
    // Energy of the edge entering each X vertex.
    let incoming: Vec<f64> = (0..n)
        .map(|j| {
            let k = pos_x[j];
            edge_p(x, y, seq[(k + len - 1) % len], seq[k], p)
        })
        .collect();
    let c = consts.c_cycle();
    let mut entries = Vec::with_capacity(n);
    let mut violations = Vec::new();
    for k in (0..len).step_by(2) {
        let (u, v) = (point(x, y, seq[k]), point(x, y, seq[k + 1]));
        let lhs_edge = pdist_unchecked(u, v, p);
        let ball = Ball::at_midpoint(u, v, consts.ball_radius(dist(u, v)));
        let inside: Vec<usize> = (0..n).filter(|&j| ball.contains(x.point(j))).collect();
        for &j in &inside {
            let rhs = c * incoming[j];
            if !pair_holds(lhs_edge, rhs) {
                violations.push(PairViolation {
                    edge: k,
                    partner: pos_x[j],
                    lhs: lhs_edge,
                    rhs,
                });
            }
        }
        entries.push(EdgeEnergyEntry {
            edge: k,
            count: inside.len(),
            lhs: inside.len() as f64 * lhs_edge,
            rhs: c * inside.iter().map(|&j| incoming[j]).sum::<f64>(),
            ball,
        });
    }
    Ok(EdgeEnergyReport::from_entries(entries, violations))
}

pub fn max_btsp_edge(x: &PointCloud, y: &PointCloud, t: &AlternatingTour) -> Result<f64> {
    check(x, y, Some(t), 1.0)?;
    Ok(t.edges()
        .map(|(a, b)| dist(point(x, y, a), point(x, y, b)))
        .fold(0.0, f64::max))
}
