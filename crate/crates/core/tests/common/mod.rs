//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use eucopt::geometry::{PointCloud, SeedSpec};

/// `|a - b|^p` straight from the definition.
pub fn pd(a: &[f64], b: &[f64], p: f64) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt().powf(p)
}

/// Calls `f` on every permutation of `0..n` (recursive swap enumeration).
pub fn for_each_perm(n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(k: usize, v: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            rec(k + 1, v, f);
            v.swap(k, i);
        }
    }
    let mut v: Vec<usize> = (0..n).collect();
    rec(0, &mut v, f);
}

/// Minimum bipartite matching cost by enumerating all `n!` permutations.
pub fn matching_min(x: &PointCloud, y: &PointCloud, p: f64) -> f64 {
    let mut best = f64::INFINITY;
    for_each_perm(x.len(), &mut |s| {
        let c: f64 = s.iter().enumerate().map(|(i, &j)| pd(x.point(i), y.point(j), p)).sum();
        best = best.min(c);
    });
    best
}

/// Minimum tour cost by enumerating every order with vertex 0 first.
pub fn tour_min(c: &PointCloud, p: f64) -> f64 {
    let n = c.len();
    let mut best = f64::INFINITY;
    for_each_perm(n - 1, &mut |s| {
        let mut cost = pd(c.point(0), c.point(s[0] + 1), p) + pd(c.point(s[n - 2] + 1), c.point(0), p);
        for w in s.windows(2) {
            cost += pd(c.point(w[0] + 1), c.point(w[1] + 1), p);
        }
        best = best.min(cost);
    });
    best
}

/// Minimum alternating cycle cost: X order fixed up to rotation, every Y order.
pub fn alternating_min(x: &PointCloud, y: &PointCloud, p: f64) -> f64 {
    let n = x.len();
    let mut best = f64::INFINITY;
    for_each_perm(n - 1, &mut |xs_tail| {
        let xs: Vec<usize> = std::iter::once(0).chain(xs_tail.iter().map(|i| i + 1)).collect();
        for_each_perm(n, &mut |ys| {
            let mut cost = 0.0;
            for k in 0..n {
                cost += pd(x.point(xs[k]), y.point(ys[k]), p);
                cost += pd(y.point(ys[k]), x.point(xs[(k + 1) % n]), p);
            }
            best = best.min(cost);
        });
    });
    best
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

pub fn pair(n: usize, d: usize, seed: u64, stream: u64) -> (PointCloud, PointCloud) {
    eucopt::geometry::sample_uniform_pair(n, d, SeedSpec::new(seed, stream)).unwrap()
}

pub fn cloud(n: usize, d: usize, seed: u64, stream: u64) -> PointCloud {
    eucopt::geometry::sample_uniform_cloud(n, d, SeedSpec::new(seed, stream)).unwrap()
}
