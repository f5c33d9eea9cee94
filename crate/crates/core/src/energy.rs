//! Constants and reports for the local edge-to-energy inequality
//!
//! ```text
//! N_B |e|^p <= C * sum of p-energies of the partner edges of points in B
//! ```
//!
//! where `B` is the closed ball of radius `eps |e|` around the midpoint of `e`.
//!
//! For a point `w` in `B` and an edge `e = (a, b)` of length `L`, both
//! `|a - w|` and `|b - w|` are at most `(1/2 + eps) L`. Combined with a 2-opt
//! inequality and `(s + t)^p <= (1 + eta) s^p + C_eta t^p`, this gives
//! `L^p margin <= (C_eta - 1) l^p` with
//! `margin = 1 - (2 + eta) (1/2 + eps)^p`.

use crate::error::{invalid, Result};
use crate::geometry::Ball;

/// Smallest admissible margin.
const MARGIN_TARGET: f64 = 0.1;
/// Search grids: `eta = 2^-k` for k in 1..=40 and `eps = 2^-k / 4` for k in 0..=40.
const GRID_DEPTH: i32 = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeEnergyConstants {
    pub p: f64,
    pub epsilon: f64,
    pub eta: f64,
    /// Constant of the per-pair inequality `|e|^p <= c_pair |f|^p`.
    pub c_pair: f64,
    /// `1 - (2 + eta) (1/2 + eps)^p`.
    pub margin: f64,
}

/// `C_{eta,p} = (1 - (1 + eta)^{-1/(p-1)})^{1-p}`: the sharp constant in
/// `(s + t)^p <= (1 + eta) s^p + C t^p`.
pub fn split_constant(eta: f64, p: f64) -> f64 {
    let t = (1.0 + eta).powf(-1.0 / (p - 1.0));
    (1.0 - t).powf(1.0 - p)
}

pub fn margin(eta: f64, epsilon: f64, p: f64) -> f64 {
    1.0 - (2.0 + eta) * (0.5 + epsilon).powf(p)
}

/// Grid-searched admissible `(eps, eta, C)` for exponent `p > 1`.
///
/// `eta` is the largest `2^-k` leaving `1 - (2 + eta) 2^-p >= 2 m`, then `eps`
/// is the largest `2^-k / 4` with `margin >= m`, where
/// `m = min(0.1, (1 - 2^{1-p}) / 4)`. The target only drops below 0.1 for
/// `p < ~1.74`, where `1 - 2^{1-p}` bounds every achievable margin.
pub fn edge_energy_constants(p: f64) -> Result<EdgeEnergyConstants> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid(format!("edge-energy constants need p > 1, got {p}")));
    }
    let ceiling = 1.0 - 2f64.powf(1.0 - p);
    let target = MARGIN_TARGET.min(ceiling / 4.0);

    let eta = (1..=GRID_DEPTH)
        .map(|k| 2f64.powi(-k))
        .find(|&eta| margin(eta, 0.0, p) >= 2.0 * target)
        .ok_or_else(|| invalid(format!("no admissible eta on the search grid for p = {p}")))?;
    let epsilon = (0..=GRID_DEPTH)
        .map(|k| 2f64.powi(-k) / 4.0)
        .find(|&eps| margin(eta, eps, p) >= target)
        .ok_or_else(|| invalid(format!("no admissible epsilon on the search grid for p = {p}")))?;

    let margin = margin(eta, epsilon, p);
    let c_pair = (split_constant(eta, p) - 1.0) / margin;
    Ok(EdgeEnergyConstants {
        p,
        epsilon,
        eta,
        c_pair,
        margin,
    })
}

impl EdgeEnergyConstants {
    /// Constant for cycles, where the partner edge of a point in the ball may
    /// share a vertex with `e`. Then no 2-opt move exists, but the partner is
    /// at least `(1/2 - eps) |e|` long.
    pub fn c_cycle(&self) -> f64 {
        self.c_pair.max((0.5 - self.epsilon).powf(-self.p))
    }

    pub fn ball_radius(&self, edge_len: f64) -> f64 {
        self.epsilon * edge_len
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeEnergyEntry {
    pub edge: usize,
    pub ball: Ball,
    pub count: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl EdgeEnergyEntry {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.slack() >= -1e-9 * (1.0 + self.lhs.abs())
    }
}

/// A per-pair inequality `|e|^p <= C |f|^p` that failed.
#[derive(Clone, Debug, PartialEq)]
pub struct PairViolation {
    pub edge: usize,
    pub partner: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeEnergyReport {
    pub holds: bool,
    /// Minimum over edges of `rhs - lhs`.
    pub worst_slack: f64,
    pub per_edge: Vec<EdgeEnergyEntry>,
    pub pair_violations: Vec<PairViolation>,
}

impl EdgeEnergyReport {
    pub(crate) fn from_entries(per_edge: Vec<EdgeEnergyEntry>, pair_violations: Vec<PairViolation>) -> Self {
        let holds = per_edge.iter().all(EdgeEnergyEntry::holds);
        let worst_slack = per_edge
            .iter()
            .map(EdgeEnergyEntry::slack)
            .fold(f64::INFINITY, f64::min);
        Self {
            holds,
            worst_slack,
            per_edge,
            pair_violations,
        }
    }

    pub fn pairs_hold(&self) -> bool {
        self.pair_violations.is_empty()
    }
}

pub(crate) fn pair_holds(lhs: f64, rhs: f64) -> bool {
    rhs - lhs >= -1e-9 * (1.0 + lhs.abs())
}
