//! Point clouds in the unit cube, seeded sampling, p-power distances and
//! ball occupancy counts.
//!
//! Sampling is reproducible across platforms and thread schedules: every
//! replicate owns a ChaCha8 stream keyed by `(master_seed, stream)` through a
//! SplitMix64 mix, and coordinates are the top 53 bits of each draw scaled to
//! `[0, 1)`.

use std::fmt::Write as _;
use std::io::BufRead;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

/// `n` points in `[0,1]^d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from a flat row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "coordinate buffer of length {} is not a positive multiple of d = {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(invalid(format!("coordinate {bad} lies outside [0, 1]")));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).unwrap_or(0);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Returns a copy with every coordinate multiplied by `factor`.
    /// Fails if the result leaves the unit cube.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_flat(self.dim, self.coords.iter().map(|c| c * factor).collect())
    }

    /// Plain-text form: a `d n` header, then one line of `d` coordinates per point.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.dim, self.len());
        for p in self.points() {
            let mut first = true;
            for c in p {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{c}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read(text.as_bytes())
    }

    pub fn read(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty cloud file".into(),
        })?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_usize = |s: &str| {
            s.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                msg: format!("bad header field {s:?}: {e}"),
            })
        };
        let (dim, n) = match fields.as_slice() {
            [d, n] => (parse_usize(d)?, parse_usize(n)?),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "header must be \"d n\"".into(),
                })
            }
        };
        let mut coords = Vec::with_capacity(dim * n);
        let mut rows = 0;
        for (line_no, line) in lines {
            let line = line?;
            let before = coords.len();
            for tok in line.split_whitespace() {
                let v = tok.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("bad coordinate {tok:?}: {e}"),
                })?;
                coords.push(v);
            }
            if coords.len() - before != dim {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {dim} coordinates, got {}", coords.len() - before),
                });
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("header announces {n} points, file has {rows}"),
            });
        }
        Self::from_flat(dim, coords)
    }
}

/// Identifies one reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        Self {
            master_seed,
            stream,
        }
    }

    /// The 64-bit seed of this stream: `mix(master + mix(stream ^ GOLDEN))`
    /// with `mix` the SplitMix64 finalizer.
    pub fn derived_seed(&self) -> u64 {
        splitmix64(
            self.master_seed
                .wrapping_add(splitmix64(self.stream ^ 0x9E37_79B9_7F4A_7C15)),
        )
    }

    pub fn rng(&self) -> UniformSource {
        UniformSource {
            rng: ChaCha8Rng::seed_from_u64(self.derived_seed()),
        }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Portable source of uniform `[0,1)` doubles.
pub struct UniformSource {
    rng: ChaCha8Rng,
}

impl UniformSource {
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn cloud(&mut self, n: usize, d: usize) -> Result<PointCloud> {
        if n == 0 || d == 0 {
            return Err(invalid(format!("need n >= 1 and d >= 1, got n = {n}, d = {d}")));
        }
        let coords = (0..n * d).map(|_| self.next_f64()).collect();
        PointCloud::from_flat(d, coords)
    }
}

/// `n` i.i.d. uniform points in `[0,1)^d`.
pub fn sample_uniform_cloud(n: usize, d: usize, seed: SeedSpec) -> Result<PointCloud> {
    seed.rng().cloud(n, d)
}

/// Two independent clouds drawn from one stream, `X` first.
pub fn sample_uniform_pair(n: usize, d: usize, seed: SeedSpec) -> Result<(PointCloud, PointCloud)> {
    let mut src = seed.rng();
    let x = src.cloud(n, d)?;
    let y = src.cloud(n, d)?;
    Ok((x, y))
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `|a - b|^p` without dimension checks; callers guarantee equal lengths.
#[inline]
pub(crate) fn pdist_unchecked(a: &[f64], b: &[f64], p: f64) -> f64 {
    let sq = dist_sq(a, b);
    if p == 2.0 {
        sq
    } else if p == 1.0 {
        sq.sqrt()
    } else {
        sq.sqrt().powf(p)
    }
}

/// Euclidean distance raised to the power `p`.
pub fn pdist(a: &[f64], b: &[f64], p: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if !(p >= 1.0) {
        return Err(invalid(format!("exponent p = {p} must be >= 1")));
    }
    Ok(pdist_unchecked(a, b, p))
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// Closed Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(invalid(format!("ball radius {radius} must be nonnegative")));
        }
        Ok(Self { center, radius })
    }

    /// Ball centred at the midpoint of `a` and `b`.
    pub(crate) fn at_midpoint(a: &[f64], b: &[f64], radius: f64) -> Self {
        Self {
            center: a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect(),
            radius,
        }
    }

    #[inline]
    pub fn contains(&self, z: &[f64]) -> bool {
        dist(z, &self.center) <= self.radius
    }
}

pub fn ball_count(cloud: &PointCloud, ball: &Ball) -> Result<usize> {
    if ball.center.len() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            got: ball.center.len(),
        });
    }
    Ok(count_in_ball(cloud, ball))
}

pub(crate) fn count_in_ball(cloud: &PointCloud, ball: &Ball) -> usize {
    cloud.points().filter(|z| ball.contains(z)).count()
}

/// Discretization of the mesoscopic density event.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityConfig {
    pub alpha: f64,
    pub center_grid_per_axis: usize,
    pub radius_levels: usize,
}

impl DensityConfig {
    pub const DEFAULT_GRID: usize = 4;

    pub fn new(alpha: f64, center_grid_per_axis: usize, radius_levels: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        if center_grid_per_axis == 0 || radius_levels == 0 {
            return Err(invalid("center grid and radius levels must be positive"));
        }
        Ok(Self {
            alpha,
            center_grid_per_axis,
            radius_levels,
        })
    }

    /// Default discretization for a cloud of `n` points in dimension `d`:
    /// a 4-per-axis centre grid and every dyadic radius level up to 1.
    ///
    /// Radii with `r^d > 2` can never satisfy `count >= n r^d / 2`, so levels
    /// past the unit radius are left out.
    pub fn for_cloud(alpha: f64, n: usize, d: usize) -> Result<Self> {
        let r0 = base_radius(alpha, n, d);
        let mut levels = 1;
        while r0 * 2f64.powi(levels as i32) <= 1.0 {
            levels += 1;
        }
        Self::new(alpha, Self::DEFAULT_GRID, levels)
    }

    /// Tested radii `n^{-alpha/d} 2^k`, capped at the cube diameter.
    pub fn radii(&self, n: usize, d: usize) -> Vec<f64> {
        let r0 = base_radius(self.alpha, n, d);
        let cap = (d as f64).sqrt();
        (0..self.radius_levels)
            .map(|k| (r0 * 2f64.powi(k as i32)).min(cap))
            .collect()
    }

    /// Cell-centred grid points `(k + 1/2) / m` along every axis.
    pub fn centers(&self, d: usize) -> Vec<Vec<f64>> {
        let m = self.center_grid_per_axis;
        let total = m.pow(d as u32);
        (0..total)
            .map(|mut idx| {
                (0..d)
                    .map(|_| {
                        let k = idx % m;
                        idx /= m;
                        (k as f64 + 0.5) / m as f64
                    })
                    .collect()
            })
            .collect()
    }
}

fn base_radius(alpha: f64, n: usize, d: usize) -> f64 {
    (n as f64).powf(-alpha / d as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityWitness {
    pub center: Vec<f64>,
    pub radius: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub event_holds: bool,
    /// Minimum over tested balls of `count / (n r^d)`.
    pub worst_ratio: f64,
    pub witness: Option<DensityWitness>,
    pub balls_tested: usize,
}

/// Tests `count(B(x, r)) >= n r^d / 2` on every grid centre and radius level.
pub fn check_density_event(cloud: &PointCloud, cfg: &DensityConfig) -> DensityReport {
    let n = cloud.len();
    let d = cloud.dim();
    let radii = cfg.radii(n, d);
    let mut worst_ratio = f64::INFINITY;
    let mut worst: Option<DensityWitness> = None;
    let mut tested = 0;
    for center in cfg.centers(d) {
        for &radius in &radii {
            let ball = Ball {
                center: center.clone(),
                radius,
            };
            let count = count_in_ball(cloud, &ball);
            let ratio = count as f64 / (n as f64 * radius.powi(d as i32));
            tested += 1;
            if ratio < worst_ratio {
                worst_ratio = ratio;
                worst = Some(DensityWitness {
                    center: center.clone(),
                    radius,
                    count,
                });
            }
        }
    }
    let event_holds = worst_ratio >= 0.5;
    DensityReport {
        event_holds,
        worst_ratio,
        witness: if event_holds { None } else { worst },
        balls_tested: tested,
    }
}
