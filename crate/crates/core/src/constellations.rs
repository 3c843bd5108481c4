//! Dilated translates `delta * C + shift` of a finite planar pattern that lie
//! close to a planar integer set.
//!
//! Distances use the sup norm, so everything stays in integers. The density
//! diagnostic counts points by Euclidean radius.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::ap_core::RationalExponent;
use crate::error::{invalid, Error, Result};

pub type Point = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern2D {
    points: Vec<Point>,
}

impl Pattern2D {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return invalid("pattern must have at least one point");
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid("pattern has duplicate points");
        }
        Ok(Pattern2D { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    fn bbox(&self) -> (Point, Point) {
        let xs = self.points.iter().map(|p| p.0);
        let ys = self.points.iter().map(|p| p.1);
        ((xs.clone().min().unwrap(), ys.clone().min().unwrap()), (xs.max().unwrap(), ys.max().unwrap()))
    }

    pub fn placed(&self, delta: i64, shift: Point) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().map(move |&(x, y)| (delta * x + shift.0, delta * y + shift.1))
    }
}

impl FromStr for Pattern2D {
    type Err = Error;

    /// `"0,0;1,0;0,1"`
    fn from_str(s: &str) -> Result<Self> {
        let points = s
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(|p| parse_point(p).ok_or_else(|| Error::InvalidArgument(format!("bad pattern point `{p}`"))))
            .collect::<Result<Vec<_>>>()?;
        Pattern2D::new(points)
    }
}

fn parse_point(s: &str) -> Option<Point> {
    let mut it = s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty());
    let x = it.next()?.parse().ok()?;
    let y = it.next()?.parse().ok()?;
    it.next().is_none().then_some((x, y))
}

/// Sorted, deduplicated planar set with a bucket grid for sup-norm
/// nearest-neighbour queries.
#[derive(Debug, Clone)]
pub struct PlanarSet {
    points: Vec<Point>,
    bucket: i64,
    grid: HashMap<Point, Vec<Point>>,
    /// bucket-index bounding box
    span: (Point, Point),
}

impl PlanarSet {
    pub fn new(mut points: Vec<Point>) -> Self {
        points.sort_unstable();
        points.dedup();
        let bucket = Self::bucket_size(&points);
        let mut grid: HashMap<Point, Vec<Point>> = HashMap::new();
        for &p in &points {
            grid.entry((p.0.div_euclid(bucket), p.1.div_euclid(bucket))).or_default().push(p);
        }
        let span = grid.keys().fold(((i64::MAX, i64::MAX), (i64::MIN, i64::MIN)), |(lo, hi), k| {
            ((lo.0.min(k.0), lo.1.min(k.1)), (hi.0.max(k.0), hi.1.max(k.1)))
        });
        PlanarSet { points, bucket, grid, span }
    }

    /// Roughly one point per bucket on average.
    fn bucket_size(points: &[Point]) -> i64 {
        if points.len() < 2 {
            return 1;
        }
        let (minx, maxx) = points.iter().fold((i64::MAX, i64::MIN), |a, p| (a.0.min(p.0), a.1.max(p.0)));
        let (miny, maxy) = points.iter().fold((i64::MAX, i64::MIN), |a, p| (a.0.min(p.1), a.1.max(p.1)));
        let area = ((maxx - minx + 1) as f64) * ((maxy - miny + 1) as f64);
        ((area / points.len() as f64).sqrt().ceil() as i64).max(1)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// Sup-norm distance from `q` to the nearest point.
    pub fn nearest(&self, q: Point) -> Option<u64> {
        if self.points.is_empty() {
            return None;
        }
        let b = (q.0.div_euclid(self.bucket), q.1.div_euclid(self.bucket));
        let (lo, hi) = self.span;
        // rings beyond this radius hold no buckets
        let max_ring = [b.0 - lo.0, hi.0 - b.0, b.1 - lo.1, hi.1 - b.1].into_iter().max().unwrap().max(0);
        let dist = |p: &Point| (p.0 - q.0).unsigned_abs().max((p.1 - q.1).unsigned_abs());
        // past this many bucket probes a linear scan is cheaper
        let probe_budget = 4 * self.points.len() as i64 + 16;
        let limit = max_ring.min(((probe_budget as f64).sqrt() as i64 - 1) / 2);
        self.rings(q, b, limit).or_else(|| self.points.iter().map(dist).min())
    }

    /// Ring-by-ring bucket search; `None` if no ring up to `limit` settles it.
    fn rings(&self, q: Point, b: Point, limit: i64) -> Option<u64> {
        let mut best: Option<u64> = None;
        for r in 0..=limit {
            for key in ring(b, r) {
                if let Some(pts) = self.grid.get(&key) {
                    for p in pts {
                        let d = (p.0 - q.0).unsigned_abs().max((p.1 - q.1).unsigned_abs());
                        best = Some(best.map_or(d, |b| b.min(d)));
                    }
                }
            }
            // anything in ring r+1 or beyond is more than r*bucket away
            if best.is_some_and(|d| d <= (r * self.bucket) as u64) {
                return best;
            }
        }
        None
    }

    /// Points with `x^2 + y^2 <= n^2`.
    pub fn count_within_radius(&self, n: u64) -> usize {
        let r2 = n as i128 * n as i128;
        self.points.iter().filter(|p| (p.0 as i128).pow(2) + (p.1 as i128).pow(2) <= r2).count()
    }
}

fn ring(c: Point, r: i64) -> Box<dyn Iterator<Item = Point>> {
    if r == 0 {
        return Box::new(std::iter::once(c));
    }
    let top_bottom = (-r..=r).flat_map(move |dx| [(c.0 + dx, c.1 - r), (c.0 + dx, c.1 + r)]);
    let sides = (-r + 1..r).flat_map(move |dy| [(c.0 - r, c.1 + dy), (c.0 + r, c.1 + dy)]);
    Box::new(top_bottom.chain(sides))
}

/// Reads `x,y` (or whitespace-separated) pairs, one per line.
pub fn load_planar(path: &Path) -> Result<PlanarSet> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let p =
            parse_point(line).ok_or_else(|| Error::Parse { line: i + 1, message: format!("`{line}` is not x,y") })?;
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::EmptySet(format!("{} contains no points", path.display())));
    }
    Ok(PlanarSet::new(points))
}

fn empty_err() -> Error {
    Error::EmptySet("planar set is empty".into())
}

/// `max_{p in delta*C + shift} min_{a in A} |p - a|_inf`.
pub fn constellation_distance(pattern: &Pattern2D, delta: i64, shift: Point, set: &PlanarSet) -> Result<u64> {
    if delta < 1 {
        return invalid(format!("delta must be >= 1, got {delta}"));
    }
    capped_distance(pattern, delta, shift, set, u64::MAX).map(|d| d.expect("uncapped"))
}

fn capped_distance(pattern: &Pattern2D, delta: i64, shift: Point, set: &PlanarSet, cap: u64) -> Result<Option<u64>> {
    let mut worst = 0;
    for p in pattern.placed(delta, shift) {
        let d = set.nearest(p).ok_or_else(empty_err)?;
        if d > cap {
            return Ok(None);
        }
        worst = worst.max(d);
    }
    Ok(Some(worst))
}

/// Inclusive axis-aligned box `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Window {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Self> {
        if x0 > x1 || y0 > y1 {
            return invalid("window corners must satisfy x0 <= x1 and y0 <= y1");
        }
        Ok(Window { x0, y0, x1, y1 })
    }
}

impl FromStr for Window {
    type Err = Error;

    /// `"x0,y0,x1,y1"`
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("bad window `{s}`")))?;
        match v[..] {
            [x0, y0, x1, y1] => Window::new(x0, y0, x1, y1),
            _ => invalid(format!("window needs four integers, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstellationMatch {
    pub delta: i64,
    pub shift: Point,
    pub distance: u64,
}

/// Scans `delta` downward from the largest dilation whose image fits in the
/// window to `delta_0`. For each `delta` the shifts keeping the image in the
/// window are visited on a grid of stride `max(1, floor(delta^alpha))`, in
/// lexicographic order, and the first shift with distance
/// `<= floor(delta^alpha)` is returned. The stride grid finds every placement
/// whose distance is at most half the bound; tighter placements may be missed.
pub fn search_constellation(
    set: &PlanarSet,
    pattern: &Pattern2D,
    alpha: RationalExponent,
    delta_0: i64,
    window: Window,
) -> Result<Option<ConstellationMatch>> {
    if delta_0 < 1 {
        return invalid(format!("delta_0 must be >= 1, got {delta_0}"));
    }
    if set.is_empty() {
        return Err(empty_err());
    }
    let ((cx0, cy0), (cx1, cy1)) = pattern.bbox();
    let (ex, ey) = (cx1 - cx0, cy1 - cy0);
    let (w, h) = (window.x1 - window.x0, window.y1 - window.y0);
    let delta_max = match (ex, ey) {
        (0, 0) => w.max(h).max(delta_0),
        (0, ey) => h / ey,
        (ex, 0) => w / ex,
        (ex, ey) => (w / ex).min(h / ey),
    };
    for delta in (delta_0..=delta_max).rev() {
        let bound = alpha.floor_power(&BigUint::from(delta as u64)).to_u64().unwrap_or(u64::MAX);
        let stride = bound.max(1) as usize;
        let xs: Vec<i64> = (window.x0 - delta * cx0..=window.x1 - delta * cx1).step_by(stride).collect();
        let ys: Vec<i64> = (window.y0 - delta * cy0..=window.y1 - delta * cy1).step_by(stride).collect();
        let found = xs.par_iter().find_map_first(|&tx| {
            ys.iter().find_map(|&ty| match capped_distance(pattern, delta, (tx, ty), set, bound) {
                Ok(Some(d)) => Some(ConstellationMatch { delta, shift: (tx, ty), distance: d }),
                _ => None,
            })
        });
        if let Some(m) = found {
            let check = constellation_distance(pattern, delta, m.shift, set)?;
            if check != m.distance || !alpha.power_bounds(&BigUint::from(check), &BigUint::from(delta as u64)) {
                return Err(Error::Internal(format!("constellation match at delta {delta} failed re-verification")));
            }
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Planar analogue of the power-log density test, with Euclidean radius:
/// returns `(count, n^2 / (ln n)^gamma)`.
pub fn planar_density(set: &PlanarSet, n: u64, gamma: f64) -> Result<(usize, f64)> {
    if n < 2 {
        return invalid("planar density needs n >= 2");
    }
    let ln_n = (n as f64).ln();
    Ok((set.count_within_radius(n), (n as f64).powi(2) / ln_n.powf(gamma)))
}
