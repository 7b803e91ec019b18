//! Voronoi partition of the map rectangle and its conversion into a
//! roadmap whose edges are the cell boundaries.
//!
//! Each cell is cut directly as the intersection of the map rectangle
//! with the half-planes closer to its generator than to every other
//! generator, so clipping to the bounds happens for free and cells are
//! always closed convex polygons. Quadratic in the generator count, which
//! is fine at the few-hundred scale this crate targets.

use crate::error::{Error, Result};
use crate::geom::{Point, Rect};
use crate::math;
use crate::rng::seeded_rng;
use crate::roadmap::Roadmap;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use rand::Rng;

/// Vertices from different cell polygons closer than this are merged
/// into one roadmap vertex.
const SNAP_EPS: f64 = 1e-7;
/// Spatial hash pitch for vertex merging; must exceed `SNAP_EPS`.
const QUANT: f64 = 1e-6;

/// Generator points for a Voronoi partition, tagged with the seed that
/// placed them.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    points: Vec<Point>,
    seed: u64,
}

impl GeneratorSet {
    /// Wraps explicit generator points (tests, replays). Seed is recorded
    /// as zero.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config(format!("generator set is empty")));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config(format!("generator coordinates must be finite")));
        }
        Ok(GeneratorSet { points, seed: 0 })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Scatters `count` distinct generators uniformly over the bounds.
pub fn place_generators(bounds: &Rect, count: usize, seed: u64) -> Result<GeneratorSet> {
    if count == 0 {
        return Err(Error::Config(format!("generator count must be positive")));
    }
    let mut rng = seeded_rng(seed);
    let mut points: Vec<Point> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut attempts = 0;
        loop {
            let x = rng.random_range(bounds.min().x..bounds.max().x);
            let y = rng.random_range(bounds.min().y..bounds.max().y);
            let p = Point::new(x, y);
            if !points.contains(&p) {
                points.push(p);
                break;
            }
            attempts += 1;
            if attempts > 64 {
                return Err(Error::Construction(format!(
                    "could not place {count} distinct generators"
                )));
            }
        }
    }
    Ok(GeneratorSet { points, seed })
}

/// The partition itself: one closed convex polygon per generator,
/// clipped to the map rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiDiagram {
    generators: Vec<Point>,
    /// Counterclockwise polygons, index-aligned with `generators`.
    cells: Vec<Vec<Point>>,
    bounds: Rect,
}

impl VoronoiDiagram {
    /// Cuts the diagram. Needs at least four generators, all inside the
    /// bounds and not all on one line, so the roadmap that follows has
    /// interior structure to route through.
    pub fn build(generators: &GeneratorSet, bounds: &Rect) -> Result<Self> {
        let pts = generators.points();
        if pts.len() < 4 {
            return Err(Error::Construction(format!(
                "need at least 4 generators, got {}",
                pts.len()
            )));
        }
        for p in pts {
            if !bounds.contains(*p) {
                return Err(Error::Construction(format!(
                    "generator ({}, {}) is outside the bounds",
                    p.x, p.y
                )));
            }
        }
        if collinear(pts, bounds.max_dimension()) {
            return Err(Error::Construction(format!("generators are collinear")));
        }
        let mut cells = Vec::with_capacity(pts.len());
        for (i, g) in pts.iter().enumerate() {
            let mut poly: Vec<Point> = bounds.corners().to_vec();
            for (j, h) in pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                poly = clip_half_plane(&poly, g.midpoint(*h), Point::new(h.x - g.x, h.y - g.y));
                if poly.len() < 3 {
                    return Err(Error::Construction(format!("cell {i} degenerated while clipping")));
                }
            }
            dedup_ring(&mut poly);
            if poly.len() < 3 {
                return Err(Error::Construction(format!("cell {i} degenerated while clipping")));
            }
            cells.push(poly);
        }
        Ok(VoronoiDiagram { generators: pts.to_vec(), cells, bounds: *bounds })
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn cells(&self) -> &[Vec<Point>] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &[Point] {
        &self.cells[i]
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    /// The cell whose polygon contains the point, by geometric membership
    /// (not nearest-generator distance, so tests can pit one against the
    /// other). Boundary points land in the lowest containing index.
    pub fn locate(&self, p: Point) -> Option<usize> {
        self.cells.iter().position(|c| polygon_contains(c, p))
    }

    /// Collapses the cell boundaries into a pruned roadmap: shared
    /// polygon corners become single vertices, shared boundary segments
    /// single edges, each costed by its length.
    pub fn to_roadmap(&self) -> Result<Roadmap> {
        let mut keys: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let mut vertices: Vec<Point> = Vec::new();
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for cell in &self.cells {
            let ids: Vec<usize> =
                cell.iter().map(|p| intern(&mut keys, &mut vertices, *p)).collect();
            for k in 0..ids.len() {
                let a = ids[k];
                let b = ids[(k + 1) % ids.len()];
                if a != b {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
        let weighted: Vec<(usize, usize, f64)> = edges
            .iter()
            .map(|&(a, b)| (a, b, vertices[a].distance(vertices[b])))
            .collect();
        let mut rm = Roadmap::from_parts(vertices, &weighted, self.bounds)?;
        rm.prune()?;
        Ok(rm)
    }
}

/// One-call construction: partition the bounds and extract the roadmap.
pub fn build_voronoi_roadmap(generators: &GeneratorSet, bounds: &Rect) -> Result<Roadmap> {
    VoronoiDiagram::build(generators, bounds)?.to_roadmap()
}

/// Keeps the side of the perpendicular bisector containing the cell's
/// own generator: points p with (p - mid) . dir <= 0.
fn clip_half_plane(poly: &[Point], mid: Point, dir: Point) -> Vec<Point> {
    let f = |p: Point| (p.x - mid.x) * dir.x + (p.y - mid.y) * dir.y;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let cur = poly[k];
        let nxt = poly[(k + 1) % poly.len()];
        let fc = f(cur);
        let fx = f(nxt);
        if fc <= 0.0 {
            out.push(cur);
            if fx > 0.0 {
                out.push(cur.lerp(nxt, fc / (fc - fx)));
            }
        } else if fx <= 0.0 {
            out.push(cur.lerp(nxt, fc / (fc - fx)));
        }
    }
    out
}

/// Drops consecutive near-coincident ring vertices, including the wrap.
fn dedup_ring(poly: &mut Vec<Point>) {
    let mut out: Vec<Point> = Vec::with_capacity(poly.len());
    for p in poly.iter() {
        if out.last().map_or(true, |q| q.distance(*p) > SNAP_EPS) {
            out.push(*p);
        }
    }
    while out.len() > 1 && out[0].distance(*out.last().unwrap()) <= SNAP_EPS {
        out.pop();
    }
    *poly = out;
}

/// Membership in a counterclockwise convex polygon, with a boundary
/// slack of about a nanometer per edge.
fn polygon_contains(poly: &[Point], p: Point) -> bool {
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if cross < -1e-9 * a.distance(b) {
            return false;
        }
    }
    true
}

fn collinear(pts: &[Point], scale: f64) -> bool {
    let eps = 1e-12 * scale * scale;
    let a = pts[0];
    let Some(b) = pts.iter().find(|p| p.distance_sq(a) > eps) else {
        return true; // all effectively coincident
    };
    pts.iter().all(|p| {
        ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)).abs() <= eps
    })
}

/// Returns the vertex index for a polygon corner, merging corners that
/// other cells already contributed at (numerically) the same spot.
fn intern(keys: &mut BTreeMap<(i64, i64), usize>, vertices: &mut Vec<Point>, p: Point) -> usize {
    let kx = quant(p.x);
    let ky = quant(p.y);
    for dx in -1..=1 {
        for dy in -1..=1 {
            if let Some(&i) = keys.get(&(kx + dx, ky + dy)) {
                if vertices[i].distance(p) <= SNAP_EPS {
                    return i;
                }
            }
        }
    }
    let i = vertices.len();
    vertices.push(p);
    keys.entry((kx, ky)).or_insert(i);
    i
}

fn quant(x: f64) -> i64 {
    // Round-to-nearest keeps equal points on one key even as rounding
    // noise crosses multiples of the pitch; the neighbor scan in
    // `intern` covers the rest.
    math::round(x / QUANT) as i64
}
