//! Roadmap graph: waypoint vertices joined by straight traversable edges.
//!
//! The graph is stored densely as a symmetric adjacency matrix plus a
//! matching cost matrix, sized for a few hundred vertices. Vertex order is
//! construction order and never changes except through [`Roadmap::prune`],
//! which compacts it while preserving relative order, so index-based tie
//! breaking stays reproducible.

mod voronoi;

pub use voronoi::{build_voronoi_roadmap, place_generators, GeneratorSet, VoronoiDiagram};

use crate::error::{Error, Result};
use crate::geom::{Point, Rect};
use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Two vertices closer than this are treated as the same waypoint.
pub const COINCIDENT_EPS: f64 = 1e-9;
/// Edges shorter than this are dropped when pruning.
pub const MIN_EDGE_LEN: f64 = 1e-9;

/// A planar graph of waypoints with per-edge traversal costs.
#[derive(Debug, Clone, PartialEq)]
pub struct Roadmap {
    vertices: Vec<Point>,
    /// Row-major `n x n`, symmetric, false on the diagonal.
    adjacency: Vec<bool>,
    /// Row-major `n x n`; meaningful only where `adjacency` is true.
    cost: Vec<f64>,
    bounds: Rect,
    /// Start and end vertex indices once a query is attached.
    endpoints: Option<(usize, usize)>,
}

impl Roadmap {
    /// Builds a roadmap from explicit vertices and weighted edges. Edges
    /// are undirected; listing one twice keeps the last cost. Costs must
    /// be strictly positive and vertices must lie inside the bounds.
    pub fn from_parts(vertices: Vec<Point>, edges: &[(usize, usize, f64)], bounds: Rect) -> Result<Self> {
        let n = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() || !bounds.contains(*v) {
                return Err(Error::Construction(format!(
                    "vertex {i} at ({}, {}) is outside the bounds",
                    v.x, v.y
                )));
            }
        }
        let mut rm = Roadmap {
            vertices,
            adjacency: vec![false; n * n],
            cost: vec![0.0; n * n],
            bounds,
            endpoints: None,
        };
        for &(i, j, c) in edges {
            if i >= n || j >= n {
                return Err(Error::Construction(format!("edge ({i}, {j}) is out of range")));
            }
            if i == j {
                return Err(Error::DegenerateEdge);
            }
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::Construction(format!(
                    "edge ({i}, {j}) has nonpositive cost {c}"
                )));
            }
            rm.adjacency[i * n + j] = true;
            rm.adjacency[j * n + i] = true;
            rm.cost[i * n + j] = c;
            rm.cost[j * n + i] = c;
        }
        Ok(rm)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    pub fn endpoints(&self) -> Option<(usize, usize)> {
        self.endpoints
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.vertices.len() + j]
    }

    /// Cost of edge `(i, j)`; zero where no edge exists.
    pub fn edge_cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.vertices.len() + j]
    }

    /// Overwrites the cost of an existing edge, both directions.
    pub fn set_edge_cost(&mut self, i: usize, j: usize, c: f64) -> Result<()> {
        let n = self.vertices.len();
        if i >= n || j >= n || !self.adjacency[i * n + j] {
            return Err(Error::Construction(format!("no edge ({i}, {j})")));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Construction(format!("edge cost {c} must be positive")));
        }
        self.cost[i * n + j] = c;
        self.cost[j * n + i] = c;
        Ok(())
    }

    /// Every undirected edge once, as `(i, j)` with `i < j`, in index order.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.vertices.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.adjacency[i * n + j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let n = self.vertices.len();
        (0..n).filter(|j| self.adjacency[i * n + j]).collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        let n = self.vertices.len();
        (0..n).filter(|j| self.adjacency[i * n + j]).count()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|a| **a).count() / 2
    }

    /// Attaches start and end to existing vertices; they must be distinct
    /// and connected.
    pub fn with_endpoints(mut self, start: usize, end: usize) -> Result<Self> {
        let n = self.vertices.len();
        if start >= n || end >= n {
            return Err(Error::Construction(format!("endpoint index out of range")));
        }
        if start == end {
            return Err(Error::Construction(format!("start and end coincide")));
        }
        if !self.connected(start, end) {
            return Err(Error::Construction(format!("start and end are not connected")));
        }
        self.endpoints = Some((start, end));
        Ok(self)
    }

    /// Inserts query start and goal positions as vertices, each joined by
    /// straight edges (cost = length) to its `k_connect` nearest of the
    /// pre-insertion vertices. A position within [`COINCIDENT_EPS`] of an
    /// existing vertex reuses that vertex instead.
    pub fn insert_endpoints(&self, start: Point, goal: Point, k_connect: usize) -> Result<Self> {
        let mut rm = self.clone();
        let limit = rm.vertices.len();
        let si = rm.insert_point(start, k_connect, limit)?;
        let gi = rm.insert_point(goal, k_connect, limit)?;
        if si == gi {
            return Err(Error::Construction(format!("start and end coincide")));
        }
        if !rm.connected(si, gi) {
            return Err(Error::Construction(format!("start and end are not connected")));
        }
        rm.endpoints = Some((si, gi));
        Ok(rm)
    }

    /// Re-homes the start of an already-endpointed roadmap to a new
    /// position, for replanning from mid-mission vehicle poses. Returns
    /// the updated roadmap and the new vertex index if one was added (its
    /// connector edges carry length costs and still need scoring).
    pub fn insert_start(&self, pos: Point, k_connect: usize) -> Result<(Self, Option<usize>)> {
        let (_, end) = self
            .endpoints
            .ok_or_else(|| Error::Config(format!("endpoints not set")))?;
        let mut rm = self.clone();
        let before = rm.vertices.len();
        let si = rm.insert_point(pos, k_connect, before)?;
        if si == end {
            return Err(Error::Construction(format!("start and end coincide")));
        }
        if !rm.connected(si, end) {
            return Err(Error::Construction(format!("start and end are not connected")));
        }
        rm.endpoints = Some((si, end));
        Ok((rm, (si >= before).then_some(si)))
    }

    /// Pre-insertion vertex indices sorted by distance to `p`, ties toward
    /// the lower index.
    pub fn nearest_vertices(&self, p: Point, k: usize, limit: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..limit.min(self.vertices.len())).collect();
        idx.sort_by(|a, b| {
            let da = self.vertices[*a].distance_sq(p);
            let db = self.vertices[*b].distance_sq(p);
            da.total_cmp(&db).then(a.cmp(b))
        });
        idx.truncate(k);
        idx
    }

    fn insert_point(&mut self, p: Point, k_connect: usize, limit: usize) -> Result<usize> {
        if !p.is_finite() || !self.bounds.contains(p) {
            return Err(Error::OutOfBounds { x: p.x, y: p.y });
        }
        if let Some(i) = (0..self.vertices.len()).find(|i| self.vertices[*i].distance(p) <= COINCIDENT_EPS)
        {
            return Ok(i);
        }
        if k_connect == 0 || limit == 0 {
            return Err(Error::Construction(format!("no vertices to connect the query point to")));
        }
        let neigh = self.nearest_vertices(p, k_connect, limit);
        let idx = self.push_vertex(p);
        for u in neigh {
            let d = self.vertices[u].distance(p);
            let n = self.vertices.len();
            self.adjacency[idx * n + u] = true;
            self.adjacency[u * n + idx] = true;
            self.cost[idx * n + u] = d;
            self.cost[u * n + idx] = d;
        }
        Ok(idx)
    }

    fn push_vertex(&mut self, p: Point) -> usize {
        let n = self.vertices.len();
        let m = n + 1;
        let mut adjacency = vec![false; m * m];
        let mut cost = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                adjacency[i * m + j] = self.adjacency[i * n + j];
                cost[i * m + j] = self.cost[i * n + j];
            }
        }
        self.adjacency = adjacency;
        self.cost = cost;
        self.vertices.push(p);
        n
    }

    /// True if a path of edges joins `i` and `j`.
    pub fn connected(&self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[i] = true;
        queue.push_back(i);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if self.adjacency[u * n + v] && !seen[v] {
                    if v == j {
                        return true;
                    }
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        false
    }

    /// Cleans the graph in place: drops near-zero-length edges, repeatedly
    /// strips degree-0 and degree-1 vertices (sparing attached endpoints),
    /// then keeps a single connected component (the endpoint component if
    /// endpoints are attached, otherwise the largest, ties toward the
    /// lowest vertex index). Remaining vertices are compacted in order.
    pub fn prune(&mut self) -> Result<()> {
        let n = self.vertices.len();
        for (i, j) in self.edge_pairs() {
            if self.vertices[i].distance(self.vertices[j]) < MIN_EDGE_LEN {
                self.adjacency[i * n + j] = false;
                self.adjacency[j * n + i] = false;
            }
        }
        let spared = |v: usize| match self.endpoints {
            Some((s, e)) => v == s || v == e,
            None => false,
        };
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if !alive[v] || spared(v) {
                    continue;
                }
                let deg = (0..n).filter(|u| alive[*u] && self.adjacency[v * n + u]).count();
                if deg <= 1 {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let keep = self.pick_component(&alive)?;
        let mut remap = vec![usize::MAX; n];
        let mut vertices = Vec::new();
        for v in 0..n {
            if keep[v] {
                remap[v] = vertices.len();
                vertices.push(self.vertices[v]);
            }
        }
        let m = vertices.len();
        if m < 2 {
            return Err(Error::Construction(format!("pruning removed the whole graph")));
        }
        let mut adjacency = vec![false; m * m];
        let mut cost = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                if keep[i] && keep[j] && self.adjacency[i * n + j] {
                    adjacency[remap[i] * m + remap[j]] = true;
                    cost[remap[i] * m + remap[j]] = self.cost[i * n + j];
                }
            }
        }
        self.vertices = vertices;
        self.adjacency = adjacency;
        self.cost = cost;
        if let Some((s, e)) = self.endpoints {
            self.endpoints = Some((remap[s], remap[e]));
        }
        Ok(())
    }

    /// Marks the component to keep among `alive` vertices.
    fn pick_component(&self, alive: &[bool]) -> Result<Vec<bool>> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for root in 0..n {
            if !alive[root] || comp[root] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            let mut queue = VecDeque::new();
            comp[root] = id;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                size += 1;
                for v in 0..n {
                    if alive[v] && self.adjacency[u * n + v] && comp[v] == usize::MAX {
                        comp[v] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        if sizes.is_empty() {
            return Err(Error::Construction(format!("pruning removed the whole graph")));
        }
        let chosen = match self.endpoints {
            Some((s, _)) if alive[s] => comp[s],
            _ => {
                let mut best = 0;
                for (id, sz) in sizes.iter().enumerate() {
                    if *sz > sizes[best] {
                        best = id;
                    }
                }
                best
            }
        };
        Ok((0..n).map(|v| alive[v] && comp[v] == chosen).collect())
    }

    /// Structural sanity: symmetric adjacency, empty diagonal, positive
    /// costs on edges, in-bounds vertices, valid endpoints.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.is_finite() || !self.bounds.contains(*v) {
                return Err(Error::Construction(format!("vertex {i} escaped the bounds")));
            }
        }
        for i in 0..n {
            if self.adjacency[i * n + i] {
                return Err(Error::Construction(format!("self loop at vertex {i}")));
            }
            for j in 0..n {
                if self.adjacency[i * n + j] != self.adjacency[j * n + i] {
                    return Err(Error::Construction(format!("asymmetric adjacency at ({i}, {j})")));
                }
                if self.adjacency[i * n + j] {
                    let c = self.cost[i * n + j];
                    if !(c > 0.0) || !c.is_finite() || c != self.cost[j * n + i] {
                        return Err(Error::Construction(format!("bad cost at ({i}, {j})")));
                    }
                }
            }
        }
        if let Some((s, e)) = self.endpoints {
            if s >= n || e >= n || s == e {
                return Err(Error::Construction(format!("invalid endpoints")));
            }
        }
        Ok(())
    }
}
