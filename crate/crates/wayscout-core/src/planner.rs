//! Shortest-path planning and the diversity penalty that pushes
//! successive routes apart.
//!
//! Routes are planned one at a time. Each committed route deposits a
//! Gaussian cost bump around each of its edge midpoints; the next plan
//! runs on base costs plus the summed bumps, so it drifts away from
//! corridors that are already covered. Penalties are always applied to
//! the clean base costs, never compounded onto already-penalized ones.

use crate::costmap::TwoValueCostmap;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::math;
use crate::roadmap::Roadmap;
use crate::scoring::{score_edge, GainSet};
use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::TAU;

/// Which falloff the Gaussian bump uses in its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentForm {
    /// exp(-d^2 / (2 * sigma_sq)): a proper Gaussian in the normalized
    /// distance. The default.
    Standard,
    /// exp(-d^2 / (2 * sqrt(sigma_sq))): same bell shape but with the
    /// square root of the variance in the denominator.
    Verbatim,
}

/// Shape of the diversity penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    /// Bump amplitude scale; zero disables the penalty entirely.
    pub gamma: f64,
    /// Bump width parameter (a variance in normalized-distance units).
    pub sigma_sq: f64,
    /// Distances are divided by this before entering the exponent.
    /// Typically the longest map dimension, so the bump width is relative
    /// to map size; 1.0 leaves distances in meters.
    pub distance_normalizer: f64,
    pub exponent: ExponentForm,
}

impl PenaltyParams {
    pub fn new(gamma: f64, sigma_sq: f64, distance_normalizer: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::Config(format!("gamma {gamma} must be finite and nonnegative")));
        }
        if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
            return Err(Error::Config(format!("sigma_sq {sigma_sq} must be finite and positive")));
        }
        if !(distance_normalizer > 0.0) || !distance_normalizer.is_finite() {
            return Err(Error::Config(format!(
                "distance_normalizer {distance_normalizer} must be finite and positive"
            )));
        }
        Ok(PenaltyParams { gamma, sigma_sq, distance_normalizer, exponent: ExponentForm::Standard })
    }

    pub fn with_exponent(mut self, exponent: ExponentForm) -> Self {
        self.exponent = exponent;
        self
    }

    /// Penalty contribution at distance zero.
    pub fn peak(&self) -> f64 {
        self.gamma / math::sqrt(TAU * self.sigma_sq)
    }

    /// Penalty contributed by one committed midpoint at `d` meters.
    pub fn penalty(&self, d: f64) -> f64 {
        let dn = d / self.distance_normalizer;
        let denom = match self.exponent {
            ExponentForm::Standard => 2.0 * self.sigma_sq,
            ExponentForm::Verbatim => 2.0 * math::sqrt(self.sigma_sq),
        };
        self.peak() * math::exp(-(dn * dn) / denom)
    }
}

/// One traversed edge of a planned route, with the planning cost split
/// into its base and diversity-penalty parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteEdge {
    pub from: usize,
    pub to: usize,
    pub a: Point,
    pub b: Point,
    pub length: f64,
    /// Cost actually paid during planning (base plus any penalty).
    pub cost: f64,
    /// Cost on the unpenalized roadmap.
    pub base_cost: f64,
}

impl RouteEdge {
    pub fn midpoint(&self) -> Point {
        self.a.midpoint(self.b)
    }

    pub fn penalty(&self) -> f64 {
        self.cost - self.base_cost
    }
}

/// A start-to-end walk over roadmap vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// Vertex indices from start to end.
    pub vertices: Vec<usize>,
    pub edges: Vec<RouteEdge>,
    pub total_cost: f64,
    pub total_base_cost: f64,
    pub total_length: f64,
}

/// A route re-priced against some costmap, split into its three terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteBreakdown {
    /// Total length in meters.
    pub length: f64,
    /// Length-weighted integral of sampled cell means (gain-free).
    pub mu_integral: f64,
    /// Length-weighted integral of sampled cell variances (gain-free).
    pub var_integral: f64,
    /// Total cost under the given gains, floors included.
    pub total: f64,
}

impl Route {
    pub(crate) fn empty() -> Self {
        Route { vertices: Vec::new(), edges: Vec::new(), total_cost: 0.0, total_base_cost: 0.0, total_length: 0.0 }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Geometric corner points from start to end.
    pub fn waypoints(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        if let Some(first) = self.edges.first() {
            out.push(first.a);
        }
        for e in &self.edges {
            out.push(e.b);
        }
        out
    }

    pub fn midpoints(&self) -> Vec<Point> {
        self.edges.iter().map(|e| e.midpoint()).collect()
    }

    pub fn total_penalty(&self) -> f64 {
        self.total_cost - self.total_base_cost
    }

    /// Prices this route's geometry against a costmap, without any
    /// diversity penalty. The mean and variance integrals come back
    /// gain-free so different routes can be compared on equal terms.
    pub fn rescore(&self, map: &TwoValueCostmap, gains: &GainSet) -> Result<RouteBreakdown> {
        let mut out = RouteBreakdown { length: 0.0, mu_integral: 0.0, var_integral: 0.0, total: 0.0 };
        for e in &self.edges {
            let s = score_edge(e.a, e.b, map, gains)?;
            out.length += s.length;
            out.mu_integral += s.length * s.mu_avg;
            out.var_integral += s.length * s.var_avg;
            out.total += s.cost;
        }
        Ok(out)
    }
}

/// Summed penalty from every edge midpoint of every committed route, felt
/// at one point.
fn accumulated_penalty(params: &PenaltyParams, committed: &[Route], at: Point) -> f64 {
    let mut total = 0.0;
    for route in committed {
        for e in &route.edges {
            total += params.penalty(at.distance(e.midpoint()));
        }
    }
    total
}

/// Returns a copy of the roadmap with each edge's cost raised by the
/// committed routes' penalty field, evaluated at the edge midpoint.
/// Always starts from the given (base) costs; with `gamma == 0` or no
/// committed routes the copy is bit-identical.
pub fn penalize_costs(rm: &Roadmap, committed: &[Route], params: &PenaltyParams) -> Result<Roadmap> {
    let mut out = rm.clone();
    if params.gamma == 0.0 || committed.is_empty() {
        return Ok(out);
    }
    for (i, j) in rm.edge_pairs() {
        let mid = rm.vertex(i).midpoint(rm.vertex(j));
        let pen = accumulated_penalty(params, committed, mid);
        if pen > 0.0 {
            out.set_edge_cost(i, j, rm.edge_cost(i, j) + pen)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    cost: f64,
    vertex: usize,
}

// Reversed so the max-heap pops the cheapest entry; cost ties pop the
// lower vertex index first.
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

/// Cheapest route between the roadmap's attached endpoints.
///
/// Cost ties break toward lower vertex indices, which makes the result
/// the lexicographically smallest of the cheapest vertex sequences, so
/// equal-cost inputs reproduce exactly.
pub fn shortest_path(rm: &Roadmap) -> Result<Route> {
    let (start, end) = rm
        .endpoints()
        .ok_or_else(|| Error::Config(format!("endpoints not set")))?;
    let n = rm.vertex_count();
    // Distance-to-end labels, then a greedy descent from the start; the
    // descent re-derives each optimal hop so index ties can be broken
    // locally.
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[end] = 0.0;
    heap.push(HeapEntry { cost: 0.0, vertex: end });
    while let Some(HeapEntry { cost, vertex }) = heap.pop() {
        if cost > dist[vertex] {
            continue;
        }
        for u in rm.neighbors(vertex) {
            let next = cost + rm.edge_cost(vertex, u);
            if next < dist[u] {
                dist[u] = next;
                heap.push(HeapEntry { cost: next, vertex: u });
            }
        }
    }
    if !dist[start].is_finite() {
        return Err(Error::NoPath);
    }
    let mut vertices = vec![start];
    let mut edges = Vec::new();
    let mut total_cost = 0.0;
    let mut total_length = 0.0;
    let mut at = start;
    while at != end {
        let mut best: Option<(f64, usize)> = None;
        for v in rm.neighbors(at) {
            let via = rm.edge_cost(at, v) + dist[v];
            let better = match best {
                None => true,
                Some((bc, bv)) => via < bc || (via == bc && v < bv),
            };
            if better {
                best = Some((via, v));
            }
        }
        let (_, v) = best.ok_or(Error::NoPath)?;
        let a = rm.vertex(at);
        let b = rm.vertex(v);
        let cost = rm.edge_cost(at, v);
        let length = a.distance(b);
        edges.push(RouteEdge { from: at, to: v, a, b, length, cost, base_cost: cost });
        total_cost += cost;
        total_length += length;
        vertices.push(v);
        at = v;
        if vertices.len() > n {
            return Err(Error::Construction(format!("path reconstruction cycled")));
        }
    }
    Ok(Route { vertices, edges, total_cost, total_base_cost: total_cost, total_length })
}

/// Plans `n_routes` routes in sequence on one roadmap: the first on the
/// base costs, each later one on base costs penalized by everything
/// committed before it. With `gamma == 0` all routes are identical.
pub fn plan_diverse_routes(rm: &Roadmap, n_routes: usize, params: &PenaltyParams) -> Result<Vec<Route>> {
    if n_routes == 0 {
        return Err(Error::Config(format!("must plan at least one route")));
    }
    let mut committed: Vec<Route> = Vec::with_capacity(n_routes);
    for _ in 0..n_routes {
        let penalized = penalize_costs(rm, &committed, params)?;
        let route = shortest_path(&penalized)?;
        committed.push(split_base_costs(route, rm));
    }
    Ok(committed)
}

/// Rewrites a route's base costs from the unpenalized roadmap its
/// penalized plan came from.
pub fn split_base_costs(mut route: Route, base: &Roadmap) -> Route {
    let mut total = 0.0;
    for e in &mut route.edges {
        e.base_cost = base.edge_cost(e.from, e.to);
        total += e.base_cost;
    }
    route.total_base_cost = total;
    route
}

/// How far apart two routes run: for each, the mean distance from its
/// edge midpoints to the other's nearest midpoint, averaged both ways.
/// Zero for identical routes; empty routes count as zero.
pub fn route_dissimilarity(a: &Route, b: &Route) -> f64 {
    let pa = a.midpoints();
    let pb = b.midpoints();
    if pa.is_empty() || pb.is_empty() {
        return 0.0;
    }
    0.5 * (directed_mean_nearest(&pa, &pb) + directed_mean_nearest(&pb, &pa))
}

fn directed_mean_nearest(from: &[Point], to: &[Point]) -> f64 {
    let mut sum = 0.0;
    for p in from {
        let mut nearest = f64::INFINITY;
        for q in to {
            nearest = nearest.min(p.distance(*q));
        }
        sum += nearest;
    }
    sum / from.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;

    fn bounds() -> Rect {
        Rect::new(0.0, 0.0, 10.0, 10.0).unwrap()
    }

    fn diamond() -> Roadmap {
        // Two equal-cost two-hop paths from 0 to 3.
        Roadmap::from_parts(
            vec![
                Point::new(1.0, 5.0),
                Point::new(5.0, 8.0),
                Point::new(5.0, 2.0),
                Point::new(9.0, 5.0),
            ],
            &[(0, 1, 5.0), (0, 2, 5.0), (1, 3, 5.0), (2, 3, 5.0)],
            bounds(),
        )
        .unwrap()
        .with_endpoints(0, 3)
        .unwrap()
    }

    #[test]
    fn cost_ties_pick_the_lexicographically_smallest_path() {
        let r = shortest_path(&diamond()).unwrap();
        assert_eq!(r.vertices, vec![0, 1, 3]);
        assert_eq!(r.total_cost, 10.0);
        assert_eq!(r.total_base_cost, 10.0);
        assert_eq!(r.edges.len(), 2);
    }

    #[test]
    fn cheapest_path_beats_fewest_hops() {
        let rm = Roadmap::from_parts(
            vec![
                Point::new(1.0, 1.0),
                Point::new(5.0, 1.0),
                Point::new(9.0, 1.0),
                Point::new(5.0, 6.0),
            ],
            &[(0, 2, 10.0), (0, 1, 2.0), (1, 2, 3.0), (0, 3, 1.0), (3, 2, 1.5)],
            bounds(),
        )
        .unwrap()
        .with_endpoints(0, 2)
        .unwrap();
        let r = shortest_path(&rm).unwrap();
        assert_eq!(r.vertices, vec![0, 3, 2]);
        assert_eq!(r.total_cost, 2.5);
    }

    #[test]
    fn missing_endpoints_and_paths_are_reported() {
        let rm = Roadmap::from_parts(
            vec![Point::new(1.0, 1.0), Point::new(2.0, 1.0)],
            &[(0, 1, 1.0)],
            bounds(),
        )
        .unwrap();
        assert!(matches!(shortest_path(&rm), Err(Error::Config(_))));
    }

    #[test]
    fn penalty_peak_matches_frozen_value() {
        // gamma 10, sigma_sq 0.001: peak = 10 / sqrt(2 pi 0.001).
        let p = PenaltyParams::new(10.0, 0.001, 1.0).unwrap();
        let peak = 126.15662610100797;
        assert!((p.peak() - peak).abs() < 1e-9 * peak);
        assert_eq!(p.penalty(0.0), p.peak());
        assert!(p.penalty(0.1) < p.penalty(0.05));
        assert!(p.penalty(1.0) < 1e-6 * p.peak());
    }

    #[test]
    fn exponent_forms_differ_as_written() {
        let base = PenaltyParams::new(2.0, 0.25, 1.0).unwrap();
        let verbatim = base.with_exponent(ExponentForm::Verbatim);
        let d: f64 = 0.3;
        // Standard: exp(-d^2 / 0.5); verbatim: exp(-d^2 / (2 * 0.5)) = exp(-d^2 / 1).
        let want_std = base.peak() * (-(d * d) / 0.5).exp();
        let want_verb = base.peak() * (-(d * d) / 1.0).exp();
        assert!((base.penalty(d) - want_std).abs() < 1e-12);
        assert!((verbatim.penalty(d) - want_verb).abs() < 1e-12);
    }

    #[test]
    fn distance_normalizer_rescales_the_falloff() {
        let raw = PenaltyParams::new(5.0, 0.01, 1.0).unwrap();
        let scaled = PenaltyParams::new(5.0, 0.01, 100.0).unwrap();
        assert!((raw.penalty(0.5) - scaled.penalty(50.0)).abs() < 1e-12);
    }

    #[test]
    fn penalty_params_validation() {
        assert!(PenaltyParams::new(0.0, 0.001, 1.0).is_ok());
        assert!(PenaltyParams::new(-1.0, 0.001, 1.0).is_err());
        assert!(PenaltyParams::new(1.0, 0.0, 1.0).is_err());
        assert!(PenaltyParams::new(1.0, 0.001, 0.0).is_err());
        assert!(PenaltyParams::new(f64::INFINITY, 0.001, 1.0).is_err());
    }

    #[test]
    fn zero_gamma_leaves_costs_bit_identical() {
        let rm = diamond();
        let committed = vec![shortest_path(&rm).unwrap()];
        let params = PenaltyParams::new(0.0, 0.001, 1.0).unwrap();
        let out = penalize_costs(&rm, &committed, &params).unwrap();
        assert_eq!(out, rm);
    }

    #[test]
    fn zero_gamma_plans_identical_routes() {
        let params = PenaltyParams::new(0.0, 0.001, 1.0).unwrap();
        let routes = plan_diverse_routes(&diamond(), 3, &params).unwrap();
        assert_eq!(routes.len(), 3);
        assert_eq!(routes[0].vertices, routes[1].vertices);
        assert_eq!(routes[1].vertices, routes[2].vertices);
        assert_eq!(route_dissimilarity(&routes[0], &routes[2]), 0.0);
    }

    #[test]
    fn penalty_pushes_the_second_route_to_the_other_corridor() {
        let rm = diamond();
        // Wide bump relative to within-corridor distances, strong enough
        // to overcome the corridors' equal costs plus tie preference.
        let params = PenaltyParams::new(10.0, 0.5, 1.0).unwrap();
        let routes = plan_diverse_routes(&rm, 2, &params).unwrap();
        assert_eq!(routes[0].vertices, vec![0, 1, 3]);
        assert_eq!(routes[1].vertices, vec![0, 2, 3]);
        assert!(route_dissimilarity(&routes[0], &routes[1]) > 0.0);
        // Planned cost carries the penalty; base cost does not.
        assert!(routes[1].total_cost > routes[1].total_base_cost);
        assert_eq!(routes[1].total_base_cost, 10.0);
        assert_eq!(routes[0].total_penalty(), 0.0);
    }

    #[test]
    fn penalties_rebuild_from_base_each_round() {
        let rm = diamond();
        let params = PenaltyParams::new(10.0, 0.5, 1.0).unwrap();
        let committed = plan_diverse_routes(&rm, 1, &params).unwrap();
        let once = penalize_costs(&rm, &committed, &params).unwrap();
        let twice = penalize_costs(&rm, &committed, &params).unwrap();
        // Same committed set gives the same penalized costs, not a
        // compounding pile-up.
        assert_eq!(once, twice);
    }

    #[test]
    fn dissimilarity_of_offset_ladders_is_the_offset() {
        let mk = |y: f64| {
            let edges = [(0.0, 2.0), (2.0, 4.0)]
                .iter()
                .map(|&(x0, x1)| RouteEdge {
                    from: 0,
                    to: 0,
                    a: Point::new(x0, y),
                    b: Point::new(x1, y),
                    length: x1 - x0,
                    cost: 1.0,
                    base_cost: 1.0,
                })
                .collect::<Vec<_>>();
            Route {
                vertices: vec![0, 0, 0],
                edges,
                total_cost: 2.0,
                total_base_cost: 2.0,
                total_length: 4.0,
            }
        };
        let r1 = mk(0.0);
        let r2 = mk(1.0);
        // Midpoints line up in x, so every nearest distance is exactly 1.
        assert_eq!(route_dissimilarity(&r1, &r2), 1.0);
        assert_eq!(route_dissimilarity(&r1, &r1), 0.0);
        assert_eq!(route_dissimilarity(&r2, &r1), route_dissimilarity(&r1, &r2));
    }

    #[test]
    fn rescore_decomposes_into_gain_free_integrals() {
        let map = TwoValueCostmap::uniform(1, 9, 10.0, 3.0).unwrap();
        let gains = GainSet::new(2.0, 0.5, 4.0).unwrap();
        let rm = Roadmap::from_parts(
            vec![Point::new(1.0, 1.0), Point::new(7.0, 1.0), Point::new(7.0, 6.0)],
            &[(0, 1, 1.0), (1, 2, 1.0)],
            bounds(),
        )
        .unwrap()
        .with_endpoints(0, 2)
        .unwrap();
        let route = shortest_path(&rm).unwrap();
        let b = route.rescore(&map, &gains).unwrap();
        assert_eq!(b.length, 11.0);
        assert!((b.mu_integral - 33.0).abs() < 1e-12);
        assert_eq!(b.var_integral, 0.0);
        // total = k1 * length + k2 * mu_integral here (variance is zero).
        assert!((b.total - (2.0 * 11.0 + 0.5 * 33.0)).abs() < 1e-9);
    }
}
