//! Edge traversal costs from the costmap: distance weighted by sampled
//! mean terrain cost and its uncertainty.

use crate::costmap::TwoValueCostmap;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::roadmap::Roadmap;
use alloc::format;

/// Fractions along an edge where the costmap is sampled.
pub const SAMPLE_FRACTIONS: [f64; 3] = [1.0 / 6.0, 0.5, 5.0 / 6.0];

/// Cost floor per meter of edge length. Keeps planning costs strictly
/// positive on maps whose sampled values would otherwise cancel to zero
/// (or, on unsurveyed synthetic terrain, dip below it).
pub const MIN_UNIT_COST: f64 = 1e-6;

/// Weights for the three cost terms: distance, mean, variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSet {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl GainSet {
    /// Gains must be finite, nonnegative, and not all zero.
    pub fn new(k1: f64, k2: f64, k3: f64) -> Result<Self> {
        for k in [k1, k2, k3] {
            if !k.is_finite() || k < 0.0 {
                return Err(Error::Config(format!("gain {k} must be finite and nonnegative")));
            }
        }
        if k1 == 0.0 && k2 == 0.0 && k3 == 0.0 {
            return Err(Error::Config(format!("at least one gain must be positive")));
        }
        Ok(GainSet { k1, k2, k3 })
    }

    /// All three gains multiplied by one factor; edge costs scale by the
    /// same factor, so route choices are unchanged.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.k1 * lambda, self.k2 * lambda, self.k3 * lambda)
    }
}

/// Breakdown of one scored edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeScore {
    pub length: f64,
    /// Mean of the three sampled cell means.
    pub mu_avg: f64,
    /// Mean of the three sampled cell variances.
    pub var_avg: f64,
    /// length * (k1 + k2 * mu_avg + k3 * var_avg), floored at
    /// length * [`MIN_UNIT_COST`].
    pub cost: f64,
}

/// Scores the straight edge from `a` to `b` against a costmap: the map is
/// sampled at the three [`SAMPLE_FRACTIONS`] points, the sampled means
/// and variances are averaged unweighted, and both averages are priced by
/// the gains and scaled by edge length.
pub fn score_edge(a: Point, b: Point, map: &TwoValueCostmap, gains: &GainSet) -> Result<EdgeScore> {
    let length = a.distance(b);
    if length == 0.0 {
        return Err(Error::DegenerateEdge);
    }
    let mut mu_sum = 0.0;
    let mut var_sum = 0.0;
    for t in SAMPLE_FRACTIONS {
        let (mu, var) = map.cell_stats(a.lerp(b, t))?;
        mu_sum += mu;
        var_sum += var;
    }
    let mu_avg = mu_sum / 3.0;
    let var_avg = var_sum / 3.0;
    let raw = length * (gains.k1 + gains.k2 * mu_avg + gains.k3 * var_avg);
    let cost = raw.max(length * MIN_UNIT_COST);
    Ok(EdgeScore { length, mu_avg, var_avg, cost })
}

/// Rescores every roadmap edge in place against the given costmap.
pub fn score_all(rm: &mut Roadmap, map: &TwoValueCostmap, gains: &GainSet) -> Result<()> {
    for (i, j) in rm.edge_pairs() {
        let s = score_edge(rm.vertex(i), rm.vertex(j), map, gains)?;
        rm.set_edge_cost(i, j, s.cost)?;
    }
    Ok(())
}
