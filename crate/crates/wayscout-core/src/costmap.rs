//! Two-value terrain costmap: a square grid of cells, each summarized by
//! the mean and variance of a finer grid of subcell samples.
//!
//! The map keeps every subcell value so that cell statistics can be
//! recomputed exactly at any time; the usual update path instead applies
//! cheap incremental recurrences as individual subcells are surveyed.

use crate::error::{Error, Result};
use crate::geom::{Point, Rect};
use crate::math;
use crate::rng::seeded_rng;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

/// Row and column of one cell; row 0 is the bottom of the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellIndex {
    pub row: usize,
    pub col: usize,
}

impl CellIndex {
    pub const fn new(row: usize, col: usize) -> Self {
        CellIndex { row, col }
    }
}

/// One surveyed subcell value, ready to fold into an estimate map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveyReport {
    pub cell: CellIndex,
    /// Row-major subcell index within the cell.
    pub subcell: usize,
    pub value: f64,
}

/// How cell statistics react to a survey.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    /// Constant-time mean and variance recurrences. The mean recurrence is
    /// algebraically exact; the variance recurrence is an approximation
    /// that ignores the shift of the other subcells' deviations, so it can
    /// drift from the true variance (it is clamped at zero).
    Incremental,
    /// Recompute the affected cell's statistics from its subcell values.
    Exact,
}

/// Shape and distribution parameters for synthesizing a costmap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainParams {
    /// Cells per side; the map is `grid_dim` x `grid_dim`.
    pub grid_dim: usize,
    /// Subcells per cell; must be a perfect square (row-major square tiling).
    pub subcell_count: usize,
    /// Side length of one cell in meters.
    pub cell_size: f64,
    /// Per-cell target means are drawn uniformly from this range.
    pub mean_low: f64,
    pub mean_high: f64,
    /// Per-cell target variance is a standard normal draw clamped at zero,
    /// scaled by this factor.
    pub var_scale: f64,
}

impl TerrainParams {
    pub fn validate(&self) -> Result<()> {
        if self.grid_dim == 0 {
            return Err(Error::Config(format!("grid_dim must be positive")));
        }
        if self.subcell_count == 0 || int_sqrt(self.subcell_count).is_none() {
            return Err(Error::Config(format!(
                "subcell_count {} is not a positive perfect square",
                self.subcell_count
            )));
        }
        if !(self.cell_size > 0.0) || !self.cell_size.is_finite() {
            return Err(Error::Config(format!("cell_size {} must be positive", self.cell_size)));
        }
        if !self.mean_low.is_finite() || !self.mean_high.is_finite() || self.mean_low > self.mean_high
        {
            return Err(Error::Config(format!(
                "mean range [{}, {}] is invalid",
                self.mean_low, self.mean_high
            )));
        }
        if !(self.var_scale >= 0.0) || !self.var_scale.is_finite() {
            return Err(Error::Config(format!(
                "var_scale {} must be nonnegative",
                self.var_scale
            )));
        }
        Ok(())
    }

    /// Draws a full costmap. Per cell, in row-major order: one uniform mean
    /// draw, one standard normal variance draw, then one normal draw per
    /// subcell. Cell statistics are then computed exactly from the draws.
    pub fn generate(&self, seed: u64) -> Result<TwoValueCostmap> {
        self.validate()?;
        let mut rng = seeded_rng(seed);
        let n_cells = self.grid_dim * self.grid_dim;
        let mut subcells = Vec::with_capacity(n_cells * self.subcell_count);
        for _ in 0..n_cells {
            let m = if self.mean_low < self.mean_high {
                rng.random_range(self.mean_low..self.mean_high)
            } else {
                self.mean_low
            };
            let z: f64 = rng.sample(StandardNormal);
            let v = z.max(0.0) * self.var_scale;
            let normal = Normal::new(m, math::sqrt(v))
                .map_err(|_| Error::Config(format!("bad subcell distribution")))?;
            for _ in 0..self.subcell_count {
                subcells.push(normal.sample(&mut rng));
            }
        }
        TwoValueCostmap::from_subcells(self.grid_dim, self.subcell_count, self.cell_size, seed, subcells)
    }
}

/// The costmap itself: subcell samples plus per-cell mean and variance.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoValueCostmap {
    grid_dim: usize,
    subcell_count: usize,
    /// Subcells per cell side, `sub_dim * sub_dim == subcell_count`.
    sub_dim: usize,
    cell_size: f64,
    seed: u64,
    /// Row-major by cell, then row-major within the cell.
    subcells: Vec<f64>,
    mean: Vec<f64>,
    variance: Vec<f64>,
    surveyed: Vec<bool>,
}

impl TwoValueCostmap {
    /// Builds a map from raw subcell values, computing cell statistics
    /// exactly. The seed is carried along for reproducibility only.
    pub fn from_subcells(
        grid_dim: usize,
        subcell_count: usize,
        cell_size: f64,
        seed: u64,
        subcells: Vec<f64>,
    ) -> Result<Self> {
        let sub_dim = int_sqrt(subcell_count).ok_or_else(|| {
            Error::Config(format!("subcell_count {subcell_count} is not a perfect square"))
        })?;
        if grid_dim == 0 || subcell_count == 0 {
            return Err(Error::Config(format!("map dimensions must be positive")));
        }
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(Error::Config(format!("cell_size {cell_size} must be positive")));
        }
        let n_cells = grid_dim * grid_dim;
        if subcells.len() != n_cells * subcell_count {
            return Err(Error::Config(format!(
                "expected {} subcell values, got {}",
                n_cells * subcell_count,
                subcells.len()
            )));
        }
        if subcells.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!("subcell values must be finite")));
        }
        let mut map = TwoValueCostmap {
            grid_dim,
            subcell_count,
            sub_dim,
            cell_size,
            seed,
            subcells,
            mean: vec![0.0; n_cells],
            variance: vec![0.0; n_cells],
            surveyed: vec![false; n_cells * subcell_count],
        };
        for c in 0..n_cells {
            map.recompute_cell(c);
        }
        Ok(map)
    }

    /// Rebuilds a previously saved map, trusting the stored statistics
    /// (they may reflect incremental updates rather than exact recomputes).
    pub fn from_stored(
        grid_dim: usize,
        subcell_count: usize,
        cell_size: f64,
        seed: u64,
        subcells: Vec<f64>,
        mean: Vec<f64>,
        variance: Vec<f64>,
        surveyed: Vec<bool>,
    ) -> Result<Self> {
        let mut map =
            Self::from_subcells(grid_dim, subcell_count, cell_size, seed, subcells)?;
        let n_cells = grid_dim * grid_dim;
        if mean.len() != n_cells || variance.len() != n_cells {
            return Err(Error::Config(format!("statistics length does not match cell count")));
        }
        if surveyed.len() != map.surveyed.len() {
            return Err(Error::Config(format!("survey flags do not match subcell count")));
        }
        if mean.iter().chain(variance.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Config(format!("cell statistics must be finite")));
        }
        if variance.iter().any(|v| *v < 0.0) {
            return Err(Error::Config(format!("cell variance must be nonnegative")));
        }
        map.mean = mean;
        map.variance = variance;
        map.surveyed = surveyed;
        Ok(map)
    }

    /// A map whose subcells all hold one value (mean = value, variance = 0).
    pub fn uniform(grid_dim: usize, subcell_count: usize, cell_size: f64, value: f64) -> Result<Self> {
        let n = grid_dim * grid_dim * subcell_count;
        Self::from_subcells(grid_dim, subcell_count, cell_size, 0, vec![value; n])
    }

    pub fn grid_dim(&self) -> usize {
        self.grid_dim
    }

    pub fn subcell_count(&self) -> usize {
        self.subcell_count
    }

    pub fn sub_dim(&self) -> usize {
        self.sub_dim
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bounds(&self) -> Rect {
        let side = self.cell_size * self.grid_dim as f64;
        // Positive side length, so this cannot fail.
        Rect::new(0.0, 0.0, side, side).expect("valid map bounds")
    }

    fn cell_offset(&self, cell: CellIndex) -> usize {
        cell.row * self.grid_dim + cell.col
    }

    fn check_cell(&self, cell: CellIndex, subcell: usize) -> Result<usize> {
        if cell.row >= self.grid_dim || cell.col >= self.grid_dim || subcell >= self.subcell_count {
            return Err(Error::Config(format!(
                "cell ({}, {}) subcell {} is out of range",
                cell.row, cell.col, subcell
            )));
        }
        Ok(self.cell_offset(cell) * self.subcell_count + subcell)
    }

    /// The cell containing a point. Points exactly on an interior cell
    /// boundary belong to the higher-index cell; points on the outer
    /// maximum boundary stay in the last cell.
    pub fn cell_at(&self, p: Point) -> Result<CellIndex> {
        if !self.bounds().contains(p) {
            return Err(Error::OutOfBounds { x: p.x, y: p.y });
        }
        let col = grid_coord(p.x, self.cell_size, self.grid_dim);
        let row = grid_coord(p.y, self.cell_size, self.grid_dim);
        Ok(CellIndex::new(row, col))
    }

    /// The cell and row-major subcell index containing a point, with the
    /// same boundary tie rule as [`cell_at`](Self::cell_at).
    pub fn subcell_at(&self, p: Point) -> Result<(CellIndex, usize)> {
        if !self.bounds().contains(p) {
            return Err(Error::OutOfBounds { x: p.x, y: p.y });
        }
        let (fx, fy) = self.fine_coords(p);
        Ok(self.fine_to_subcell(fx, fy))
    }

    /// Mean and variance of the cell containing a point.
    pub fn cell_stats(&self, p: Point) -> Result<(f64, f64)> {
        let c = self.cell_offset(self.cell_at(p)?);
        Ok((self.mean[c], self.variance[c]))
    }

    pub fn cell_mean(&self, cell: CellIndex) -> f64 {
        self.mean[self.cell_offset(cell)]
    }

    pub fn cell_variance(&self, cell: CellIndex) -> f64 {
        self.variance[self.cell_offset(cell)]
    }

    pub fn subcell_value(&self, cell: CellIndex, subcell: usize) -> Result<f64> {
        Ok(self.subcells[self.check_cell(cell, subcell)?])
    }

    /// Reads this map (as ground truth) at a subcell, packaged as a report.
    pub fn survey_report(&self, cell: CellIndex, subcell: usize) -> Result<SurveyReport> {
        Ok(SurveyReport { cell, subcell, value: self.subcell_value(cell, subcell)? })
    }

    pub fn is_surveyed(&self, cell: CellIndex, subcell: usize) -> Result<bool> {
        Ok(self.surveyed[self.check_cell(cell, subcell)?])
    }

    pub fn surveyed_count(&self) -> usize {
        self.surveyed.iter().filter(|s| **s).count()
    }

    pub fn surveyed_fraction(&self) -> f64 {
        self.surveyed_count() as f64 / self.subcells.len() as f64
    }

    /// Raw subcell values of one cell, row-major.
    pub fn cell_subcells(&self, cell: CellIndex) -> &[f64] {
        let c = self.cell_offset(cell);
        &self.subcells[c * self.subcell_count..(c + 1) * self.subcell_count]
    }

    pub fn surveyed_flags(&self, cell: CellIndex) -> &[bool] {
        let c = self.cell_offset(cell);
        &self.surveyed[c * self.subcell_count..(c + 1) * self.subcell_count]
    }

    /// Smallest and largest cell mean; handy for shading.
    pub fn mean_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for m in &self.mean {
            lo = lo.min(*m);
            hi = hi.max(*m);
        }
        (lo, hi)
    }

    /// Overwrites one subcell with a surveyed value and updates the owning
    /// cell's statistics per the chosen mode. Marks the subcell surveyed.
    pub fn apply_survey(&mut self, report: &SurveyReport, mode: UpdateMode) -> Result<()> {
        let i = self.check_cell(report.cell, report.subcell)?;
        if !report.value.is_finite() {
            return Err(Error::Config(format!("survey value must be finite")));
        }
        let c = self.cell_offset(report.cell);
        let old = self.subcells[i];
        let new = report.value;
        self.subcells[i] = new;
        self.surveyed[i] = true;
        match mode {
            UpdateMode::Exact => self.recompute_cell(c),
            UpdateMode::Incremental => {
                let n = self.subcell_count as f64;
                let mu_old = self.mean[c];
                let mu_new = mu_old + (new - old) / n;
                let dv = ((new - mu_new) * (new - mu_new) - (old - mu_old) * (old - mu_old)) / n;
                self.mean[c] = mu_new;
                self.variance[c] = (self.variance[c] + dv).max(0.0);
            }
        }
        Ok(())
    }

    /// Recomputes one cell's mean and population variance from its
    /// subcells. Public so callers can reconcile after incremental drift.
    pub fn recompute_cell_stats(&mut self, cell: CellIndex) -> Result<()> {
        let i = self.check_cell(cell, 0)?;
        let _ = i;
        self.recompute_cell(self.cell_offset(cell));
        Ok(())
    }

    fn recompute_cell(&mut self, c: usize) {
        let n = self.subcell_count as f64;
        let vals = &self.subcells[c * self.subcell_count..(c + 1) * self.subcell_count];
        let mut sum = 0.0;
        for v in vals {
            sum += *v;
        }
        let mu = sum / n;
        let mut dev = 0.0;
        for v in vals {
            dev += (*v - mu) * (*v - mu);
        }
        self.mean[c] = mu;
        self.variance[c] = dev / n;
    }

    /// All subcells a segment passes through, in traversal order, without
    /// repeats. Walks the fine grid cell to cell, stepping diagonally when
    /// the segment runs exactly through a subcell corner; a point exactly
    /// on a boundary counts for the higher-index subcell, matching
    /// [`subcell_at`](Self::subcell_at). A zero-length segment yields the
    /// single containing subcell.
    pub fn subcells_touched(&self, a: Point, b: Point) -> Result<Vec<(CellIndex, usize)>> {
        let bounds = self.bounds();
        for p in [a, b] {
            if !bounds.contains(p) {
                return Err(Error::OutOfBounds { x: p.x, y: p.y });
            }
        }
        let (mut fx, mut fy) = self.fine_coords(a);
        let (ex, ey) = self.fine_coords(b);
        let mut out = Vec::new();
        out.push(self.fine_to_subcell(fx, fy));
        if (fx, fy) == (ex, ey) {
            return Ok(out);
        }
        let fs = self.cell_size / self.sub_dim as f64;
        let dx = b.x - a.x;
        let dy = b.y - a.y;
        let step_x: isize = if dx > 0.0 { 1 } else { -1 };
        let step_y: isize = if dy > 0.0 { 1 } else { -1 };
        // Segment parameter t in [0, 1] at which the path crosses the next
        // fine-grid line on each axis.
        let mut t_max_x = if dx == 0.0 {
            f64::INFINITY
        } else {
            let edge = if dx > 0.0 { (fx + 1) as f64 * fs } else { fx as f64 * fs };
            (edge - a.x) / dx
        };
        let mut t_max_y = if dy == 0.0 {
            f64::INFINITY
        } else {
            let edge = if dy > 0.0 { (fy + 1) as f64 * fs } else { fy as f64 * fs };
            (edge - a.y) / dy
        };
        let t_delta_x = if dx == 0.0 { f64::INFINITY } else { fs / dx.abs() };
        let t_delta_y = if dy == 0.0 { f64::INFINITY } else { fs / dy.abs() };
        let cap = fx.abs_diff(ex) + fy.abs_diff(ey) + 4;
        let mut steps = 0;
        while (fx, fy) != (ex, ey) && steps < cap {
            if t_max_x < t_max_y {
                fx = offset(fx, step_x);
                t_max_x += t_delta_x;
            } else if t_max_y < t_max_x {
                fy = offset(fy, step_y);
                t_max_y += t_delta_y;
            } else {
                // Exact corner crossing: the two cells sharing only the
                // corner do not own any point of the segment.
                fx = offset(fx, step_x);
                fy = offset(fy, step_y);
                t_max_x += t_delta_x;
                t_max_y += t_delta_y;
            }
            out.push(self.fine_to_subcell(fx, fy));
            steps += 1;
        }
        if (fx, fy) != (ex, ey) {
            // Accumulated rounding stranded the walk next to the endpoint.
            out.push(self.fine_to_subcell(ex, ey));
        }
        Ok(out)
    }

    fn fine_coords(&self, p: Point) -> (usize, usize) {
        let fs = self.cell_size / self.sub_dim as f64;
        let n = self.grid_dim * self.sub_dim;
        (grid_coord(p.x, fs, n), grid_coord(p.y, fs, n))
    }

    fn fine_to_subcell(&self, fx: usize, fy: usize) -> (CellIndex, usize) {
        let cell = CellIndex::new(fy / self.sub_dim, fx / self.sub_dim);
        let sub = (fy % self.sub_dim) * self.sub_dim + (fx % self.sub_dim);
        (cell, sub)
    }
}

/// Floor division of a coordinate into `n` bins of width `size`, clamped
/// so the outer maximum boundary falls into the last bin.
fn grid_coord(x: f64, size: f64, n: usize) -> usize {
    let i = math::floor(x / size);
    if i < 0.0 {
        0
    } else {
        (i as usize).min(n - 1)
    }
}

fn offset(i: usize, step: isize) -> usize {
    if step >= 0 {
        i + 1
    } else {
        i.saturating_sub(1)
    }
}

fn int_sqrt(n: usize) -> Option<usize> {
    let mut r = 0;
    while r * r < n {
        r += 1;
    }
    if r * r == n && n > 0 {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nine_cell_map() -> TwoValueCostmap {
        TwoValueCostmap::uniform(3, 9, 100.0, 5.0).unwrap()
    }

    #[test]
    fn uniform_map_statistics() {
        let map = nine_cell_map();
        for row in 0..3 {
            for col in 0..3 {
                let c = CellIndex::new(row, col);
                assert_eq!(map.cell_mean(c), 5.0);
                assert_eq!(map.cell_variance(c), 0.0);
            }
        }
        assert_eq!(map.surveyed_count(), 0);
    }

    #[test]
    fn known_subcells_give_known_statistics() {
        // One 1x1-cell map with subcells 1..=9: mean 5, population variance
        // (sum of squared deviations 60) / 9.
        let vals: Vec<f64> = (1..=9).map(|v| v as f64).collect();
        let map = TwoValueCostmap::from_subcells(1, 9, 90.0, 0, vals).unwrap();
        let c = CellIndex::new(0, 0);
        assert_eq!(map.cell_mean(c), 5.0);
        assert!((map.cell_variance(c) - 60.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn point_to_cell_tie_rules() {
        let map = nine_cell_map();
        assert_eq!(map.cell_at(Point::new(0.0, 0.0)).unwrap(), CellIndex::new(0, 0));
        assert_eq!(map.cell_at(Point::new(50.0, 50.0)).unwrap(), CellIndex::new(0, 0));
        // Interior boundary goes to the higher cell.
        assert_eq!(map.cell_at(Point::new(100.0, 50.0)).unwrap(), CellIndex::new(0, 1));
        assert_eq!(map.cell_at(Point::new(50.0, 100.0)).unwrap(), CellIndex::new(1, 0));
        assert_eq!(map.cell_at(Point::new(200.0, 200.0)).unwrap(), CellIndex::new(2, 2));
        // Outer maximum boundary stays in the last cell.
        assert_eq!(map.cell_at(Point::new(300.0, 300.0)).unwrap(), CellIndex::new(2, 2));
        assert!(map.cell_at(Point::new(300.1, 50.0)).is_err());
        assert!(map.cell_at(Point::new(-0.1, 50.0)).is_err());
    }

    #[test]
    fn point_to_subcell_tiling_is_row_major() {
        let map = nine_cell_map();
        // Cell (0,0) spans [0,100)^2; subcells are 33.3m on a side.
        let (c, s) = map.subcell_at(Point::new(5.0, 5.0)).unwrap();
        assert_eq!((c, s), (CellIndex::new(0, 0), 0));
        let (c, s) = map.subcell_at(Point::new(50.0, 5.0)).unwrap();
        assert_eq!((c, s), (CellIndex::new(0, 0), 1));
        let (c, s) = map.subcell_at(Point::new(95.0, 5.0)).unwrap();
        assert_eq!((c, s), (CellIndex::new(0, 0), 2));
        let (c, s) = map.subcell_at(Point::new(5.0, 50.0)).unwrap();
        assert_eq!((c, s), (CellIndex::new(0, 0), 3));
        let (c, s) = map.subcell_at(Point::new(95.0, 95.0)).unwrap();
        assert_eq!((c, s), (CellIndex::new(0, 0), 8));
        // Subcell boundary also goes to the higher subcell.
        let (c, s) = map.subcell_at(Point::new(100.0 / 3.0, 5.0)).unwrap();
        assert_eq!((c, s), (CellIndex::new(0, 0), 1));
    }

    #[test]
    fn survey_same_value_changes_nothing() {
        for mode in [UpdateMode::Incremental, UpdateMode::Exact] {
            let mut map = nine_cell_map();
            let rep = SurveyReport { cell: CellIndex::new(1, 1), subcell: 4, value: 5.0 };
            map.apply_survey(&rep, mode).unwrap();
            assert_eq!(map.cell_mean(rep.cell), 5.0);
            assert_eq!(map.cell_variance(rep.cell), 0.0);
            assert!(map.is_surveyed(rep.cell, 4).unwrap());
            assert_eq!(map.surveyed_count(), 1);
        }
    }

    #[test]
    fn survey_mean_shift_is_exact_in_both_modes() {
        // All zeros, observe 9.0 in one of nine subcells: mean becomes 1.
        for mode in [UpdateMode::Incremental, UpdateMode::Exact] {
            let mut map = TwoValueCostmap::uniform(1, 9, 90.0, 0.0).unwrap();
            let rep = SurveyReport { cell: CellIndex::new(0, 0), subcell: 2, value: 9.0 };
            map.apply_survey(&rep, mode).unwrap();
            assert_eq!(map.cell_mean(rep.cell), 1.0);
        }
    }

    #[test]
    fn incremental_variance_drifts_but_stays_nonnegative() {
        // Surveying [0, 0, 10, 10] down to all zeros: the approximate
        // recurrence walks 25 -> 20.3125 -> 6.25 and then sticks there,
        // while the exact statistics reach zero.
        let start = vec![0.0, 0.0, 10.0, 10.0];
        let cell = CellIndex::new(0, 0);
        let surveys = [(2usize, 0.0), (3usize, 0.0), (0usize, 0.0), (1usize, 0.0)];
        let mut inc = TwoValueCostmap::from_subcells(1, 4, 40.0, 0, start.clone()).unwrap();
        let mut exact = TwoValueCostmap::from_subcells(1, 4, 40.0, 0, start).unwrap();
        for (s, v) in surveys {
            let rep = SurveyReport { cell, subcell: s, value: v };
            inc.apply_survey(&rep, UpdateMode::Incremental).unwrap();
            exact.apply_survey(&rep, UpdateMode::Exact).unwrap();
            assert!(inc.cell_variance(cell) >= 0.0);
        }
        assert_eq!(inc.cell_variance(cell), 6.25);
        assert_eq!(exact.cell_variance(cell), 0.0);
        // The means agree exactly; only the variances drift apart.
        assert_eq!(inc.cell_mean(cell), exact.cell_mean(cell));
    }

    #[test]
    fn generation_with_zero_variance_scale_is_flat_per_cell() {
        let params = TerrainParams {
            grid_dim: 4,
            subcell_count: 9,
            cell_size: 100.0,
            mean_low: 2.0,
            mean_high: 8.0,
            var_scale: 0.0,
        };
        let map = params.generate(11).unwrap();
        for row in 0..4 {
            for col in 0..4 {
                let c = CellIndex::new(row, col);
                let first = map.cell_subcells(c)[0];
                assert!((2.0..8.0).contains(&first));
                for v in map.cell_subcells(c) {
                    assert_eq!(*v, first, "flat cell");
                }
                // Summation rounding can leave the mean an ulp off the
                // shared value and the variance a hair above zero.
                assert!((map.cell_mean(c) - first).abs() < 1e-12);
                assert!(map.cell_variance(c) < 1e-24);
            }
        }
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let params = TerrainParams {
            grid_dim: 5,
            subcell_count: 9,
            cell_size: 100.0,
            mean_low: 2.0,
            mean_high: 8.0,
            var_scale: 1.0,
        };
        let a = params.generate(3).unwrap();
        let b = params.generate(3).unwrap();
        let c = params.generate(4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(TwoValueCostmap::uniform(0, 9, 100.0, 1.0).is_err());
        assert!(TwoValueCostmap::uniform(3, 8, 100.0, 1.0).is_err());
        assert!(TwoValueCostmap::uniform(3, 9, 0.0, 1.0).is_err());
        assert!(TwoValueCostmap::from_subcells(2, 4, 50.0, 0, vec![0.0; 15]).is_err());
        let params = TerrainParams {
            grid_dim: 3,
            subcell_count: 9,
            cell_size: 100.0,
            mean_low: 9.0,
            mean_high: 2.0,
            var_scale: 1.0,
        };
        assert!(params.generate(0).is_err());
    }

    #[test]
    fn segment_inside_one_subcell() {
        let map = nine_cell_map();
        let hits = map
            .subcells_touched(Point::new(10.0, 10.0), Point::new(20.0, 15.0))
            .unwrap();
        assert_eq!(hits, vec![(CellIndex::new(0, 0), 0)]);
    }

    #[test]
    fn zero_length_segment_yields_one_subcell() {
        let map = nine_cell_map();
        let p = Point::new(150.0, 150.0);
        let hits = map.subcells_touched(p, p).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, CellIndex::new(1, 1));
    }

    #[test]
    fn segment_along_boundary_stays_in_higher_cells() {
        let map = nine_cell_map();
        // Along x = 100 (cells (r,0)/(r,1) boundary), the higher column
        // owns every point.
        let hits = map
            .subcells_touched(Point::new(100.0, 10.0), Point::new(100.0, 90.0))
            .unwrap();
        assert!(hits.iter().all(|(c, _)| *c == CellIndex::new(0, 1)));
        assert_eq!(hits.len(), 3);
        let subs: Vec<usize> = hits.iter().map(|(_, s)| *s).collect();
        assert_eq!(subs, vec![0, 3, 6]);
    }

    #[test]
    fn diagonal_through_corners_steps_diagonally() {
        // 1 cell, 4 subcells of 50m: the main diagonal passes exactly
        // through the center corner, so only two subcells are touched.
        let map = TwoValueCostmap::uniform(1, 4, 100.0, 1.0).unwrap();
        let hits = map
            .subcells_touched(Point::new(10.0, 10.0), Point::new(90.0, 90.0))
            .unwrap();
        let subs: Vec<usize> = hits.iter().map(|(_, s)| *s).collect();
        assert_eq!(subs, vec![0, 3]);
    }

    #[test]
    fn crossing_traversal_is_ordered_and_unique() {
        let map = nine_cell_map();
        let hits = map
            .subcells_touched(Point::new(5.0, 40.0), Point::new(295.0, 60.0))
            .unwrap();
        // Strictly left to right across all nine columns of subcells.
        for w in hits.windows(2) {
            let a = w[0].0.col * 3 + w[0].1 % 3;
            let b = w[1].0.col * 3 + w[1].1 % 3;
            assert!(b >= a);
        }
        let mut seen = hits.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), hits.len(), "no repeats");
        assert_eq!(hits.first().unwrap().0, CellIndex::new(0, 0));
        assert_eq!(hits.last().unwrap().0, CellIndex::new(0, 2));
    }
}
