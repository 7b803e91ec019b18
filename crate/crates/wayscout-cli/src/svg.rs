//! SVG rendering of a run: costmap shading, roadmap edges, routes,
//! vehicle traces, and start/goal markers. Coordinates are written in
//! world units inside a y-flipped group so the origin sits bottom-left.

use std::fmt::Write as _;

use wayscout_core::{CellIndex, Point, Rect, Roadmap, Route, TwoValueCostmap};

/// Route colors, cycled when a scene holds more routes than entries.
pub const ROUTE_COLORS: [&str; 5] = ["#c23b3b", "#2f6fb5", "#3a9a4e", "#8a56b0", "#d5822a"];

fn fmt(x: f64) -> String {
    format!("{x:.3}")
}

pub struct SvgScene {
    bounds: Rect,
    body: String,
}

impl SvgScene {
    pub fn new(bounds: Rect) -> Self {
        SvgScene { bounds, body: String::new() }
    }

    /// Shades each cell by its mean: light for the cheapest cell in the
    /// map, dark for the dearest. A flat map renders mid-gray.
    pub fn add_costmap(&mut self, map: &TwoValueCostmap) {
        let (lo, hi) = map.mean_range();
        let span = hi - lo;
        let size = map.cell_size();
        let _ = writeln!(self.body, "  <g stroke=\"#ffffff\" stroke-width=\"0.5\">");
        for row in 0..map.grid_dim() {
            for col in 0..map.grid_dim() {
                let m = map.cell_mean(CellIndex::new(row, col));
                let t = if span > 0.0 { (m - lo) / span } else { 0.5 };
                // Shade from light (cheap) to dark (expensive).
                let level = (235.0 - 170.0 * t).round() as u8;
                let _ = writeln!(
                    self.body,
                    "    <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({level},{level},{level})\"/>",
                    fmt(col as f64 * size),
                    fmt(row as f64 * size),
                    fmt(size),
                    fmt(size)
                );
            }
        }
        let _ = writeln!(self.body, "  </g>");
    }

    pub fn add_roadmap(&mut self, rm: &Roadmap) {
        let _ = writeln!(
            self.body,
            "  <g stroke=\"#9aa5b1\" stroke-width=\"1\" stroke-opacity=\"0.7\">"
        );
        for (i, j) in rm.edge_pairs() {
            let a = rm.vertex(i);
            let b = rm.vertex(j);
            let _ = writeln!(
                self.body,
                "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                fmt(a.x),
                fmt(a.y),
                fmt(b.x),
                fmt(b.y)
            );
        }
        let _ = writeln!(self.body, "  </g>");
    }

    pub fn add_polyline(&mut self, pts: &[Point], color: &str, width: f64, dashed: bool) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", fmt(p.x), fmt(p.y))).collect();
        let dash = if dashed { " stroke-dasharray=\"6 5\"" } else { "" };
        let _ = writeln!(
            self.body,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\"{dash} stroke-linejoin=\"round\" stroke-linecap=\"round\"/>",
            coords.join(" "),
            fmt(width)
        );
    }

    pub fn add_route(&mut self, route: &Route, color: &str, width: f64) {
        self.add_polyline(&route.waypoints(), color, width, false);
    }

    pub fn add_trace(&mut self, trace: &[Point], color: &str) {
        self.add_polyline(trace, color, 2.0, true);
    }

    pub fn add_marker(&mut self, p: Point, color: &str) {
        let r = self.bounds.max_dimension() / 150.0;
        let _ = writeln!(
            self.body,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\" stroke=\"#222222\" stroke-width=\"1.5\"/>",
            fmt(p.x),
            fmt(p.y),
            fmt(r)
        );
    }

    pub fn add_endpoint_markers(&mut self, start: Point, goal: Point) {
        self.add_marker(start, "#ffd24a");
        self.add_marker(goal, "#222222");
    }

    pub fn finish(self) -> String {
        let w = self.bounds.width();
        let h = self.bounds.height();
        let x0 = self.bounds.min().x;
        let y0 = self.bounds.min().y;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">\n\
             <g transform=\"translate(0,{}) scale(1,-1)\">\n{}</g>\n</svg>\n",
            fmt(x0),
            fmt(y0),
            fmt(w),
            fmt(h),
            fmt(800.0 * h / w),
            fmt(y0 + self.bounds.max().y),
            self.body
        )
    }
}
