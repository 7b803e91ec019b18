//! Planar geometry primitives.

use crate::error::{Error, Result};
use crate::math;
use alloc::format;

/// A position in the environment, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        math::hypot(self.x - other.x, self.y - other.y)
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }

    /// Linear interpolation; `t = 0` is `self`, `t = 1` is `other`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned map rectangle with strictly positive extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    min: Point,
    max: Point,
}

impl Rect {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Rect> {
        let min = Point::new(min_x, min_y);
        let max = Point::new(max_x, max_y);
        if !min.is_finite() || !max.is_finite() || max_x <= min_x || max_y <= min_y {
            return Err(Error::Config(format!(
                "degenerate bounds ({min_x}, {min_y}) to ({max_x}, {max_y})"
            )));
        }
        Ok(Rect { min, max })
    }

    pub fn min(&self) -> Point {
        self.min
    }

    pub fn max(&self) -> Point {
        self.max
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Longest side; used to normalize inter-route distances.
    pub fn max_dimension(&self) -> f64 {
        f64::max(self.width(), self.height())
    }

    /// Closed-rectangle membership: boundary points are inside.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Corners in counterclockwise order starting at the minimum corner.
    pub fn corners(&self) -> [Point; 4] {
        [
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_and_midpoint() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(3.0, 4.0);
        assert_eq!(a.distance(b), 5.0);
        assert_eq!(a.midpoint(b), Point::new(1.5, 2.0));
        assert_eq!(a.lerp(b, 0.5), Point::new(1.5, 2.0));
        assert_eq!(a.lerp(b, 0.0), a);
        assert_eq!(a.lerp(b, 1.0), b);
    }

    #[test]
    fn rect_rejects_degenerate_extents() {
        assert!(Rect::new(0.0, 0.0, 2000.0, 2000.0).is_ok());
        assert!(Rect::new(0.0, 0.0, 0.0, 2000.0).is_err());
        assert!(Rect::new(0.0, 0.0, -1.0, 2000.0).is_err());
        assert!(Rect::new(0.0, 0.0, f64::NAN, 2000.0).is_err());
    }

    #[test]
    fn rect_membership_includes_boundary() {
        let r = Rect::new(0.0, 0.0, 10.0, 5.0).unwrap();
        assert!(r.contains(Point::new(0.0, 0.0)));
        assert!(r.contains(Point::new(10.0, 5.0)));
        assert!(r.contains(Point::new(5.0, 2.5)));
        assert!(!r.contains(Point::new(10.1, 2.5)));
        assert!(!r.contains(Point::new(5.0, -0.1)));
    }
}
