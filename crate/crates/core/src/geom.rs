//! Planar points and axis-aligned rectangles `Λ_{a,b}(z) = z + [-a,a]×[-b,b]`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// ℓ∞ distance.
    pub fn dist_inf(self, other: Point) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    /// Counterclockwise rotation by 90 degrees about the origin.
    pub fn rot90(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }
}

/// Closed rectangle with center `center`, half-width `half_w` and half-height `half_h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub center: Point,
    pub half_w: f64,
    pub half_h: f64,
}

impl Rect {
    pub fn new(center: Point, half_w: f64, half_h: f64) -> Self {
        assert!(half_w > 0.0 && half_h > 0.0, "rectangle half-sides must be positive");
        Rect { center, half_w, half_h }
    }

    /// The square `Λ_h(center)`.
    pub fn square(center: Point, half: f64) -> Self {
        Rect::new(center, half, half)
    }

    pub fn contains(&self, p: Point) -> bool {
        (p.x - self.center.x).abs() <= self.half_w && (p.y - self.center.y).abs() <= self.half_h
    }

    /// Strict interior.
    pub fn contains_open(&self, p: Point) -> bool {
        (p.x - self.center.x).abs() < self.half_w && (p.y - self.center.y).abs() < self.half_h
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x_min() >= self.x_min()
            && other.x_max() <= self.x_max()
            && other.y_min() >= self.y_min()
            && other.y_max() <= self.y_max()
    }

    pub fn x_min(&self) -> f64 {
        self.center.x - self.half_w
    }
    pub fn x_max(&self) -> f64 {
        self.center.x + self.half_w
    }
    pub fn y_min(&self) -> f64 {
        self.center.y - self.half_h
    }
    pub fn y_max(&self) -> f64 {
        self.center.y + self.half_h
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_w * self.half_h
    }

    pub fn expand(&self, pad: f64) -> Rect {
        Rect::new(self.center, self.half_w + pad, self.half_h + pad)
    }

    /// Euclidean distance from an interior point to the boundary of the rectangle.
    pub fn dist_to_boundary(&self, p: Point) -> f64 {
        let dx = self.half_w - (p.x - self.center.x).abs();
        let dy = self.half_h - (p.y - self.center.y).abs();
        dx.min(dy)
    }

    pub fn translate(&self, by: Point) -> Rect {
        Rect { center: self.center.add(by), ..*self }
    }

    /// Image under the 90° counterclockwise rotation about the origin.
    pub fn rot90(&self) -> Rect {
        Rect { center: self.center.rot90(), half_w: self.half_h, half_h: self.half_w }
    }
}
