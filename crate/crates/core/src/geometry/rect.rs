use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// Axis-aligned rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        debug_assert!(x1 > x0 && y1 > y0, "degenerate rect");
        Rect { x0, y0, x1, y1 }
    }

    pub fn square(x0: f64, y0: f64, edge: f64) -> Self {
        Rect::new(x0, y0, x0 + edge, y0 + edge)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    /// Closed containment test; points on the boundary count as inside.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }

    /// Maps a pair of unit-interval draws to a point of the rectangle.
    pub fn lerp(&self, u: f64, v: f64) -> Point {
        Point::new(self.x0 + u * self.width(), self.y0 + v * self.height())
    }

    /// Wraps a point onto the rectangle treated as a torus.
    pub fn wrap(&self, p: Point) -> Point {
        Point::new(
            wrap_coord(p.x, self.x0, self.width()),
            wrap_coord(p.y, self.y0, self.height()),
        )
    }
}

fn wrap_coord(v: f64, lo: f64, len: f64) -> f64 {
    let w = lo + (v - lo).rem_euclid(len);
    // rem_euclid can round up to exactly `len` for tiny negative offsets.
    if w >= lo + len {
        lo
    } else {
        w
    }
}

pub fn intersection_area(a: &Rect, b: &Rect) -> f64 {
    let w = a.x1.min(b.x1) - a.x0.max(b.x0);
    let h = a.y1.min(b.y1) - a.y0.max(b.y0);
    if w <= 0.0 || h <= 0.0 {
        0.0
    } else {
        w * h
    }
}

/// Straight-line motion for `dt` seconds, re-inserted from the opposite edge
/// whenever it leaves `bounds`.
pub fn torus_advance(pos: Point, direction: f64, speed: f64, dt: f64, bounds: &Rect) -> Point {
    let d = speed * dt;
    bounds.wrap(pos.offset(d * direction.cos(), d * direction.sin()))
}
