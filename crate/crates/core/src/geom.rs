//! Small planar geometry types shared by every module.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::math;

/// A point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the planar cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Counter-clockwise rotation by a right angle.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Polar angle in `(-π, π]`.
    #[inline]
    pub fn angle(self) -> f64 {
        math::atan2(self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Distance from `self` to the closed segment `[a, b]`.
    pub fn dist_to_segment(self, a: Vec2, b: Vec2) -> f64 {
        let ab = b - a;
        let len2 = ab.norm_sq();
        if len2 == 0.0 {
            return self.dist(a);
        }
        let t = ((self - a).dot(ab) / len2).clamp(0.0, 1.0);
        self.dist(a + ab * t)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    pub fn row(&self, i: usize) -> Vec2 {
        Vec2::new(self.m[i][0], self.m[i][1])
    }

    /// Solves `self · x = rhs`; `None` when the matrix is numerically singular.
    pub fn solve(&self, rhs: Vec2) -> Option<Vec2> {
        let det = self.det();
        let scale = self.max_abs();
        if scale == 0.0 || det.abs() <= 1e-14 * scale * scale {
            return None;
        }
        Some(Vec2::new(
            (self.m[1][1] * rhs.x - self.m[0][1] * rhs.y) / det,
            (self.m[0][0] * rhs.y - self.m[1][0] * rhs.x) / det,
        ))
    }

    /// Damped least-squares step `(AᵀA + μI)⁻¹ Aᵀ rhs`.
    pub fn solve_damped(&self, rhs: Vec2, mu: f64) -> Vec2 {
        let a = self.m;
        let ata = Mat2::new(
            a[0][0] * a[0][0] + a[1][0] * a[1][0] + mu,
            a[0][0] * a[0][1] + a[1][0] * a[1][1],
            a[0][1] * a[0][0] + a[1][1] * a[1][0],
            a[0][1] * a[0][1] + a[1][1] * a[1][1] + mu,
        );
        let atb = Vec2::new(
            a[0][0] * rhs.x + a[1][0] * rhs.y,
            a[0][1] * rhs.x + a[1][1] * rhs.y,
        );
        let det = ata.det();
        Vec2::new(
            (ata.m[1][1] * atb.x - ata.m[0][1] * atb.y) / det,
            (ata.m[0][0] * atb.y - ata.m[1][0] * atb.x) / det,
        )
    }
}

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    /// Square of half-width `h` centred on `c`.
    pub fn centered(c: Vec2, h: f64) -> Self {
        Self::new(c.x - h, c.y - h, c.x + h, c.y + h)
    }

    pub fn is_valid(&self) -> bool {
        self.x0.is_finite()
            && self.y0.is_finite()
            && self.x1.is_finite()
            && self.y1.is_finite()
            && self.x1 > self.x0
            && self.y1 > self.y0
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diameter(&self) -> f64 {
        math::hypot(self.width(), self.height())
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn expanded(&self, m: f64) -> Rect {
        Rect::new(self.x0 - m, self.y0 - m, self.x1 + m, self.y1 + m)
    }

    /// The four quadrants, in a fixed order.
    pub fn split4(&self) -> [Rect; 4] {
        let c = self.center();
        [
            Rect::new(self.x0, self.y0, c.x, c.y),
            Rect::new(c.x, self.y0, self.x1, c.y),
            Rect::new(self.x0, c.y, c.x, self.y1),
            Rect::new(c.x, c.y, self.x1, self.y1),
        ]
    }

    /// Counter-clockwise boundary point for `t ∈ [0, 1]`.
    pub fn boundary_point(&self, t: f64) -> Vec2 {
        let (w, h) = (self.width(), self.height());
        let per = 2.0 * (w + h);
        let s = (t - libm::floor(t)) * per;
        if s < w {
            Vec2::new(self.x0 + s, self.y0)
        } else if s < w + h {
            Vec2::new(self.x1, self.y0 + (s - w))
        } else if s < 2.0 * w + h {
            Vec2::new(self.x1 - (s - w - h), self.y1)
        } else {
            Vec2::new(self.x0, self.y1 - (s - 2.0 * w - h))
        }
    }

    /// Point where the segment from inside point `a` to outside point `b`
    /// crosses the boundary.
    pub fn clip_exit(&self, a: Vec2, b: Vec2) -> Vec2 {
        let d = b - a;
        let mut t = 1.0_f64;
        if d.x > 0.0 {
            t = t.min((self.x1 - a.x) / d.x);
        } else if d.x < 0.0 {
            t = t.min((self.x0 - a.x) / d.x);
        }
        if d.y > 0.0 {
            t = t.min((self.y1 - a.y) / d.y);
        } else if d.y < 0.0 {
            t = t.min((self.y0 - a.y) / d.y);
        }
        a + d * t.clamp(0.0, 1.0)
    }
}
