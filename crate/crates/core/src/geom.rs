//! Planar vectors and points on the unit torus (R/Z)^2.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// A vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Applies the symplectic matrix `[[0, 1], [-1, 0]]`, i.e. a rotation by -pi/2.
    pub fn symplectic(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    /// Componentwise reduction to the representative in [-1/2, 1/2)^2.
    pub fn wrapped(self) -> Vec2 {
        Vec2::new(wrap_signed(self.x), wrap_signed(self.y))
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl std::iter::Sum for Vec2 {
    fn sum<I: Iterator<Item = Vec2>>(iter: I) -> Vec2 {
        iter.fold(Vec2::ZERO, |a, b| a + b)
    }
}

/// Reduces `v` to [-1/2, 1/2).
pub fn wrap_signed(v: f64) -> f64 {
    let w = v - (v + 0.5).floor();
    // floor can round up for v + 0.5 just below an integer
    if w >= 0.5 {
        w - 1.0
    } else {
        w
    }
}

/// Reduces `v` to [0, 1).
pub fn wrap_unit(v: f64) -> f64 {
    let w = v - v.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// A point of the unit torus, stored by its canonical representative in [0,1)^2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusVec {
    x: f64,
    y: f64,
}

impl TorusVec {
    pub fn new(x: f64, y: f64) -> Self {
        TorusVec {
            x: wrap_unit(x),
            y: wrap_unit(y),
        }
    }

    pub fn from_planar(p: Vec2) -> Self {
        TorusVec::new(p.x, p.y)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn as_vec2(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// `self - other` as a planar vector in [-1/2, 1/2)^2.
    pub fn wrap_sub(&self, other: &TorusVec) -> Vec2 {
        Vec2::new(wrap_signed(self.x - other.x), wrap_signed(self.y - other.y))
    }

    /// Geodesic distance on the flat torus.
    pub fn wrap_dist(&self, other: &TorusVec) -> f64 {
        self.wrap_sub(other).norm()
    }

    pub fn translate(&self, v: Vec2) -> TorusVec {
        TorusVec::new(self.x + v.x, self.y + v.y)
    }
}
