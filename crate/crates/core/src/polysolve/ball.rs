//! Midpoint-radius arithmetic used to certify signs in double precision.

use std::ops::{Add, Mul, Neg, Sub};

/// Unit roundoff with a little headroom.
const U: f64 = 1.2e-16;

/// A real number known to lie in `[mid - rad, mid + rad]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub mid: f64,
    pub rad: f64,
}

impl Ball {
    pub const ZERO: Ball = Ball { mid: 0.0, rad: 0.0 };

    pub fn exact(mid: f64) -> Self {
        Self { mid, rad: 0.0 }
    }

    pub fn new(mid: f64, rad: f64) -> Self {
        Self { mid, rad }
    }

    /// Sign if the ball excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.mid.abs() > self.rad {
            Some(if self.mid > 0.0 { 1 } else { -1 })
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.sign().is_none()
    }

    pub fn mag(&self) -> f64 {
        self.mid.abs() + self.rad
    }

    pub fn scale(self, k: f64) -> Self {
        let mid = self.mid * k;
        Self { mid, rad: self.rad * k.abs() + U * mid.abs() }
    }

    /// Division by a ball that excludes zero.
    pub fn div(self, rhs: Ball) -> Option<Ball> {
        let den = rhs.mid.abs() - rhs.rad;
        if den <= 0.0 {
            return None;
        }
        let q = self.mid / rhs.mid;
        let rad = (self.rad + q.abs() * rhs.rad) / den + U * q.abs();
        Some(Ball { mid: q, rad })
    }
}

impl Add for Ball {
    type Output = Ball;
    fn add(self, rhs: Ball) -> Ball {
        let mid = self.mid + rhs.mid;
        Ball { mid, rad: self.rad + rhs.rad + U * mid.abs() }
    }
}

impl Sub for Ball {
    type Output = Ball;
    fn sub(self, rhs: Ball) -> Ball {
        let mid = self.mid - rhs.mid;
        Ball { mid, rad: self.rad + rhs.rad + U * mid.abs() }
    }
}

impl Mul for Ball {
    type Output = Ball;
    fn mul(self, rhs: Ball) -> Ball {
        let mid = self.mid * rhs.mid;
        let rad = self.mid.abs() * rhs.rad
            + rhs.mid.abs() * self.rad
            + self.rad * rhs.rad
            + U * mid.abs();
        Ball { mid, rad }
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball { mid: -self.mid, rad: self.rad }
    }
}
