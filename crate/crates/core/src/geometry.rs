//! Small fixed-size vector and matrix types for 2D fields.

use std::ops::{Add, Mul, Neg, Sub};

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Rotation by -90°: the normal obtained from a tangent.
    pub fn rotated_cw(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(s * self.x, s * self.y)
    }

    /// Cross product z-component of (self, other).
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        self.scale(rhs)
    }
}

/// A 2x2 matrix, used for gradients of vector fields.
///
/// Row i holds the gradient of component i, so `m[(i, j)] = d v_i / d x_j`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mat2 {
    pub rows: [[f64; 2]; 2],
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 {
        rows: [[0.0; 2]; 2],
    };

    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 {
            rows: [[a11, a12], [a21, a22]],
        }
    }

    pub fn trace(self) -> f64 {
        self.rows[0][0] + self.rows[1][1]
    }

    /// Symmetric part, (A + A^T) / 2.
    pub fn sym(self) -> Mat2 {
        let off = 0.5 * (self.rows[0][1] + self.rows[1][0]);
        Mat2::new(self.rows[0][0], off, off, self.rows[1][1])
    }

    /// Frobenius inner product A : B.
    pub fn frob_dot(self, other: Mat2) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += self.rows[i][j] * other.rows[i][j];
            }
        }
        s
    }

    /// Matrix-vector product.
    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.rows[0][0] * v.x + self.rows[0][1] * v.y,
            self.rows[1][0] * v.x + self.rows[1][1] * v.y,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                out.rows[i][j] = self.rows[i][j] + rhs.rows[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                out.rows[i][j] = self.rows[i][j] - rhs.rows[i][j];
            }
        }
        out
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: f64) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.rows[i][j] *= rhs;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_clockwise() {
        let t = Vec2::new(1.0, 0.0);
        assert_eq!(t.rotated_cw(), Vec2::new(0.0, -1.0));
        let t = Vec2::new(0.0, 1.0);
        assert_eq!(t.rotated_cw(), Vec2::new(1.0, 0.0));
    }

    #[test]
    fn sym_part_and_trace() {
        let m = Mat2::new(1.0, 2.0, 4.0, 3.0);
        let s = m.sym();
        assert_eq!(s.rows[0][1], 3.0);
        assert_eq!(s.rows[1][0], 3.0);
        assert_eq!(m.trace(), 4.0);
    }
}
