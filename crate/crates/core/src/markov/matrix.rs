use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::Mul;

/// A 2×2 complex matrix, row-major `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[[f64; 2]; 4]", from = "[[f64; 2]; 4]")]
pub struct Sl2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl From<Sl2> for [[f64; 2]; 4] {
    fn from(m: Sl2) -> Self {
        [m.a, m.b, m.c, m.d].map(|v| [v.re, v.im])
    }
}

impl From<[[f64; 2]; 4]> for Sl2 {
    fn from(v: [[f64; 2]; 4]) -> Self {
        let [a, b, c, d] = v.map(|e| Complex64::new(e[0], e[1]));
        Sl2 { a, b, c, d }
    }
}

impl Sl2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Sl2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Sl2::new(one, zero, zero, one)
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse of a unit-determinant matrix.
    pub fn inverse(&self) -> Self {
        Sl2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Attracting and repelling fixed points on the Riemann sphere.
    pub fn fixed_points(&self) -> (Complex64, Complex64) {
        // c z² + (d − a) z − b = 0
        let disc = ((self.a - self.d) * (self.a - self.d) + 4.0 * self.b * self.c).sqrt();
        if self.c.norm() <= 1e-300 {
            let finite = self.b / (self.d - self.a);
            let infinity = Complex64::new(f64::INFINITY, 0.0);
            // z ↦ (a z + b)/d expands around the finite point when |a| > |d|
            return if self.a.norm() > self.d.norm() {
                (infinity, finite)
            } else {
                (finite, infinity)
            };
        }
        let z1 = (self.a - self.d + disc) / (2.0 * self.c);
        let z2 = (self.a - self.d - disc) / (2.0 * self.c);
        // derivative at a fixed point is 1/(c z + d)²; attracting when |c z + d| > 1
        if (self.c * z1 + self.d).norm() >= (self.c * z2 + self.d).norm() {
            (z1, z2)
        } else {
            (z2, z1)
        }
    }
}

impl Mul for Sl2 {
    type Output = Sl2;
    fn mul(self, o: Sl2) -> Sl2 {
        Sl2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}
