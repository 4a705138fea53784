use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// A complex value together with its holomorphic gradient with respect to two
/// complex variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub grad: [Complex64; 2],
}

impl Jet {
    pub fn constant(value: Complex64) -> Self {
        Jet {
            value,
            grad: [Complex64::new(0.0, 0.0); 2],
        }
    }

    /// The `index`-th independent variable at `value`.
    pub fn variable(value: Complex64, index: usize) -> Self {
        let mut grad = [Complex64::new(0.0, 0.0); 2];
        grad[index] = Complex64::new(1.0, 0.0);
        Jet { value, grad }
    }

    fn chain(self, value: Complex64, derivative: Complex64) -> Self {
        Jet {
            value,
            grad: [self.grad[0] * derivative, self.grad[1] * derivative],
        }
    }

    pub fn scale(self, k: Complex64) -> Self {
        Jet {
            value: self.value * k,
            grad: [self.grad[0] * k, self.grad[1] * k],
        }
    }

    pub fn add_const(self, k: Complex64) -> Self {
        Jet {
            value: self.value + k,
            ..self
        }
    }

    pub fn recip(self) -> Self {
        let inv = self.value.inv();
        self.chain(inv, -inv * inv)
    }

    pub fn cosh(self) -> Self {
        self.chain(self.value.cosh(), self.value.sinh())
    }

    pub fn sinh(self) -> Self {
        self.chain(self.value.sinh(), self.value.cosh())
    }

    /// Principal square root; derivative `1 / (2√v)`.
    pub fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.chain(r, (2.0 * r).inv())
    }

    /// `2·arccosh(self/2)` on the branch with non-negative real part.
    pub fn complex_length(self) -> Self {
        let w = self.value * 0.5;
        let s = super::arccosh_root(w);
        let lambda = 2.0 * (w + s).ln();
        // dλ/dt = 1/s with s = sinh(λ/2)
        self.chain(lambda, s.inv())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            value: self.value + o.value,
            grad: [self.grad[0] + o.grad[0], self.grad[1] + o.grad[1]],
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet {
            value: self.value - o.value,
            grad: [self.grad[0] - o.grad[0], self.grad[1] - o.grad[1]],
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            value: self.value * o.value,
            grad: [
                self.grad[0] * o.value + self.value * o.grad[0],
                self.grad[1] * o.value + self.value * o.grad[1],
            ],
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_rule_against_difference_quotient() {
        let f = |a: Jet, b: Jet| (a * b).cosh() * a.recip() + b.sqrt();
        let (a0, b0) = (c(0.7, 0.2), c(1.3, -0.4));
        let j = f(Jet::variable(a0, 0), Jet::variable(b0, 1));
        let h = 1e-6;
        let fa = |a: Complex64| f(Jet::constant(a), Jet::constant(b0)).value;
        let fb = |b: Complex64| f(Jet::constant(a0), Jet::constant(b)).value;
        let da = (fa(a0 + h) - fa(a0 - h)) / (2.0 * h);
        let db = (fb(b0 + c(0.0, h)) - fb(b0 - c(0.0, h))) / c(0.0, 2.0 * h);
        assert!((da - j.grad[0]).norm() < 1e-8);
        assert!((db - j.grad[1]).norm() < 1e-8);
    }

    #[test]
    fn complex_length_derivative() {
        let t0 = c(3.1, 0.4);
        let j = Jet::variable(t0, 0).complex_length();
        let h = 1e-6;
        let f = |t: Complex64| Jet::constant(t).complex_length().value;
        let d = (f(t0 + h) - f(t0 - h)) / (2.0 * h);
        assert!((d - j.grad[0]).norm() < 1e-8);
    }
}
