use num_complex::Complex64;
use std::f64::consts::LN_2;
use std::ops::{Mul, Sub};

/// Complex number stored as `mantissa · 2^exponent`.
///
/// Traces of long simple curves grow like `exp(length / 2)` and leave the
/// `f64` range once the curve crosses the base curves a few hundred times;
/// this type keeps the Farey recursion finite for those.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WideComplex {
    mantissa: Complex64,
    exponent: i64,
}

fn pow2(k: i64) -> f64 {
    if k < -1074 {
        0.0
    } else if k > 1023 {
        f64::INFINITY
    } else {
        2f64.powi(k as i32)
    }
}

impl WideComplex {
    pub fn new(value: Complex64) -> Self {
        WideComplex {
            mantissa: value,
            exponent: 0,
        }
        .normalized()
    }

    fn normalized(self) -> Self {
        let scale = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if scale == 0.0 || !scale.is_finite() {
            return WideComplex {
                mantissa: self.mantissa,
                exponent: if scale == 0.0 { 0 } else { self.exponent },
            };
        }
        let k = scale.log2().floor() as i64;
        WideComplex {
            mantissa: self.mantissa * pow2(-k),
            exponent: self.exponent + k,
        }
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Conversion back to `f64`; overflows to infinity for huge values.
    pub fn to_complex(&self) -> Complex64 {
        if self.exponent > 1023 {
            self.mantissa * f64::INFINITY
        } else {
            self.mantissa * pow2(self.exponent)
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Complex64 {
        let m = self.mantissa.ln();
        Complex64::new(m.re + self.exponent as f64 * LN_2, m.im)
    }

    pub fn norm(&self) -> f64 {
        // ln-domain to survive huge exponents
        (self.mantissa.norm().ln() + self.exponent as f64 * LN_2).exp()
    }

    /// `2·arccosh(self/2)` with non-negative real part, before any
    /// `PSL(2,ℂ)` sign normalization of the imaginary part.
    pub fn complex_length_raw(&self) -> Complex64 {
        if self.exponent < 500 {
            let w = self.to_complex() * 0.5;
            let s = super::arccosh_root(w);
            return 2.0 * (w + s).ln();
        }
        // |w| > 2^499: arccosh(w) = ln(2w) up to O(w^-2)
        2.0 * self.ln()
    }
}

impl From<Complex64> for WideComplex {
    fn from(value: Complex64) -> Self {
        WideComplex::new(value)
    }
}

impl Mul for WideComplex {
    type Output = WideComplex;
    fn mul(self, o: WideComplex) -> WideComplex {
        WideComplex {
            mantissa: self.mantissa * o.mantissa,
            exponent: self.exponent + o.exponent,
        }
        .normalized()
    }
}

impl Sub for WideComplex {
    type Output = WideComplex;
    fn sub(self, o: WideComplex) -> WideComplex {
        if o.mantissa == Complex64::new(0.0, 0.0) {
            return self;
        }
        if self.mantissa == Complex64::new(0.0, 0.0) {
            return WideComplex {
                mantissa: -o.mantissa,
                exponent: o.exponent,
            };
        }
        let (mantissa, exponent) = if self.exponent >= o.exponent {
            (
                self.mantissa - o.mantissa * pow2(o.exponent - self.exponent),
                self.exponent,
            )
        } else {
            (
                self.mantissa * pow2(self.exponent - o.exponent) - o.mantissa,
                o.exponent,
            )
        };
        WideComplex { mantissa, exponent }.normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_f64_in_range() {
        let a = Complex64::new(3.5, -1.25);
        let b = Complex64::new(-0.75, 2.0);
        let wa = WideComplex::from(a);
        let wb = WideComplex::from(b);
        assert!(((wa * wb).to_complex() - a * b).norm() < 1e-14);
        assert!(((wa - wb).to_complex() - (a - b)).norm() < 1e-14);
        assert!((wa.ln() - a.ln()).norm() < 1e-14);
    }

    #[test]
    fn survives_overflow() {
        let mut w = WideComplex::from(Complex64::new(1e200, 0.0));
        for _ in 0..10 {
            w = w * w;
        }
        // 1e200^(2^10)
        let expected = 200.0 * 1024.0 * std::f64::consts::LN_10;
        assert!((w.ln().re - expected).abs() / expected < 1e-12);
        let lambda = w.complex_length_raw();
        assert!((lambda.re - 2.0 * expected).abs() / expected < 1e-12);
    }
}
