//! Small numerical kernels shared by the solvers: complex jets for forward-mode
//! holomorphic derivatives, an extended-exponent complex type for very long
//! curves, and closed-form 2×2 linear algebra.

mod jet;
mod linalg;
mod minimize;
mod wide;

pub use jet::Jet;
pub use linalg::{solve2_complex, solve2_real, sym_eigenvalues2, Mat2};
pub use minimize::{minimize1, minimize2, Minimum2};
pub use wide::WideComplex;

use num_complex::Complex64;
use std::ops::{Mul, Sub};

/// Ring operations needed by the Farey trace recursion.
pub trait TraceScalar: Clone + Mul<Output = Self> + Sub<Output = Self> {}

impl TraceScalar for Complex64 {}
impl TraceScalar for Jet {}
impl TraceScalar for WideComplex {}

/// Principal square root of `w² − 1` paired so that `|w + s| ≥ 1`.
pub(crate) fn arccosh_root(w: Complex64) -> Complex64 {
    let s = (w * w - 1.0).sqrt();
    if (w + s).norm_sqr() >= (w - s).norm_sqr() {
        s
    } else {
        -s
    }
}
