//! Trace coordinates on the character variety of the punctured torus with
//! parabolic commutator: Markov triples, the Farey trace recursion, complex
//! lengths, matrix realizations and a Bowditch-style discreteness heuristic.
//!
//! A [`TraceTriple`] `(x, y, z)` records the traces of the curves `0/1`,
//! `1/0` and `1/1`. It satisfies `x² + y² + z² = xyz`, which is the condition
//! that the commutator of the generators has trace `−2`.

mod bowditch;
mod matrix;

pub use bowditch::{bowditch_check, BowditchConfig, BowditchReport, Verdict};
pub use matrix::Sl2;

use crate::curves::{Frame, Slope};
use crate::error::{Error, Result};
use crate::numeric::{arccosh_root, Jet, TraceScalar, WideComplex};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

/// Farey path cap: slopes with `max(|p|, q)` above this are rejected.
pub const DEFAULT_PATH_CAP: i64 = 1_000_000;

/// Relative tolerance on the Markov residual.
pub const MARKOV_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceTriple {
    x: Complex64,
    y: Complex64,
    z: Complex64,
}

/// Which coordinate a Vieta flip replaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    X,
    Y,
    Z,
}

/// Root selector when completing a triple from `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Root {
    /// `(xy − √D)/2` with the principal square root.
    Minus,
    /// `(xy + √D)/2`.
    Plus,
}

pub fn markov_residual(x: Complex64, y: Complex64, z: Complex64) -> f64 {
    (x * x + y * y + z * z - x * y * z).norm() / (1.0 + (x * y * z).norm())
}

impl TraceTriple {
    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Result<Self> {
        for (name, v) in [("x", x), ("y", y), ("z", z)] {
            if v.norm() == 0.0 || !v.is_finite() {
                return Err(Error::Degenerate(format!("{name} = {v}")));
            }
        }
        let residual = markov_residual(x, y, z);
        if residual > MARKOV_TOLERANCE {
            return Err(Error::MarkovResidual { residual });
        }
        Ok(TraceTriple { x, y, z })
    }

    pub fn real(x: f64, y: f64, z: f64) -> Result<Self> {
        TraceTriple::new(x.into(), y.into(), z.into())
    }

    /// Completes `(x, y)` with a root of `z² − xyz + x² + y² = 0`.
    pub fn complete(x: Complex64, y: Complex64, root: Root) -> Result<Self> {
        let disc = (x * y * x * y - 4.0 * (x * x + y * y)).sqrt();
        let z = match root {
            Root::Minus => (x * y - disc) * 0.5,
            Root::Plus => (x * y + disc) * 0.5,
        };
        TraceTriple::new(x, y, z)
    }

    pub fn x(&self) -> Complex64 {
        self.x
    }

    pub fn y(&self) -> Complex64 {
        self.y
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn residual(&self) -> f64 {
        markov_residual(self.x, self.y, self.z)
    }

    /// Largest coordinate-wise distance between two triples.
    pub fn distance(&self, other: &TraceTriple) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tolerance: f64) -> bool {
        self.as_array().iter().all(|v| v.im.abs() <= tolerance * (1.0 + v.re.abs()))
    }

    /// Replaces one coordinate `w` by (product of the other two) − `w`.
    pub fn vieta_flip(&self, coord: Coord) -> TraceTriple {
        let (x, y, z) = (self.x, self.y, self.z);
        match coord {
            Coord::X => TraceTriple { x: y * z - x, y, z },
            Coord::Y => TraceTriple { x, y: x * z - y, z },
            Coord::Z => TraceTriple { x, y, z: x * y - z },
        }
    }

    pub fn trace_of_slope(&self, s: Slope) -> Result<Complex64> {
        farey_trace(self.x, self.y, self.z, s, DEFAULT_PATH_CAP)
    }

    pub fn trace_of_slope_capped(&self, s: Slope, cap: i64) -> Result<Complex64> {
        farey_trace(self.x, self.y, self.z, s, cap)
    }

    /// Trace of `s` in extended-exponent arithmetic, for curves long enough to
    /// overflow `f64`.
    pub fn wide_trace_of_slope(&self, s: Slope) -> Result<WideComplex> {
        farey_trace(
            WideComplex::from(self.x),
            WideComplex::from(self.y),
            WideComplex::from(self.z),
            s,
            DEFAULT_PATH_CAP,
        )
    }

    pub fn complex_length_of(&self, s: Slope) -> Result<ComplexLength> {
        Ok(complex_length(self.trace_of_slope(s)?))
    }

    /// The same representation read in the marking `frame`: traces of the
    /// frame's base, dual and third curves.
    pub fn in_frame(&self, frame: &Frame) -> Result<TraceTriple> {
        TraceTriple::new(
            self.trace_of_slope(frame.base())?,
            self.trace_of_slope(frame.dual())?,
            self.trace_of_slope(frame.third())?,
        )
    }

    /// Inverse of [`TraceTriple::in_frame`].
    pub fn from_frame(frame_triple: &TraceTriple, frame: &Frame) -> Result<TraceTriple> {
        TraceTriple::new(
            frame_triple.trace_of_slope(frame.from_standard(Slope::ZERO))?,
            frame_triple.trace_of_slope(frame.from_standard(Slope::INFINITY))?,
            frame_triple.trace_of_slope(frame.from_standard(Slope::ONE))?,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct TripleRecord {
    x: [f64; 2],
    y: [f64; 2],
    z: [f64; 2],
}

impl Serialize for TraceTriple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TripleRecord {
            x: [self.x.re, self.x.im],
            y: [self.y.re, self.y.im],
            z: [self.z.re, self.z.im],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TraceTriple {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = TripleRecord::deserialize(d)?;
        let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
        TraceTriple::new(c(r.x), c(r.y), c(r.z)).map_err(serde::de::Error::custom)
    }
}

/// Trace of the curve `s` given the traces of `0/1`, `1/0`, `1/1`.
///
/// Walks the Farey tree from the basis triangle towards `s`. Each step adds
/// the mediant of the current edge `(L, R)` with trace
/// `tr(L)·tr(R) − tr(opposite)`.
pub fn farey_trace<T: TraceScalar>(x: T, y: T, z: T, s: Slope, cap: i64) -> Result<T> {
    if s == Slope::ZERO {
        return Ok(x);
    }
    if s == Slope::INFINITY {
        return Ok(y);
    }
    if s == Slope::ONE {
        return Ok(z);
    }
    if s.p().abs().max(s.q()) > cap {
        return Err(Error::PathTooLong { slope: s, cap });
    }
    // vectors (p, q); the left end of the negative half is −1/0
    let (mut l, mut r, mut m);
    let (mut tl, mut tr, mut tm);
    if s.p() > 0 {
        (l, r, m) = ((0i64, 1i64), (1i64, 0i64), (1i64, 1i64));
        (tl, tr, tm) = (x, y, z);
    } else {
        (l, r, m) = ((-1, 0), (0, 1), (-1, 1));
        tm = x.clone() * y.clone() - z;
        (tl, tr) = (y, x);
    }
    loop {
        if m == (s.p(), s.q()) {
            return Ok(tm);
        }
        let below = (s.p() as i128) * (m.1 as i128) < (m.0 as i128) * (s.q() as i128);
        if below {
            let next = tl.clone() * tm.clone() - tr;
            (r, tr) = (m, tm);
            m = (l.0 + r.0, l.1 + r.1);
            tm = next;
        } else {
            let next = tm.clone() * tr.clone() - tl;
            (l, tl) = (m, tm);
            m = (l.0 + r.0, l.1 + r.1);
            tm = next;
        }
    }
}

/// A complex length `λ` with `Re λ ≥ 0` and `Im λ ∈ (−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexLength {
    pub value: Complex64,
    /// Trace is `±2`.
    pub parabolic: bool,
    /// The imaginary part was shifted by `2πi`, so `cosh(λ/2) = −trace/2`.
    /// This is the sign ambiguity of traces in `PSL(2,ℂ)`.
    pub sign_flipped: bool,
}

impl ComplexLength {
    pub fn real_length(&self) -> f64 {
        self.value.re
    }
}

/// `λ = 2·arccosh(trace/2)`, normalized to `Re λ ≥ 0`, `Im λ ∈ (−π, π]`.
pub fn complex_length(trace: Complex64) -> ComplexLength {
    let w = trace * 0.5;
    let mut value = 2.0 * (w + arccosh_root(w)).ln();
    let mut sign_flipped = false;
    if value.im > PI {
        value.im -= 2.0 * PI;
        sign_flipped = true;
    } else if value.im <= -PI {
        value.im += 2.0 * PI;
        sign_flipped = true;
    }
    let parabolic = (trace - 2.0).norm() < 1e-12 || (trace + 2.0).norm() < 1e-12;
    if parabolic {
        value = Complex64::new(0.0, 0.0);
    }
    ComplexLength {
        value,
        parabolic,
        sign_flipped,
    }
}

/// Traces of the frame curves (base, dual, third) in complex Fenchel–Nielsen
/// coordinates `(λ, τ)` relative to the base curve:
/// `2cosh(λ/2)`, `2cosh(τ/2)coth(λ/2)`, `2cosh((τ+λ)/2)coth(λ/2)`.
pub fn fenchel_nielsen(lambda: Jet, tau: Jet) -> [Jet; 3] {
    let half = Complex64::new(0.5, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let h = lambda.scale(half);
    let coth = h.cosh() * h.sinh().recip();
    let x = h.cosh().scale(two);
    let y = (tau.scale(half).cosh() * coth).scale(two);
    let z = ((tau + lambda).scale(half).cosh() * coth).scale(two);
    [x, y, z]
}

/// The frame triple at Fenchel–Nielsen coordinates `(λ, τ)`.
pub fn fenchel_nielsen_triple(lambda: Complex64, tau: Complex64) -> Result<TraceTriple> {
    let [x, y, z] = fenchel_nielsen(Jet::constant(lambda), Jet::constant(tau));
    TraceTriple::new(x.value, y.value, z.value)
}

/// Recovers `(λ, τ)` from a frame triple; `τ` is the root of
/// `cosh(τ/2) = (y/2)·tanh(λ/2)` that reproduces `z`.
pub fn fenchel_nielsen_coordinates(frame_triple: &TraceTriple) -> (Complex64, Complex64) {
    let w = frame_triple.x * 0.5;
    let s = arccosh_root(w);
    let lambda = 2.0 * (w + s).ln();
    let c = frame_triple.y * 0.5 * s / w;
    let tau = 2.0 * (c + arccosh_root(c)).ln();
    let coth = w / s;
    let z_of = |t: Complex64| 2.0 * ((t + lambda) * 0.5).cosh() * coth;
    if (z_of(tau) - frame_triple.z).norm() <= (z_of(-tau) - frame_triple.z).norm() {
        (lambda, tau)
    } else {
        (lambda, -tau)
    }
}

/// Matrix normal forms for [`realize_matrices_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `A = [[x, 1], [−1, 0]]`, `B = [[0, s], [−1/s, y]]` with
    /// `s² + zs + 1 = 0`.
    Companion,
    /// Jørgensen's form, which puts the fixed point of the commutator at ∞:
    /// `A = [[x − y/z, x/z²], [x, y/z]]`, `B = [[y − x/z, −y/z²], [−y, x/z]]`.
    Jorgensen,
}

/// A pair of unit-determinant matrices with parabolic commutator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRep {
    pub a: Sl2,
    pub b: Sl2,
}

impl GroupRep {
    pub fn commutator_trace(&self) -> Complex64 {
        (self.a * self.b * self.a.inverse() * self.b.inverse()).trace()
    }

    /// The Farey word of `s`, multiplied out. Words of a Farey edge `L < R`
    /// concatenate to the word of the mediant; the positive half starts from
    /// `(A, B)` and the negative half from `(B⁻¹, A)`.
    pub fn word(&self, s: Slope) -> Sl2 {
        if s == Slope::ZERO {
            return self.a;
        }
        if s == Slope::INFINITY {
            return self.b;
        }
        let (mut l, mut r);
        let (mut wl, mut wr);
        if s.p() > 0 {
            (l, r) = ((0i64, 1i64), (1i64, 0i64));
            (wl, wr) = (self.a, self.b);
        } else {
            (l, r) = ((-1, 0), (0, 1));
            (wl, wr) = (self.b.inverse(), self.a);
        }
        loop {
            let m = (l.0 + r.0, l.1 + r.1);
            let wm = wl * wr;
            if m == (s.p(), s.q()) {
                return wm;
            }
            if (s.p() as i128) * (m.1 as i128) < (m.0 as i128) * (s.q() as i128) {
                (r, wr) = (m, wm);
            } else {
                (l, wl) = (m, wm);
            }
        }
    }
}

pub fn realize_matrices(t: &TraceTriple) -> Result<GroupRep> {
    realize_matrices_with(t, Normalization::Companion)
}

pub fn realize_matrices_with(t: &TraceTriple, normalization: Normalization) -> Result<GroupRep> {
    let (x, y, z) = (t.x, t.y, t.z);
    for (name, v) in [("x", x), ("y", y), ("z", z)] {
        if v.norm() < 1e-300 {
            return Err(Error::Degenerate(format!("{name} = 0")));
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(match normalization {
        Normalization::Companion => {
            let s = (-z + (z * z - 4.0).sqrt()) * 0.5;
            GroupRep {
                a: Sl2::new(x, one, -one, zero),
                b: Sl2::new(zero, s, -s.inv(), y),
            }
        }
        Normalization::Jorgensen => {
            let z2 = z * z;
            GroupRep {
                a: Sl2::new(x - y / z, x / z2, x, y / z),
                b: Sl2::new(y - x / z, -y / z2, -y, x / z),
            }
        }
    })
}

#[cfg(test)]
mod tests;
