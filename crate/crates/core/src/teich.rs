//! Fuchsian space as real trace triples, geodesic length functions of
//! measured laminations, lines of minima and the boundary function `f`.
//!
//! Minimizations run in Fenchel–Nielsen coordinates `(l, t)` adapted to the
//! first lamination: its length is then a coordinate, and the chart covers
//! Fuchsian space without folds.

use crate::curves::{intersection, Frame, Lamination, Slope, Support, WeightedCurve};
use crate::error::{Error, Result};
use crate::markov::{
    complex_length, farey_trace, fenchel_nielsen, fenchel_nielsen_coordinates, fenchel_nielsen_triple,
    TraceTriple, DEFAULT_PATH_CAP,
};
use crate::numeric::{minimize1, minimize2, Jet};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Stopping gap for the convergent ladder of irrational lengths.
pub const LADDER_TOLERANCE: f64 = 1e-8;
/// Convergents tried before the ladder gives up.
pub const LADDER_BUDGET: usize = 40;
/// Gradient-norm target for points on a line of minima.
pub const GRADIENT_TOLERANCE: f64 = 1e-8;
/// Irrational laminations enter minimizations through their first
/// convergent with at least this denominator.
pub const MINIMIZATION_DENOMINATOR: i64 = 100;

const SPOT_CHECK_DEPTH: usize = 6;

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A point of Fuchsian space: a real Markov triple with all simple traces
/// above 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TraceTriple", into = "TraceTriple")]
pub struct FuchsianPoint {
    triple: TraceTriple,
}

impl TryFrom<TraceTriple> for FuchsianPoint {
    type Error = Error;
    fn try_from(t: TraceTriple) -> Result<Self> {
        FuchsianPoint::new(t)
    }
}

impl From<FuchsianPoint> for TraceTriple {
    fn from(p: FuchsianPoint) -> TraceTriple {
        p.triple
    }
}

impl FuchsianPoint {
    /// Accepts triples that are real to `1e-10` relative and whose simple
    /// traces exceed 2 down to Farey depth 6.
    pub fn new(t: TraceTriple) -> Result<Self> {
        if !t.is_real(1e-10) {
            return Err(Error::Precondition(format!("triple {t:?} is not real")));
        }
        let [x, y, z] = t.as_array().map(|v| v.re);
        let triple = TraceTriple::real(x, y, z)?;
        let mut frontier = vec![(x, y, z), (y, z, x), (x, z, y)];
        if x.min(y).min(z) <= 2.0 {
            return Err(Error::Precondition(format!("trace below 2 in ({x}, {y}, {z})")));
        }
        for _ in 0..SPOT_CHECK_DEPTH {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for (a, b, old) in frontier {
                let d = a * b - old;
                if d <= 2.0 {
                    return Err(Error::Precondition(format!("simple trace {d} ≤ 2")));
                }
                next.push((a, d, b));
                next.push((d, b, a));
            }
            frontier = next;
        }
        Ok(FuchsianPoint { triple })
    }

    pub fn from_real(x: f64, y: f64, z: f64) -> Result<Self> {
        FuchsianPoint::new(TraceTriple::real(x, y, z)?)
    }

    pub fn triple(&self) -> &TraceTriple {
        &self.triple
    }

    pub fn coords(&self) -> [f64; 3] {
        self.triple.as_array().map(|v| v.re)
    }
}

/// Sheet of the `(x, y)` chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Lower,
    Upper,
}

fn discriminant(x: f64, y: f64) -> f64 {
    let d = x * x * y * y - 4.0 * (x * x + y * y);
    // both roots coincide on the fold; absorb rounding there
    if d < 0.0 && d > -1e-12 * x * x * y * y {
        0.0
    } else {
        d
    }
}

/// The Fuchsian point over `(x, y)` on the given sheet,
/// `z = (xy ± √(x²y² − 4x² − 4y²))/2`.
pub fn chart_point(x: f64, y: f64, branch: Branch) -> Result<FuchsianPoint> {
    if !(x > 2.0 && y > 2.0) {
        return Err(Error::Precondition(format!("chart needs x, y > 2, got ({x}, {y})")));
    }
    let d = discriminant(x, y);
    if d < 0.0 {
        return Err(Error::NegativeDiscriminant(d));
    }
    let z = match branch {
        Branch::Lower => 0.5 * (x * y - d.sqrt()),
        Branch::Upper => 0.5 * (x * y + d.sqrt()),
    };
    FuchsianPoint::from_real(x, y, z)
}

/// Gradient of `l_s` with respect to the chart coordinates `(x, y)`.
pub fn length_gradient_chart(x: f64, y: f64, branch: Branch, s: Slope) -> Result<[f64; 2]> {
    let d = discriminant(x, y);
    if d <= 0.0 {
        return Err(Error::NegativeDiscriminant(d));
    }
    let xj = Jet::variable(cx(x), 0);
    let yj = Jet::variable(cx(y), 1);
    let xy = xj * yj;
    let root = (xy * xy - (xj * xj + yj * yj).scale(cx(4.0))).sqrt();
    let z = match branch {
        Branch::Lower => (xy - root).scale(cx(0.5)),
        Branch::Upper => (xy + root).scale(cx(0.5)),
    };
    let l = farey_trace(xj, yj, z, s, DEFAULT_PATH_CAP)?.complex_length();
    Ok([l.grad[0].re, l.grad[1].re])
}

/// A length together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthEstimate {
    pub value: f64,
    /// Convergent index of the last ladder rung (irrational support only).
    pub convergent_index: Option<usize>,
    /// Difference between the last two rungs.
    pub gap: Option<f64>,
}

/// Real length of the curve `s`, switching to extended exponents when the
/// trace leaves the `f64` range.
pub fn curve_length(t: &TraceTriple, s: Slope) -> Result<f64> {
    let trace = t.trace_of_slope(s)?;
    if trace.is_finite() && trace.norm() < 1e150 {
        Ok(complex_length(trace).value.re)
    } else {
        Ok(t.wide_trace_of_slope(s)?.complex_length_raw().re)
    }
}

/// `l_m`, the real part of the complex length; irrational supports are
/// reached through the ladder `(weight/q_k)·l_{p_k/q_k}`.
pub fn length_estimate(t: &TraceTriple, m: &Lamination) -> Result<LengthEstimate> {
    length_estimate_with(t, m, LADDER_BUDGET)
}

/// As [`length_estimate`] with at most `budget` convergents.
pub fn length_estimate_with(t: &TraceTriple, m: &Lamination, budget: usize) -> Result<LengthEstimate> {
    match m.support() {
        Support::Rational(s) => Ok(LengthEstimate {
            value: m.weight() * curve_length(t, *s)?,
            convergent_index: None,
            gap: None,
        }),
        Support::Irrational(irr) => {
            let rungs = irr.truncation().min(budget);
            let mut previous: Option<f64> = None;
            let mut gap = f64::INFINITY;
            for k in 0..rungs {
                let approx = match m.approximant(k) {
                    Ok(a) => a,
                    Err(_) => break,
                };
                let value = approx.weight * curve_length(t, approx.slope)?;
                if let Some(p) = previous {
                    gap = (value - p).abs();
                    if gap < LADDER_TOLERANCE {
                        return Ok(LengthEstimate {
                            value,
                            convergent_index: Some(k),
                            gap: Some(gap),
                        });
                    }
                }
                previous = Some(value);
            }
            Err(Error::LadderBudget { budget: rungs, gap })
        }
    }
}

pub fn length(p: &FuchsianPoint, m: &Lamination) -> Result<f64> {
    length_estimate(p.triple(), m).map(|e| e.value)
}

/// Complex Fenchel–Nielsen coordinates `(λ, τ)` relative to a frame whose
/// base curve has length `λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FnChart {
    frame: Frame,
}

impl FnChart {
    pub fn adapted(base: Slope) -> Self {
        FnChart {
            frame: Frame::adapted(base),
        }
    }

    pub fn new(frame: Frame) -> Self {
        FnChart { frame }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// The triple in the standard marking.
    pub fn triple(&self, lambda: Complex64, tau: Complex64) -> Result<TraceTriple> {
        let ft = fenchel_nielsen_triple(lambda, tau)?;
        TraceTriple::from_frame(&ft, &self.frame)
    }

    pub fn coordinates(&self, t: &TraceTriple) -> Result<(Complex64, Complex64)> {
        Ok(fenchel_nielsen_coordinates(&t.in_frame(&self.frame)?))
    }

    /// Complex length of the standard-marking curve `s` with its gradient in
    /// `(λ, τ)`.
    pub fn complex_length_jet(&self, lambda: Complex64, tau: Complex64, s: Slope) -> Result<Jet> {
        let l = Jet::variable(lambda, 0);
        if s == self.frame.base() {
            return Ok(l);
        }
        let [x, y, z] = fenchel_nielsen(l, Jet::variable(tau, 1));
        let local = self.frame.from_standard(s);
        Ok(farey_trace(x, y, z, local, DEFAULT_PATH_CAP)?.complex_length())
    }
}

/// The weighted curve standing in for `m` in minimizations.
pub fn minimization_curve(m: &Lamination) -> Result<WeightedCurve> {
    match m.support() {
        Support::Rational(_) => m.approximant(0),
        Support::Irrational(irr) => {
            for k in 0..irr.truncation() {
                let a = m.approximant(k)?;
                if a.slope.q() >= MINIMIZATION_DENOMINATOR {
                    return Ok(a);
                }
            }
            Err(Error::Truncated {
                available: irr.truncation(),
                requested: irr.truncation() + 1,
            })
        }
    }
}

fn check_transverse(mu: &Lamination, nu: &Lamination) -> Result<()> {
    if intersection(mu, nu).value <= 0.0 {
        return Err(Error::NotTransverse(mu.to_string(), nu.to_string()));
    }
    Ok(())
}

/// `l_μ + c·l_ν` in the chart adapted to μ, as a function of `(ln l, t)`.
struct PairObjective {
    chart: FnChart,
    mu: WeightedCurve,
    nu: WeightedCurve,
    c: f64,
}

impl PairObjective {
    fn new(mu: &Lamination, nu: &Lamination, c: f64) -> Result<Self> {
        check_transverse(mu, nu)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Precondition(format!("c must be positive, got {c}")));
        }
        let mu = minimization_curve(mu)?;
        let nu = minimization_curve(nu)?;
        Ok(PairObjective {
            chart: FnChart::adapted(mu.slope),
            mu,
            nu,
            c,
        })
    }

    /// Lengths `(l_μ, l_ν)` and the gradient of `l_ν` in `(l, t)`.
    fn lengths(&self, l: f64, t: f64) -> Option<(f64, f64, [f64; 2])> {
        let jet = self.chart.complex_length_jet(cx(l), cx(t), self.nu.slope).ok()?;
        let lnu = self.nu.weight * jet.value.re;
        let g = [self.nu.weight * jet.grad[0].re, self.nu.weight * jet.grad[1].re];
        (lnu.is_finite() && g.iter().all(|v| v.is_finite())).then_some((self.mu.weight * l, lnu, g))
    }

    /// Normalized objective `(l_μ + c·l_ν)/(1 + c)` and its gradient in
    /// `(ln l, t)`.
    fn eval(&self, v: [f64; 2]) -> Option<(f64, [f64; 2])> {
        let l = v[0].exp();
        let (lmu, lnu, g) = self.lengths(l, v[1])?;
        let k = 1.0 / (1.0 + self.c);
        let value = k * (lmu + self.c * lnu);
        let grad = [k * l * (self.mu.weight + self.c * g[0]), k * self.c * g[1]];
        Some((value, grad))
    }
}

/// A sample of the line of minima.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinePoint {
    pub c: f64,
    pub point: FuchsianPoint,
    /// Fenchel–Nielsen length and twist in the chart adapted to μ when
    /// `c ≤ 1`, to ν otherwise (the curve that is shorter at the minimum).
    pub base_length: f64,
    pub twist: f64,
    pub l_mu: f64,
    pub l_nu: f64,
    /// Gradient norm of `(l_μ + c·l_ν)/(1 + c)` in `(l, t)`.
    pub gradient_norm: f64,
}

struct Found {
    point: [f64; 2],
    value: f64,
    gradient_norm: f64,
}

const SEEDS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 1.0], [-1.0, -1.0]];

/// The minimizer of `l_μ + c·l_ν` over Fuchsian space, certified by three
/// starts that must agree to `1e-6`.
pub fn line_of_minima(mu: &Lamination, nu: &Lamination, c: f64) -> Result<LinePoint> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    // (l_μ + c·l_ν)/(1 + c) is symmetric under (μ, ν, c) ↔ (ν, μ, 1/c); work
    // in the chart of the shorter curve, whose partner's length keeps its digits
    let swapped = c > 1.0;
    let obj = if swapped {
        PairObjective::new(nu, mu, 1.0 / c)?
    } else {
        PairObjective::new(mu, nu, c)?
    };
    // seed the log-length near the c-dependent scale of the minimizer
    let shift = obj.c.ln().clamp(-3.0, 3.0) * 0.5;
    let grad_norm = |v: [f64; 2], g: [f64; 2]| (g[0] / v[0].exp()).hypot(g[1]);
    let mut best: Option<Found> = None;
    for seed in SEEDS {
        let start = [seed[0] + shift, seed[1]];
        let m = minimize2(|v| obj.eval(v), start, 0.1 * GRADIENT_TOLERANCE, 400, grad_norm)
            .ok_or_else(|| Error::Optimizer(format!("objective undefined at seed {start:?}")))?;
        let gn = grad_norm(m.point, m.gradient);
        if gn > GRADIENT_TOLERANCE {
            return Err(Error::Optimizer(format!(
                "gradient norm {gn:e} after {} iterations from {start:?}",
                m.iterations
            )));
        }
        let found = Found {
            point: m.point,
            value: m.value,
            gradient_norm: gn,
        };
        match &best {
            Some(b) => {
                let d = (b.point[0].exp() - found.point[0].exp()).hypot(b.point[1] - found.point[1]);
                if d > 1e-6 {
                    return Err(Error::Optimizer(format!(
                        "starts disagree: {:?} vs {:?}",
                        b.point, found.point
                    )));
                }
                if found.value < b.value {
                    best = Some(found);
                }
            }
            None => best = Some(found),
        }
    }
    let best = best.expect("at least one seed");
    let l = best.point[0].exp();
    let t = best.point[1];
    let (la, lb, _) = obj
        .lengths(l, t)
        .ok_or_else(|| Error::Optimizer("lengths undefined at minimizer".into()))?;
    let (l_mu, l_nu) = if swapped { (lb, la) } else { (la, lb) };
    let point = FuchsianPoint::new(obj.chart.triple(cx(l), cx(t))?)?;
    Ok(LinePoint {
        c,
        point,
        base_length: l,
        twist: t,
        l_mu,
        l_nu,
        gradient_norm: best.gradient_norm,
    })
}

pub fn line_of_minima_point(mu: &Lamination, nu: &Lamination, c: f64) -> Result<FuchsianPoint> {
    line_of_minima(mu, nu, c).map(|p| p.point)
}

/// Samples of the line of minima, ordered by `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaLine {
    pub mu: Lamination,
    pub nu: Lamination,
    pub samples: Vec<LinePoint>,
}

impl MinimaLine {
    /// Minimizes at every `c` concurrently; samples come back sorted by `c`.
    pub fn sample(mu: &Lamination, nu: &Lamination, cs: &[f64]) -> Result<Self> {
        let mut samples = cs
            .par_iter()
            .map(|&c| line_of_minima(mu, nu, c))
            .collect::<Result<Vec<_>>>()?;
        samples.sort_by(|a, b| a.c.total_cmp(&b.c));
        Ok(MinimaLine {
            mu: mu.clone(),
            nu: nu.clone(),
            samples,
        })
    }

    /// The cached sample with `c` closest to the request.
    pub fn nearest(&self, c: f64) -> Option<&LinePoint> {
        self.samples
            .iter()
            .min_by(|a, b| (a.c - c).abs().total_cmp(&(b.c - c).abs()))
    }

    pub fn csv_header() -> &'static str {
        "c,x,y,z,l_mu,l_nu,gradient_norm"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for s in &self.samples {
            let [x, y, z] = s.point.coords();
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.6e}\n",
                s.c, x, y, z, s.l_mu, s.l_nu, s.gradient_norm
            ));
        }
        out
    }
}

/// The point of the line of minima at which `l_μ = b`: the minimum of `l_ν`
/// on the level set `l_μ = b`, found along the twist orbit about μ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorocycleMinimum {
    pub b: f64,
    /// Length of the base curve of μ's chart (`b / weight`).
    pub base_length: f64,
    pub twist: f64,
    /// `f(b) = min l_ν`.
    pub f: f64,
    /// `∂²l_ν/∂t²` at the minimum.
    pub curvature: f64,
    /// The line parameter: the minimizer of `l_μ + c·l_ν` lies here.
    pub c: f64,
}

pub fn horocycle_minimum(mu: &Lamination, nu: &Lamination, b: f64) -> Result<HorocycleMinimum> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Precondition(format!("b must be positive, got {b}")));
    }
    let obj = PairObjective::new(mu, nu, 1.0)?;
    let l = b / obj.mu.weight;
    let derivative = |t: f64| obj.lengths(l, t).map(|(_, _, g)| g[1]);
    let (t, curvature) = minimize1(derivative, 0.0, 1.0, 1e-13)
        .ok_or_else(|| Error::Optimizer(format!("twist minimization failed at b = {b}")))?;
    let (_, f, g) = obj
        .lengths(l, t)
        .ok_or_else(|| Error::Optimizer(format!("lengths undefined at b = {b}")))?;
    if !(g[0] < 0.0) {
        return Err(Error::Optimizer(format!("∂l_ν/∂l = {} is not negative at b = {b}", g[0])));
    }
    Ok(HorocycleMinimum {
        b,
        base_length: l,
        twist: t,
        f,
        curvature,
        c: -obj.mu.weight / g[0],
    })
}

/// `f_{μ,ν}(b)`: the length of ν on the line of minima where `l_μ = b`.
pub fn f_value(mu: &Lamination, nu: &Lamination, b: f64) -> Result<f64> {
    horocycle_minimum(mu, nu, b).map(|h| h.f)
}

/// Whether `(b, c)` lies strictly below the graph of `f_{μ,ν}`.
pub fn in_region(mu: &Lamination, nu: &Lamination, b: f64, c: f64) -> Result<bool> {
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    Ok(c < f_value(mu, nu, b)?)
}
