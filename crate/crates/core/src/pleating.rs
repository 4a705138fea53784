//! Complex twists, bending angles and the two pleating solvers: prescribed
//! bending-line lengths (forward) and prescribed bending angles (inverse).
//!
//! A group on the pleating variety of `(γ, δ)` has `γ` and `δ` real, so in
//! the Fenchel–Nielsen chart adapted to one of them the problem reduces to a
//! single holomorphic equation `λ_other(l, τ) = target` in the twist `τ`.
//! Solutions are continued from the fold where the variety meets Fuchsian
//! space, with steps uniform in `√(f(b) − c)`.

use crate::curves::{Frame, Lamination, Slope, Support};
use crate::error::{Error, Result};
use crate::markov::{
    bowditch_check, complex_length, fenchel_nielsen_coordinates, realize_matrices, BowditchConfig, Sl2,
    TraceTriple, Verdict,
};
use crate::numeric::{solve2_real, sym_eigenvalues2, Mat2};
use crate::teich::{horocycle_minimum, line_of_minima, FnChart, HorocycleMinimum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Newton stopping tolerance on `|λ − target|`.
    pub inner_tolerance: f64,
    /// Largest accepted length residual of a solved point.
    pub residual_bound: f64,
    /// Angle tolerance of the inverse solver.
    pub outer_tolerance: f64,
    pub bowditch: BowditchConfig,
    pub max_newton: usize,
    pub max_outer: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            inner_tolerance: 1e-12,
            residual_bound: 1e-10,
            outer_tolerance: 1e-8,
            bowditch: BowditchConfig::default(),
            max_newton: 40,
            max_outer: 80,
        }
    }
}

/// A complex twist `τ = t + iθ` with `Im τ ∈ (−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistValue {
    pub tau: Complex64,
    /// Number of `2πi` shifts applied to bring `Im τ` into range.
    pub branch_tag: i32,
}

fn normalize_twist(mut tau: Complex64) -> TwistValue {
    let mut branch_tag = 0;
    while tau.im > PI {
        tau.im -= 2.0 * PI;
        branch_tag += 1;
    }
    while tau.im <= -PI {
        tau.im += 2.0 * PI;
        branch_tag -= 1;
    }
    TwistValue { tau, branch_tag }
}

/// The complex twist about `eta` measured against `dual`, from
/// `cosh(τ/2) = cosh(λ_dual/2)·tanh(λ_eta/2)` with the root that reproduces
/// the trace of `eta ⊕ dual`.
pub fn complex_twist(t: &TraceTriple, eta: Slope, dual: Slope) -> Result<TwistValue> {
    if eta.determinant(&dual).abs() != 1 {
        return Err(Error::NotNeighbors(eta, dual));
    }
    let ft = t.in_frame(&Frame::new(eta, dual)?)?;
    if complex_length(ft.x()).parabolic {
        return Err(Error::Parabolic(eta.to_string()));
    }
    let (_, tau) = fenchel_nielsen_coordinates(&ft);
    Ok(normalize_twist(tau))
}

/// [`complex_twist`] on the branch nearest `reference`: among `±τ + 4πik`.
pub fn complex_twist_near(t: &TraceTriple, eta: Slope, dual: Slope, reference: Complex64) -> Result<TwistValue> {
    let base = complex_twist(t, eta, dual)?;
    let mut best = base;
    let mut dist = f64::INFINITY;
    for sign in [1.0, -1.0] {
        for k in -2..=2 {
            let cand = base.tau * sign + Complex64::new(0.0, 4.0 * PI * k as f64);
            let d = (cand - reference).norm();
            if d < dist {
                dist = d;
                best = TwistValue {
                    tau: cand,
                    branch_tag: base.branch_tag + 2 * k,
                };
            }
        }
    }
    Ok(best)
}

/// Bending angles `(θ_γ, θ_δ) = (|Im τ_γ|, |Im τ_δ|)` of a group on the
/// pleating variety of `(γ, δ)`.
pub fn bending_data(t: &TraceTriple, gamma: Slope, delta: Slope) -> Result<(f64, f64)> {
    bending_data_with(t, gamma, delta, 1e-9, &BowditchConfig::default())
}

pub fn bending_data_with(
    t: &TraceTriple,
    gamma: Slope,
    delta: Slope,
    tolerance: f64,
    bowditch: &BowditchConfig,
) -> Result<(f64, f64)> {
    let lg = t.complex_length_of(gamma)?;
    let ld = t.complex_length_of(delta)?;
    let im = lg.value.im.abs().max(ld.value.im.abs());
    if im > tolerance || lg.sign_flipped || ld.sign_flipped {
        return Err(Error::NotOnVariety(im));
    }
    let shortest = lg.value.re.min(ld.value.re);
    let report = bowditch_check(t, &bowditch.for_shortest(shortest));
    if report.verdict != Verdict::Pass {
        return Err(Error::NotDiscrete(format!("{:?}", report.verdict)));
    }
    let tg = complex_twist(t, gamma, gamma.dual())?;
    let td = complex_twist(t, delta, delta.dual())?;
    Ok((tg.tau.im.abs(), td.tau.im.abs()))
}

/// The bending angle along `gamma` read off the limit set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DihedralAngle {
    /// `π` minus the angle between the support half-planes through the axis
    /// of `γ` and its two neighbouring lifts.
    pub angle: f64,
    /// How far the endpoints of a neighbouring lift are from one half-plane
    /// (radians); zero when `γ` is a bending line.
    pub coplanarity: f64,
}

/// Dihedral angle between the support planes along the axis of `γ`.
///
/// With `A` the word of `γ`, `B` the word of its dual, and
/// `w(z) = (z − a⁺)/(z − a⁻)` sending the axis of `A` to the line through 0
/// and ∞, half-planes bounded by that axis are rays from 0. The neighbouring
/// lifts `B·axis` and `B⁻¹·axis` span the two flat pieces meeting along it.
pub fn support_plane_angle(t: &TraceTriple, gamma: Slope) -> Result<DihedralAngle> {
    let g = realize_matrices(t)?;
    // a generic conjugation keeps the fixed points away from ∞
    let u = Complex64::new(0.37, 0.21);
    let v = Complex64::new(0.13, -0.29);
    let m = Sl2::new(Complex64::new(1.0, 0.0), u, v, Complex64::new(1.0, 0.0) + u * v);
    let conj = |x: Sl2| m * x * m.inverse();
    let a = conj(g.word(gamma));
    let b = conj(g.word(gamma.dual()));
    let (ap, am) = a.fixed_points();
    if !ap.is_finite() || !am.is_finite() {
        return Err(Error::Degenerate("fixed point at infinity".into()));
    }
    let w = |z: Complex64| {
        if z.is_finite() {
            (z - ap) / (z - am)
        } else {
            Complex64::new(1.0, 0.0)
        }
    };
    let binv = b.inverse();
    let forward = w(b.apply(ap));
    let backward = w(binv.apply(ap));
    let phi = (forward / backward).arg().abs();
    let c1 = (w(b.apply(am)) / forward).arg().abs();
    let c2 = (w(binv.apply(am)) / backward).arg().abs();
    Ok(DihedralAngle {
        angle: PI - phi,
        coplanarity: c1.max(c2),
    })
}

/// A solved point of the pleating variety of `(μ, ν) = (w_μ δ_γ, w_ν δ_δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PleatingPoint {
    pub triple: TraceTriple,
    pub gamma: Slope,
    pub delta: Slope,
    pub mu_weight: f64,
    pub nu_weight: f64,
    pub l_mu: f64,
    pub l_nu: f64,
    pub xi_mu: f64,
    pub xi_nu: f64,
    pub theta_gamma: f64,
    pub theta_delta: f64,
    /// Complex twist about `γ` in the chart adapted to `γ`.
    pub tau_gamma: Complex64,
    /// Curve whose chart the solver used, and the twist it found there.
    pub anchor: Slope,
    pub anchor_tau: Complex64,
    /// Largest of `|λ_γ − l_γ|`, `|λ_δ − l_δ|` recomputed from the triple.
    pub residual: f64,
    pub bowditch_depth: usize,
    pub convergent_index: Option<usize>,
}

impl PleatingPoint {
    /// Lengths of the bending curves themselves.
    pub fn curve_lengths(&self) -> (f64, f64) {
        (self.l_mu / self.mu_weight, self.l_nu / self.nu_weight)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pleating points serialize")
    }

    pub fn csv_header() -> &'static str {
        "gamma,delta,l_mu,l_nu,xi_mu,xi_nu,theta_gamma,theta_delta,x_re,x_im,y_re,y_im,z_re,z_im,residual"
    }

    pub fn csv_row(&self) -> String {
        let [x, y, z] = self.triple.as_array();
        format!(
            "{},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.3e}",
            self.gamma,
            self.delta,
            self.l_mu,
            self.l_nu,
            self.xi_mu,
            self.xi_nu,
            self.theta_gamma,
            self.theta_delta,
            x.re,
            x.im,
            y.re,
            y.im,
            z.re,
            z.im,
            self.residual
        )
    }
}

/// A length problem posed in the chart adapted to one of the two curves.
struct Anchored {
    chart: FnChart,
    anchor: Slope,
    other: Slope,
    anchor_length: f64,
    other_length: f64,
}

impl Anchored {
    /// Anchor on the curve with the shorter target: long curves computed
    /// from short ones keep their digits, the reverse cancels.
    fn new(gamma: Slope, delta: Slope, b: f64, c: f64) -> Self {
        let (anchor, other, la, lo) = if c < b { (delta, gamma, c, b) } else { (gamma, delta, b, c) };
        Anchored {
            chart: FnChart::adapted(anchor),
            anchor,
            other,
            anchor_length: la,
            other_length: lo,
        }
    }

    fn fold(&self) -> Result<HorocycleMinimum> {
        horocycle_minimum(&Lamination::delta(self.anchor), &Lamination::delta(self.other), self.anchor_length)
    }

    fn newton(&self, target: f64, seed: Complex64, cfg: &SolverConfig) -> Option<Complex64> {
        let lambda = Complex64::new(self.anchor_length, 0.0);
        let mut tau = seed;
        for _ in 0..cfg.max_newton {
            let jet = self.chart.complex_length_jet(lambda, tau, self.other).ok()?;
            let g = jet.value - target;
            if !g.is_finite() {
                return None;
            }
            if g.norm() <= cfg.inner_tolerance * (1.0 + target) {
                // one more step once inside the tolerance
                let d = jet.grad[1];
                return Some(if d.norm() > 0.0 { tau - g / d } else { tau });
            }
            let d = jet.grad[1];
            if d.norm() == 0.0 || !d.is_finite() {
                return None;
            }
            let mut step = g / d;
            if step.norm() > 0.5 {
                step *= 0.5 / step.norm();
            }
            tau -= step;
        }
        None
    }

    /// `dτ/ds` along the continuation path, where the target is `f − s²`.
    fn tangent(&self, s: f64, tau: Complex64) -> Option<Complex64> {
        let lambda = Complex64::new(self.anchor_length, 0.0);
        let d = self.chart.complex_length_jet(lambda, tau, self.other).ok()?.grad[1];
        (d.norm() > 0.0 && d.is_finite()).then(|| Complex64::new(-2.0 * s, 0.0) / d)
    }

    /// Continues from the fold `τ = t*` down to the target, uniformly in
    /// `s = √(f − c)`, with `τ ≈ t* + i·s·√(2/h)` near the fold.
    fn continue_from_fold(&self, fold: &HorocycleMinimum, cfg: &SolverConfig) -> Result<Complex64> {
        let s_end = (fold.f - self.other_length).sqrt();
        let k0 = (2.0 / fold.curvature).sqrt();
        let start = Complex64::new(fold.twist, 0.0);
        let mut history: Vec<Node> = vec![Node { s: 0.0, tau: start, slope: start }];
        let mut ds = (s_end / 6.0).min(0.25 / k0.max(1e-3));
        while history.last().expect("non-empty").s < s_end {
            let last = *history.last().expect("non-empty");
            let s_next = (last.s + ds).min(s_end);
            let predicted = predict(&history, s_next, fold.twist, k0);
            let target = if s_next >= s_end {
                self.other_length
            } else {
                fold.f - s_next * s_next
            };
            let solved = self.newton(target, predicted, cfg).filter(|tau| {
                tau.im > 0.0 && (tau - predicted).norm() <= 0.5 * (predicted - last.tau).norm() + 1e-9
            });
            match solved.and_then(|tau| Some((tau, self.tangent(s_next, tau)?))) {
                Some((tau, slope)) => {
                    history.push(Node { s: s_next, tau, slope });
                    ds *= 1.5;
                }
                None => {
                    ds *= 0.5;
                    if ds < 1e-7 * (1.0 + s_end) {
                        return Err(Error::Newton(format!(
                            "continuation stalled at s = {:.6} of {s_end:.6}",
                            last.s
                        )));
                    }
                }
            }
        }
        Ok(history.last().expect("non-empty").tau)
    }
}

#[derive(Clone, Copy)]
struct Node {
    s: f64,
    tau: Complex64,
    slope: Complex64,
}

/// Predictor for the continuation path: the fold asymptotics on the first
/// step, then the tangent at the last node with a curvature term fitted to
/// the node before it.
fn predict(history: &[Node], s: f64, t_star: f64, k0: f64) -> Complex64 {
    let n = history.len();
    if n == 1 {
        return Complex64::new(t_star, s * k0);
    }
    let last = history[n - 1];
    let h = s - last.s;
    let linear = last.tau + last.slope * h;
    if n == 2 {
        return linear;
    }
    let prev = history[n - 2];
    let hp = prev.s - last.s;
    let curvature = (prev.tau - last.tau - last.slope * hp) / (hp * hp);
    linear + curvature * h * h
}

/// Solves for the group whose bending lines `γ` and `δ` have lengths `b`
/// and `c`.
pub fn solve_pleating(gamma: Slope, delta: Slope, b: f64, c: f64) -> Result<PleatingPoint> {
    solve_pleating_with(gamma, delta, b, c, &SolverConfig::default())
}

pub fn solve_pleating_with(gamma: Slope, delta: Slope, b: f64, c: f64, cfg: &SolverConfig) -> Result<PleatingPoint> {
    check_pair(gamma, delta, b, c)?;
    let problem = Anchored::new(gamma, delta, b, c);
    let fold = problem.fold()?;
    if !(problem.other_length < fold.f) {
        return Err(if problem.anchor == gamma {
            Error::OutsideRegion { b, c, f: fold.f }
        } else {
            // the graph of f is symmetric in the two axes
            Error::OutsideRegion { b: c, c: b, f: fold.f }
        });
    }
    let tau = problem.continue_from_fold(&fold, cfg)?;
    finish(&problem, gamma, delta, b, c, tau, cfg)
}

/// Solves starting from the twist of a nearby solved point, falling back to
/// continuation from the fold.
pub fn solve_pleating_from(
    gamma: Slope,
    delta: Slope,
    b: f64,
    c: f64,
    near: &PleatingPoint,
    cfg: &SolverConfig,
) -> Result<PleatingPoint> {
    check_pair(gamma, delta, b, c)?;
    let problem = Anchored::new(gamma, delta, b, c);
    if near.gamma == gamma && near.delta == delta && near.anchor == problem.anchor {
        // conjugated solutions carry the conjugate anchor twist
        let seed = if near.anchor_tau.im > 0.0 { near.anchor_tau } else { near.anchor_tau.conj() };
        if let Some(tau) = problem.newton(problem.other_length, seed, cfg) {
            if tau.im > 0.0 && (tau - seed).norm() < 1.0 {
                if let Ok(p) = finish(&problem, gamma, delta, b, c, tau, cfg) {
                    return Ok(p);
                }
            }
        }
    }
    solve_pleating_with(gamma, delta, b, c, cfg)
}

fn check_pair(gamma: Slope, delta: Slope, b: f64, c: f64) -> Result<()> {
    if gamma.determinant(&delta) == 0 {
        return Err(Error::NotTransverse(gamma.to_string(), delta.to_string()));
    }
    for v in [b, c] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Precondition(format!("lengths must be positive, got ({b}, {c})")));
        }
    }
    Ok(())
}

fn finish(
    problem: &Anchored,
    gamma: Slope,
    delta: Slope,
    b: f64,
    c: f64,
    tau: Complex64,
    cfg: &SolverConfig,
) -> Result<PleatingPoint> {
    let mut triple = problem.chart.triple(Complex64::new(problem.anchor_length, 0.0), tau)?;
    let mut anchor_tau = tau;
    let mut tg = complex_twist(&triple, gamma, gamma.dual())?;
    // Twists read in a frame of determinant −1 are negated twists of the
    // positively oriented frame; the side of γ is fixed by the oriented sign.
    let orientation = gamma.determinant(&gamma.dual()) as f64;
    if orientation * tg.tau.im > 0.0 {
        // the mirror image solves the same length problem
        let [x, y, z] = triple.as_array();
        triple = TraceTriple::new(x.conj(), y.conj(), z.conj())?;
        anchor_tau = tau.conj();
        tg = complex_twist(&triple, gamma, gamma.dual())?;
    }
    let lg = triple.complex_length_of(gamma)?;
    let ld = triple.complex_length_of(delta)?;
    let residual = (lg.value - b).norm().max((ld.value - c).norm());
    if !(residual <= cfg.residual_bound) || lg.sign_flipped || ld.sign_flipped {
        return Err(Error::Newton(format!("length residual {residual:e} at ({b}, {c})")));
    }
    let report = bowditch_check(&triple, &cfg.bowditch.for_shortest(b.min(c)));
    if report.verdict != Verdict::Pass {
        return Err(Error::NotDiscrete(format!(
            "{:?} at ({b}, {c}), min |trace| {:.6}",
            report.verdict, report.min_modulus
        )));
    }
    let td = complex_twist(&triple, delta, delta.dual())?;
    let (theta_gamma, theta_delta) = (tg.tau.im.abs(), td.tau.im.abs());
    for th in [theta_gamma, theta_delta] {
        if !(th > 0.0 && th < PI) {
            return Err(Error::Newton(format!("bending angle {th} outside (0, π) at ({b}, {c})")));
        }
    }
    Ok(PleatingPoint {
        triple,
        gamma,
        delta,
        mu_weight: 1.0,
        nu_weight: 1.0,
        l_mu: b,
        l_nu: c,
        xi_mu: theta_gamma,
        xi_nu: theta_delta,
        theta_gamma,
        theta_delta,
        tau_gamma: tg.tau,
        anchor: problem.anchor,
        anchor_tau,
        residual,
        bowditch_depth: cfg.bowditch.depth,
        convergent_index: None,
    })
}

/// The forward problem for rational laminations `μ = w_μ δ_γ`,
/// `ν = w_ν δ_δ` with prescribed `l_μ`, `l_ν`.
pub fn solve_pleating_laminations(
    mu: &Lamination,
    nu: &Lamination,
    l_mu: f64,
    l_nu: f64,
    cfg: &SolverConfig,
) -> Result<PleatingPoint> {
    let (Support::Rational(gamma), Support::Rational(delta)) = (mu.support(), nu.support()) else {
        return Err(Error::Precondition(
            "irrational bending laminations are reached through convergents".into(),
        ));
    };
    let p = solve_pleating_with(*gamma, *delta, l_mu / mu.weight(), l_nu / nu.weight(), cfg)?;
    Ok(reweight(p, mu.weight(), nu.weight()))
}

/// Re-reads a point solved for unit laminations as one for `w_μ δ_γ`,
/// `w_ν δ_δ`: lengths scale by the weights, scale factors inversely.
pub fn reweight(mut p: PleatingPoint, mu_weight: f64, nu_weight: f64) -> PleatingPoint {
    let (lg, ld) = p.curve_lengths();
    p.mu_weight = mu_weight;
    p.nu_weight = nu_weight;
    p.l_mu = mu_weight * lg;
    p.l_nu = nu_weight * ld;
    p.xi_mu = p.theta_gamma / mu_weight;
    p.xi_nu = p.theta_delta / nu_weight;
    p
}

/// `(cos(θ_γ/2), cos(θ_δ/2))`; linear across the fold where `θ ~ √(f − c)`.
fn cos_half_angles(p: &PleatingPoint) -> [f64; 2] {
    [(0.5 * p.theta_gamma).cos(), (0.5 * p.theta_delta).cos()]
}

/// Central differences of the half-angle cosines in the curve lengths.
fn cos_jacobian(p: &PleatingPoint, cfg: &SolverConfig) -> Result<Mat2> {
    let (b, c) = p.curve_lengths();
    let mut jac = [[0.0; 2]; 2];
    for j in 0..2 {
        let h = 1e-5 * (1.0 + if j == 0 { b } else { c });
        let at = |sign: f64| {
            let (bb, cc) = if j == 0 { (b + sign * h, c) } else { (b, c + sign * h) };
            solve_pleating_from(p.gamma, p.delta, bb, cc, p, cfg).map(|q| cos_half_angles(&q))
        };
        let (plus, minus) = (at(1.0)?, at(-1.0)?);
        for i in 0..2 {
            jac[i][j] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// The inverse problem: the group with bending angles `θ_γ`, `θ_δ`.
pub fn solve_angles(gamma: Slope, delta: Slope, theta_gamma: f64, theta_delta: f64) -> Result<PleatingPoint> {
    solve_angles_with(gamma, delta, theta_gamma, theta_delta, None, &SolverConfig::default())
}

/// Damped Newton on `(b, c) ↦ cos(θ/2) − cos(θ*/2)` from `start` (default: a
/// point below the line of minima), backtracking to stay inside the region.
pub fn solve_angles_with(
    gamma: Slope,
    delta: Slope,
    theta_gamma: f64,
    theta_delta: f64,
    start: Option<(f64, f64)>,
    cfg: &SolverConfig,
) -> Result<PleatingPoint> {
    for th in [theta_gamma, theta_delta] {
        if !(th > 0.0 && th < PI) {
            return Err(Error::Precondition(format!("bending angles must lie in (0, π), got {th}")));
        }
    }
    let target = [(0.5 * theta_gamma).cos(), (0.5 * theta_delta).cos()];
    let (b0, c0) = match start {
        Some(s) => s,
        None => {
            let lp = line_of_minima(&Lamination::delta(gamma), &Lamination::delta(delta), 1.0)?;
            (0.7 * lp.l_mu, 0.7 * lp.l_nu)
        }
    };
    let mut p = solve_pleating_with(gamma, delta, b0, c0, cfg)?;
    let residual = |p: &PleatingPoint| {
        let v = cos_half_angles(p);
        [v[0] - target[0], v[1] - target[1]]
    };
    let angle_error = |p: &PleatingPoint| (p.theta_gamma - theta_gamma).abs().max((p.theta_delta - theta_delta).abs());
    let mut r = residual(&p);
    for _ in 0..cfg.max_outer {
        if angle_error(&p) <= 0.01 * cfg.outer_tolerance {
            return Ok(p);
        }
        let jac = cos_jacobian(&p, cfg)?;
        let step = solve2_real(jac, [-r[0], -r[1]])
            .ok_or_else(|| Error::Newton("singular angle Jacobian".into()))?;
        let (b, c) = p.curve_lengths();
        let norm = r[0].hypot(r[1]);
        let mut t = 1.0;
        // keep lengths positive and moves moderate
        let scale = (step[0] / b).abs().max((step[1] / c).abs());
        if scale > 0.5 {
            t = 0.5 / scale;
        }
        let mut accepted = None;
        for _ in 0..40 {
            let (bn, cn) = (b + t * step[0], c + t * step[1]);
            if let Ok(q) = solve_pleating_from(gamma, delta, bn, cn, &p, cfg) {
                let rq = residual(&q);
                if rq[0].hypot(rq[1]) < (1.0 - 1e-4 * t) * norm {
                    accepted = Some((q, rq));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((q, rq)) => {
                p = q;
                r = rq;
            }
            None => break,
        }
    }
    if angle_error(&p) <= cfg.outer_tolerance {
        Ok(p)
    } else {
        Err(Error::Newton(format!(
            "angle solve stalled with error {:e} at lengths {:?}",
            angle_error(&p),
            p.curve_lengths()
        )))
    }
}

/// `∂(l_γ, l_δ)/∂(θ_γ, θ_δ)` with its symmetric eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleJacobian {
    pub matrix: Mat2,
    pub eigenvalues: [f64; 2],
    /// `|J₀₁ − J₁₀|`.
    pub asymmetry: f64,
    /// Largest absolute entry.
    pub norm: f64,
}

/// Central differences of the angles in the lengths with step `step`,
/// inverted to give the length derivatives in the angles.
pub fn jacobian_lengths_angles(p: &PleatingPoint, step: f64) -> Result<AngleJacobian> {
    jacobian_lengths_angles_with(p, step, &SolverConfig::default())
}

pub fn jacobian_lengths_angles_with(p: &PleatingPoint, step: f64, cfg: &SolverConfig) -> Result<AngleJacobian> {
    if !(p.residual <= cfg.residual_bound) {
        return Err(Error::Precondition(format!("point residual {:e} too large", p.residual)));
    }
    let (b, c) = p.curve_lengths();
    let mut dtheta = [[0.0; 2]; 2];
    for j in 0..2 {
        let at = |sign: f64| {
            let (bb, cc) = if j == 0 { (b + sign * step, c) } else { (b, c + sign * step) };
            solve_pleating_from(p.gamma, p.delta, bb, cc, p, cfg).map(|q| [q.theta_gamma, q.theta_delta])
        };
        let (plus, minus) = (at(1.0)?, at(-1.0)?);
        for i in 0..2 {
            dtheta[i][j] = (plus[i] - minus[i]) / (2.0 * step);
        }
    }
    let det = dtheta[0][0] * dtheta[1][1] - dtheta[0][1] * dtheta[1][0];
    if det.abs() < 1e-300 {
        return Err(Error::Newton("singular angle derivative".into()));
    }
    let matrix = [
        [dtheta[1][1] / det, -dtheta[0][1] / det],
        [-dtheta[1][0] / det, dtheta[0][0] / det],
    ];
    let norm = matrix.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(AngleJacobian {
        matrix,
        eigenvalues: sym_eigenvalues2(matrix),
        asymmetry: (matrix[0][1] - matrix[1][0]).abs(),
        norm,
    })
}
