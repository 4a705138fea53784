//! Falsifiable numerical experiments on pleating varieties: monotonicity of
//! the scale factors, the constant-angle variety, uniqueness of groups with
//! given bending, Bridgeman's bound, length blow-up, degeneration towards a
//! lamination, and limits along irrational approximations.
//!
//! Every experiment returns a [`SweepReport`] with one row per grid point.
//! Grid points run concurrently; rows are merged by grid index, so reports
//! are deterministic.

use crate::curves::{intersection, IrrationalSlope, Lamination, Slope, Support};
use crate::error::{Error, Result};
use crate::markov::TraceTriple;
use crate::pleating::{reweight, solve_angles_with, solve_pleating_from, solve_pleating_with, PleatingPoint, SolverConfig};
use crate::teich::{horocycle_minimum, length, line_of_minima};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    Violated,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub solver: SolverConfig,
    pub seed: u64,
    /// Noise floor for monotonicity checks.
    pub slack: f64,
    /// Growth factor that operationalizes divergence.
    pub growth_factor: f64,
    /// Largest diameter of a solution cluster.
    pub cluster_diameter: f64,
    /// Fewest successful points for a monotonicity verdict.
    pub min_points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            solver: SolverConfig::default(),
            seed: 0,
            slack: 1e-9,
            growth_factor: 10.0,
            cluster_diameter: 1e-6,
            min_points: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub index: usize,
    pub values: Vec<f64>,
    /// `ok`, or the error that removed the point.
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub experiment: String,
    pub parameters: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub verdict: Verdict,
    /// Worst-case margin of the deciding check (negative when violated).
    pub margin: f64,
    pub notes: Vec<String>,
}

impl SweepReport {
    fn new(experiment: &str, columns: &[&str], cfg: &ExperimentConfig) -> Self {
        let mut parameters = BTreeMap::new();
        parameters.insert("seed".into(), json!(cfg.seed));
        parameters.insert("slack".into(), json!(cfg.slack));
        parameters.insert("inner_tolerance".into(), json!(cfg.solver.inner_tolerance));
        parameters.insert("residual_bound".into(), json!(cfg.solver.residual_bound));
        parameters.insert("outer_tolerance".into(), json!(cfg.solver.outer_tolerance));
        parameters.insert("bowditch_depth".into(), json!(cfg.solver.bowditch.depth));
        parameters.insert("bowditch_bound".into(), json!(cfg.solver.bowditch.bound));
        SweepReport {
            experiment: experiment.into(),
            parameters,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdict: Verdict::Inconclusive,
            margin: f64::NAN,
            notes: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, value: Value) {
        self.parameters.insert(key.into(), value);
    }

    fn push_ok(&mut self, index: usize, values: Vec<f64>) {
        self.rows.push(ReportRow {
            index,
            values,
            status: "ok".into(),
        });
    }

    fn push_err(&mut self, index: usize, mut values: Vec<f64>, err: &Error) {
        values.resize(self.columns.len(), f64::NAN);
        self.rows.push(ReportRow {
            index,
            values,
            status: err.to_string(),
        });
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status != "ok").count()
    }

    pub fn successes(&self) -> usize {
        self.rows.len() - self.failures()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("index,{},status\n", self.columns.join(","));
        for r in &self.rows {
            let vals: Vec<String> = r.values.iter().map(|v| format!("{v:.15e}")).collect();
            out.push_str(&format!("{},{},{}\n", r.index, vals.join(","), csv_field(&r.status)));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Largest `b` with `(b, c)` in the region of `(γ, δ)`.
pub fn b_max(gamma: Slope, delta: Slope, c: f64) -> Result<f64> {
    Ok(horocycle_minimum(&Lamination::delta(delta), &Lamination::delta(gamma), c)?.f)
}

/// `n` values of `b` from `lo` up to just below `hi`, evenly spaced in
/// `√(hi − b)` so that the scale factors, which behave like `√(hi − b)`
/// near the boundary, are sampled evenly. The last point sits at relative
/// depth `1e-8` below the boundary.
pub fn boundary_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let t_min = 1e-4;
    (0..n)
        .map(|k| {
            let u = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
            let t = 1.0 - u * (1.0 - t_min);
            hi - (hi - lo) * t * t
        })
        .collect()
}

/// Root of a function with a sign change on `[lo, hi]`, by Illinois
/// regula falsi with bisection safeguards.
fn find_root<F>(f: F, mut lo: f64, mut hi: f64, mut flo: f64, mut fhi: f64, ftol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket(format!("[{lo}, {hi}]")));
    }
    let mut side = 0;
    let mut x = 0.5 * (lo + hi);
    for it in 0..200 {
        x = if it % 4 == 3 {
            0.5 * (lo + hi)
        } else {
            (lo * fhi - hi * flo) / (fhi - flo)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        if fx.abs() <= ftol || (hi - lo) <= 1e-15 * (1.0 + x.abs()) {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(x)
}

fn solve_grid(gamma: Slope, delta: Slope, points: &[(f64, f64)], cfg: &ExperimentConfig) -> Vec<Result<PleatingPoint>> {
    points
        .par_iter()
        .map(|&(b, c)| solve_pleating_with(gamma, delta, b, c, &cfg.solver))
        .collect()
}

/// Checks that `ξ_μ` decreases strictly in `l_μ` along `l_ν = c`, and tends
/// to 0 at the boundary of the region.
pub fn monotone_on_lc(gamma: Slope, delta: Slope, c: f64, n: usize, cfg: &ExperimentConfig) -> Result<SweepReport> {
    let hi = b_max(gamma, delta, c)?;
    let grid = boundary_grid(0.05 * hi, hi, n);
    let mut report = monotone_on_lc_grid(gamma, delta, c, &grid, cfg)?;
    report.param("b_max", json!(hi));
    // the fold end: ξ_μ must vanish approaching Fuchsian space
    if let Some(last) = report.rows.last() {
        let xi = last.values[1];
        let boundary_ok = last.status == "ok" && xi < 1e-3;
        report.notes.push(format!("ξ_μ at the boundary end: {xi:e}"));
        if report.verdict == Verdict::Confirmed && !boundary_ok {
            report.verdict = Verdict::Violated;
            report.notes.push("ξ_μ does not vanish at the boundary".into());
        }
    }
    Ok(report)
}

/// [`monotone_on_lc`] on an explicit `b` grid (sorted internally).
pub fn monotone_on_lc_grid(gamma: Slope, delta: Slope, c: f64, bs: &[f64], cfg: &ExperimentConfig) -> Result<SweepReport> {
    let mut report = SweepReport::new("monotone", &["b", "xi_mu", "xi_nu", "residual"], cfg);
    report.param("gamma", json!(gamma));
    report.param("delta", json!(delta));
    report.param("c", json!(c));
    report.param("n", json!(bs.len()));
    let mut bs = bs.to_vec();
    bs.sort_by(f64::total_cmp);
    let points: Vec<(f64, f64)> = bs.iter().map(|&b| (b, c)).collect();
    let solved = solve_grid(gamma, delta, &points, cfg);
    let mut series = Vec::new();
    for (i, (b, r)) in bs.iter().zip(solved).enumerate() {
        match r {
            Ok(p) => {
                report.push_ok(i, vec![*b, p.xi_mu, p.xi_nu, p.residual]);
                series.push(p.xi_mu);
            }
            Err(e) => report.push_err(i, vec![*b], &e),
        }
    }
    decide_monotone(&mut report, &series, Direction::Decreasing, cfg);
    Ok(report)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Decreasing,
    Either,
}

fn decide_monotone(report: &mut SweepReport, series: &[f64], dir: Direction, cfg: &ExperimentConfig) {
    let n = report.rows.len();
    if series.len() < 2 {
        report.verdict = Verdict::Inconclusive;
        report.notes.push("fewer than two successful points".into());
        return;
    }
    let sign = match dir {
        Direction::Decreasing => 1.0,
        Direction::Either => {
            if series[0] >= *series.last().expect("non-empty") {
                1.0
            } else {
                -1.0
            }
        }
    };
    // margin: smallest decrease in the expected direction
    let margin = series
        .windows(2)
        .map(|w| sign * (w[0] - w[1]))
        .fold(f64::INFINITY, f64::min);
    report.margin = margin;
    if margin < -cfg.slack {
        report.verdict = Verdict::Violated;
    } else if series.len() < cfg.min_points || report.failures() * 10 > n {
        report.verdict = Verdict::Inconclusive;
        report.notes.push(format!(
            "{} successful points, {} failures",
            series.len(),
            report.failures()
        ));
    } else {
        report.verdict = Verdict::Confirmed;
    }
}

/// Points of the constant-angle variety `ξ_μ = a`, one per value of `c`,
/// ordered by `l_ν`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarietyTrace {
    pub a: f64,
    pub gamma: Slope,
    pub delta: Slope,
    pub points: Vec<PleatingPoint>,
    /// Per requested `c`: the number of sign changes of `ξ_μ − a` over the
    /// full `b` range, or the error that prevented the scan.
    pub scans: Vec<(f64, std::result::Result<usize, String>)>,
}

const BRACKET_POINTS: usize = 24;

fn xi_mu_at(gamma: Slope, delta: Slope, b: f64, c: f64, cfg: &SolverConfig) -> Result<PleatingPoint> {
    solve_pleating_with(gamma, delta, b, c, cfg)
}

fn scan_constant_angle(gamma: Slope, delta: Slope, a: f64, c: f64, cfg: &ExperimentConfig) -> Result<(usize, PleatingPoint)> {
    let hi = b_max(gamma, delta, c)?;
    let grid = boundary_grid(0.01 * hi, hi, BRACKET_POINTS);
    let values: Vec<Option<f64>> = grid
        .iter()
        .map(|&b| xi_mu_at(gamma, delta, b, c, &cfg.solver).ok().map(|p| p.xi_mu - a))
        .collect();
    let samples: Vec<(f64, f64)> = grid
        .iter()
        .zip(&values)
        .filter_map(|(b, v)| v.map(|v| (*b, v)))
        .collect();
    let brackets: Vec<((f64, f64), (f64, f64))> = samples
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| (w[0], w[1]))
        .collect();
    let Some(&((lo, flo), (bhi, fhi))) = brackets.first() else {
        return Err(Error::NoBracket(format!("ξ_μ = {a} at c = {c}")));
    };
    let g = |b: f64| xi_mu_at(gamma, delta, b, c, &cfg.solver).map(|p| p.xi_mu - a);
    let b = find_root(g, lo, bhi, flo, fhi, 1e-11)?;
    let p = xi_mu_at(gamma, delta, b, c, &cfg.solver)?;
    Ok((brackets.len(), p))
}

/// Traces `V_a` across `cs` by a root solve in `b` of `ξ_μ(b, c) = a` per
/// `c`, counting sign changes over the full `b` range to test uniqueness.
pub fn trace_constant_angle(gamma: Slope, delta: Slope, a: f64, cs: &[f64], cfg: &ExperimentConfig) -> Result<VarietyTrace> {
    if !(a > 0.0 && a < PI) {
        return Err(Error::Precondition(format!("angle {a} outside (0, π)")));
    }
    let results: Vec<Result<(usize, PleatingPoint)>> = cs
        .par_iter()
        .map(|&c| scan_constant_angle(gamma, delta, a, c, cfg))
        .collect();
    let mut points = Vec::new();
    let mut scans = Vec::new();
    for (c, r) in cs.iter().zip(results) {
        match r {
            Ok((count, p)) => {
                scans.push((*c, Ok(count)));
                points.push(p);
            }
            Err(e) => scans.push((*c, Err(e.to_string()))),
        }
    }
    if points.is_empty() {
        return Err(Error::NoBracket(format!("ξ_μ = {a} infeasible on the whole c range")));
    }
    points.sort_by(|p, q| p.l_nu.total_cmp(&q.l_nu));
    Ok(VarietyTrace {
        a,
        gamma,
        delta,
        points,
        scans,
    })
}

/// Verdict on the root counts of a [`VarietyTrace`]: violated if some `c`
/// has more than one root.
pub fn variety_report(trace: &VarietyTrace, cfg: &ExperimentConfig) -> SweepReport {
    let mut report = SweepReport::new("variety", &["c", "roots", "b", "xi_mu", "xi_nu"], cfg);
    report.param("a", json!(trace.a));
    report.param("gamma", json!(trace.gamma));
    report.param("delta", json!(trace.delta));
    let mut multiple = 0;
    let mut missing = 0;
    let mut worst = 0.0f64;
    for (i, (c, scan)) in trace.scans.iter().enumerate() {
        match scan {
            Ok(count) => {
                let p = trace
                    .points
                    .iter()
                    .find(|p| (p.l_nu - c).abs() <= 1e-12 * (1.0 + c))
                    .expect("every successful scan contributes a point");
                worst = worst.max((p.xi_mu - trace.a).abs());
                report.push_ok(i, vec![*c, *count as f64, p.l_mu, p.xi_mu, p.xi_nu]);
                if *count > 1 {
                    multiple += 1;
                }
            }
            Err(e) => {
                missing += 1;
                report.push_err(i, vec![*c, 0.0], &Error::NoBracket(e.clone()));
            }
        }
    }
    report.margin = 1e-8 - worst;
    report.verdict = if multiple > 0 || worst > 1e-8 {
        Verdict::Violated
    } else if missing > 0 || trace.points.len() < cfg.min_points {
        Verdict::Inconclusive
    } else {
        Verdict::Confirmed
    };
    if multiple > 0 {
        report.notes.push(format!("{multiple} values of c with several roots"));
    }
    report
}

/// Checks that `ξ_ν` is strictly monotone along the variety.
pub fn angle_monotone_on_va(trace: &VarietyTrace, cfg: &ExperimentConfig) -> SweepReport {
    let mut report = SweepReport::new("va-monotone", &["l_nu", "xi_nu", "l_mu", "xi_mu"], cfg);
    report.param("a", json!(trace.a));
    report.param("gamma", json!(trace.gamma));
    report.param("delta", json!(trace.delta));
    let mut pts = trace.points.clone();
    pts.sort_by(|p, q| p.l_nu.total_cmp(&q.l_nu));
    let series: Vec<f64> = pts.iter().map(|p| p.xi_nu).collect();
    for (i, p) in pts.iter().enumerate() {
        report.push_ok(i, vec![p.l_nu, p.xi_nu, p.l_mu, p.xi_mu]);
    }
    decide_monotone(&mut report, &series, Direction::Either, cfg);
    report
}

fn cluster(triples: &[(usize, TraceTriple)], radius: f64) -> Vec<Vec<usize>> {
    // single linkage; independent of the order of the inputs
    let n = triples.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if triples[i].1.distance(&triples[j].1) < radius {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(triples[i].0);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    for g in &mut out {
        g.sort_unstable();
    }
    out.sort();
    out
}

/// Random starting lengths across the region of `(γ, δ)`.
pub fn random_starts(gamma: Slope, delta: Slope, starts: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let mu = Lamination::delta(gamma);
    let nu = Lamination::delta(delta);
    let reference = line_of_minima(&mu, &nu, 1.0)?.l_mu;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(starts);
    while out.len() < starts {
        let b = reference * (rng.gen_range(0.25f64.ln()..3.0f64.ln())).exp();
        let u = rng.gen_range(0.15..0.9);
        let f = horocycle_minimum(&mu, &nu, b)?.f;
        out.push((b, u * f));
    }
    Ok(out)
}

/// Solves the inverse problem from random starts across the region and
/// clusters the solutions.
pub fn uniqueness_trial(
    gamma: Slope,
    delta: Slope,
    theta_gamma: f64,
    theta_delta: f64,
    starts: usize,
    cfg: &ExperimentConfig,
) -> Result<SweepReport> {
    for th in [theta_gamma, theta_delta] {
        if !(th > 0.0 && th < PI) {
            return Err(Error::Precondition(format!("bending angles must lie in (0, π), got {th}")));
        }
    }
    let mut report = SweepReport::new(
        "unique",
        &["b0", "c0", "b", "c", "x_re", "x_im", "y_re", "y_im", "z_re", "z_im", "cluster"],
        cfg,
    );
    report.param("gamma", json!(gamma));
    report.param("delta", json!(delta));
    report.param("theta", json!([theta_gamma, theta_delta]));
    report.param("starts", json!(starts));
    let seeds = random_starts(gamma, delta, starts, cfg.seed)?;
    let solved: Vec<Result<PleatingPoint>> = seeds
        .par_iter()
        .map(|&s| solve_angles_with(gamma, delta, theta_gamma, theta_delta, Some(s), &cfg.solver))
        .collect();
    let found: Vec<(usize, TraceTriple)> = solved
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().ok().map(|p| (i, p.triple)))
        .collect();
    if found.is_empty() {
        return Err(Error::Newton(format!("all {starts} starts diverged")));
    }
    let clusters = cluster(&found, cfg.cluster_diameter);
    let mut label = vec![f64::NAN; starts];
    let mut diameter = 0.0f64;
    for (k, g) in clusters.iter().enumerate() {
        for &i in g {
            label[i] = k as f64;
        }
        for &i in g {
            for &j in g {
                diameter = diameter.max(solved[i].as_ref().unwrap().triple.distance(&solved[j].as_ref().unwrap().triple));
            }
        }
    }
    for (i, (s, r)) in seeds.iter().zip(&solved).enumerate() {
        match r {
            Ok(p) => {
                let (b, c) = p.curve_lengths();
                let [x, y, z] = p.triple.as_array();
                report.push_ok(i, vec![s.0, s.1, b, c, x.re, x.im, y.re, y.im, z.re, z.im, label[i]]);
            }
            Err(e) => report.push_err(i, vec![s.0, s.1], e),
        }
    }
    report.param("clusters", json!(clusters.len()));
    report.param("diameter", json!(diameter));
    report.margin = cfg.cluster_diameter - diameter;
    report.verdict = if found.len() < 2 {
        report.notes.push("a single converged start proves nothing".into());
        Verdict::Inconclusive
    } else if clusters.len() == 1 && diameter < cfg.cluster_diameter {
        Verdict::Confirmed
    } else {
        Verdict::Violated
    };
    if report.failures() > 0 {
        report.notes.push(format!("{} starts failed to converge", report.failures()));
    }
    Ok(report)
}

/// Reports the supremum of `l·ξ` over solved points. Confirmed when the
/// supremum is finite and the last tenth of the sweep raises the running
/// maximum by less than 5%.
pub fn bridgeman_scan(points: &[PleatingPoint], cfg: &ExperimentConfig) -> SweepReport {
    let mut report = SweepReport::new("bridgeman", &["l_mu", "xi_mu", "l_nu", "xi_nu", "product_mu", "product_nu"], cfg);
    report.param("points", json!(points.len()));
    if points.is_empty() {
        report.notes.push("no points".into());
        return report;
    }
    let mut running = Vec::with_capacity(points.len());
    let mut sup = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        let (pm, pn) = (p.l_mu * p.xi_mu, p.l_nu * p.xi_nu);
        sup = sup.max(pm).max(pn);
        running.push(sup);
        report.push_ok(i, vec![p.l_mu, p.xi_mu, p.l_nu, p.xi_nu, pm, pn]);
    }
    let cut = (points.len() * 9 / 10).max(1) - 1;
    let growth = if running[cut] > 0.0 { sup / running[cut] - 1.0 } else { f64::INFINITY };
    report.param("sup", json!(sup));
    report.margin = 0.05 - growth;
    report.verdict = if sup.is_finite() && growth < 0.05 {
        Verdict::Confirmed
    } else {
        Verdict::Inconclusive
    };
    report
}

/// An `n × n` grid over the region: `b` log-spaced on `[0.1, 6]`,
/// `c = s·f(b)` with `s = k/(n+1)`. Points are ordered by `b`, then `s`.
pub fn bridgeman_grid(gamma: Slope, delta: Slope, n: usize, cfg: &ExperimentConfig) -> Result<(Vec<PleatingPoint>, usize)> {
    let mu = Lamination::delta(gamma);
    let nu = Lamination::delta(delta);
    let mut grid = Vec::new();
    for i in 0..n {
        let b = 0.1 * (60f64).powf(i as f64 / (n.max(2) - 1) as f64);
        let f = horocycle_minimum(&mu, &nu, b)?.f;
        for k in 1..=n {
            grid.push((b, f * k as f64 / (n + 1) as f64));
        }
    }
    let solved = solve_grid(gamma, delta, &grid, cfg);
    let failures = solved.iter().filter(|r| r.is_err()).count();
    Ok((solved.into_iter().filter_map(|r| r.ok()).collect(), failures))
}

/// Bridgeman's supremum on grids of size `n` and `2n`: confirmed when both
/// scans are stable and the supremum moves by less than 5%.
pub fn bridgeman_refinement(gamma: Slope, delta: Slope, n: usize, cfg: &ExperimentConfig) -> Result<SweepReport> {
    let mut report = SweepReport::new("bridgeman", &["n", "points", "failures", "sup"], cfg);
    report.param("gamma", json!(gamma));
    report.param("delta", json!(delta));
    let mut sups = Vec::new();
    let mut stable = true;
    for (i, m) in [n, 2 * n].into_iter().enumerate() {
        let (points, failures) = bridgeman_grid(gamma, delta, m, cfg)?;
        let scan = bridgeman_scan(&points, cfg);
        stable &= scan.verdict == Verdict::Confirmed;
        let sup = scan.parameters.get("sup").and_then(Value::as_f64).unwrap_or(f64::NAN);
        sups.push(sup);
        report.push_ok(i, vec![m as f64, points.len() as f64, failures as f64, sup]);
    }
    let change = (sups[1] - sups[0]).abs() / sups[1];
    report.param("relative_change", json!(change));
    report.margin = 0.05 - change;
    report.verdict = if stable && change < 0.05 {
        Verdict::Confirmed
    } else if change >= 0.05 {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    Ok(report)
}

/// Along `ξ_μ = a`, solves for `l_ν` at each `l_μ = ε` and checks that `l_ν`
/// grows by the configured factor as `ε` descends.
pub fn blowup_probe(gamma: Slope, delta: Slope, a: f64, eps: &[f64], cfg: &ExperimentConfig) -> Result<SweepReport> {
    if !(a > 0.0 && a < PI) {
        return Err(Error::Precondition(format!("angle {a} outside (0, π)")));
    }
    let mut report = SweepReport::new("blowup", &["l_mu", "l_nu", "xi_mu", "xi_nu"], cfg);
    report.param("gamma", json!(gamma));
    report.param("delta", json!(delta));
    report.param("a", json!(a));
    report.param("eps", json!(eps));
    let solved: Vec<Result<PleatingPoint>> = eps
        .par_iter()
        .map(|&e| constant_angle_at_length(gamma, delta, a, e, cfg))
        .collect();
    let mut series = Vec::new();
    let mut broken = false;
    for (i, (e, r)) in eps.iter().zip(solved).enumerate() {
        match r {
            Ok(p) if !broken => {
                series.push(p.l_nu);
                report.push_ok(i, vec![*e, p.l_nu, p.xi_mu, p.xi_nu]);
            }
            Ok(p) => report.push_ok(i, vec![*e, p.l_nu, p.xi_mu, p.xi_nu]),
            Err(err) => {
                // the verdict uses the prefix before the first failure
                broken = true;
                report.push_err(i, vec![*e], &err);
            }
        }
    }
    if series.len() < 2 {
        report.notes.push("fewer than two solved points".into());
        return Ok(report);
    }
    let margin = series.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let growth = series.last().expect("non-empty") / series[0];
    report.param("growth", json!(growth));
    report.margin = margin;
    report.verdict = if margin <= cfg.slack {
        Verdict::Violated
    } else if growth >= cfg.growth_factor {
        Verdict::Confirmed
    } else {
        report.notes.push(format!("growth {growth:.3} below {}", cfg.growth_factor));
        Verdict::Inconclusive
    };
    Ok(report)
}

/// The point with `l_μ = b` and `ξ_μ = a`, by a root solve in `c`.
pub fn constant_angle_at_length(gamma: Slope, delta: Slope, a: f64, b: f64, cfg: &ExperimentConfig) -> Result<PleatingPoint> {
    let f = horocycle_minimum(&Lamination::delta(gamma), &Lamination::delta(delta), b)?.f;
    let g = |c: f64| solve_pleating_with(gamma, delta, b, c, &cfg.solver).map(|p| p.xi_mu - a);
    // ξ_μ decreases in c and vanishes at f: walk down from f to a bracket
    let hi = f * (1.0 - 1e-10);
    let ghi = g(hi)?;
    let mut lo = 0.5 * f;
    let mut glo = g(lo)?;
    while glo < 0.0 {
        lo *= 0.5;
        if lo < 1e-6 * f {
            return Err(Error::NoBracket(format!("ξ_μ = {a} infeasible at l_μ = {b}")));
        }
        glo = g(lo)?;
    }
    let c = find_root(g, lo, hi, glo, ghi, 1e-11)?;
    solve_pleating_with(gamma, delta, b, c, &cfg.solver)
}

/// Minima of `l_m + c·l_ν'` as `c → 0` degenerate towards `m`; length ratios
/// of test curves must approach intersection ratios.
pub fn thurston_probe(
    m: &Lamination,
    cs: &[f64],
    zetas: [&Lamination; 2],
    nu_prime: Option<&Lamination>,
    cfg: &ExperimentConfig,
) -> Result<SweepReport> {
    let default_nu = match m.support() {
        Support::Rational(s) => Lamination::delta(s.dual()),
        Support::Irrational(_) => Lamination::delta(Slope::INFINITY),
    };
    let nu = nu_prime.cloned().unwrap_or(default_nu);
    let i1 = intersection(m, zetas[0]).value;
    let i2 = intersection(m, zetas[1]).value;
    if i1 <= 0.0 || i2 <= 0.0 {
        return Err(Error::Precondition("test curves must meet the lamination".into()));
    }
    let expected = i1 / i2;
    let mut report = SweepReport::new("thurston", &["c", "l_m", "l_zeta1", "l_zeta2", "ratio", "expected"], cfg);
    report.param("m", json!(m.to_string()));
    report.param("nu", json!(nu.to_string()));
    report.param("zeta", json!([zetas[0].to_string(), zetas[1].to_string()]));
    let rows: Vec<Result<Vec<f64>>> = cs
        .par_iter()
        .map(|&c| {
            let lp = line_of_minima(m, &nu, c)?;
            let l1 = length(&lp.point, zetas[0])?;
            let l2 = length(&lp.point, zetas[1])?;
            Ok(vec![c, lp.l_mu, l1, l2, l1 / l2, expected])
        })
        .collect();
    let mut last_error = f64::NAN;
    for (i, (c, r)) in cs.iter().zip(rows).enumerate() {
        match r {
            Ok(v) => {
                last_error = (v[4] / expected - 1.0).abs();
                report.push_ok(i, v);
            }
            Err(e) => report.push_err(i, vec![*c], &e),
        }
    }
    if report.failures() > 0 {
        // very short curves lose their traces to cancellation in the standard frame
        report.notes.push(format!("{} values of c not representable", report.failures()));
    }
    report.margin = 0.01 - last_error;
    report.verdict = if last_error < 0.01 {
        Verdict::Confirmed
    } else {
        Verdict::Inconclusive
    };
    report.param("final_relative_error", json!(last_error));
    Ok(report)
}

/// Solves the pleating problem for successive convergents `p_k/q_k` of an
/// irrational slope with weight `1/q_k` at `(l_μ, l_ν) = (b, c)`, and checks
/// that the groups form a Cauchy sequence with decreasing gaps.
pub fn irrational_limit(
    slope: &IrrationalSlope,
    delta: Slope,
    b: f64,
    c: f64,
    n: usize,
    cfg: &ExperimentConfig,
) -> Result<SweepReport> {
    let convergents = slope.convergents(n)?;
    let mut report = SweepReport::new(
        "irrational",
        &["k", "p", "q", "x_re", "x_im", "y_re", "y_im", "z_re", "z_im", "xi_mu", "xi_nu", "gap"],
        cfg,
    );
    report.param("slope", json!(slope.to_string()));
    report.param("delta", json!(delta));
    report.param("b", json!(b));
    report.param("c", json!(c));
    report.param("n", json!(n));
    let solved: Vec<Result<PleatingPoint>> = convergents
        .par_iter()
        .enumerate()
        .map(|(k, g)| {
            let q = g.q() as f64;
            let mut p = solve_pleating_with(*g, delta, b * q, c, &cfg.solver)?;
            p = reweight(p, 1.0 / q, 1.0);
            p.convergent_index = Some(k);
            Ok(p)
        })
        .collect();
    let mut previous: Option<PleatingPoint> = None;
    let mut gaps = Vec::new();
    let mut xi_gaps = Vec::new();
    for (k, (g, r)) in convergents.iter().zip(solved).enumerate() {
        let base = vec![k as f64, g.p() as f64, g.q() as f64];
        match r {
            Ok(p) => {
                let gap = previous.as_ref().map_or(f64::NAN, |q| q.triple.distance(&p.triple));
                if let Some(q) = &previous {
                    gaps.push(gap);
                    xi_gaps.push((p.xi_mu - q.xi_mu).abs().max((p.xi_nu - q.xi_nu).abs()));
                }
                let [x, y, z] = p.triple.as_array();
                let mut v = base;
                v.extend([x.re, x.im, y.re, y.im, z.re, z.im, p.xi_mu, p.xi_nu, gap]);
                report.push_ok(k, v);
                previous = Some(p);
            }
            Err(e) => report.push_err(k, base, &e),
        }
    }
    report.param("xi_gaps", json!(xi_gaps));
    let first_ok = report.rows.iter().position(|r| r.status == "ok").unwrap_or(report.rows.len());
    if report.rows[first_ok..].iter().any(|r| r.status != "ok") {
        report.notes.push("a finer convergent failed after a coarser one solved".into());
        return Ok(report);
    }
    if gaps.len() < 2 {
        report.notes.push("fewer than three solved convergents".into());
        return Ok(report);
    }
    let margin = gaps.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    report.margin = margin;
    report.verdict = if margin > 0.0 { Verdict::Confirmed } else { Verdict::Violated };
    Ok(report)
}

/// Warm-started sweep of the forward solver along `l_ν = c` (used by the
/// CLI): each solve seeds the next.
pub fn sweep_lengths(gamma: Slope, delta: Slope, c: f64, bs: &[f64], cfg: &ExperimentConfig) -> Vec<Result<PleatingPoint>> {
    let mut out = Vec::with_capacity(bs.len());
    let mut last: Option<PleatingPoint> = None;
    for &b in bs {
        let r = match &last {
            Some(p) => solve_pleating_from(gamma, delta, b, c, p, &cfg.solver),
            None => solve_pleating_with(gamma, delta, b, c, &cfg.solver),
        };
        if let Ok(p) = &r {
            last = Some(*p);
        }
        out.push(r);
    }
    out
}
