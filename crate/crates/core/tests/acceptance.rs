//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use num_complex::Complex64;
use qftorus::conjecture::{
    angle_monotone_on_va, blowup_probe, bridgeman_refinement, irrational_limit, monotone_on_lc, thurston_probe,
    trace_constant_angle, uniqueness_trial, variety_report, ExperimentConfig, Verdict,
};
use qftorus::markov::{realize_matrices_with, Coord, Normalization, Root};
use qftorus::pleating::{
    bending_data, jacobian_lengths_angles, solve_angles, solve_pleating, support_plane_angle, PleatingPoint,
};
use qftorus::teich::{chart_point, f_value, line_of_minima, Branch};
use qftorus::{IrrationalSlope, Lamination, Slope, TraceTriple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn slopes_up_to(qmax: i64) -> Vec<Slope> {
    let mut out = vec![Slope::INFINITY];
    for q in 1..=qmax {
        for p in -qmax..=qmax {
            if let Ok(s) = Slope::new(p, q) {
                if s.q() == q && !out.contains(&s) {
                    out.push(s);
                }
            }
        }
    }
    out
}

fn random_triple(rng: &mut ChaCha8Rng) -> TraceTriple {
    loop {
        let x = Complex64::new(rng.gen_range(2.5..4.0), rng.gen_range(-0.6..0.6));
        let y = Complex64::new(rng.gen_range(2.5..4.0), rng.gen_range(-0.6..0.6));
        let root = if rng.gen_bool(0.5) { Root::Plus } else { Root::Minus };
        if let Ok(t) = TraceTriple::complete(x, y, root) {
            return t;
        }
    }
}

fn markov_core() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let coords = [Coord::X, Coord::Y, Coord::Z];
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let mut t = random_triple(&mut rng);
        let mut last = None;
        for _ in 0..rng.gen_range(1..=8) {
            let k = loop {
                let k = rng.gen_range(0..3);
                if Some(k) != last {
                    break k;
                }
            };
            last = Some(k);
            t = t.vieta_flip(coords[k]);
            worst = worst.max(t.residual());
        }
    }
    ensure(worst <= 1e-9, || format!("flip residual {worst:e}"))?;

    let slopes = slopes_up_to(50);
    let triples = [random_triple(&mut rng), random_triple(&mut rng), TraceTriple::real(3.0, 3.0, 3.0).unwrap()];
    for t in &triples {
        for &s in &slopes {
            if s.q() < 2 {
                continue;
            }
            let (p, q) = (s.p(), s.q());
            let v = (1..q).find(|v| (p * v - 1).rem_euclid(q) == 0).unwrap();
            let u = (p * v - 1) / q;
            let l = Slope::new(u, v).unwrap();
            let r = Slope::new(p - u, q - v).unwrap();
            let opposite = Slope::new(p - 2 * u, q - 2 * v).unwrap();
            let direct = t.trace_of_slope(s).map_err(|e| e.to_string())?;
            let parents = t.trace_of_slope(l).unwrap() * t.trace_of_slope(r).unwrap() - t.trace_of_slope(opposite).unwrap();
            ensure(close(direct, parents, 1e-9), || format!("path dependence at {s}"))?;
        }
        for norm in [Normalization::Companion, Normalization::Jorgensen] {
            let g = realize_matrices_with(t, norm).map_err(|e| e.to_string())?;
            for &s in &slopes {
                let w = g.word(s).trace();
                let tr = t.trace_of_slope(s).unwrap();
                ensure(close(w, tr, 1e-9), || format!("word {s}: {w} vs {tr}"))?;
            }
        }
    }
    Ok(format!("flip residual {worst:.1e}, {} slopes", slopes.len()))
}

fn fuchsian_geometry() -> Outcome {
    let lower = chart_point(3.0, 3.0, Branch::Lower).map_err(|e| e.to_string())?;
    let upper = chart_point(3.0, 3.0, Branch::Upper).map_err(|e| e.to_string())?;
    ensure(lower.coords() == [3.0, 3.0, 3.0], || format!("lower root {:?}", lower.coords()))?;
    ensure(upper.coords() == [3.0, 3.0, 6.0], || format!("upper root {:?}", upper.coords()))?;
    let mu = Lamination::delta(Slope::ZERO);
    let nu = Lamination::delta(Slope::INFINITY);
    let lp = line_of_minima(&mu, &nu, 1.0).map_err(|e| e.to_string())?;
    let r = 2.0 * 2f64.sqrt();
    let target = [r, r, 4.0];
    let err = lp
        .point
        .coords()
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(err <= 1e-6, || format!("square torus error {err:e}"))?;
    let bs: Vec<f64> = (0..20).map(|k| 0.1 * 60f64.powf(k as f64 / 19.0)).collect();
    let fs: Vec<f64> = bs.iter().map(|&b| f_value(&mu, &nu, b)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let margin = fs.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    ensure(margin > 1e-9, || format!("f not strictly decreasing, margin {margin:e}"))?;
    Ok(format!("minimizer error {err:.1e}, f margin {margin:.2e}"))
}

const GRID: [f64; 5] = [0.3, 0.6, 0.9, 1.2, 1.5];

fn grid_points() -> Result<Vec<PleatingPoint>, String> {
    let mut out = Vec::new();
    for &b in &GRID {
        for &c in &GRID {
            out.push(solve_pleating(Slope::ZERO, Slope::INFINITY, b, c).map_err(|e| format!("({b}, {c}): {e}"))?);
        }
    }
    Ok(out)
}

fn pleating_solver(points: &[PleatingPoint]) -> Outcome {
    let mut worst = 0.0f64;
    for p in points {
        worst = worst.max(p.residual);
        ensure(p.residual <= 1e-10, || format!("residual {:e}", p.residual))?;
        for th in [p.theta_gamma, p.theta_delta] {
            ensure(th > 0.0 && th < PI, || format!("angle {th} at ({}, {})", p.l_mu, p.l_nu))?;
        }
    }
    let mut swap = 0.0f64;
    for &b in &GRID {
        for &c in &GRID {
            let p = points[GRID.iter().position(|&v| v == b).unwrap() * 5 + GRID.iter().position(|&v| v == c).unwrap()];
            let q = points[GRID.iter().position(|&v| v == c).unwrap() * 5 + GRID.iter().position(|&v| v == b).unwrap()];
            // swapping the lengths swaps x and y
            swap = swap.max((p.triple.x() - q.triple.y()).norm()).max((p.triple.y() - q.triple.x()).norm()).max((p.triple.z() - q.triple.z()).norm());
        }
    }
    ensure(swap <= 1e-8, || format!("swap asymmetry {swap:e}"))?;
    Ok(format!("25 solves, worst residual {worst:.1e}, swap {swap:.1e}"))
}

fn oracle_agreement(points: &[PleatingPoint]) -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for p in points.iter().step_by(3) {
        let dg = support_plane_angle(&p.triple, p.gamma).map_err(|e| e.to_string())?;
        let dd = support_plane_angle(&p.triple, p.delta).map_err(|e| e.to_string())?;
        worst = worst.max((dg.angle - p.tau_gamma.im.abs()).abs()).max((dd.angle - p.theta_delta).abs());
        count += 1;
    }
    ensure(count >= 5 && worst <= 1e-6, || format!("oracle deviation {worst:e} over {count} points"))?;
    Ok(format!("{count} points, worst deviation {worst:.1e}"))
}

fn jacobian(points: &[PleatingPoint]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut max_eig = f64::NEG_INFINITY;
    for p in points {
        let j1 = jacobian_lengths_angles(p, 1e-3).map_err(|e| e.to_string())?;
        let j2 = jacobian_lengths_angles(p, 5e-4).map_err(|e| e.to_string())?;
        let rel = j1.asymmetry / j1.norm;
        worst = worst.max(rel);
        max_eig = max_eig.max(j1.eigenvalues[0].max(j1.eigenvalues[1]));
        ensure(rel <= 1e-4, || format!("asymmetry {rel:e} at ({}, {})", p.l_mu, p.l_nu))?;
        ensure(j1.eigenvalues.iter().all(|&e| e < 0.0), || format!("eigenvalues {:?}", j1.eigenvalues))?;
        // on the diagonal the pair is exactly symmetric and nothing can shrink
        let exact = j1.asymmetry <= 1e-12 * j1.norm;
        ensure(exact || j2.asymmetry < j1.asymmetry, || {
            format!("asymmetry did not shrink at ({}, {}): {:e} → {:e}", p.l_mu, p.l_nu, j1.asymmetry, j2.asymmetry)
        })?;
    }
    Ok(format!("worst relative asymmetry {worst:.1e}, largest eigenvalue {max_eig:.3}"))
}

fn angle_pairs(seed: u64, n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.gen_range(0.1..2.8), rng.gen_range(0.1..2.8))).collect()
}

fn inverse_round_trip() -> Outcome {
    let mut worst = 0.0f64;
    for (tg, td) in angle_pairs(6, 10) {
        let p = solve_angles(Slope::ZERO, Slope::INFINITY, tg, td).map_err(|e| format!("({tg:.3}, {td:.3}): {e}"))?;
        let (ag, ad) = bending_data(&p.triple, Slope::ZERO, Slope::INFINITY).map_err(|e| e.to_string())?;
        worst = worst.max((ag - tg).abs()).max((ad - td).abs());
    }
    ensure(worst < 1e-8, || format!("round-trip error {worst:e}"))?;
    Ok(format!("10 pairs, worst error {worst:.1e}"))
}

fn uniqueness() -> Outcome {
    let cfg = ExperimentConfig::default();
    let mut worst = 0.0f64;
    for (i, (tg, td)) in angle_pairs(7, 10).into_iter().enumerate() {
        let cfg = ExperimentConfig { seed: i as u64, ..cfg };
        let r = uniqueness_trial(Slope::ZERO, Slope::INFINITY, tg, td, 20, &cfg).map_err(|e| e.to_string())?;
        let diameter = r.parameters["diameter"].as_f64().unwrap_or(f64::NAN);
        worst = worst.max(diameter);
        ensure(r.verdict == Verdict::Confirmed, || {
            format!("({tg:.3}, {td:.3}): {:?}, clusters {}, {:?}", r.verdict, r.parameters["clusters"], r.notes)
        })?;
    }
    Ok(format!("10 pairs × 20 starts, one cluster each, largest diameter {worst:.1e}"))
}

fn monotonicity() -> Outcome {
    let cfg = ExperimentConfig::default();
    let mut details = Vec::new();
    for c in [0.5, 1.0, 2.0] {
        let r = monotone_on_lc(Slope::ZERO, Slope::INFINITY, c, 50, &cfg).map_err(|e| e.to_string())?;
        let end = r.rows.last().map_or(f64::NAN, |row| row.values[1]);
        ensure(r.verdict == Verdict::Confirmed && r.successes() == 50, || {
            format!("c = {c}: {:?} margin {:e} {:?}", r.verdict, r.margin, r.notes)
        })?;
        ensure(end < 1e-3, || format!("c = {c}: boundary ξ_μ {end:e}"))?;
        details.push(format!("c={c} end ξ {end:.1e}"));
    }
    Ok(details.join(", "))
}

fn constant_angle() -> Outcome {
    let cfg = ExperimentConfig::default();
    let cs: Vec<f64> = (0..12).map(|k| 0.2 + 0.3 * k as f64).collect();
    let mut details = Vec::new();
    for a in [0.3, 0.6] {
        let trace = trace_constant_angle(Slope::ZERO, Slope::INFINITY, a, &cs, &cfg).map_err(|e| e.to_string())?;
        let v = variety_report(&trace, &cfg);
        ensure(v.verdict == Verdict::Confirmed, || format!("a = {a}: roots {:?}", trace.scans))?;
        let m = angle_monotone_on_va(&trace, &cfg);
        ensure(m.verdict == Verdict::Confirmed, || format!("a = {a}: ξ_ν {:?} margin {:e}", m.verdict, m.margin))?;
        details.push(format!("a={a} {} roots, ξ_ν margin {:.1e}", trace.points.len(), m.margin));
    }
    Ok(details.join(", "))
}

fn bridgeman_and_blowup() -> Outcome {
    let cfg = ExperimentConfig::default();
    let r = bridgeman_refinement(Slope::ZERO, Slope::INFINITY, 8, &cfg).map_err(|e| e.to_string())?;
    let change = r.parameters["relative_change"].as_f64().unwrap_or(f64::NAN);
    ensure(r.verdict == Verdict::Confirmed, || format!("Bridgeman {:?}, change {change:e}", r.verdict))?;
    let sup = r.rows[1].values[3];
    let eps: Vec<f64> = (0..9).map(|k| 3.0 * 0.5f64.powi(k)).collect();
    let b = blowup_probe(Slope::ZERO, Slope::INFINITY, 0.5, &eps, &cfg).map_err(|e| e.to_string())?;
    let growth = b.parameters.get("growth").and_then(|g| g.as_f64()).unwrap_or(f64::NAN);
    ensure(b.verdict == Verdict::Confirmed && b.failures() == 0, || format!("blowup {:?}, growth {growth}", b.verdict))?;
    Ok(format!("sup l·ξ {sup:.4} (change {:.2}%), l_ν growth {growth:.1}×", 100.0 * change))
}

fn irrational_limits() -> Outcome {
    let cfg = ExperimentConfig::default();
    let r = irrational_limit(&IrrationalSlope::golden(40), Slope::INFINITY, 1.0, 0.3, 8, &cfg).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Confirmed && r.failures() == 0, || format!("irrational {:?} {:?}", r.verdict, r.notes))?;
    let last_gap = r.rows.last().map_or(f64::NAN, |row| row.values[11]);
    let cs: Vec<f64> = (0..4).map(|k| 10f64.powi(-k)).collect();
    let mut errors = Vec::new();
    let probes = [
        (Slope::ZERO, Slope::INFINITY, Slope::ONE),
        ("1/2".parse().unwrap(), Slope::INFINITY, Slope::ZERO),
    ];
    for (m, z1, z2) in probes {
        let t = thurston_probe(
            &Lamination::delta(m),
            &cs,
            [&Lamination::delta(z1), &Lamination::delta(z2)],
            None,
            &cfg,
        )
        .map_err(|e| e.to_string())?;
        let err = t.parameters["final_relative_error"].as_f64().unwrap_or(f64::NAN);
        ensure(t.verdict == Verdict::Confirmed, || format!("ratio error {err:e} for {m}"))?;
        errors.push(err);
    }
    Ok(format!(
        "last gap {last_gap:.1e}, ratio errors {:.1e} / {:.1e}",
        errors[0], errors[1]
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let points = grid_points();
    let on_grid = |f: fn(&[PleatingPoint]) -> Outcome| -> Outcome {
        match &points {
            Ok(p) => f(p),
            Err(e) => Err(format!("grid solve failed: {e}")),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("markov-farey-core", markov_core()),
        ("fuchsian-geometry", fuchsian_geometry()),
        ("pleating-solver-grid", on_grid(pleating_solver)),
        ("bending-angle-oracle", on_grid(oracle_agreement)),
        ("jacobian-symmetric-negative", on_grid(jacobian)),
        ("inverse-round-trip", inverse_round_trip()),
        ("uniqueness-trial", uniqueness()),
        ("monotone-on-lines", monotonicity()),
        ("constant-angle-variety", constant_angle()),
        ("bridgeman-and-blowup", bridgeman_and_blowup()),
        ("irrational-limits", irrational_limits()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
