use num_complex::Complex64;
use proptest::prelude::*;
use qftorus::curves::Frame;
use qftorus::markov::{bowditch_check, BowditchConfig, Coord, Root, Verdict};
use qftorus::pleating::{bending_data, solve_pleating, support_plane_angle, PleatingPoint};
use qftorus::teich::{f_value, line_of_minima};
use qftorus::{complex_length, Lamination, Slope, TraceTriple};

fn f_pair(b: f64) -> f64 {
    2.0 * (1.0 / (0.5 * b).sinh()).asinh()
}

fn arb_triple() -> impl Strategy<Value = TraceTriple> {
    (2.5f64..4.0, -0.6f64..0.6, 2.5f64..4.0, -0.6f64..0.6, any::<bool>()).prop_filter_map("degenerate", |(a, b, c, d, plus)| {
        let root = if plus { Root::Plus } else { Root::Minus };
        TraceTriple::complete(Complex64::new(a, b), Complex64::new(c, d), root).ok()
    })
}

fn arb_slope(qmax: i64) -> impl Strategy<Value = Slope> {
    (-qmax..=qmax, 0..=qmax).prop_filter_map("0/0", |(p, q)| Slope::new(p, q).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flips_are_involutions(t in arb_triple(), k in 0usize..3) {
        let c = [Coord::X, Coord::Y, Coord::Z][k];
        let back = t.vieta_flip(c).vieta_flip(c);
        prop_assert!(back.distance(&t) <= 1e-12 * (1.0 + t.x().norm().max(t.y().norm()).max(t.z().norm())));
    }

    #[test]
    fn framed_traces_agree(t in arb_triple(), base in arb_slope(3), s in arb_slope(8)) {
        let frame = Frame::adapted(base);
        let framed = t.in_frame(&frame).unwrap();
        let direct = t.trace_of_slope(frame.to_standard(s)).unwrap();
        let read = framed.trace_of_slope(s).unwrap();
        prop_assert!((direct - read).norm() <= 1e-8 * (1.0 + direct.norm()));
    }

    #[test]
    fn real_lengths_increase(a in 2.0001f64..50.0, d in 1e-6f64..10.0) {
        let l1 = complex_length(Complex64::new(a, 0.0)).value.re;
        let l2 = complex_length(Complex64::new(a + d, 0.0)).value.re;
        prop_assert!(l2 > l1);
    }

    #[test]
    fn complex_length_branch(t in arb_triple()) {
        let l = complex_length(t.x());
        prop_assert!(l.value.re >= 0.0);
        prop_assert!(l.value.im > -std::f64::consts::PI && l.value.im <= std::f64::consts::PI);
    }

    #[test]
    fn bowditch_ignores_marking(t in arb_triple(), k in 0usize..3) {
        // flipping re-marks the same group
        let c = [Coord::X, Coord::Y, Coord::Z][k];
        let cfg = BowditchConfig::default();
        let a = bowditch_check(&t, &cfg).verdict;
        let b = bowditch_check(&t.vieta_flip(c), &cfg).verdict;
        prop_assert!(a == b || a == Verdict::Inconclusive || b == Verdict::Inconclusive);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn f_strictly_decreasing(b in 0.05f64..6.0, d in 0.01f64..1.0) {
        let mu = Lamination::delta(Slope::ZERO);
        let nu = Lamination::delta(Slope::INFINITY);
        prop_assert!(f_value(&mu, &nu, b).unwrap() > f_value(&mu, &nu, b + d).unwrap());
    }

    #[test]
    fn line_of_minima_gradient_vanishes(c in 0.05f64..20.0) {
        let mu = Lamination::delta("1/2".parse().unwrap());
        let nu = Lamination::delta("-1/3".parse().unwrap());
        let p = line_of_minima(&mu, &nu, c).unwrap();
        prop_assert!(p.gradient_norm <= 1e-8);
    }

    #[test]
    fn solved_points_satisfy_invariants(b in 0.1f64..3.0, u in 0.05f64..0.95) {
        let c = u * f_pair(b);
        let p = solve_pleating(Slope::ZERO, Slope::INFINITY, b, c).unwrap();
        prop_assert!(p.residual <= 1e-10);
        prop_assert!(p.theta_gamma > 0.0 && p.theta_gamma < std::f64::consts::PI);
        prop_assert!(p.theta_delta > 0.0 && p.theta_delta < std::f64::consts::PI);
        // closed form for this pair
        prop_assert!(((0.5 * p.theta_gamma).cos() - (0.5 * c).cosh() * (0.5 * b).tanh()).abs() < 1e-9);
        prop_assert!(((0.5 * p.theta_delta).cos() - (0.5 * b).cosh() * (0.5 * c).tanh()).abs() < 1e-9);
        let (tg, td) = bending_data(&p.triple, Slope::ZERO, Slope::INFINITY).unwrap();
        prop_assert!((tg - p.theta_gamma).abs() < 1e-12 && (td - p.theta_delta).abs() < 1e-12);
    }

    #[test]
    fn swapped_lengths_swap_generators(b in 0.2f64..2.5, u in 0.1f64..0.9) {
        let c = u * f_pair(b);
        let p = solve_pleating(Slope::ZERO, Slope::INFINITY, b, c).unwrap();
        let q = solve_pleating(Slope::ZERO, Slope::INFINITY, c, b).unwrap();
        prop_assert!((p.triple.x() - q.triple.y()).norm() < 1e-8);
        prop_assert!((p.triple.y() - q.triple.x()).norm() < 1e-8);
    }

    #[test]
    fn oracle_matches_twist(b in 0.3f64..2.0, u in 0.1f64..0.9) {
        let c = u * f_pair(b);
        let p = solve_pleating(Slope::ZERO, "2/1".parse().unwrap(), b, c);
        if let Ok(p) = p {
            let d = support_plane_angle(&p.triple, p.gamma).unwrap();
            prop_assert!((d.angle - p.theta_gamma).abs() < 1e-6);
        }
    }

    #[test]
    fn points_round_trip_json(b in 0.2f64..2.0, u in 0.1f64..0.9) {
        let p = solve_pleating(Slope::ZERO, Slope::INFINITY, b, u * f_pair(b)).unwrap();
        let back: PleatingPoint = serde_json::from_str(&p.to_json()).unwrap();
        prop_assert_eq!(back, p);
    }
}
