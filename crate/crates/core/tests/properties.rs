use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use curveasym_core::asymptote::{closed_form_ratio, limsup_estimate, make_sequence, ClosedForm, SequenceSpec, Trend};
use curveasym_core::catalog;
use curveasym_core::curve::{real_fn, Curve, Domain};
use curveasym_core::expr;
use curveasym_core::meanvalue::{xi_lagrange, SolverConfig};
use curveasym_core::support::{analyze_chord, phi_value, ExtReal, SetSelection, SupportConfig};
use curveasym_core::verify::RandomCurve;

fn random_curve(seed: u64, trig: bool) -> Curve {
    RandomCurve::draw(&mut ChaCha8Rng::seed_from_u64(seed), trig).curve()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phi_vanishes_at_chord_end(seed in any::<u64>(), trig: bool, t in 0.5f64..2.9) {
        let c = random_curve(seed, trig);
        prop_assert_eq!(phi_value(&c, t, t).unwrap(), 0.0);
    }

    #[test]
    fn support_points_are_tangency_points(seed in any::<u64>(), trig: bool, t in 1.0f64..2.9) {
        let c = random_curve(seed, trig);
        let r = analyze_chord(&c, t, &SupportConfig::default(), SetSelection::BOTH).unwrap();
        for p in r.support.iter().filter(|p| p.offset != 0.0) {
            prop_assert!(r.tangent.iter().any(|q| (q.tau - p.tau).abs() <= 1e-8), "{p:?}");
        }
        // DT ≥ DS because T ⊇ S
        if let (Some(ExtReal::Finite(s)), Some(ExtReal::Finite(tg))) = (r.ratio_support, r.ratio_tangent) {
            prop_assert!(tg >= s - 1e-12);
        }
    }

    #[test]
    fn ratios_are_scale_invariant(seed in any::<u64>(), lam in 0.01f64..100.0, t in 1.0f64..2.9) {
        let rc = RandomCurve::draw(&mut ChaCha8Rng::seed_from_u64(seed), false);
        let (a, b) = (rc.curve(), rc.curve());
        let scaled = Curve::cartesian(
            real_fn(move |t| lam * a.eval_point(t).unwrap().x),
            real_fn(move |t| lam * b.eval_point(t).unwrap().y),
            Domain::new(0.0, 3.0).unwrap(),
            None,
        )
        .unwrap();
        let cfg = SupportConfig::default();
        let r0 = analyze_chord(&rc.curve(), t, &cfg, SetSelection::SUPPORT).unwrap();
        let r1 = analyze_chord(&scaled, t, &cfg, SetSelection::SUPPORT).unwrap();
        let (x0, x1) = (r0.ratio_support.unwrap().finite().unwrap(), r1.ratio_support.unwrap().finite().unwrap());
        prop_assert!((x0 - x1).abs() <= 1e-8, "{x0} vs {x1}");
    }

    #[test]
    fn arc_length_dominates_chord_and_adds(seed in any::<u64>(), trig: bool, p in 0.1f64..1.0, q in 1.0f64..2.0, r in 2.0f64..2.9) {
        let c = random_curve(seed, trig);
        let tol = 1e-10;
        let (lpq, lqr, lpr) = (c.arc_length(p, q, tol).unwrap(), c.arc_length(q, r, tol).unwrap(), c.arc_length(p, r, tol).unwrap());
        prop_assert!((lpq + lqr - lpr).abs() <= 4.0 * tol * lpr.max(1.0));
        let chord = (c.eval_point(r).unwrap() - c.eval_point(p).unwrap()).norm();
        prop_assert!(lpr >= chord * (1.0 - 1e-12));
    }

    #[test]
    fn log_spiral_ratio_is_constant(alpha in 0.3f64..5.0, t in -30.0f64..-0.5) {
        let c = catalog::log_spiral(alpha).unwrap();
        let want = closed_form_ratio(ClosedForm::LogSpiral, alpha).unwrap();
        let r = analyze_chord(&c, t, &SupportConfig::default(), SetSelection::BOTH).unwrap();
        assert_relative_eq!(r.ratio_support.unwrap().finite().unwrap(), want, max_relative = 1e-9);
        assert_relative_eq!(r.ratio_tangent.unwrap().finite().unwrap(), want, max_relative = 1e-9);
    }

    #[test]
    fn lagrange_point_solves_and_is_largest(c2 in -2.0f64..2.0, c3 in -2.0f64..2.0, x in 0.1f64..3.0) {
        let g = real_fn(move |t| t + c2 * t * t + c3 * t * t * t);
        let dg = real_fn(move |t| 1.0 + 2.0 * c2 * t + 3.0 * c3 * t * t);
        let r = xi_lagrange(&g, &dg, 0.0, x, &SolverConfig::default()).unwrap();
        prop_assert!(r.tau > 0.0 && r.tau <= x);
        prop_assert!(r.residual <= 1e-9, "{r:?}");
        // g′ − slope keeps one sign above ξ
        let slope = (g(x) - g(0.0)) / x;
        let f = |t: f64| dg(t) - slope;
        let lo = r.tau + 1e-9 * x;
        let n = 2000;
        let sign = f(lo).signum();
        prop_assert!((1..=n).all(|i| f(lo + (x - lo) * i as f64 / n as f64).signum() == sign || lo >= x));
    }

    #[test]
    fn expression_matches_closure(a in -3.0f64..3.0, t in 0.01f64..10.0) {
        let e = expr::parse(&format!("exp({a}*t)*(2+sin(3*t)) - t^2/ln(1+t)")).unwrap();
        let want = (a * t).exp() * (2.0 + (3.0 * t).sin()) - t * t / (1.0 + t).ln();
        assert_relative_eq!(e.eval(t).unwrap(), want, max_relative = 1e-13, epsilon = 1e-13);
    }

    #[test]
    fn constant_series_has_flat_limsup(v in 0.0f64..1.0, n in 8usize..40) {
        let s = vec![ExtReal::Finite(v); n];
        let est = limsup_estimate(&s, 8).unwrap();
        prop_assert_eq!(est.value, ExtReal::Finite(v));
        prop_assert_eq!(est.trend, Trend::Flat);
    }

    #[test]
    fn sequences_decrease_toward_the_start(t0 in 0.1f64..10.0, r in 0.1f64..0.95, count in 1usize..60) {
        let dom = Domain::new(0.0, 20.0).unwrap();
        let s = make_sequence(&SequenceSpec::GeometricToFinite { a: 0.0, t0, r, count }, dom).unwrap();
        prop_assert_eq!(s.len(), count);
        prop_assert!(s.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
    }
}
