use hlmax::catalog::{make_function, make_weight, TestFunction};
use hlmax::operators::{average, integral_function, maximal, p_sweep, PExponent};
use hlmax::quadrature::{Estimate, QuadratureConfig};
use hlmax::spaces::{SpaceInstance, SpacePoint};
use hlmax::verify::{to_json, CheckReport, Status};
use proptest::prelude::*;

fn line_function() -> impl Strategy<Value = String> {
    (0..3usize, -3.0..3.0f64, 0.2..2.0f64).prop_map(|(k, c, r)| match k {
        0 => format!("indicator-ball:{c}:{r}"),
        1 => format!("bump:{c}:{r}"),
        _ => format!("gauss:{c}:{r}"),
    })
}

fn weight() -> impl Strategy<Value = String> {
    prop_oneof![Just("exp".to_string()), Just("gauss".to_string()), (0.5..4.0f64).prop_map(|r| format!("uniform:{r}"))]
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn line_setup(f: &str, w: &str) -> (SpaceInstance, TestFunction, hlmax::catalog::RadiusWeight) {
    let line = SpaceInstance::real_line();
    let f = make_function(&line, f).unwrap();
    (line, f, make_weight(w).unwrap())
}

fn slack(e: &Estimate) -> f64 {
    e.error_bound + 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn averages_stay_below_the_maximal_function(f in line_function(), x in -5.0..5.0f64, r in 0.01..10.0f64) {
        let (line, f, _) = line_setup(&f, "exp");
        let x = SpacePoint::Real1(x);
        let a = average(&line, &f, &x, r, &cfg()).unwrap();
        let m = maximal(&line, &f, &x, &cfg()).unwrap();
        prop_assert!(a.value <= m.value + slack(&m) + slack(&a));
        prop_assert!(a.value <= 1.0 + 1e-12);
    }

    #[test]
    fn integral_function_is_dominated(f in line_function(), w in weight(), p in 1.0..64.0f64, x in -5.0..5.0f64) {
        let (line, f, w) = line_setup(&f, &w);
        let x = SpacePoint::Real1(x);
        let p = PExponent::new(p).unwrap();
        let i = integral_function(&line, &f, &w, p, &x, &cfg()).unwrap();
        let m = maximal(&line, &f, &x, &cfg()).unwrap();
        let mass = w.total_mass(&cfg()).unwrap().value;
        prop_assert!(i.value <= mass.powf(p.recip()) * (m.value + slack(&m)) + slack(&i));
    }

    #[test]
    fn normalized_values_grow_with_p(f in line_function(), w in weight(), x in -5.0..5.0f64) {
        let (line, f, w) = line_setup(&f, &w);
        let ps: Vec<PExponent> = [1.0, 2.0, 3.5, 8.0, 32.0, f64::INFINITY].iter().map(|&v| PExponent::new(v).unwrap()).collect();
        let rows = p_sweep(&line, &f, &w, &SpacePoint::Real1(x), &ps, &cfg()).unwrap();
        for pair in rows.windows(2) {
            let tol = 1e-7 * (1.0 + pair[1].normalized) + pair[0].i_value.error_bound + pair[1].i_value.error_bound;
            prop_assert!(pair[1].normalized + tol >= pair[0].normalized, "{:?}", pair);
        }
    }

    #[test]
    fn homogeneity(f in line_function(), w in weight(), p in 1.0..16.0f64, x in -4.0..4.0f64, c in 0.01..100.0f64) {
        let (line, f, w) = line_setup(&f, &w);
        let x = SpacePoint::Real1(x);
        let p = PExponent::new(p).unwrap();
        let base = integral_function(&line, &f, &w, p, &x, &cfg()).unwrap().value;
        let scaled = integral_function(&line, &f.scaled(c).unwrap(), &w, p, &x, &cfg()).unwrap().value;
        prop_assert!((scaled - c * base).abs() <= 1e-12 * c * base + 1e-300);
    }

    #[test]
    fn sublinearity(f in line_function(), g in line_function(), w in weight(), p in 1.0..16.0f64, x in -4.0..4.0f64) {
        let (line, f, w) = line_setup(&f, &w);
        let g = make_function(&line, &g).unwrap();
        let x = SpacePoint::Real1(x);
        let p = PExponent::new(p).unwrap();
        let sum = integral_function(&line, &f.sum(&g).unwrap(), &w, p, &x, &cfg()).unwrap();
        let a = integral_function(&line, &f, &w, p, &x, &cfg()).unwrap();
        let b = integral_function(&line, &g, &w, p, &x, &cfg()).unwrap();
        prop_assert!(sum.value <= a.value + b.value + slack(&sum) + slack(&a) + slack(&b));
    }

    #[test]
    fn translation_invariance_on_the_line(c in -3.0..3.0f64, r in 0.2..2.0f64, x in -4.0..4.0f64, t in -5.0..5.0f64, rad in 0.05..6.0f64) {
        let line = SpaceInstance::real_line();
        let f = make_function(&line, &format!("bump:{c}:{r}")).unwrap();
        let moved = make_function(&line, &format!("bump:{}:{r}", c + t)).unwrap();
        let a = average(&line, &f, &SpacePoint::Real1(x), rad, &cfg()).unwrap().value;
        let b = average(&line, &moved, &SpacePoint::Real1(x + t), rad, &cfg()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn hyperbolic_distance_is_a_left_invariant_metric(
        (a1, b1, a2, b2, a3, b3) in (-3.0..3.0f64, 0.1..5.0f64, -3.0..3.0f64, 0.1..5.0f64, -3.0..3.0f64, 0.1..5.0f64),
        (ga, gb) in (-5.0..5.0f64, 0.05..20.0f64),
    ) {
        let h = SpaceInstance::affine_left();
        let p = |a, b| SpacePoint::affine(a, b).unwrap();
        let (x, y, z, g) = (p(a1, b1), p(a2, b2), p(a3, b3), p(ga, gb));
        let d = |u: &SpacePoint, v: &SpacePoint| h.distance(u, v).unwrap();
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() < 1e-12);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-10);
        let (gx, gy) = (h.translate(&g, &x).unwrap(), h.translate(&g, &y).unwrap());
        prop_assert!((d(&gx, &gy) - d(&x, &y)).abs() < 1e-9 * (1.0 + d(&x, &y)));
    }

    #[test]
    fn right_haar_balls_scale_with_height(a in -5.0..5.0f64, b in 0.01..50.0f64, r in 0.01..5.0f64) {
        let right = SpaceInstance::affine_right();
        let left = SpaceInstance::affine_left();
        let x = SpacePoint::affine(a, b).unwrap();
        let e = left.identity().unwrap();
        let rho = right.ball_volume(&x, r).unwrap();
        prop_assert!((rho / (b * left.ball_volume(&e, r).unwrap()) - 1.0).abs() < 1e-12);
        prop_assert!((left.ball_volume(&x, r).unwrap() / left.ball_volume(&e, r).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((right.modular(&x).unwrap() * b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponents_round_trip_through_text(v in 1.0..1e6f64) {
        let p = PExponent::new(v).unwrap();
        let back: PExponent = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn report_floats_round_trip(lhs in proptest::num::f64::NORMAL, rhs in -1e300..1e300f64) {
        let r = CheckReport {
            name: "n".into(),
            paper_anchor: "a".into(),
            status: Status::Pass,
            lhs,
            rhs,
            slack: 0.0,
            seed: 1,
            config_digest: "d".into(),
            details: serde_json::Value::Null,
        };
        let text = to_json(&[r]);
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back[0]["lhs"].as_f64().unwrap(), lhs);
        prop_assert_eq!(back[0]["rhs"].as_f64().unwrap(), rhs);
    }
}

#[test]
fn infinite_exponent_is_the_maximal_function() {
    let (line, f, w) = line_setup("bump:0.3:1.2", "gauss");
    for x in [-2.0, 0.0, 0.7, 3.0] {
        let x = SpacePoint::Real1(x);
        assert_eq!(
            integral_function(&line, &f, &w, PExponent::INFINITY, &x, &cfg()).unwrap(),
            maximal(&line, &f, &x, &cfg()).unwrap()
        );
    }
}
