use lgop_core::{apply_p, apply_r, raw_moments_closed, weight_sequence, OperatorParams, TestFunction};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = OperatorParams> {
    (-0.9f64..6.0, 0.2f64..12.0, 5.0f64..120.0).prop_map(|(a, b, e)| OperatorParams::new(a, b, e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_are_a_probability_vector(p in params(), x in 0.0f64..8.0) {
        let ws = weight_sequence(x, &p, 1e-12).unwrap();
        prop_assert!(ws.weights.iter().all(|&w| w >= 0.0));
        prop_assert!((ws.total() - 1.0).abs() <= 1e-11);
    }

    #[test]
    fn polynomials_follow_the_raw_moments(
        p in params(),
        x in 0.0f64..4.0,
        c in prop::collection::vec(-3.0f64..3.0, 5),
    ) {
        let f = TestFunction::polynomial(&c);
        let m = raw_moments_closed(&p, x);
        let expected = c[0] * m.m0 + c[1] * m.m1 + c[2] * m.m2 + c[3] * m.m3 + c[4] * m.m4;
        let scale: f64 = [m.m0, m.m1, m.m2, m.m3, m.m4].iter().zip(&c).map(|(m, c)| (m * c).abs()).sum();
        let got = apply_r(&p, &f, x).unwrap();
        prop_assert!((got.value - expected).abs() <= 1e-10 * scale.max(1.0), "{} vs {}", got.value, expected);
    }

    #[test]
    fn r_is_linear_and_positive(p in params(), x in 0.0f64..4.0, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let f = TestFunction::xexp5();
        let g = TestFunction::sqrt();
        let h = TestFunction::combine(a, &f, b, &g);
        let rf = apply_r(&p, &f, x).unwrap().value;
        let rg = apply_r(&p, &g, x).unwrap().value;
        let rh = apply_r(&p, &h, x).unwrap().value;
        prop_assert!((rh - (a * rf + b * rg)).abs() <= 1e-10 * (1.0 + rf.abs() + rg.abs()));
        prop_assert!(rf >= 0.0 && rg >= 0.0);
    }

    #[test]
    fn p_reproduces_affine_functions(p in params(), x in 0.0f64..4.0) {
        let v = apply_p(&p, &TestFunction::polynomial(&[1.0, 2.0]), x).unwrap().value;
        let expected = 1.0 + 2.0 * (x + (1.0 + p.alpha) / p.eta);
        prop_assert!((v - expected).abs() <= 1e-10 * expected);
    }
}
