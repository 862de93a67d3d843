use lgop_core::analysis::{closed_form_polynomial, error_table};
use lgop_core::operators::mu4_as_printed;
use lgop_core::{central_moments_closed, moments_numerical, raw_moments_closed, OperatorParams, TestFunction};

#[test]
fn numerical_moments_track_closed_forms() {
    for &(a, b, e) in &[(-0.5, 0.5, 25.0), (1.0, 0.98, 50.0), (5.0, 10.0, 100.0)] {
        let p = OperatorParams::new(a, b, e).unwrap();
        for &x in &[0.0, 0.5, 2.0, 5.0] {
            let closed = raw_moments_closed(&p, x);
            let num = moments_numerical(&p, x).unwrap();
            for (c, n) in [closed.m0, closed.m1, closed.m2, closed.m3, closed.m4]
                .iter()
                .zip([num.m0, num.m1, num.m2, num.m3, num.m4])
            {
                assert!((c - n).abs() <= 1e-8 * c.abs(), "{a} {b} {e} {x}: {c} vs {n}");
            }
            let central = central_moments_closed(&p, x);
            assert!((central.mu2 - num.mu2).abs() <= 1e-8 * central.mu2);
            assert!((central.mu4 - num.mu4).abs() <= 1e-7 * central.mu4, "{x}: {} {}", central.mu4, num.mu4);
        }
    }
}

#[test]
fn printed_fourth_moment_differs_by_one_term() {
    let p = OperatorParams::new(2.0, 0.5, 25.0).unwrap();
    for &x in &[0.0, 1.0, 3.0] {
        let gap = mu4_as_printed(&p, x) - central_moments_closed(&p, x).mu4;
        let expected = -18.0 * 4.0 * x / 25f64.powi(3);
        assert!((gap - expected).abs() <= 1e-14, "{gap} vs {expected}");
    }
}

#[test]
fn first_example_table_cells() {
    let cols: Vec<OperatorParams> =
        [25.0, 50.0, 75.0, 100.0].iter().map(|&e| OperatorParams::new(1.0, 0.98, e).unwrap()).collect();
    let t = error_table(&cols, &TestFunction::xexp5(), &[0.5, 1.0, 2.0]);
    let cell = |i: usize, j: usize| t.cells[i][j].as_ref().unwrap().abs_error;
    assert!((cell(0, 0) - 0.003740950).abs() <= 1e-8);
    assert!((cell(0, 1) - 0.001533680).abs() <= 1e-8);
    assert!((cell(1, 1) - 0.002722240).abs() <= 1e-8);
    assert!((cell(2, 3) - 0.000081252).abs() <= 1e-8);
}

#[test]
fn cubic_cells_equal_closed_form() {
    let coeffs = [3.0, 0.0, -2.0, 1.0];
    let p = OperatorParams::new(2.0, 0.5, 25.0).unwrap();
    let t = error_table(&[p], &TestFunction::cubic(), &[0.0, 1.0, 2.0]);
    for (i, &x) in [0.0, 1.0, 2.0].iter().enumerate() {
        let cell = t.cells[i][0].as_ref().unwrap();
        let closed = closed_form_polynomial(&p, &coeffs, x).unwrap();
        assert!((cell.r_value - closed).abs() <= 1e-10 * closed.abs().max(1.0));
    }
}
