use divquad::quad1d::{
    complex_shift, expand_1d, remainder_1d, rule_corrected_trapezoid, rule_four_term, rule_midpoint_sym,
    rule_taylor_endpoint, rule_trapezoid, PolyDerivatives, Rule1D, Side,
};
use divquad::tensorpoly::{MultiIndex, MultiPolynomial};
use num_complex::Complex64;
use proptest::prelude::*;

fn univariate(coeffs: &[f64]) -> MultiPolynomial {
    MultiPolynomial::from_terms(
        vec![0.0],
        coeffs.iter().enumerate().map(|(k, &c)| (MultiIndex::new(vec![k as u32]), c)),
    )
    .unwrap()
}

/// Integral of `Σ c_k x^k` over `[a, b]` from the antiderivative.
fn exact_integral(coeffs: &[f64], a: f64, b: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| c * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0))
        .sum()
}

fn abs_integral_scale(coeffs: &[f64], a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| c.abs() * m.powi(k as i32) * (b - a))
        .sum::<f64>()
        .max(1e-300)
}

fn rel_error(rule: &Rule1D, coeffs: &[f64], a: f64, b: f64) -> f64 {
    let f = PolyDerivatives::new(&univariate(coeffs)).unwrap();
    let got = rule.apply(a, b, &f).unwrap();
    (got - exact_integral(coeffs, a, b)).abs() / abs_integral_scale(coeffs, a, b)
}

fn monomial_error(rule: &Rule1D, degree: usize) -> f64 {
    let mut c = vec![0.0; degree + 1];
    c[degree] = 1.0;
    rel_error(rule, &c, 0.0, 1.0)
}

fn coeffs(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    (0..=max_degree).prop_flat_map(|d| prop::collection::vec(-3.0..3.0f64, d + 1))
}

fn interval() -> impl Strategy<Value = (f64, f64)> {
    (-2.0..2.0f64, 0.1..2.0f64).prop_map(|(a, h)| (a, a + h))
}

fn exact_and_next(rule: &Rule1D, exact_through: usize) {
    for d in 0..=exact_through {
        assert!(monomial_error(rule, d) < 1e-13, "{} degree {d}", rule.label());
    }
    assert!(monomial_error(rule, exact_through + 1) > 1e-6, "{} degree {}", rule.label(), exact_through + 1);
}

#[test]
fn exactness_degrees_are_sharp() {
    for m in 0..6 {
        exact_and_next(&rule_taylor_endpoint(m, Side::Left), m);
        exact_and_next(&rule_taylor_endpoint(m, Side::Right), m);
    }
    exact_and_next(&rule_midpoint_sym(0), 1);
    exact_and_next(&rule_midpoint_sym(1), 1);
    exact_and_next(&rule_midpoint_sym(2), 3);
    exact_and_next(&rule_corrected_trapezoid(), 3);
    for branch in 1..=4 {
        let r = rule_four_term(branch).unwrap();
        // symmetric weights make degree 5 exact as well
        exact_and_next(&r, 5);
    }
}

#[test]
fn error_ratio_under_halving() {
    let exp_derivs: Vec<fn(f64) -> f64> = vec![f64::exp; 8];
    let err = |rule: &Rule1D, h: f64| (rule.apply(0.0, h, &exp_derivs[..]).unwrap() - h.exp_m1()).abs();
    let trap = err(&rule_trapezoid(), 0.5) / err(&rule_trapezoid(), 0.25);
    assert!((6.0..=10.0).contains(&trap), "{trap}");
    let ct = err(&rule_corrected_trapezoid(), 0.5) / err(&rule_corrected_trapezoid(), 0.25);
    assert!((24.0..=40.0).contains(&ct), "{ct}");
}

#[test]
fn conjugate_branches_share_real_parts() {
    for n in [3usize, 5, 7, 9] {
        for j in 1..n {
            let s = complex_shift(n, j).unwrap();
            let c = complex_shift(n, n - j).unwrap();
            let one = Complex64::new(1.0, 0.0);
            for k in 1..=6u32 {
                let (g, gc) = (s.gamma.powu(k).re, c.gamma.powu(k).re);
                assert!((g - gc).abs() < 1e-13, "n={n} j={j} k={k}");
                assert!(((one - s.gamma).powu(k).re - g).abs() < 1e-13);
            }
            assert!((s.gamma.re - 0.5).abs() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_reconstructs_value(
        c in coeffs(8),
        x in -2.0..2.0f64,
        x0_re in -2.0..2.0f64,
        x0_im in -1.0..1.0f64,
        m in 0usize..8,
    ) {
        let p = univariate(&c);
        let f = PolyDerivatives::new(&p).unwrap();
        let (div, rem) = expand_1d(&f, x, Complex64::new(x0_re, x0_im), m).unwrap();
        let fx = p.eval(&[x]);
        let scale = c.iter().map(|v| v.abs()).sum::<f64>() * 3f64.powi(8) + 1.0;
        prop_assert!((div + rem - Complex64::new(fx, 0.0)).norm() <= 1e-12 * scale);
    }

    #[test]
    fn shifted_center_balances_powers(n in prop::sample::select(vec![3usize, 5, 7, 9]), j in 1usize..9, (a, b) in interval()) {
        prop_assume!(j < n);
        let s = complex_shift(n, j).unwrap();
        let x0 = s.center_on(a, b);
        let lhs = (Complex64::new(b, 0.0) - x0).powu(n as u32);
        let rhs = (Complex64::new(a, 0.0) - x0).powu(n as u32);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn ladder_on_random_polynomials(
        c1 in prop::collection::vec(-3.0..3.0f64, 2),
        c3 in prop::collection::vec(-3.0..3.0f64, 4),
        c4 in prop::collection::vec(-3.0..3.0f64, 5),
        (a, b) in interval(),
        branch in 1usize..5,
    ) {
        prop_assert!(rel_error(&rule_trapezoid(), &c1, a, b) < 1e-12);
        prop_assert!(rel_error(&rule_midpoint_sym(1), &c1, a, b) < 1e-12);
        prop_assert!(rel_error(&rule_midpoint_sym(2), &c3, a, b) < 1e-12);
        prop_assert!(rel_error(&rule_corrected_trapezoid(), &c3, a, b) < 1e-12);
        prop_assert!(rel_error(&rule_four_term(branch).unwrap(), &c4, a, b) < 1e-12);
    }

    #[test]
    fn remainder_closes_midpoint_rule(c in prop::collection::vec(-3.0..3.0f64, 4), (a, b) in interval(), m in 0usize..3) {
        let p = univariate(&c);
        let rule = rule_midpoint_sym(m);
        let q = rule.apply(a, b, &PolyDerivatives::new(&p).unwrap()).unwrap();
        let mut dm1 = p.clone();
        for _ in 0..=m {
            dm1 = dm1.derivative(0);
        }
        let r = remainder_1d(m, Complex64::new(0.5 * (a + b), 0.0), a, b, |x| dm1.eval(&[x]));
        let exact = exact_integral(&c, a, b);
        prop_assert!((q + r - exact).abs() <= 1e-11 * abs_integral_scale(&c, a, b));
    }
}
