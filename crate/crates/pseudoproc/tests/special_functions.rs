//! Cross-representation checks of the special functions against each other
//! and against values frozen from an independent 40-digit evaluation.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use pseudoproc::special_functions::*;
use libm::tgamma as gamma;

fn ml(a: f64, b: f64, method: MlMethod, x: f64) -> f64 {
    mittag_leffler(&MlSpec::new(a, b).with_method(method), Complex64::new(x, 0.0))
        .unwrap()
        .re
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `E_{1,b}(x) = ₁F₁(1; b; x)/Γ(b)` at 40 digits.
const FROZEN_E1: &[(f64, f64, f64)] = &[
    (0.25, -20.0, -0.011403979461602827294),
    (0.25, -10.5, -0.024607119436162033143),
    (0.25, -3.0, -0.18615741790720065512),
    (0.25, 2.5, 24.27360202783001593),
    (0.25, 20.0, 4588409125.4014961737),
    (0.5, -20.0, -0.015325407164895395749),
    (0.5, -10.5, -0.032233412601047875101),
    (0.5, -3.0, -0.14740544177658248956),
    (0.5, 2.5, 19.338158349090881136),
    (0.5, 20.0, 2169724714.5196800891),
    (0.75, -20.0, -0.010924992589394232369),
    (0.75, -10.5, -0.022499340036974684474),
    (0.75, -3.0, -0.05895097538649192598),
    (0.75, 2.5, 15.376915328707722325),
    (0.75, 20.0, 1025999471.3053013705),
    (1.0, -20.0, 2.061153622438557828e-9),
    (1.0, -10.5, 0.000027536449349747157857),
    (1.0, -3.0, 0.049787068367863942979),
    (1.0, 2.5, 12.182493960703473438),
    (1.0, 20.0, 485165195.40979027797),
    (1.25, -20.0, 0.014360982114590607083),
    (1.25, -10.5, 0.028611693549178223572),
    (1.25, -3.0, 0.15399102691246998983),
    (1.25, 2.5, 9.5991145459999226462),
    (1.25, 20.0, 229420456.25628402554),
];

#[test]
fn order_one_matches_frozen_values() {
    for &(b, x, want) in FROZEN_E1 {
        let got = ml_real(1.0, b, x).unwrap();
        assert!(rel(got, want) < 1e-12, "E_(1,{b})({x}) = {got}, want {want}");
    }
}

const B_GRID: [f64; 5] = [0.25, 0.5, 0.75, 1.0, 1.25];

fn x_grid() -> impl Iterator<Item = f64> {
    (0..=80).map(|i| -20.0 + 0.5 * i as f64)
}

#[test]
fn series_agrees_with_integral_representation() {
    for b in B_GRID {
        for x in x_grid() {
            let s = ml(1.0, b, MlMethod::Series, x);
            let i = ml(1.0, b, MlMethod::IntegralRep, x);
            assert!(rel(s, i) < 1e-10, "b={b} x={x}: {s} vs {i}");
        }
    }
}

#[test]
fn series_agrees_with_positive_axis_representation() {
    for b in B_GRID {
        for x in x_grid().filter(|&x| x > 0.0) {
            let s = ml(1.0, b, MlMethod::Series, x);
            let p = ml(1.0, b, MlMethod::PositiveAxisRep, x);
            assert!(rel(s, p) < 1e-10, "b={b} x={x}: {s} vs {p}");
        }
    }
}

#[test]
fn auto_is_continuous_at_the_switch() {
    for b in B_GRID {
        let inside = ml(1.0, b, MlMethod::Auto, -10.0);
        let outside = ml(1.0, b, MlMethod::Auto, -10.0 - 1e-9);
        let drift = 1e-9 * (ml(1.0, b, MlMethod::Auto, -10.0) - ml(1.0, b, MlMethod::Auto, -9.9)).abs() / 0.1;
        assert!((inside - outside).abs() <= 1e-10 * inside.abs() + 2.0 * drift, "b={b}");
    }
}

#[test]
fn recurrence_in_b() {
    for b in B_GRID {
        for x in x_grid() {
            let lhs = ml_real(1.0, b, x).unwrap();
            let rhs = x * ml_real(1.0, b + 1.0, x).unwrap() + 1.0 / gamma(b);
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                "b={b} x={x}: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn half_order_identity() {
    // For x ≪ 0 the right side subtracts two numbers of size e^{x²} to produce
    // an O(1) result, so the identity is checked where that cancellation costs
    // fewer than five digits.
    for x in x_grid().filter(|&x| x >= -3.0).chain([-0.5, 0.25, 1.5]) {
        let lhs = ml(0.5, 0.5, MlMethod::ErfClosedForm, x);
        let rhs = ml_real(1.0, 0.5, x * x).unwrap() + x * (x * x).exp();
        assert!(rel(lhs, rhs) < 1e-10 || (lhs - rhs).abs() < 1e-10, "x={x}: {lhs} vs {rhs}");
    }
    // Frozen values of the defining series Σ x^r / Γ(r/2 + 1/2). At x = −3 the
    // series cancels terms of size e^9 and the f64 rounding of 1/Γ(b) alone
    // limits the relative accuracy to ~1e−11.
    for (x, want) in [
        (-0.5, 0.25634441145129334951),
        (-3.0, 0.02718613000358643569),
        (1.5, 28.545018967941857195),
    ] {
        assert!(rel(ml_real(0.5, 0.5, x).unwrap(), want) < 1e-10, "x={x}");
        assert!(rel(ml(0.5, 0.5, MlMethod::Series, x), want) < 1e-10, "x={x}");
    }
}

#[test]
fn scorer_function_frozen_values() {
    for (z, want) in [
        (-1.0, 0.22066960679295989454),
        (0.0, 0.4099510849640004901),
        (2.0, 3.1291414343242043475),
    ] {
        let got = airy_hi(Complex64::new(z, 0.0)).unwrap();
        assert!(rel(got.re, want) < 1e-13 && got.im == 0.0, "Hi({z})");
    }
}

fn root(arg: f64) -> Complex64 {
    Complex64::from_polar(1.0, arg)
}

#[test]
fn kernel_i_frozen_values() {
    // Quartic case: θ = e^{−iπ/4}, m = 1, τ = 1, x = 1.
    let want = Complex64::new(0.25113930756097403963, 0.069055888250244830905);
    for method in [IMethod::Closed, IMethod::Generic] {
        let got = i_jm(4, root(-PI / 4.0), 1, 1.0, 1.0, method).unwrap();
        assert!((got - want).norm() < 1e-10, "{method:?}: {got}");
    }
    // Cubic case (κ = −1): θ = e^{iπ/3}, m = −2, τ = 0.7, x = 1.
    let want = Complex64::new(-0.45588442489222504876, 0.30877035777373889484);
    for method in [IMethod::Closed, IMethod::Generic] {
        let got = i_jm(3, root(PI / 3.0), -2, 0.7, 1.0, method).unwrap();
        assert!((got - want).norm() < 1e-10, "{method:?}: {got}");
    }
}

#[test]
fn kernel_i_at_origin() {
    for (n, m) in [(2usize, 1i64), (3, 2), (4, 3), (6, 5)] {
        for tau in [0.3f64, 1.0, 4.0] {
            let want = tau.powf(m as f64 / n as f64 - 1.0) / gamma(m as f64 / n as f64);
            assert!((i_jm_at_origin(n, m, tau) - want).abs() < 1e-14 * want);
        }
    }
}

#[test]
fn kernel_i_closed_forms_match_generic_on_grid() {
    let cases = [
        (2usize, vec![root(0.0)], vec![0i64, 1]),
        (3, vec![root(0.0)], vec![-2, -1, 0, 1, 2]),
        (3, vec![root(PI / 3.0), root(-PI / 3.0)], vec![-2, -1, 0, 1, 2]),
        (4, vec![root(PI / 4.0), root(-PI / 4.0)], vec![-2, -1, 0, 1, 2, 3]),
    ];
    for (n, roots, ms) in cases {
        for th in roots {
            for &m in &ms {
                for tau in [0.25, 1.0, 3.0] {
                    for x in [0.0, 0.3, 1.0, 2.0] {
                        let c = i_jm(n, th, m, tau, x, IMethod::Closed).unwrap();
                        let g = i_jm(n, th, m, tau, x, IMethod::Generic).unwrap();
                        assert!(
                            (c - g).norm() < 1e-8,
                            "N={n} θ={th} m={m} τ={tau} x={x}: {c} vs {g}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn laplace_identity_examples() {
    let r = laplace_check_i(4, root(-PI / 4.0), 1, 2.0, 0.5).unwrap();
    assert!(r.rel_err < 1e-6, "{r:?}");
    let r = laplace_check_i(3, root(PI / 3.0), -2, 1.0, 1.0).unwrap();
    assert!(r.rel_err < 1e-6, "{r:?}");
    let r = laplace_check_i(2, root(0.0), 0, 1.0, 0.0).unwrap();
    assert!((r.lhs.re - 1.0).abs() < 1e-6 && (r.rhs.re - 1.0).abs() < 1e-15, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_recurrence_in_b(b in 0.05f64..3.0, x in -25.0f64..25.0) {
        let lhs = ml_real(1.0, b, x).unwrap();
        let rhs = x * ml_real(1.0, b + 1.0, x).unwrap() + 1.0 / gamma(b);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
    }

    #[test]
    fn prop_decomposition_matches_series(b in 0.1f64..2.0, x in -3.0f64..3.0) {
        // E_{1/2,b}(x) = E_{1,b}(x²) + x E_{1,b+1/2}(x²)
        let direct = mittag_leffler(
            &MlSpec::new(0.5, b).with_method(MlMethod::Series),
            Complex64::new(x, 0.0),
        ).unwrap().re;
        let split = ml_real(1.0, b, x * x).unwrap() + x * ml_real(1.0, b + 0.5, x * x).unwrap();
        prop_assert!((direct - split).abs() <= 1e-11 * direct.abs().max(1.0));
    }

    #[test]
    fn prop_erf_closed_form(x in -30.0f64..6.0) {
        let s = ml(1.0, 0.5, MlMethod::Auto, x);
        let c = ml(1.0, 0.5, MlMethod::ErfClosedForm, x);
        prop_assert!((s - c).abs() <= 1e-10 * s.abs().max(1e-3));
    }
}
