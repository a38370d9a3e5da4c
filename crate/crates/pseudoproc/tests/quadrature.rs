//! Closed-form Gaussian and Erfc integrals, checked by this crate's
//! quadrature and against values frozen from a 30-digit evaluation.

use num_complex::Complex64;
use pseudoproc::quadrature::*;

fn spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-14, 1e-12)
}

#[test]
fn identity_suite_passes() {
    let r = erfc_identity_suite(&spec());
    assert_eq!(r.entries.len(), 19);
    assert!(r.all_pass(), "{:#?}", r.failures());
}

#[test]
fn identity_suite_sides_match_frozen_values() {
    let r = erfc_identity_suite(&spec());
    let frozen = [
        ("erfc_identities/erfc_integral/a1", 0.671646710823367585218561797205),
        ("erfc_identities/convolution/l1/s1/x1", 0.289453040617296763005382979791),
        ("erfc_identities/convolution/l2/s0.5/x0.3", 1.38435541378600742532309310815),
        ("erfc_identities/sine_series/x0.5/s0.4/t1", 0.459587492876103499488354146530),
        ("erfc_identities/sine_series/x-1.2/s0.3/t1", -0.520468216041383019502442416026),
        ("erfc_identities/gaussian_nonpositive/x0/s0.5/t1", 0.443113462726379006824541870835),
        ("erfc_identities/gaussian_nonnegative/x0.7/s0.4/t1", 0.250497726813740699308913111453),
    ];
    for (name, want) in frozen {
        let e = r.entries.iter().find(|e| e.name == name).unwrap_or_else(|| panic!("{name}"));
        assert!((e.computed.re - want).abs() < 1e-14 * want.abs().max(1.0), "{name}: {}", e.computed);
        assert!((e.expected.re - want).abs() < 1e-14 * want.abs().max(1.0), "{name}: {}", e.expected);
    }
}

#[test]
fn gaussian_branch_at_origin_is_the_half_moment() {
    // x = 0, s = t/2: ∫_0^∞ y² e^{−y²/t} dy = (√π/4) t^{3/2}.
    for t in [0.5f64, 1.0, 3.0] {
        let got = integrate_semi_infinite(
            |y| Complex64::new(y * y * (-y * y / t).exp(), 0.0),
            0.0,
            (t / 2.0).sqrt(),
            &spec(),
        )
        .unwrap();
        let want = std::f64::consts::PI.sqrt() / 4.0 * t.powf(1.5);
        assert!((got.value.re - want).abs() < 1e-13 * want);
    }
}
