//! Error-function family: `erf`, `erfc`, the scaled complement
//! `e^{x²}·erfc(x)`, Dawson's integral and `erfi`.

use num_complex::Complex64;

use crate::quadrature::{integrate, QuadratureSpec};

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 − erf(x)`, accurate in the far tail.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-300, 1e-15)
}

/// Scaled complement `e^{x²}·erfc(x)`, finite for all real `x` where the
/// product is representable; uses `(2/√π)∫_0^∞ e^{−t²−2xt} dt` for `x > 5`.
pub fn erfcx(x: f64) -> f64 {
    if x <= 5.0 {
        return (x * x).exp() * erfc(x);
    }
    let spec = tight();
    let scale = (1.0 / x).min(1.0);
    let r = crate::quadrature::integrate_semi_infinite(
        |t| Complex64::new((-t * t - 2.0 * x * t).exp(), 0.0),
        0.0,
        scale,
        &spec,
    )
    .expect("smooth decaying integrand");
    2.0 / std::f64::consts::PI.sqrt() * r.value.re
}

/// Dawson's integral `D(y) = e^{−y²} ∫_0^y e^{t²} dt`.
pub fn dawson(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let sign = y.signum();
    let y = y.abs();
    let spec = tight();
    let r = integrate(
        |t| Complex64::new((t * t - y * y).exp(), 0.0),
        0.0,
        y,
        &spec,
    )
    .expect("smooth bounded integrand");
    sign * r.value.re
}

/// Imaginary error function `erfi(y) = (2/√π) e^{y²} D(y)`.
pub fn erfi(y: f64) -> f64 {
    2.0 / std::f64::consts::PI.sqrt() * (y * y).exp() * dawson(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erfc(0.0), 1.0);
    }

    #[test]
    fn erf_one_matches_quadrature() {
        // Oracle: (2/√π)∫_0^1 e^{−t²} dt by adaptive quadrature.
        let q = integrate(
            |t| Complex64::new((-t * t).exp(), 0.0),
            0.0,
            1.0,
            &QuadratureSpec::with_tol(1e-16, 1e-15),
        )
        .unwrap()
        .value
        .re
            * 2.0
            / std::f64::consts::PI.sqrt();
        assert!((erf(1.0) - q).abs() < 1e-15);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-15);
    }

    #[test]
    fn erfcx_is_continuous_across_switch() {
        let a = (25.0f64).exp() * erfc(5.0);
        let b = erfcx(5.0 + 1e-12);
        assert!((a - b).abs() < 1e-12 * a);
        // Asymptotics e^{x²}erfc(x) ≈ 1/(x√π)(1 − 1/(2x²))
        let x = 30.0;
        let approx = 1.0 / (x * std::f64::consts::PI.sqrt()) * (1.0 - 0.5 / (x * x) + 0.75 / x.powi(4));
        assert!((erfcx(x) - approx).abs() < 1e-8 * approx);
    }

    #[test]
    fn dawson_reference_value() {
        // D(1) = 0.5380795069127684 (tabulated)
        assert!((dawson(1.0) - 0.538_079_506_912_768_4).abs() < 1e-14);
        assert!((dawson(-1.0) + 0.538_079_506_912_768_4).abs() < 1e-14);
    }
}
