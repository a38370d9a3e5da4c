//! Scorer's function `Hi(z) = (1/π)∫_0^∞ e^{−ξ³/3 + zξ} dξ`, its derivative,
//! and the cubic moment integrals `∫_0^∞ ξ^p e^{−τξ³ + zξ} dξ` expressed through
//! them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite, QuadratureSpec};

/// Largest `Re z` accepted: beyond it `Hi` exceeds `e^{(2/3)·40^{3/2}}` and the
/// integral is dominated by an interior saddle far from the origin.
pub const AIRY_MAX_RE: f64 = 40.0;

fn spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-300, 1e-14)
}

fn scorer_moment(p: i32, z: Complex64) -> Result<Complex64> {
    if !(z.re <= AIRY_MAX_RE) || !z.im.is_finite() {
        return Err(Error::Domain(format!(
            "Scorer integral: argument {z} beyond the decay budget"
        )));
    }
    let scale = (1.0 / z.norm().max(1.0)).min(1.0);
    let r = integrate_semi_infinite(
        |xi| {
            let e = Complex64::new(-xi * xi * xi / 3.0, 0.0) + z * xi;
            e.exp() * xi.powi(p)
        },
        0.0,
        scale,
        &spec(),
    )?;
    Ok(r.value / PI)
}

/// Scorer's function `Hi(z)`.
pub fn airy_hi(z: Complex64) -> Result<Complex64> {
    scorer_moment(0, z)
}

/// Derivative `Hi′(z) = (1/π)∫_0^∞ ξ e^{−ξ³/3 + zξ} dξ`.
pub fn airy_hi_prime(z: Complex64) -> Result<Complex64> {
    scorer_moment(1, z)
}

/// `G_p(τ, z) = ∫_0^∞ ξ^p e^{−τξ³ + zξ} dξ` for integer `p ≥ 0`, from
/// `G_0 = (π/c)·Hi(z/c)`, `G_1 = (π/c²)·Hi′(z/c)` with `c = (3τ)^{1/3}` and the
/// integration-by-parts recurrence `3τ G_{p+3} = (p+1) G_p + z G_{p+1}`
/// (with `3τ G_2 = 1 + z G_0`).
pub fn cubic_moment(p: u32, tau: f64, z: Complex64) -> Result<Complex64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParams(format!("τ must be positive, got {tau}")));
    }
    let c = (3.0 * tau).cbrt();
    let w = z / c;
    let g0 = airy_hi(w)? * (PI / c);
    if p == 0 {
        return Ok(g0);
    }
    let g1 = airy_hi_prime(w)? * (PI / (c * c));
    if p == 1 {
        return Ok(g1);
    }
    let mut g = vec![g0, g1, (Complex64::new(1.0, 0.0) + z * g0) / (3.0 * tau)];
    for q in 0..(p as usize).saturating_sub(2) {
        let next = (g[q] * (q as f64 + 1.0) + z * g[q + 1]) / (3.0 * tau);
        g.push(next);
    }
    Ok(g[p as usize])
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::tgamma as gamma;

    /// Maclaurin series `Hi(z) = (1/π) Σ z^n/n! · 3^{(n−2)/3} Γ((n+1)/3)`,
    /// an independent oracle for moderate `|z|`.
    fn hi_series(z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zn = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for n in 0..80 {
            if n > 0 {
                zn *= z;
                fact *= n as f64;
            }
            let nf = n as f64;
            acc += zn / fact * 3f64.powf((nf - 2.0) / 3.0) * gamma((nf + 1.0) / 3.0);
        }
        acc / PI
    }

    #[test]
    fn hi_reference_values() {
        // Hi(0) = 2/(3^{7/6} Γ(2/3))
        let h0 = 2.0 / (3f64.powf(7.0 / 6.0) * gamma(2.0 / 3.0));
        assert!((airy_hi(Complex64::new(0.0, 0.0)).unwrap().re - h0).abs() < 1e-14);
        assert!((h0 - 0.409_951_084_964_000_5).abs() < 1e-15);
        let hm1 = airy_hi(Complex64::new(-1.0, 0.0)).unwrap().re;
        assert!((hm1 - 0.220_669_606_792_959_9).abs() < 1e-14);
    }

    #[test]
    fn hi_matches_maclaurin_series_off_axis() {
        for z in [
            Complex64::new(0.5, 0.5),
            Complex64::new(-1.5, 0.8),
            Complex64::new(1.2, -2.0),
        ] {
            let a = airy_hi(z).unwrap();
            let b = hi_series(z);
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0), "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn cubic_moments_match_direct_quadrature() {
        let tau = 0.7;
        let z = Complex64::new(-0.4, 0.9);
        for p in 0..6u32 {
            let direct = integrate_semi_infinite(
                |xi| (Complex64::new(-tau * xi.powi(3), 0.0) + z * xi).exp() * xi.powi(p as i32),
                0.0,
                1.0,
                &spec(),
            )
            .unwrap()
            .value;
            let g = cubic_moment(p, tau, z).unwrap();
            assert!((g - direct).norm() < 1e-12 * direct.norm(), "p={p}");
        }
    }

    #[test]
    fn far_right_argument_is_rejected() {
        assert!(airy_hi(Complex64::new(100.0, 0.0)).is_err());
    }
}
