//! The kernels `I_{j,m}(τ; x)`, the inverse Laplace transforms (in `τ`) of
//! `λ^{−m/N} e^{−θ_j λ^{1/N} x}` for a root `θ_j` with positive real part:
//!
//! `I_{j,m}(τ;x) = (N i/2π)[e^{−imπ/N} ∫_0^∞ ξ^{N−m−1} e^{−τξ^N − θ_j e^{iπ/N} x ξ} dξ
//!                      − e^{imπ/N} ∫_0^∞ ξ^{N−m−1} e^{−τξ^N − θ_j e^{−iπ/N} x ξ} dξ]`.
//!
//! The generic path evaluates both moment integrals by quadrature. Closed forms
//! exist for `N = 2` (Gaussian), `N = 3` (Scorer functions) and `N = 4`
//! (absolutely convergent Gamma-moment series).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use libm::tgamma as gamma;

use super::airy::cubic_moment;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite, QuadratureSpec, SingularEnds};

/// Largest `|z|·τ^{−1/4}` for which the quartic Gamma-moment series is used;
/// beyond it the alternating terms lose too many digits.
pub const QUARTIC_SERIES_RADIUS: f64 = 4.0;

/// Evaluation path for [`i_jm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IMethod {
    /// Quadrature of the two moment integrals.
    Generic,
    /// Order-specific closed form (`N ∈ {2, 3, 4}`).
    Closed,
    /// Closed form where available, generic otherwise.
    Auto,
}

/// Value of `I_{j,m}` together with the floating-point resolution of the
/// generic evaluation (`ε · ∫|integrand|`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IValue {
    pub value: Complex64,
    pub resolution: f64,
}

fn validate(order: usize, theta: Complex64, m: i64, tau: f64, x: f64) -> Result<()> {
    if order < 2 {
        return Err(Error::InvalidParams(format!("order must be ≥ 2, got {order}")));
    }
    if !(theta.re > 0.0) {
        return Err(Error::InvalidParams(format!(
            "I_{{j,m}} needs a root with positive real part, got {theta}"
        )));
    }
    if m > order as i64 - 1 {
        return Err(Error::InvalidParams(format!(
            "I_{{j,m}} needs m ≤ N−1 = {}, got {m}",
            order - 1
        )));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParams(format!("τ must be positive, got {tau}")));
    }
    if !x.is_finite() {
        return Err(Error::InvalidParams(format!("x must be finite, got {x}")));
    }
    Ok(())
}

/// Transient growth exponent `max_r (Re(z e^{iφ}) r − Re(τ e^{iNφ}) r^N)` of the
/// moment integrand along the ray `ξ = r e^{iφ}` (`+∞` outside the decay sector).
fn ray_growth(order: usize, tau: Complex64, z: Complex64, phi: f64) -> f64 {
    let nf = order as f64;
    let c = (tau * Complex64::from_polar(1.0, nf * phi)).re;
    if !(c > 0.0) {
        return f64::INFINITY;
    }
    let a = (z * Complex64::from_polar(1.0, phi)).re;
    if a <= 0.0 {
        return 0.0;
    }
    let r = (a / (nf * c)).powf(1.0 / (nf - 1.0));
    a * r * (1.0 - 1.0 / nf)
}

/// Ray angle for `∫_0^∞ ξ^p e^{−τξ^N + zξ} dξ`: the integrand is entire and
/// decays in the sector `|arg τ + Nφ| < π/2`, so by Cauchy's theorem any ray in
/// it gives the same value. The chosen ray minimises the transient growth
/// (which limits floating-point resolution), with a mild preference for fast
/// decay; the real axis is kept whenever it is already growth-free.
fn choose_ray(order: usize, tau: Complex64, z: Complex64) -> (f64, f64) {
    let nf = order as f64;
    let arg = tau.arg();
    let g0 = ray_growth(order, tau, z, 0.0);
    if g0 == 0.0 && arg.abs() < 0.45 * std::f64::consts::PI {
        return (0.0, 0.0);
    }
    let lo = (-0.5 * PI - arg) / nf;
    let hi = (0.5 * PI - arg) / nf;
    let margin = 0.08 * (hi - lo);
    let mut best = (f64::INFINITY, 0.0, f64::INFINITY);
    let steps = 96;
    for k in 0..=steps {
        let phi = lo + margin + (hi - lo - 2.0 * margin) * k as f64 / steps as f64;
        let g = ray_growth(order, tau, z, phi);
        let score = g + (arg + nf * phi).abs();
        if score < best.0 {
            best = (score, phi, g);
        }
    }
    (best.1, best.2)
}

/// Value of a moment integral with its floating-point diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: Complex64,
    /// Estimate of `∫|integrand|` along the chosen ray.
    pub abs: f64,
    /// Transient growth exponent on the chosen ray.
    pub growth: f64,
    /// Ray angle `φ` of `ξ = r e^{iφ}`.
    pub ray: f64,
}

/// `∫_0^∞ ξ^p e^{−τξ^N + zξ} dξ` for complex `τ ≠ 0` with `|arg τ| ≤ π/2`
/// (purely imaginary `τ` is the oscillatory odd-order symbol), evaluated
/// along the least-growth ray of the decay sector.
///
/// Errors when even the best ray has a transient growth above
/// [`MAX_TRANSIENT_GROWTH`], or when the quadrature does not converge.
pub fn moment_integral(order: usize, p: u32, tau: Complex64, z: Complex64) -> Result<Moment> {
    if !(tau.re >= 0.0 && tau.norm() > 0.0) || !tau.im.is_finite() {
        return Err(Error::InvalidParams(format!(
            "moment integral needs Re τ ≥ 0, τ ≠ 0, got {tau}"
        )));
    }
    let n = order as i32;
    let (phi, growth) = choose_ray(order, tau, z);
    if !(growth <= MAX_TRANSIENT_GROWTH) {
        return Err(Error::Quadrature {
            context: format!(
                "moment integral: transient growth e^{growth:.1} on every admissible ray (τ = {tau}, z = {z})"
            ),
            err_est: f64::INFINITY,
            tol: 0.0,
        });
    }
    let dir = Complex64::from_polar(1.0, phi);
    let tau_r = tau * dir.powi(n);
    let z_r = z * dir;
    let t_scale = tau_r.norm().powf(-1.0 / order as f64);
    // Resolve oscillation and exponential variation of e^{zξ} on the first panel.
    let scale = t_scale.min(1.0 / z_r.norm().max(1e-300)).max(1e-3 * t_scale);
    let spec = QuadratureSpec::with_tol(1e-300, 1e-13);
    let r = integrate_semi_infinite(
        |rr| (-tau_r * rr.powi(n) + z_r * rr).exp() * rr.powi(p as i32),
        0.0,
        scale,
        &spec,
    )?;
    let dir_p1 = dir.powi(p as i32 + 1);
    Ok(Moment {
        value: r.value * dir_p1,
        abs: r.abs,
        growth,
        ray: phi,
    })
}

/// `I_{j,m}(τ; 0) = τ^{m/N−1}/Γ(m/N)` (zero when `m/N` is a non-positive integer).
pub fn i_jm_at_origin(order: usize, m: i64, tau: f64) -> f64 {
    let q = m as f64 / order as f64;
    if q <= 0.0 && q.fract() == 0.0 {
        return 0.0;
    }
    tau.powf(q - 1.0) / gamma(q)
}

fn prefactors(order: usize, theta: Complex64, m: i64) -> [(Complex64, Complex64); 2] {
    let nf = order as f64;
    let i = Complex64::i();
    let rot = PI / nf;
    let pre = i * (nf / (2.0 * PI));
    let mphase = m as f64 * PI / nf;
    [
        (
            pre * Complex64::from_polar(1.0, -mphase),
            -theta * Complex64::from_polar(1.0, rot),
        ),
        (
            -pre * Complex64::from_polar(1.0, mphase),
            -theta * Complex64::from_polar(1.0, -rot),
        ),
    ]
}

/// Generic quadrature evaluation of `I_{j,m}(τ; x)`.
pub fn i_jm_generic(order: usize, theta: Complex64, m: i64, tau: f64, x: f64) -> Result<IValue> {
    validate(order, theta, m, tau, x)?;
    i_jm_generic_complex(order, theta, m, Complex64::new(tau, 0.0), x)
}

/// Generic evaluation at complex time `τ` (`Re τ > 0`), the analytic
/// continuation used on rotated Laplace contours.
fn i_jm_generic_complex(
    order: usize,
    theta: Complex64,
    m: i64,
    tau: Complex64,
    x: f64,
) -> Result<IValue> {
    let p = (order as i64 - m - 1) as u32;
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (c, w) in prefactors(order, theta, m) {
        let mom = moment_integral(order, p, tau, w * x)?;
        value += c * mom.value;
        abs += c.norm() * mom.abs;
    }
    Ok(IValue {
        value,
        resolution: 64.0 * f64::EPSILON * abs,
    })
}

/// Quartic Gamma-moment series `Σ_n z^n/n! · Γ((p+n+1)/4) / (4 τ^{(p+n+1)/4})`.
fn quartic_moment_series(p: u32, tau: f64, z: Complex64) -> Result<Complex64> {
    let t4 = tau.powf(-0.25);
    if z.norm() * t4 > QUARTIC_SERIES_RADIUS {
        return Err(Error::Domain(format!(
            "quartic moment series outside radius at z = {z}, τ = {tau}"
        )));
    }
    let w = z * t4;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut wn_over_fact = Complex64::new(1.0, 0.0);
    let mut quiet = 0;
    for n in 0..400 {
        if n > 0 {
            wn_over_fact = wn_over_fact * w / n as f64;
        }
        let term = wn_over_fact * gamma((p as f64 + n as f64 + 1.0) / 4.0);
        let y = term - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        if term.norm() <= 1e-17 * acc.norm() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(acc * tau.powf(-(p as f64 + 1.0) / 4.0) / 4.0)
}

/// Closed-form evaluation of `I_{j,m}(τ; x)` for `N ∈ {2, 3, 4}`.
pub fn i_jm_closed(order: usize, theta: Complex64, m: i64, tau: f64, x: f64) -> Result<Complex64> {
    validate(order, theta, m, tau, x)?;
    if x == 0.0 {
        return Ok(Complex64::new(i_jm_at_origin(order, m, tau), 0.0));
    }
    let p = (order as i64 - m - 1) as u32;
    match order {
        2 => {
            let g = (-x * x / (4.0 * tau)).exp();
            match m {
                0 => Ok(Complex64::new(
                    x * g / (2.0 * PI.sqrt() * tau.powf(1.5)),
                    0.0,
                )),
                1 => Ok(Complex64::new(g / (PI * tau).sqrt(), 0.0)),
                _ => Err(Error::Domain(format!("no N = 2 closed form for m = {m}"))),
            }
        }
        3 => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, w) in prefactors(order, theta, m) {
                acc += c * cubic_moment(p, tau, w * x)?;
            }
            Ok(acc)
        }
        4 => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, w) in prefactors(order, theta, m) {
                acc += c * quartic_moment_series(p, tau, w * x)?;
            }
            Ok(acc)
        }
        _ => Err(Error::Domain(format!("no closed form for N = {order}"))),
    }
}

/// `I_{j,m}(τ; x)` by the requested method.
pub fn i_jm(
    order: usize,
    theta: Complex64,
    m: i64,
    tau: f64,
    x: f64,
    method: IMethod,
) -> Result<Complex64> {
    match method {
        IMethod::Generic => i_jm_generic(order, theta, m, tau, x).map(|v| v.value),
        IMethod::Closed => i_jm_closed(order, theta, m, tau, x),
        IMethod::Auto => match i_jm_closed(order, theta, m, tau, x) {
            Ok(v) => Ok(v),
            Err(Error::Domain(_)) => i_jm_generic(order, theta, m, tau, x).map(|v| v.value),
            Err(e) => Err(e),
        },
    }
}

/// Both sides of the Laplace identity
/// `∫_0^∞ e^{−λu} I_{j,m}(u; x) du = λ^{−m/N} e^{−θ_j λ^{1/N} x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_err: f64,
    /// The left side was evaluated on a rotated contour (analytic
    /// continuation) because the real-axis integral diverges.
    pub continued: bool,
}

/// Largest transient growth exponent `G = max_ξ(−Re(w x)ξ − τξ^N)` of a moment
/// integrand that is still evaluated. `G` scales like `(x^N/τ)^{1/(N−1)}`, the
/// same scaling as the super-exponential decay of `I_{j,m}` as `τ → 0`, so
/// beyond this point the kernel is negligible and its quadrature meaningless.
pub const MAX_TRANSIENT_GROWTH: f64 = 200.0;

/// Transient growth exponent of the generic moment integrands on their
/// least-growth rays.
pub fn transient_growth(order: usize, theta: Complex64, m: i64, tau: Complex64, x: f64) -> f64 {
    prefactors(order, theta, m)
        .iter()
        .map(|(_, w)| choose_ray(order, tau, w * x).1)
        .fold(0.0, f64::max)
}

/// Whether the small-time saddle of `I_{j,m}(·; x)` decays on the real axis,
/// i.e. `Re θ_j^{N/(N−1)} > 0`. When it does not (odd `N`, e.g. `N = 3`,
/// `κ = −1`), `∫_0^∞ e^{−λu} I_{j,m}(u;x) du` diverges at `u = 0` for
/// sufficiently negative `m` and the Laplace identity holds only as an
/// analytic continuation.
pub fn real_axis_laplace_converges(order: usize, theta: Complex64) -> bool {
    let nf = order as f64;
    (theta.arg() * nf / (nf - 1.0)).cos() > 1e-9
}

/// Rotation of the Laplace contour `u = r e^{iψ}` used when the real-axis
/// integral diverges.
pub const LAPLACE_CONTOUR_ROTATION: f64 = PI / 4.0;

/// Step used to reach `x = 0` by extrapolation when `m ≤ 0` (where
/// `I_{j,m}(·; 0)` is a distribution, not an integrable function).
pub const ORIGIN_EXTRAPOLATION_STEP: f64 = 2e-3;

fn laplace_lhs(order: usize, theta: Complex64, m: i64, lambda: f64, x: f64) -> Result<Complex64> {
    let nf = order as f64;
    let spec = QuadratureSpec::with_tol(1e-300, 1e-10);
    if x == 0.0 {
        // τ^{m/N−1}/Γ(m/N): integrable power singularity at u = 0.
        let q = m as f64 / nf;
        let spec = spec.with_singularities(SingularEnds::left(q.min(1.0)));
        let r = integrate_semi_infinite(
            |u| Complex64::new((-lambda * u).exp() * i_jm_at_origin(order, m, u), 0.0),
            0.0,
            (1.0 / lambda).min(1.0),
            &spec,
        )?;
        return Ok(r.value);
    }
    let psi = if real_axis_laplace_converges(order, theta) {
        0.0
    } else {
        // Sign chosen so the saddle term e^{−(2/3)θ^{3/2}…/√u}-type factor
        // decays along the ray.
        let s = (theta.arg() * nf / (nf - 1.0)).sin();
        if s > 0.0 {
            LAPLACE_CONTOUR_ROTATION
        } else {
            -LAPLACE_CONTOUR_ROTATION
        }
    };
    let dir = Complex64::from_polar(1.0, psi);
    let scale = (1.0 / lambda).min(1.0).min(x.powf(nf));
    let failure = std::cell::RefCell::new(None);
    let r = integrate_semi_infinite(
        |r| {
            if r <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let u = dir * r;
            if transient_growth(order, theta, m, u, x) > MAX_TRANSIENT_GROWTH {
                return Complex64::new(0.0, 0.0);
            }
            match i_jm_generic_complex(order, theta, m, u, x) {
                // Below the resolution of the moment quadrature the kernel is
                // super-exponentially small (small-τ regime); treat it as zero.
                Ok(v) if v.value.norm() <= v.resolution => Complex64::new(0.0, 0.0),
                Ok(v) => v.value * (-lambda * u).exp() * dir,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(f64::NAN, 0.0)
                }
            }
        },
        0.0,
        scale,
        &spec,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r?.value)
}

/// Numerically checks the Laplace transform of `I_{j,m}(·; x)`, `x ≥ 0`.
///
/// For `x = 0` and `m ≤ 0` the left side is the limit `x → 0⁺`, obtained by
/// cubic extrapolation from `x ∈ {h, 2h, 3h}` with `h = 2·10⁻³`.
pub fn laplace_check_i(
    order: usize,
    theta: Complex64,
    m: i64,
    lambda: f64,
    x: f64,
) -> Result<LaplaceCheck> {
    validate(order, theta, m, 1.0, x)?;
    if x < 0.0 {
        return Err(Error::Domain(format!(
            "the Laplace identity for I_{{j,m}} holds for x ≥ 0, got {x}"
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParams(format!("λ must be positive, got {lambda}")));
    }
    let nf = order as f64;
    let rhs = Complex64::new(lambda.powf(-(m as f64) / nf), 0.0)
        * (-theta * lambda.powf(1.0 / nf) * x).exp();
    let lhs = if x == 0.0 && m <= 0 {
        let h = ORIGIN_EXTRAPOLATION_STEP;
        let l1 = laplace_lhs(order, theta, m, lambda, h)?;
        let l2 = laplace_lhs(order, theta, m, lambda, 2.0 * h)?;
        let l3 = laplace_lhs(order, theta, m, lambda, 3.0 * h)?;
        // Quadratic through (h, l1), (2h, l2), (3h, l3) evaluated at 0.
        l1 * 3.0 - l2 * 3.0 + l3
    } else {
        laplace_lhs(order, theta, m, lambda, x)?
    };
    let rel_err = (lhs - rhs).norm() / rhs.norm().max(1e-300);
    Ok(LaplaceCheck {
        lhs,
        rhs,
        rel_err,
        continued: x > 0.0 && !real_axis_laplace_converges(order, theta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root(arg: f64) -> Complex64 {
        Complex64::from_polar(1.0, arg)
    }

    #[test]
    fn origin_value_matches_generic() {
        for (n, m) in [(2usize, 1i64), (3, 1), (3, 2), (4, 1), (4, 3)] {
            // A J-root of each order: θ = 1, except κ_4 = −1 whose J-roots are e^{±iπ/4}.
            let th = if n == 4 { root(-PI / 4.0) } else { root(0.0) };
            let g = i_jm_generic(n, th, m, 1.3, 0.0).unwrap().value;
            let want = i_jm_at_origin(n, m, 1.3);
            assert!((g.re - want).abs() < 1e-12 && g.im.abs() < 1e-12, "N={n} m={m}");
        }
    }

    #[test]
    fn gaussian_forms_for_order_two() {
        for (tau, x) in [(0.5, 0.3), (1.0, 1.0), (2.0, 2.5)] {
            for m in [0, 1] {
                let c = i_jm_closed(2, root(0.0), m, tau, x).unwrap();
                let g = i_jm_generic(2, root(0.0), m, tau, x).unwrap().value;
                assert!((c - g).norm() < 1e-10, "m={m} τ={tau} x={x}");
            }
        }
    }

    #[test]
    fn cubic_and_quartic_closed_forms_match_generic() {
        let cases = [
            (3usize, root(0.0)),
            (3, root(PI / 3.0)),
            (3, root(-PI / 3.0)),
            (4, root(-PI / 4.0)),
            (4, root(PI / 4.0)),
        ];
        for (n, th) in cases {
            for m in [-2i64, -1, 0, 1, (n - 1) as i64] {
                for (tau, x) in [(0.5, 0.4), (1.0, 1.0), (2.0, 1.5)] {
                    let c = i_jm_closed(n, th, m, tau, x).unwrap();
                    let g = i_jm_generic(n, th, m, tau, x).unwrap().value;
                    assert!((c - g).norm() < 1e-9, "N={n} θ={th} m={m} τ={tau} x={x}: {c} vs {g}");
                }
            }
        }
    }

    #[test]
    fn laplace_identity_order_four() {
        let r = laplace_check_i(4, root(-PI / 4.0), 1, 2.0, 0.5).unwrap();
        assert!(r.rel_err < 1e-6, "{r:?}");
    }

    #[test]
    fn laplace_identity_trivial_origin_case() {
        let r = laplace_check_i(2, root(0.0), 0, 1.0, 0.0).unwrap();
        assert!((r.rhs.re - 1.0).abs() < 1e-15);
        assert!(r.rel_err < 1e-6, "{r:?}");
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(i_jm_generic(4, root(PI), 1, 1.0, 1.0).is_err());
        assert!(i_jm_generic(4, root(0.1), 4, 1.0, 1.0).is_err());
        assert!(laplace_check_i(2, root(0.0), 0, 1.0, -1.0).is_err());
    }
}
