//! The triple Laplace–Fourier transform of `(T(t), X(t))` — `T(t)` being the
//! time spent by the pseudo-process on `[0, ∞)` up to `t` — and its successive
//! closed-form inversions:
//!
//! | level | object                                                              |
//! |-------|---------------------------------------------------------------------|
//! | 1     | `E(λ,μ,ν) = ∫∫ e^{−λt} E[e^{−νT(t)+iμX(t)}] dt`                       |
//! | 2     | `μ` inverted: `∫ e^{−λt} E[e^{−νT(t)}, X(t) ∈ dx]/dx dt`            |
//! | 3     | `ν` inverted: `∫ e^{−λt} P{T(t) ∈ ds, X(t) ∈ dx}/ds dx dt`          |
//! | 4     | `λ` inverted: the joint density of `(T(t), X(t))`                   |
//!
//! Every physically real value is computed in complex arithmetic; its
//! imaginary residue is checked against a fixed threshold and then discarded.
//! Odd-order results are formal (the theory is only established for even `N`).

use std::f64::consts::PI;

use libm::tgamma;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::saddle_decay_constant;
use crate::quadrature::{
    integrate_abscissa, integrate_breakpoints, Abscissa, QuadratureSpec, SingularEnds,
};
use crate::report::{Tier, ValidationEntry, ValidationReport};
use crate::root_algebra::RootSystem;
use crate::special_functions::{
    i_jm, i_jm_at_origin, mittag_leffler, ml_real, real_axis_laplace_converges, IMethod, MlSpec,
};

/// Below this `ν` the Spitzer difference quotient is replaced by the closed
/// triple transform.
pub const SPITZER_NU_GUARD: f64 = 1e-6;
/// Largest tolerated imaginary residue of a level-3 value (relative to
/// `max(1, |value|)`).
pub const LEVEL3_IMAG_RESIDUE: f64 = 1e-10;
/// Largest tolerated imaginary residue of a level-4 value (relative to
/// `max(1, |value|)`).
pub const LEVEL4_IMAG_RESIDUE: f64 = 1e-9;
/// The level-4 `ξ` integral is truncated where its exponential envelope
/// reaches `e^{−40}`.
pub const XI_DECAY_BUDGET: f64 = 40.0;
/// Saddle-point exponent beyond which the even-order joint density away from
/// the origin is taken as zero.
pub const LEVEL4_NEGLIGIBLE_EXPONENT: f64 = 60.0;
/// Beyond this argument `E_{1,b}(−y)` is taken from its asymptotic series.
pub const ML_ASYMPTOTIC_FROM: f64 = 40.0;
/// Density grids keep `s/t` inside `[S_CLIP, 1 − S_CLIP]`.
pub const S_CLIP: f64 = 0.01;

/// One point of the transform ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub t: f64,
    pub s: f64,
    pub x: f64,
}

/// Quadrature settings used by the level-3 and level-4 inversions.
pub fn default_quadrature() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-13, 1e-11)
}

/// Quadrature settings of the level-3 `σ`-convolution, whose integrand
/// contains `I_{j,m}` values that are themselves quadratures for `N ≥ 5`.
pub fn convolution_quadrature() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-11, 1e-9)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `v^e` for a positive real base; fractional powers are never taken of
/// anything else.
fn ppow(v: f64, e: f64) -> f64 {
    debug_assert!(v > 0.0, "fractional power of non-positive base {v}");
    v.powf(e)
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn require_finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
    }
    Ok(())
}

fn require_times(t: f64, s: f64) -> Result<()> {
    require_positive("t", t)?;
    require_positive("s", s)?;
    if !(s < t) {
        return Err(Error::InvalidParams(format!("need 0 < s < t, got s = {s}, t = {t}")));
    }
    Ok(())
}

fn real_part(z: Complex64, threshold: f64, what: &str) -> Result<f64> {
    if z.im.abs() > threshold * z.re.abs().max(1.0) || !z.re.is_finite() {
        return Err(Error::Domain(format!(
            "{what}: imaginary residue {:.3e} exceeds {threshold:.0e} (value {})",
            z.im, z.re
        )));
    }
    Ok(z.re)
}

// ---------------------------------------------------------------------------
// Order-one Mittag-Leffler helpers
// ---------------------------------------------------------------------------

/// `E_{1,b}(−y)` for `y ≥ 0`, `b > 0`.
///
/// Up to [`ML_ASYMPTOTIC_FROM`] Kummer's transformation
/// `E_{1,b}(−y) = e^{−y}/Γ(b) · [1 + (b−1) Σ_{k≥1} y^k/(k!(b−1+k))]`
/// is summed; all terms of the sum share one sign, so there is no cancellation.
/// Beyond it the asymptotic series `Σ_k −(−y)^{−k}/Γ(b−k)` is used, whose
/// optimal truncation error is `O(e^{−y})`.
pub fn order_one_at_negative(b: f64, y: f64) -> f64 {
    debug_assert!(y >= 0.0 && b > 0.0);
    if b == 1.0 {
        return (-y).exp();
    }
    if y <= ML_ASYMPTOTIC_FROM {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..2000 {
            term *= y / k as f64;
            let add = term / (b - 1.0 + k as f64);
            sum += add;
            if add < 1e-18 * sum && k as f64 > y {
                break;
            }
        }
        return (-y).exp() / tgamma(b) * (1.0 + (b - 1.0) * sum);
    }
    // 1/Γ(b−k) by the downward recurrence 1/Γ(b−k) = (b−k)/Γ(b−k+1).
    let mut rg = 1.0 / tgamma(b);
    let mut pw = 1.0;
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        rg *= b - k as f64;
        pw *= -1.0 / y;
        let term = -pw * rg;
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if last < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `e^{−y} E_{1,b}(y)` for `y ≥ 0` without overflow.
pub fn damped_order_one(b: f64, y: f64) -> Result<f64> {
    debug_assert!(y >= 0.0);
    if b == 1.0 {
        return Ok(1.0);
    }
    if y < 600.0 {
        return Ok((-y).exp() * ml_real(1.0, b, y)?);
    }
    // E_{1,b}(y) = y^{1−b}e^{y} + O(1/y); the algebraic part is below e^{−600}
    // after damping.
    Ok(ppow(y, 1.0 - b))
}

// ---------------------------------------------------------------------------
// Level 1
// ---------------------------------------------------------------------------

/// `E(λ,μ,ν) = 1/[∏_J(ᴺ√(λ+ν) − iμθ_j) ∏_K(ᴺ√λ − iμθ_k)]`, evaluated in the
/// factored form `λ^{−#K/N}(λ+ν)^{−#J/N} ∏_J ᴺ√(λ+ν)/(ᴺ√(λ+ν) − iμθ_j)
/// ∏_K ᴺ√λ/(ᴺ√λ − iμθ_k)`.
pub fn triple_transform(rs: &RootSystem, lambda: f64, mu: f64, nu: f64) -> Result<Complex64> {
    require_positive("λ", lambda)?;
    require_finite("μ", mu)?;
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidParams(format!("ν must be non-negative, got {nu}")));
    }
    let n = rs.nf();
    let l = ppow(lambda, 1.0 / n);
    let l1 = ppow(lambda + nu, 1.0 / n);
    let imu = Complex64::new(0.0, mu);
    let mut e = c(ppow(lambda, -(rs.nk() as f64) / n) * ppow(lambda + nu, -(rs.nj() as f64) / n));
    for th in rs.j_roots() {
        e *= l1 / (l1 - imu * th);
    }
    for th in rs.k_roots() {
        e *= l / (l - imu * th);
    }
    Ok(e)
}

/// The two Spitzer factors
/// `S⁺ = ∏_J (ᴺ√λ − iμθ_j)/(ᴺ√(λ+ν) − iμθ_j)` and
/// `S⁻ = ∏_K (ᴺ√(λ+ν) − iμθ_k)/(ᴺ√λ − iμθ_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpitzerFactors {
    pub plus: Complex64,
    pub minus: Complex64,
}

/// Evaluates [`SpitzerFactors`].
pub fn spitzer_factors(rs: &RootSystem, lambda: f64, mu: f64, nu: f64) -> Result<SpitzerFactors> {
    require_positive("λ", lambda)?;
    require_finite("μ", mu)?;
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidParams(format!("ν must be non-negative, got {nu}")));
    }
    let n = rs.nf();
    let l = c(ppow(lambda, 1.0 / n));
    let l1 = c(ppow(lambda + nu, 1.0 / n));
    let imu = Complex64::new(0.0, mu);
    let plus = rs
        .j_roots()
        .iter()
        .fold(c(1.0), |acc, &th| acc * (l - imu * th) / (l1 - imu * th));
    let minus = rs
        .k_roots()
        .iter()
        .fold(c(1.0), |acc, &th| acc * (l1 - imu * th) / (l - imu * th));
    Ok(SpitzerFactors { plus, minus })
}

/// `(S⁻ − S⁺)/ν`, which equals the triple transform; below
/// [`SPITZER_NU_GUARD`] the closed form is returned instead of the
/// cancelling difference quotient.
pub fn spitzer_quotient(rs: &RootSystem, lambda: f64, mu: f64, nu: f64) -> Result<Complex64> {
    if nu < SPITZER_NU_GUARD {
        return triple_transform(rs, lambda, mu, nu);
    }
    let f = spitzer_factors(rs, lambda, mu, nu)?;
    Ok((f.minus - f.plus) / nu)
}

// ---------------------------------------------------------------------------
// Level 2
// ---------------------------------------------------------------------------

/// Representation used for the `μ`-inverted transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level2Form {
    /// Double sum over `J × K` with denominators `θ_kᴺ√λ − θ_jᴺ√(λ+ν)`.
    DoubleSum,
    /// Single sum with Lagrange-type products (cross-check only).
    LagrangeProduct,
}

fn level2_args(lambda: f64, nu: f64, x: f64) -> Result<()> {
    require_positive("λ", lambda)?;
    require_positive("ν", nu)?;
    require_finite("x", x)
}

/// `∫_0^∞ e^{−λt} E[e^{−νT(t)}, X(t) ∈ dx]/dx dt` in the double-sum form.
pub fn level2_mu_inverted(rs: &RootSystem, lambda: f64, nu: f64, x: f64) -> Result<Complex64> {
    level2_with(rs, lambda, nu, x, Level2Form::DoubleSum)
}

/// The `μ`-inverted transform in the requested representation. At `x = 0`
/// both branches give `(Σθ_j)(ᴺ√(λ+ν) − ᴺ√λ)/ν`.
pub fn level2_with(rs: &RootSystem, lambda: f64, nu: f64, x: f64, form: Level2Form) -> Result<Complex64> {
    level2_args(lambda, nu, x)?;
    let n = rs.nf();
    let l = ppow(lambda, 1.0 / n);
    let l1 = ppow(lambda + nu, 1.0 / n);
    let jr = rs.j_roots();
    let kr = rs.k_roots();
    match form {
        Level2Form::DoubleSum => {
            let pref = ppow(lambda, -(rs.nk() as f64 - 1.0) / n) * ppow(lambda + nu, -(rs.nj() as f64 - 1.0) / n);
            let mut acc = c(0.0);
            if x >= 0.0 {
                for (&aj, &tj) in rs.a.iter().zip(&jr) {
                    let inner: Complex64 = rs
                        .b
                        .iter()
                        .zip(&kr)
                        .map(|(&bk, &tk)| bk * tk / (tk * l - tj * l1))
                        .sum();
                    acc += aj * tj * inner * (-tj * l1 * x).exp();
                }
            } else {
                for (&bk, &tk) in rs.b.iter().zip(&kr) {
                    let inner: Complex64 = rs
                        .a
                        .iter()
                        .zip(&jr)
                        .map(|(&aj, &tj)| aj * tj / (tk * l - tj * l1))
                        .sum();
                    acc += bk * tk * inner * (-tk * l * x).exp();
                }
            }
            Ok(acc * pref)
        }
        Level2Form::LagrangeProduct => {
            let lead = (l1 - l) / nu;
            let (roots, ratio, base, sign) = if x >= 0.0 {
                (&jr, l / l1, l1, 1.0)
            } else {
                (&kr, l1 / l, l, -1.0)
            };
            let mut acc = c(0.0);
            for (q, &tq) in roots.iter().enumerate() {
                let prod = roots
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != q)
                    .fold(c(1.0), |p, (_, &ti)| p * (ti * ratio - tq) / (ti - tq));
                acc += tq * prod * (-tq * base * x).exp();
            }
            Ok(acc * (sign * lead))
        }
    }
}

/// Half-line masses of the `μ`-inverted transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level2Marginals {
    /// `∫_{−∞}^0 = (1/ν)[((λ+ν)/λ)^{#K/N} − 1]`.
    pub neg: f64,
    /// `∫_0^∞ = (1/ν)[1 − (λ/(λ+ν))^{#J/N}]`.
    pub pos: f64,
    /// `∫_ℝ = λ^{−#K/N}(λ+ν)^{−#J/N}`.
    pub total: f64,
}

/// Closed half-line masses of level 2.
pub fn level2_marginals(rs: &RootSystem, lambda: f64, nu: f64) -> Result<Level2Marginals> {
    level2_args(lambda, nu, 0.0)?;
    let n = rs.nf();
    let (nj, nk) = (rs.nj() as f64, rs.nk() as f64);
    Ok(Level2Marginals {
        neg: (ppow((lambda + nu) / lambda, nk / n) - 1.0) / nu,
        pos: (1.0 - ppow(lambda / (lambda + nu), nj / n)) / nu,
        total: ppow(lambda, -nk / n) * ppow(lambda + nu, -nj / n),
    })
}

// ---------------------------------------------------------------------------
// Level 3
// ---------------------------------------------------------------------------

/// Representation used for the `ν`-inverted transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level3Form {
    /// Power sums `α_{−m}`, `β_m` with order-one functions `E_{1,b}` at the
    /// real argument `λs` (`x ≤ 0`) or `λσ` inside the convolution (`x ≥ 0`).
    OrderOne,
    /// Double sums with `E_{1/N,b}` at the complex arguments
    /// `(θ_k/θ_j)ᴺ√(λs)` (cross-check).
    FractionalOrder,
}

fn level3_args(lambda: f64, s: f64, x: f64) -> Result<()> {
    require_positive("λ", lambda)?;
    require_positive("s", s)?;
    require_finite("x", x)
}

/// `∫_0^∞ e^{−λt} P{T(t) ∈ ds, X(t) ∈ dx}/(ds dx) dt` (order-one form; at
/// `x = 0` the left branch is used, to which the right branch is continuous).
pub fn level3_nu_inverted(rs: &RootSystem, lambda: f64, s: f64, x: f64) -> Result<f64> {
    level3_with(rs, lambda, s, x, Level3Form::OrderOne, &convolution_quadrature())
}

/// The `ν`-inverted transform in the requested representation.
pub fn level3_with(
    rs: &RootSystem,
    lambda: f64,
    s: f64,
    x: f64,
    form: Level3Form,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if x <= 0.0 {
        level3_left_branch(rs, lambda, s, x, form)
    } else {
        level3_right_branch(rs, lambda, s, x, form, spec)
    }
}

/// Left (`x ≤ 0`) branch of level 3: a finite sum.
pub fn level3_left_branch(rs: &RootSystem, lambda: f64, s: f64, x: f64, form: Level3Form) -> Result<f64> {
    level3_args(lambda, s, x)?;
    let n = rs.nf();
    let (nj, nk) = (rs.nj() as f64, rs.nk() as f64);
    let l = ppow(lambda, 1.0 / n);
    let ls = lambda * s;
    let pref = -1.0 / (ppow(lambda, (nk - 1.0) / n) * ppow(s, nk / n));
    let kr = rs.k_roots();
    let mut acc = c(0.0);
    match form {
        Level3Form::OrderOne => {
            for m in 0..=rs.nk() {
                let mf = m as f64;
                let w = damped_order_one((mf + nj) / n, ls)?;
                let spatial: Complex64 = rs
                    .b
                    .iter()
                    .zip(&kr)
                    .map(|(&bk, &tk)| bk * tk.powi(m as i32 + 1) * (-tk * l * x).exp())
                    .sum();
                acc += rs.alpha(-(m as i64)) * ppow(ls, mf / n) * w * spatial;
            }
        }
        Level3Form::FractionalOrder => {
            let ml = MlSpec::new(1.0 / n, nj / n);
            let r = ppow(ls, 1.0 / n);
            let damp = (-ls).exp();
            for (&aj, &tj) in rs.a.iter().zip(&rs.j_roots()) {
                for (&bk, &tk) in rs.b.iter().zip(&kr) {
                    let e = mittag_leffler(&ml, tk / tj * r)?;
                    acc += aj * bk * tk * e * damp * (-tk * l * x).exp();
                }
            }
        }
    }
    real_part(acc * pref, LEVEL3_IMAG_RESIDUE, "level 3, x ≤ 0")
}

/// `I_{j,#J−1}(τ; x)` for every `j ∈ J`, with the exact origin value at `x = 0`.
fn i_vector(rs: &RootSystem, tau: f64, x: f64) -> Result<Vec<Complex64>> {
    let m = rs.nj() as i64 - 1;
    if tau <= 0.0 && x > 0.0 {
        // I_{j,m}(τ; x) vanishes faster than any power as τ → 0⁺.
        return Ok(vec![c(0.0); rs.nj()]);
    }
    if x == 0.0 {
        return Ok(vec![c(i_jm_at_origin(rs.n(), m, tau)); rs.nj()]);
    }
    rs.j_roots()
        .iter()
        .map(|&th| i_jm(rs.n(), th, m, tau, x, IMethod::Auto))
        .collect()
}

/// Right (`x ≥ 0`) branch of level 3: a convolution over `σ ∈ (0, s)` of
/// Mittag-Leffler factors with `I_{j,#J−1}(s−σ; x)`.
///
/// At `x = 0` this needs `#J ≥ 2`: for `#J = 1`, `I_{j,0}(·; x)` tends to a
/// point mass as `x → 0⁺` and the branch is only defined as a limit.
pub fn level3_right_branch(
    rs: &RootSystem,
    lambda: f64,
    s: f64,
    x: f64,
    form: Level3Form,
    spec: &QuadratureSpec,
) -> Result<f64> {
    level3_args(lambda, s, x)?;
    if x < 0.0 {
        return Err(Error::InvalidParams(format!("right branch needs x ≥ 0, got {x}")));
    }
    let n = rs.nf();
    let (nj, nk) = (rs.nj() as f64, rs.nk() as f64);
    if x == 0.0 && rs.nj() == 1 {
        return Err(Error::Domain(
            "with a single positive-real-part root the right branch at x = 0 is a one-sided limit".into(),
        ));
    }
    if x > 0.0 && !rs.j_roots().iter().all(|&th| real_axis_laplace_converges(rs.n(), th)) {
        return Err(Error::Domain(
            "I_{j,#J−1}(τ; x) does not decay as τ → 0 for this root system; the σ-convolution diverges".into(),
        ));
    }
    let right = if x == 0.0 { Some((nj - 1.0) / n) } else { None };
    let jr = rs.j_roots();
    let kr = rs.k_roots();
    let value = match form {
        Level3Form::OrderOne => {
            // Φ_m(τ; x) = Σ_j A_j θ_j^{1−m} I_{j,#J−1}(τ; x), m = #K..=N.
            let ms: Vec<usize> = (rs.nk()..=rs.n()).collect();
            let weights: Vec<Complex64> = ms
                .iter()
                .map(|&m| rs.beta(m as i64) * ppow(lambda, (m as f64 - nk) / n))
                .collect();
            let err = std::cell::RefCell::new(None);
            let f = |p: Abscissa| -> Complex64 {
                let (sigma, tau) = (p.from_left, p.to_right);
                let iv = match i_vector(rs, tau, x) {
                    Ok(v) => v,
                    Err(e) => {
                        err.borrow_mut().get_or_insert(e);
                        return c(0.0);
                    }
                };
                let mut acc = c(0.0);
                for (&m, &w) in ms.iter().zip(&weights) {
                    let mf = m as f64;
                    let ml = match damped_order_one(mf / n, lambda * sigma) {
                        Ok(v) => v,
                        Err(e) => {
                            err.borrow_mut().get_or_insert(e);
                            return c(0.0);
                        }
                    };
                    let phi: Complex64 = rs
                        .a
                        .iter()
                        .zip(&jr)
                        .zip(&iv)
                        .map(|((&aj, &tj), &i)| aj * tj.powi(1 - m as i32) * i)
                        .sum();
                    acc += w * ppow(sigma, mf / n - 1.0) * ml * (-lambda * tau).exp() * phi;
                }
                acc
            };
            let r = convolve(&f, s, x, nk / n, right, rs.nf(), spec)?;
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            -r.value
        }
        Level3Form::FractionalOrder => {
            let ml = MlSpec::new(1.0 / n, 1.0 / n);
            let err = std::cell::RefCell::new(None);
            let f = |p: Abscissa| -> Complex64 {
                let (sigma, tau) = (p.from_left, p.to_right);
                let iv = match i_vector(rs, tau, x) {
                    Ok(v) => v,
                    Err(e) => {
                        err.borrow_mut().get_or_insert(e);
                        return c(0.0);
                    }
                };
                let r = ppow(lambda * sigma, 1.0 / n);
                let damp = (-lambda * s).exp();
                let mut acc = c(0.0);
                for ((&aj, &tj), &i) in rs.a.iter().zip(&jr).zip(&iv) {
                    for (&bk, &tk) in rs.b.iter().zip(&kr) {
                        match mittag_leffler(&ml, tk / tj * r) {
                            Ok(e) => acc += aj * bk * tk * e * damp * i,
                            Err(e) => {
                                err.borrow_mut().get_or_insert(e);
                                return c(0.0);
                            }
                        }
                    }
                }
                acc * ppow(sigma, 1.0 / n - 1.0)
            };
            let r = convolve(&f, s, x, 1.0 / n, right, rs.nf(), spec)?;
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            -r.value / ppow(lambda, (nk - 1.0) / n)
        }
    };
    real_part(value, LEVEL3_IMAG_RESIDUE, "level 3, x ≥ 0")
}

/// `∫_0^s f(σ, s−σ) dσ` for the level-3 convolutions: `σ^{γ−1}` at the left
/// end; at the right end either the power singularity of `I_{j,m}(τ; 0)` or,
/// for `x > 0`, a kernel concentrated at `τ ~ x^N`, which is resolved by
/// geometric breakpoints towards `σ = s`.
fn convolve<F: Fn(Abscissa) -> Complex64>(
    f: &F,
    s: f64,
    x: f64,
    left: f64,
    right: Option<f64>,
    n: f64,
    spec: &QuadratureSpec,
) -> Result<crate::quadrature::Integral> {
    let half = 0.5 * s;
    if right.is_some() || x == 0.0 {
        return integrate_abscissa(f, 0.0, s, SingularEnds { left: Some(left), right }, spec);
    }
    let split = QuadratureSpec {
        abs_tol: 0.5 * spec.abs_tol,
        ..*spec
    };
    let head = integrate_abscissa(
        |p: Abscissa| {
            f(Abscissa {
                u: p.u,
                from_left: p.from_left,
                to_right: s - p.u,
            })
        },
        0.0,
        half,
        SingularEnds::left(left),
        &split,
    )?;
    // The tail is integrated in τ = s − σ ∈ (0, s/2], which stays exact
    // however close the kernel's concentration point is to τ = 0.
    let mut points = vec![0.0];
    let mut w = half;
    let floor = 1e-3 * x.powf(n);
    let mut inner = Vec::new();
    while w > floor {
        w *= 0.1;
        inner.push(w);
    }
    points.extend(inner.iter().rev());
    points.push(half);
    let g = |tau: f64| {
        f(Abscissa {
            u: s - tau,
            from_left: s - tau,
            to_right: tau,
        })
    };
    let tail = integrate_breakpoints(g, &points, &split)?;
    Ok(crate::quadrature::Integral {
        value: head.value + tail.value,
        err_est: head.err_est + tail.err_est,
        abs: head.abs + tail.abs,
        evals: head.evals + tail.evals,
    })
}

/// Half-line masses of level 3 at fixed `(λ, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level3Marginals {
    /// `∫_{−∞}^0 = e^{−λs}(λs)^{−#K/N} E_{1,#J/N}(λs) − 1`.
    pub neg: f64,
    /// `∫_0^∞ = 1 − (λs)^{#J/N} e^{−λs} E_{1,#J/N+1}(λs)`.
    pub pos: f64,
}

/// Closed half-line masses of level 3.
pub fn level3_marginals(rs: &RootSystem, lambda: f64, s: f64) -> Result<Level3Marginals> {
    level3_args(lambda, s, 0.0)?;
    let n = rs.nf();
    let (nj, nk) = (rs.nj() as f64, rs.nk() as f64);
    let ls = lambda * s;
    Ok(Level3Marginals {
        neg: ppow(ls, -nk / n) * damped_order_one(nj / n, ls)? - 1.0,
        pos: 1.0 - ppow(ls, nj / n) * damped_order_one(nj / n + 1.0, ls)?,
    })
}

// ---------------------------------------------------------------------------
// Level 4
// ---------------------------------------------------------------------------

/// Representation of the joint density's `ξ`-integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level4Form {
    /// Complex kernels `𝒦_m`/`𝒥_m` built from the roots (any `N`).
    Generic,
    /// Real trigonometric–exponential kernels (`N ∈ {2, 3, 4}` only).
    RealKernel,
    /// Real kernels where available, generic otherwise.
    Auto,
}

/// `(t, s, x)` triple at which the joint density is evaluated.
fn level4_args(t: f64, s: f64, x: f64) -> Result<()> {
    require_times(t, s)?;
    require_finite("x", x)
}

/// Joint density of `(T(t), X(t))` at `(s, x)`.
pub fn level4_joint_density(rs: &RootSystem, t: f64, s: f64, x: f64) -> Result<f64> {
    level4_with(rs, t, s, x, Level4Form::Auto, &default_quadrature())
}

/// One term `weight · a^{a_exp} ∫ ξ^p e^{−cξ^N} k(xξ) E_{1,b}(−aξ^N) dξ` of a
/// level-4 integrand, where `(a, c)` is `(s, t−s)` on the left branch and
/// `(t−s, s)` on the right.
struct XiTerm<K> {
    weight: Complex64,
    p: i32,
    b: f64,
    kernel: K,
}

/// `ξ_max` with `cξ^N − g|x|ξ − p ln ξ ≥ budget`.
fn xi_cutoff(n: f64, decay: f64, growth: f64, p: f64) -> f64 {
    let mut xi = ppow(XI_DECAY_BUDGET / decay, 1.0 / n);
    for _ in 0..100 {
        let next = ppow((XI_DECAY_BUDGET + growth * xi + p * xi.max(1.0).ln()) / decay, 1.0 / n);
        if (next - xi).abs() < 1e-12 * xi {
            return next;
        }
        xi = next;
    }
    xi
}

fn integrate_xi<K: Fn(f64) -> Complex64>(
    n: usize,
    a: f64,
    decay: f64,
    x: f64,
    growth: f64,
    terms: &[XiTerm<K>],
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let nf = n as f64;
    let pmax = terms.iter().map(|t| t.p).max().unwrap_or(0) as f64;
    let xi_max = xi_cutoff(nf, decay, growth * x.abs(), pmax);
    let panels = ((x.abs() * xi_max / PI).ceil() as usize).clamp(4, 20_000);
    let mut points: Vec<f64> = (0..=panels).map(|i| xi_max * i as f64 / panels as f64).collect();
    // When one duration is tiny, `ξ_max` follows it while the integrand lives
    // on the scale of the other; geometric breakpoints from the shorter ξ
    // scale upwards keep both resolved.
    let mut xi = 0.25 * ppow(a.max(decay), -1.0 / nf);
    while xi < xi_max {
        points.push(xi);
        xi *= 2.0;
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let f = |xi: f64| -> Complex64 {
        let xn = xi.powi(n as i32);
        let env = (-decay * xn).exp();
        let mut acc = c(0.0);
        for t in terms {
            acc += t.weight * (xi.powi(t.p) * env * order_one_at_negative(t.b, a * xn)) * (t.kernel)(x * xi);
        }
        acc
    };
    Ok(integrate_breakpoints(f, &points, spec)?.value)
}

/// The joint density in the requested representation. At `x = 0` the left
/// branch is used; the right branch is continuous there.
pub fn level4_with(
    rs: &RootSystem,
    t: f64,
    s: f64,
    x: f64,
    form: Level4Form,
    spec: &QuadratureSpec,
) -> Result<f64> {
    level4_args(t, s, x)?;
    level4_split_branch(rs, s, t - s, x, x > 0.0, form, spec)
}

/// One branch of the joint density, evaluated at any `x` with the sign
/// convention of that branch (the right branch accepts `x = 0`).
pub fn level4_branch(
    rs: &RootSystem,
    t: f64,
    s: f64,
    x: f64,
    right: bool,
    form: Level4Form,
    spec: &QuadratureSpec,
) -> Result<f64> {
    level4_args(t, s, x)?;
    level4_split_branch(rs, s, t - s, x, right, form, spec)
}

/// The joint density at `T(t) = s`, `t = s + u`, taking the two durations
/// separately so that neither loses precision near an end of `(0, t)`.
pub fn level4_split(rs: &RootSystem, s: f64, u: f64, x: f64, form: Level4Form, spec: &QuadratureSpec) -> Result<f64> {
    level4_split_branch(rs, s, u, x, x > 0.0, form, spec)
}

fn level4_split_branch(
    rs: &RootSystem,
    s: f64,
    u: f64,
    x: f64,
    right: bool,
    form: Level4Form,
    spec: &QuadratureSpec,
) -> Result<f64> {
    require_positive("s", s)?;
    require_positive("t − s", u)?;
    require_finite("x", x)?;
    if (right && x < 0.0) || (!right && x > 0.0) {
        return Err(Error::InvalidParams(format!("x = {x} is on the other branch")));
    }
    // Away from the origin the density is dominated by the kernel over the
    // duration spent on x's side, `exp(−c_N |x|^{N/(N−1)} d^{−1/(N−1)})`; once
    // that is below e^{−60} the ξ-integral is pure cancellation and the value
    // is taken as zero.
    if rs.params.is_even() && x != 0.0 {
        let d = if right { s } else { u };
        let nf = rs.nf();
        let exponent = saddle_decay_constant(rs.n()) * ppow(x.abs().powf(nf) / d, 1.0 / (nf - 1.0));
        if exponent > LEVEL4_NEGLIGIBLE_EXPONENT {
            return Ok(0.0);
        }
    }
    let use_real = match form {
        Level4Form::Generic => false,
        Level4Form::RealKernel => {
            if !(2..=4).contains(&rs.n()) {
                return Err(Error::Domain(format!("no real kernel form for N = {}", rs.n())));
            }
            true
        }
        Level4Form::Auto => (2..=4).contains(&rs.n()),
    };
    let value = if use_real {
        level4_real(rs, s, u, x, right, spec)?
    } else {
        level4_generic(rs, s, u, x, right, spec)?
    };
    real_part(value, LEVEL4_IMAG_RESIDUE, "level 4")
}

fn level4_generic(rs: &RootSystem, s: f64, u: f64, x: f64, right: bool, spec: &QuadratureSpec) -> Result<Complex64> {
    let n = rs.n();
    let nf = rs.nf();
    // Left branch: roots K with B_k, power sums α_{−m}, ML variable s.
    // Right branch: roots J with A_j, power sums β_{−m}, ML variable t−s.
    let (roots, coeffs, count, other, a, decay, sign) = if right {
        (rs.j_roots(), rs.a.clone(), rs.nj(), rs.nk(), u, s, 1.0)
    } else {
        (rs.k_roots(), rs.b.clone(), rs.nk(), rs.nj(), s, u, -1.0)
    };
    let rot = Complex64::from_polar(1.0, PI / nf);
    let growth = roots
        .iter()
        .flat_map(|&th| [(th * rot).re.abs(), (th * rot.conj()).re.abs()])
        .fold(0.0, f64::max);
    let mut terms = Vec::with_capacity(count + 1);
    for m in 0..=count {
        let mf = m as f64;
        let sums = if right { rs.beta(-(m as i64)) } else { rs.alpha(-(m as i64)) };
        let weight = sums * ppow(a, (mf - count as f64) / nf);
        let phase = (count as f64 - mf - 1.0) * PI / nf;
        let cs: Vec<(Complex64, Complex64)> = roots
            .iter()
            .zip(&coeffs)
            .map(|(&th, &co)| (co * th.powi(m as i32 + 1), th))
            .collect();
        let kernel = move |z: f64| -> Complex64 {
            let mut plus = c(0.0);
            let mut minus = c(0.0);
            for &(w, th) in &cs {
                plus += w * (-th * rot * z).exp();
                minus += w * (-th * rot.conj() * z).exp();
            }
            Complex64::from_polar(1.0, -phase) * plus - Complex64::from_polar(1.0, phase) * minus
        };
        terms.push(XiTerm {
            weight,
            p: (m + other) as i32,
            b: (mf + other as f64) / nf,
            kernel,
        });
    }
    let integral = integrate_xi(n, a, decay, x, growth, &terms, spec)?;
    Ok(Complex64::new(0.0, sign * nf / (2.0 * PI)) * integral)
}

type RealKernel = fn(f64) -> f64;

fn level4_real(rs: &RootSystem, s: f64, u: f64, x: f64, right: bool, spec: &QuadratureSpec) -> Result<Complex64> {
    let r3 = 3f64.sqrt();
    // (overall factor, [(weight, a-exponent, p, b, kernel)])
    let (overall, spec_terms): (f64, Vec<(f64, f64, i32, f64, RealKernel)>) =
        match (rs.n(), rs.params.kappa, right) {
            (2, _, false) => (
                1.0 / PI,
                vec![
                    (1.0, -0.5, 1, 0.5, |z| -2.0 * z.sin()),
                    (1.0, 0.0, 2, 1.0, |z| 2.0 * z.cos()),
                ],
            ),
            (2, _, true) => (
                1.0 / PI,
                vec![
                    (1.0, -0.5, 1, 0.5, |z| 2.0 * z.sin()),
                    (1.0, 0.0, 2, 1.0, |z| 2.0 * z.cos()),
                ],
            ),
            (4, _, false) => (
                2.0 / PI,
                vec![
                    (1.0, -0.5, 2, 0.5, |z| z.exp() - z.cos() - z.sin()),
                    (2f64.sqrt(), -0.25, 3, 0.75, |z| -z.exp() + z.cos() - z.sin()),
                    (1.0, 0.0, 4, 1.0, |z| z.exp() + z.cos() + z.sin()),
                ],
            ),
            (4, _, true) => (
                2.0 / PI,
                vec![
                    (1.0, -0.5, 2, 0.5, |z| (-z).exp() - z.cos() + z.sin()),
                    (2f64.sqrt(), -0.25, 3, 0.75, |z| -(-z).exp() + z.cos() + z.sin()),
                    (1.0, 0.0, 4, 1.0, |z| (-z).exp() + z.cos() - z.sin()),
                ],
            ),
            (3, 1, false) => (
                r3 / (2.0 * PI),
                vec![
                    (1.0, -2.0 / 3.0, 1, 1.0 / 3.0, |z| {
                        let h = 3f64.sqrt() * z / 2.0;
                        z.exp() - (-z / 2.0).exp() * (h.cos() + 3f64.sqrt() * h.sin())
                    }),
                    (1.0, -1.0 / 3.0, 2, 2.0 / 3.0, |z| {
                        let h = 3f64.sqrt() * z / 2.0;
                        -z.exp() + (-z / 2.0).exp() * (h.cos() - 3f64.sqrt() * h.sin())
                    }),
                    (1.0, 0.0, 3, 1.0, |z| {
                        z.exp() + 2.0 * (-z / 2.0).exp() * (3f64.sqrt() * z / 2.0).cos()
                    }),
                ],
            ),
            (3, 1, true) => (
                3.0 / (2.0 * PI),
                vec![
                    (1.0, -1.0 / 3.0, 2, 2.0 / 3.0, |z| {
                        2.0 * (-z / 2.0).exp() * (3f64.sqrt() * z / 2.0).sin()
                    }),
                    (1.0, 0.0, 3, 1.0, |z| {
                        let h = 3f64.sqrt() * z / 2.0;
                        (-z / 2.0).exp() * (3f64.sqrt() * h.cos() - h.sin())
                    }),
                ],
            ),
            (3, _, false) => (
                3.0 / (2.0 * PI),
                vec![
                    (1.0, -1.0 / 3.0, 2, 2.0 / 3.0, |z| {
                        -2.0 * (z / 2.0).exp() * (3f64.sqrt() * z / 2.0).sin()
                    }),
                    (1.0, 0.0, 3, 1.0, |z| {
                        let h = 3f64.sqrt() * z / 2.0;
                        (z / 2.0).exp() * (3f64.sqrt() * h.cos() + h.sin())
                    }),
                ],
            ),
            (3, _, true) => (
                r3 / (2.0 * PI),
                vec![
                    (1.0, -2.0 / 3.0, 1, 1.0 / 3.0, |z| {
                        let h = 3f64.sqrt() * z / 2.0;
                        (-z).exp() - (z / 2.0).exp() * (h.cos() - 3f64.sqrt() * h.sin())
                    }),
                    (1.0, -1.0 / 3.0, 2, 2.0 / 3.0, |z| {
                        let h = 3f64.sqrt() * z / 2.0;
                        -(-z).exp() + (z / 2.0).exp() * (h.cos() + 3f64.sqrt() * h.sin())
                    }),
                    (1.0, 0.0, 3, 1.0, |z| {
                        (-z).exp() + 2.0 * (z / 2.0).exp() * (3f64.sqrt() * z / 2.0).cos()
                    }),
                ],
            ),
            (n, _, _) => return Err(Error::Domain(format!("no real kernel form for N = {n}"))),
        };
    let (a, decay) = if right { (u, s) } else { (s, u) };
    let terms: Vec<XiTerm<Box<dyn Fn(f64) -> Complex64>>> = spec_terms
        .into_iter()
        .map(|(w, ae, p, b, k)| XiTerm {
            weight: c(w * ppow(a, ae)),
            p,
            b,
            kernel: Box::new(move |z: f64| c(k(z))) as Box<dyn Fn(f64) -> Complex64>,
        })
        .collect();
    // Envelope growth of the real kernels: e^{|z|} at most.
    let integral = integrate_xi(rs.n(), a, decay, x, 1.0, &terms, spec)?;
    Ok(integral * overall)
}

// ---------------------------------------------------------------------------
// Marginals
// ---------------------------------------------------------------------------

/// Density of `T(t)`: `sin(#Jπ/N)/π · s^{−#K/N}(t−s)^{−#J/N}`.
pub fn marginal_sojourn(rs: &RootSystem, t: f64, s: f64) -> Result<f64> {
    require_times(t, s)?;
    marginal_sojourn_split(rs, s, t - s)
}

/// [`marginal_sojourn`] at `T(t) = s`, `t = s + u`, with the two durations
/// given separately.
pub fn marginal_sojourn_split(rs: &RootSystem, s: f64, u: f64) -> Result<f64> {
    require_positive("s", s)?;
    require_positive("t − s", u)?;
    let n = rs.nf();
    let (nj, nk) = (rs.nj() as f64, rs.nk() as f64);
    Ok((nj * PI / n).sin() / PI * ppow(s, -nk / n) * ppow(u, -nj / n))
}

/// The density of `T(t)` split by the sign of `X(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedSojourn {
    /// `P{T(t) ∈ ds, X(t) ≤ 0}/ds = sin(#Kπ/N)/(πt) · ((t−s)/s)^{#K/N}`.
    pub neg: f64,
    /// `P{T(t) ∈ ds, X(t) ≥ 0}/ds = sin(#Jπ/N)/(πt) · (s/(t−s))^{#J/N}`.
    pub pos: f64,
}

/// Closed sign-split sojourn densities.
pub fn marginal_sojourn_signed(rs: &RootSystem, t: f64, s: f64) -> Result<SignedSojourn> {
    require_times(t, s)?;
    marginal_sojourn_signed_split(rs, s, t - s)
}

/// [`marginal_sojourn_signed`] with the durations `s` and `u = t − s`.
pub fn marginal_sojourn_signed_split(rs: &RootSystem, s: f64, u: f64) -> Result<SignedSojourn> {
    require_positive("s", s)?;
    require_positive("t − s", u)?;
    let n = rs.nf();
    let t = s + u;
    let (nj, nk) = (rs.nj() as f64, rs.nk() as f64);
    Ok(SignedSojourn {
        neg: (nk * PI / n).sin() / (PI * t) * ppow(u / s, nk / n),
        pos: (nj * PI / n).sin() / (PI * t) * ppow(s / u, nj / n),
    })
}

// ---------------------------------------------------------------------------
// Density grids
// ---------------------------------------------------------------------------

/// Ladder level of a tabulated density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    L1,
    L2,
    L3,
    L4,
}

/// Tabulated density on an `s × x` grid (row-major in `s`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub level: Level,
    /// Time horizon `t` (level 4) or Laplace variable `λ` (level 3).
    pub t: f64,
    pub s_nodes: Vec<f64>,
    pub x_nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// Set when requested `s` nodes were dropped for lying within
    /// `S_CLIP·t` of an end of `(0, t)`.
    pub clipped: bool,
    pub formal_odd: bool,
}

impl DensityGrid {
    /// Value at row `i` (`s`) and column `j` (`x`).
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.x_nodes.len() + j]
    }

    /// Joint density of `(T(t), X(t))` on the grid; `s` nodes outside
    /// `[S_CLIP·t, (1−S_CLIP)·t]` are dropped and flagged.
    pub fn joint(rs: &RootSystem, t: f64, s_nodes: &[f64], x_nodes: &[f64]) -> Result<Self> {
        require_positive("t", t)?;
        let kept: Vec<f64> = s_nodes
            .iter()
            .copied()
            .filter(|&s| s >= S_CLIP * t && s <= (1.0 - S_CLIP) * t)
            .collect();
        let clipped = kept.len() != s_nodes.len();
        let values = tabulate(&kept, x_nodes, |s, x| level4_joint_density(rs, t, s, x))?;
        Ok(DensityGrid {
            level: Level::L4,
            t,
            s_nodes: kept,
            x_nodes: x_nodes.to_vec(),
            values,
            clipped,
            formal_odd: rs.params.formal_odd,
        })
    }

    /// Level-3 transform `(s, x) ↦ level3(λ, s, x)` on the grid.
    pub fn nu_inverted(rs: &RootSystem, lambda: f64, s_nodes: &[f64], x_nodes: &[f64]) -> Result<Self> {
        require_positive("λ", lambda)?;
        let values = tabulate(s_nodes, x_nodes, |s, x| level3_nu_inverted(rs, lambda, s, x))?;
        Ok(DensityGrid {
            level: Level::L3,
            t: lambda,
            s_nodes: s_nodes.to_vec(),
            x_nodes: x_nodes.to_vec(),
            values,
            clipped: false,
            formal_odd: rs.params.formal_odd,
        })
    }
}

fn tabulate<F: Fn(f64, f64) -> Result<f64> + Sync>(s_nodes: &[f64], x_nodes: &[f64], f: F) -> Result<Vec<f64>> {
    let cells: Vec<(f64, f64)> = s_nodes
        .iter()
        .flat_map(|&s| x_nodes.iter().map(move |&x| (s, x)))
        .collect();
    cells.par_iter().map(|&(s, x)| f(s, x)).collect()
}

// ---------------------------------------------------------------------------
// Gaussian (N = 2) references
// ---------------------------------------------------------------------------

/// Closed forms for `N = 2`, where the process is Brownian motion with
/// variance `2t` and every level has an elementary expression.
pub mod brownian {
    use super::*;
    use crate::special_functions::erfcx;

    /// Level 2: `e^{−√(λ+ν)x}/(√λ + √(λ+ν))` for `x ≥ 0`,
    /// `e^{√λx}/(√λ + √(λ+ν))` for `x ≤ 0`.
    pub fn level2(lambda: f64, nu: f64, x: f64) -> f64 {
        let (l, l1) = (lambda.sqrt(), (lambda + nu).sqrt());
        let e = if x >= 0.0 { (-l1 * x).exp() } else { (l * x).exp() };
        e / (l + l1)
    }

    /// `e^{a} erfc(b)` evaluated as `e^{a−b²} erfcx(b)`.
    fn exp_erfc(a: f64, b: f64) -> f64 {
        (a - b * b).exp() * erfcx(b)
    }

    /// Level 3: `(e^{−λs}/√(πs) − √λ erfc(√(λs))) e^{√λx}` for `x ≤ 0` and
    /// `e^{−λs−x²/4s}/√(πs) − √λ e^{√λx} erfc(x/2√s + √(λs))` for `x ≥ 0`.
    pub fn level3(lambda: f64, s: f64, x: f64) -> f64 {
        let l = lambda.sqrt();
        let ls = (lambda * s).sqrt();
        if x <= 0.0 {
            ((-lambda * s).exp() / (PI * s).sqrt() - l * exp_erfc(0.0, ls)) * (l * x).exp()
        } else {
            (-lambda * s - x * x / (4.0 * s)).exp() / (PI * s).sqrt()
                - l * exp_erfc(l * x, x / (2.0 * s.sqrt()) + ls)
        }
    }

    /// Level 4 as the Gaussian path integral
    /// `∫_0^∞ y(y−x) e^{−y²/4s−(y−x)²/4(t−s)} dy / (4π s^{3/2}(t−s)^{3/2})` for
    /// `x ≤ 0`, and the same with `s ↔ t−s`, `x ↔ −x` for `x ≥ 0`.
    pub fn level4(t: f64, s: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
        require_times(t, s)?;
        let (a, b, z) = if x <= 0.0 { (s, t - s, x) } else { (t - s, s, -x) };
        let norm = 4.0 * PI * (a * b).powf(1.5);
        let f = |y: f64| c(y * (y - z) * (-y * y / (4.0 * a) - (y - z) * (y - z) / (4.0 * b)).exp() / norm);
        let scale = (a.min(b)).sqrt();
        let r = crate::quadrature::integrate_semi_infinite(f, 0.0, scale, spec)?;
        Ok(r.value.re)
    }
}

// ---------------------------------------------------------------------------
// Invariants
// ---------------------------------------------------------------------------

const ANCHOR_SPITZER: &str = "Spitzer factorisation of the triple transform";
const ANCHOR_CONTINUITY: &str = "continuity of the inverted transforms at x = 0";
const ANCHOR_FORMS: &str = "equivalent representations of the inverted transforms";
const ANCHOR_POSITIVITY: &str = "joint law of (T(t), X(t)) for even N";
const ANCHOR_DUALITY: &str = "duality level4(t,s,x) = level4(t,t−s,−x)";

/// Report-name tag of a root system: `N4` for even orders, `N3κ+1` /
/// `N3κ-1` for odd orders, where both signs are admissible.
pub fn order_tag(rs: &RootSystem) -> String {
    if rs.params.is_even() {
        format!("N{}", rs.n())
    } else {
        format!("N{}κ{:+}", rs.n(), rs.params.kappa)
    }
}

/// Spitzer factorisation on the fixed `5×5×5` grid, one entry per point.
pub fn spitzer_grid_report(rs: &RootSystem) -> ValidationReport {
    let mut r = ValidationReport::new();
    let tag = order_tag(rs);
    for &lambda in &[0.1, 0.5, 1.0, 2.0, 10.0] {
        for &mu in &[-1.5, -0.4, 0.0, 0.7, 1.3] {
            for &nu in &[0.25, 0.5, 1.0, 4.0, 20.0] {
                let name = format!("spitzer/{tag}/l{lambda}/m{mu}/n{nu}");
                let e = match (
                    triple_transform(rs, lambda, mu, nu),
                    spitzer_factors(rs, lambda, mu, nu),
                ) {
                    (Ok(e), Ok(f)) => ValidationEntry::new(
                        name,
                        ANCHOR_SPITZER,
                        e,
                        (f.minus - f.plus) / nu,
                        1e-12,
                        crate::report::Metric::Relative,
                        Tier::Algebraic,
                    ),
                    (Err(e), _) | (_, Err(e)) => {
                        ValidationEntry::failed(name, ANCHOR_SPITZER, 1e-12, Tier::Algebraic, e.to_string())
                    }
                };
                r.push(e);
            }
        }
    }
    r
}

fn entry_from(
    name: String,
    anchor: &str,
    expected: Result<f64>,
    computed: Result<f64>,
    tol: f64,
    tier: Tier,
) -> ValidationEntry {
    match (expected, computed) {
        (Ok(e), Ok(c)) => ValidationEntry::abs(name, anchor, e, c, tol * e.abs().max(1.0), tier),
        (Err(e), _) | (_, Err(e)) => ValidationEntry::failed(name, anchor, tol, tier, e.to_string()),
    }
}

/// Form equivalences, branch continuity, positivity and duality on fixed
/// sample points. Odd-order entries are flagged formal.
pub fn transform_invariants(rs: &RootSystem) -> ValidationReport {
    let mut r = spitzer_grid_report(rs);
    let n = rs.n();
    let tag = order_tag(rs);
    let quad = default_quadrature();
    let conv = convolution_quadrature();
    for &(lambda, nu) in &[(1.0, 1.0), (0.5, 3.0)] {
        for &x in &[-1.5, -0.2, 0.3, 2.0] {
            r.push(match (
                level2_with(rs, lambda, nu, x, Level2Form::DoubleSum),
                level2_with(rs, lambda, nu, x, Level2Form::LagrangeProduct),
            ) {
                (Ok(a), Ok(b)) => ValidationEntry::new(
                    format!("forms/level2/{tag}/l{lambda}/n{nu}/x{x}"),
                    ANCHOR_FORMS,
                    a,
                    b,
                    1e-8,
                    crate::report::Metric::Absolute,
                    Tier::Algebraic,
                ),
                (Err(e), _) | (_, Err(e)) => ValidationEntry::failed(
                    format!("forms/level2/{tag}/l{lambda}/n{nu}/x{x}"),
                    ANCHOR_FORMS,
                    1e-8,
                    Tier::Algebraic,
                    e.to_string(),
                ),
            });
        }
        let left = level2_with(rs, lambda, nu, -0.0, Level2Form::DoubleSum);
        let right = level2_with(rs, lambda, nu, 0.0, Level2Form::DoubleSum);
        let closed = rs.sum_j() * ((ppow(lambda + nu, 1.0 / rs.nf()) - ppow(lambda, 1.0 / rs.nf())) / nu);
        r.push(entry_from(
            format!("continuity/level2/{tag}/l{lambda}/n{nu}"),
            ANCHOR_CONTINUITY,
            left.clone().map(|v| v.re),
            right.map(|v| v.re),
            1e-8,
            Tier::Algebraic,
        ));
        r.push(entry_from(
            format!("continuity/level2-origin/{tag}/l{lambda}/n{nu}"),
            ANCHOR_CONTINUITY,
            Ok(closed.re),
            left.map(|v| v.re),
            1e-8,
            Tier::Algebraic,
        ));
    }
    for &(lambda, s) in &[(1.0, 0.4), (2.0, 1.5)] {
        for &x in &[-1.0, -0.1] {
            r.push(entry_from(
                format!("forms/level3-left/{tag}/l{lambda}/s{s}/x{x}"),
                ANCHOR_FORMS,
                level3_left_branch(rs, lambda, s, x, Level3Form::OrderOne),
                level3_left_branch(rs, lambda, s, x, Level3Form::FractionalOrder),
                1e-8,
                Tier::SpecialFunction,
            ));
        }
        for &x in &[0.2, 1.0] {
            r.push(entry_from(
                format!("forms/level3-right/{tag}/l{lambda}/s{s}/x{x}"),
                ANCHOR_FORMS,
                level3_right_branch(rs, lambda, s, x, Level3Form::OrderOne, &conv),
                level3_right_branch(rs, lambda, s, x, Level3Form::FractionalOrder, &conv),
                1e-8,
                Tier::SingleQuadrature,
            ));
        }
        if rs.nj() >= 2 {
            r.push(entry_from(
                format!("continuity/level3/{tag}/l{lambda}/s{s}"),
                ANCHOR_CONTINUITY,
                level3_left_branch(rs, lambda, s, 0.0, Level3Form::OrderOne),
                level3_right_branch(rs, lambda, s, 0.0, Level3Form::OrderOne, &conv),
                1e-8,
                Tier::SingleQuadrature,
            ));
        }
    }
    for &(t, s) in &[(1.0, 0.3), (1.0, 0.7)] {
        if (2..=4).contains(&n) {
            for &x in &[-1.2, -0.3, 0.0, 0.4, 1.5] {
                r.push(entry_from(
                    format!("forms/level4/{tag}/t{t}/s{s}/x{x}"),
                    ANCHOR_FORMS,
                    level4_with(rs, t, s, x, Level4Form::Generic, &quad),
                    level4_with(rs, t, s, x, Level4Form::RealKernel, &quad),
                    1e-8,
                    Tier::SingleQuadrature,
                ));
            }
        }
        r.push(entry_from(
            format!("continuity/level4/{tag}/t{t}/s{s}"),
            ANCHOR_CONTINUITY,
            level4_branch(rs, t, s, 0.0, false, Level4Form::Auto, &quad),
            level4_branch(rs, t, s, 0.0, true, Level4Form::Auto, &quad),
            1e-8,
            Tier::SingleQuadrature,
        ));
        if rs.params.is_even() {
            for &x in &[0.7, 1.9] {
                r.push(entry_from(
                    format!("duality/level4/{tag}/t{t}/s{s}/x{x}"),
                    ANCHOR_DUALITY,
                    level4_joint_density(rs, t, s, x),
                    level4_joint_density(rs, t, t - s, -x),
                    1e-8,
                    Tier::SingleQuadrature,
                ));
            }
        }
    }
    if rs.params.is_even() {
        r.merge(positivity_report(rs, 1.0));
    }
    r.mark_formal(rs.params.formal_odd);
    r
}

/// `s/t` nodes of the positivity grid.
pub const POSITIVITY_S: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];
/// `x` nodes (in units of `t^{1/N}`) of the positivity grid.
pub const POSITIVITY_X: [f64; 9] = [-3.0, -2.0, -1.0, -0.4, 0.0, 0.4, 1.0, 2.0, 3.0];

/// Half-line integrals `(∫_{−∞}^0, ∫_0^∞)` of the joint density in `x`,
/// by semi-infinite quadrature on the natural scale `t^{1/N}`.
pub fn integrate_over_x(rs: &RootSystem, s: f64, u: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let scale = ppow(s + u, 1.0 / rs.nf());
    let inner = default_quadrature();
    let side = |sign: f64| -> Result<f64> {
        let err = std::cell::RefCell::new(None);
        let f = |y: f64| match level4_split_branch(rs, s, u, sign * y, sign > 0.0, Level4Form::Auto, &inner) {
            Ok(v) => c(v),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                c(0.0)
            }
        };
        let r = crate::quadrature::integrate_semi_infinite(f, 0.0, scale, spec)?;
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(r.value.re),
        }
    };
    Ok((side(-1.0)?, side(1.0)?))
}

/// Positivity on the sampled grid, one entry per point (`value ≥ −1e−9`).
///
/// For `N = 2` the joint density itself is checked. For even `N ≥ 4` the
/// joint law is a signed measure (its `s`-marginal is the signed kernel
/// `p(t; −x)`), so positivity is asserted for the law of `T(t)` — the density
/// obtained by integrating the joint density over `x`.
pub fn positivity_report(rs: &RootSystem, t: f64) -> ValidationReport {
    let mut r = ValidationReport::new();
    let push = |r: &mut ValidationReport, name: String, v: Result<f64>| {
        r.push(match v {
            Ok(v) => {
                let mut e = ValidationEntry::abs(&name, ANCHOR_POSITIVITY, v.max(0.0), v, 1e-9, Tier::SingleQuadrature);
                e.pass = v >= -1e-9;
                e
            }
            Err(e) => ValidationEntry::failed(name, ANCHOR_POSITIVITY, 1e-9, Tier::SingleQuadrature, e.to_string()),
        });
    };
    let tag = order_tag(rs);
    let scale = ppow(t, 1.0 / rs.nf());
    for &sr in &POSITIVITY_S {
        let s = sr * t;
        if rs.n() == 2 {
            for &xr in &POSITIVITY_X {
                let x = xr * scale;
                push(&mut r, format!("positivity/level4/{tag}/s{s}/x{x}"), level4_joint_density(rs, t, s, x));
            }
        } else {
            let spec = QuadratureSpec::with_tol(1e-11, 1e-8);
            push(
                &mut r,
                format!("positivity/sojourn/{tag}/s{s}"),
                integrate_over_x(rs, s, t - s, &spec).map(|(a, b)| a + b),
            );
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(n: usize, k: Option<i8>) -> RootSystem {
        RootSystem::from_order(n, k).unwrap()
    }

    #[test]
    fn order_one_negative_matches_integral_representation() {
        for b in [0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 1.0, 1.25] {
            for y in [0.0, 0.3, 5.0, 10.5, 25.0, 39.9, 40.1, 80.0, 300.0] {
                let want = ml_real(1.0, b, -y).unwrap();
                let got = order_one_at_negative(b, y);
                assert!(
                    (got - want).abs() <= 1e-13 * want.abs().max(1e-300) + 1e-300,
                    "b={b} y={y}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn quadratic_spitzer_example() {
        let r = rs(2, None);
        let f = spitzer_factors(&r, 1.0, 1.0, 1.0).unwrap();
        let want = Complex64::new(1.0, -1.0) / Complex64::new(2f64.sqrt(), -1.0);
        assert!((f.plus - want).norm() < 1e-15);
    }

    #[test]
    fn triple_transform_at_zero_frequency() {
        for (n, k) in [(2, None), (3, Some(1)), (3, Some(-1)), (4, None), (6, None)] {
            let r = rs(n, k);
            let e = triple_transform(&r, 1.3, 0.0, 0.7).unwrap();
            let want = 1.3f64.powf(-(r.nk() as f64) / n as f64) * 2.0f64.powf(-(r.nj() as f64) / n as f64);
            assert!((e - c(want)).norm() < 1e-15);
        }
    }

    #[test]
    fn level2_quadratic_closed_form() {
        let r = rs(2, None);
        for x in [-2.0, -0.3, 0.0, 0.5, 3.0] {
            let v = level2_mu_inverted(&r, 1.0, 2.0, x).unwrap();
            assert!((v.re - brownian::level2(1.0, 2.0, x)).abs() < 1e-15 && v.im.abs() < 1e-15);
        }
        let m = level2_marginals(&r, 1.0, 1.0).unwrap();
        assert!((m.neg - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn level3_quadratic_closed_form() {
        let r = rs(2, None);
        for x in [-2.0, -0.5, 0.0] {
            let v = level3_nu_inverted(&r, 1.0, 0.4, x).unwrap();
            assert!((v - brownian::level3(1.0, 0.4, x)).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn marginals_split_the_sojourn_density() {
        for (n, k) in [(2, None), (3, Some(1)), (4, None), (5, Some(-1))] {
            let r = rs(n, k);
            let m = marginal_sojourn(&r, 2.0, 0.7).unwrap();
            let sg = marginal_sojourn_signed(&r, 2.0, 0.7).unwrap();
            assert!((sg.neg + sg.pos - m).abs() < 1e-14 * m);
        }
    }

    #[test]
    fn grid_clips_boundary_times() {
        let r = rs(2, None);
        let g = DensityGrid::joint(&r, 1.0, &[0.001, 0.5], &[-0.5, 0.5]).unwrap();
        assert!(g.clipped);
        assert_eq!(g.s_nodes, vec![0.5]);
        assert_eq!(g.values.len(), 2);
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        let r = rs(4, None);
        assert!(triple_transform(&r, 0.0, 1.0, 1.0).is_err());
        assert!(level2_mu_inverted(&r, 1.0, 0.0, 1.0).is_err());
        assert!(level4_joint_density(&r, 1.0, 1.0, 0.0).is_err());
        assert!(level4_with(&rs(6, None), 1.0, 0.5, 0.0, Level4Form::RealKernel, &default_quadrature()).is_err());
    }
}
