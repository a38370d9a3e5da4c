//! Cross-representation suite of the special functions as validation entries.
//!
//! Grid sweeps are summarised by their worst point: each entry records the two
//! sides at the point where the error is largest relative to the allowance,
//! with the point named in the note.

use std::f64::consts::PI;

use libm::tgamma as gamma;
use num_complex::Complex64;

use super::airy::airy_hi;
use super::i_kernel::{i_jm, i_jm_at_origin, laplace_check_i, IMethod};
use super::mittag_leffler::{mittag_leffler, ml_real, MlMethod, MlSpec};
use crate::error::Result;
use crate::report::{Metric, Tier, ValidationEntry, ValidationReport};

const ANCHOR_INTEGRAL_REP: &str = "series and finite-interval integral representation of E_{1,b}";
const ANCHOR_POSITIVE_AXIS: &str = "series and positive-axis representation of E_{1,b}, x > 0";
const ANCHOR_SHIFT: &str = "index shift E_{1,b}(x) = x E_{1,b+1}(x) + 1/Γ(b)";
const ANCHOR_ERF_FORMS: &str = "error-function forms of E_{1,1/2} and E_{1/2,1/2}";
const ANCHOR_SCORER: &str = "Hi(0) = 3^{−2/3} Γ(1/3)/π";
const ANCHOR_I_CLOSED: &str = "closed forms of I_{j,m} against its defining integrals";
const ANCHOR_I_ORIGIN: &str = "I_{j,m}(τ; 0) = τ^{m/N−1}/Γ(m/N)";
const ANCHOR_I_LAPLACE: &str = "Laplace transform of I_{j,m}(·; x) is λ^{−m/N} e^{−θ_j λ^{1/N} x}";

/// `b` values of the Mittag-Leffler cross-representation grid.
pub const ML_B_GRID: [f64; 5] = [0.25, 0.5, 0.75, 1.0, 1.25];

/// `x ∈ [−20, 20]` in steps of 1/2.
fn ml_x_grid() -> impl Iterator<Item = f64> {
    (0..=80).map(|i| -20.0 + 0.5 * i as f64)
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// One sample of a sweep: label, expected, computed, and the scale that
/// multiplies the tolerance.
type Sample = (String, Complex64, Complex64, f64);

/// Entry for the worst sample of a sweep (absolute error against
/// `tol · scale`), or the first evaluation error.
fn worst(name: String, anchor: &str, tol: f64, tier: Tier, samples: Vec<Result<Sample>>) -> ValidationEntry {
    let count = samples.len();
    let mut best: Option<(f64, Sample)> = None;
    for s in samples {
        match s {
            Ok(s) => {
                let ratio = (s.2 - s.1).norm() / (tol * s.3);
                let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
                if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
                    best = Some((ratio, s));
                }
            }
            Err(e) => return ValidationEntry::failed(name, anchor, tol, tier, e.to_string()),
        }
    }
    match best {
        Some((_, (label, expected, computed, scale))) => {
            ValidationEntry::new(name, anchor, expected, computed, tol * scale, Metric::Absolute, tier)
                .with_note(format!("worst of {count} points at {label}"))
        }
        None => ValidationEntry::failed(name, anchor, tol, tier, "empty sweep"),
    }
}

fn ml(b: f64, method: MlMethod, x: f64) -> Result<f64> {
    mittag_leffler(&MlSpec::new(1.0, b).with_method(method), c(x)).map(|v| v.re)
}

fn mittag_leffler_entries(r: &mut ValidationReport) {
    for b in ML_B_GRID {
        let sweep = |other: MlMethod, positive_only: bool| -> Vec<Result<Sample>> {
            ml_x_grid()
                .filter(|&x| !positive_only || x > 0.0)
                .map(|x| {
                    let s = ml(b, MlMethod::Series, x)?;
                    let o = ml(b, other, x)?;
                    Ok((format!("x = {x}"), c(s), c(o), s.abs()))
                })
                .collect()
        };
        r.push(worst(
            format!("special_functions/mittag_leffler/integral_rep/b{b}"),
            ANCHOR_INTEGRAL_REP,
            1e-10,
            Tier::SpecialFunction,
            sweep(MlMethod::IntegralRep, false),
        ));
        r.push(worst(
            format!("special_functions/mittag_leffler/positive_axis_rep/b{b}"),
            ANCHOR_POSITIVE_AXIS,
            1e-10,
            Tier::SpecialFunction,
            sweep(MlMethod::PositiveAxisRep, true),
        ));
        let shift = ml_x_grid()
            .map(|x| {
                let lhs = ml_real(1.0, b, x)?;
                let rhs = x * ml_real(1.0, b + 1.0, x)? + 1.0 / gamma(b);
                Ok((format!("x = {x}"), c(lhs), c(rhs), lhs.abs().max(1.0)))
            })
            .collect();
        r.push(worst(
            format!("special_functions/mittag_leffler/index_shift/b{b}"),
            ANCHOR_SHIFT,
            1e-12,
            Tier::SpecialFunction,
            shift,
        ));
    }
    // E_{1,1/2}(x) = 1/√π + √x e^x erf(√x) for x ≥ 0 (Dawson form for x < 0),
    // against the series.
    let order_one = [-3.0, -1.0, -0.25, 0.0, 0.5, 1.0, 4.0]
        .into_iter()
        .map(|x: f64| {
            let s = ml(0.5, MlMethod::Series, x)?;
            let f = ml(0.5, MlMethod::ErfClosedForm, x)?;
            Ok((format!("x = {x}"), c(s), c(f), s.abs().max(1.0)))
        })
        .collect();
    r.push(worst(
        "special_functions/mittag_leffler/erf_form/order_one".into(),
        ANCHOR_ERF_FORMS,
        1e-10,
        Tier::SpecialFunction,
        order_one,
    ));
    // E_{1/2,1/2}(x) = E_{1,1/2}(x²) + x e^{x²}: the right side cancels two
    // numbers of size e^{x²}, so the sweep stays where that costs few digits.
    let half = [-3.0, -1.5, -0.5, 0.0, 0.25, 1.0, 1.5, 2.5]
        .into_iter()
        .map(|x: f64| {
            let lhs = mittag_leffler(&MlSpec::new(0.5, 0.5).with_method(MlMethod::ErfClosedForm), c(x))?.re;
            let rhs = ml_real(1.0, 0.5, x * x)? + x * (x * x).exp();
            Ok((format!("x = {x}"), c(rhs), c(lhs), rhs.abs().max(1.0)))
        })
        .collect();
    r.push(worst(
        "special_functions/mittag_leffler/erf_form/half_order".into(),
        ANCHOR_ERF_FORMS,
        1e-10,
        Tier::SpecialFunction,
        half,
    ));
}

fn root(arg: f64) -> Complex64 {
    Complex64::from_polar(1.0, arg)
}

/// `(N, J-root, label, m values)` of the `I_{j,m}` closed-form grid.
fn kernel_cases() -> Vec<(usize, Complex64, &'static str, Vec<i64>)> {
    vec![
        (2, root(0.0), "θ=1", vec![0, 1]),
        (3, root(0.0), "θ=1", vec![-2, -1, 0, 1, 2]),
        (3, root(PI / 3.0), "θ=e^{iπ/3}", vec![-2, -1, 0, 1, 2]),
        (3, root(-PI / 3.0), "θ=e^{−iπ/3}", vec![-2, -1, 0, 1, 2]),
        (4, root(PI / 4.0), "θ=e^{iπ/4}", vec![-2, -1, 0, 1, 2, 3]),
        (4, root(-PI / 4.0), "θ=e^{−iπ/4}", vec![-2, -1, 0, 1, 2, 3]),
    ]
}

fn kernel_entries(r: &mut ValidationReport) {
    for (n, th, label, ms) in kernel_cases() {
        for m in ms {
            let mut samples = Vec::new();
            for tau in [0.25, 1.0, 3.0] {
                for x in [0.0, 0.3, 1.0, 2.0] {
                    samples.push((|| {
                        let closed = i_jm(n, th, m, tau, x, IMethod::Closed)?;
                        let generic = i_jm(n, th, m, tau, x, IMethod::Generic)?;
                        Ok((format!("τ = {tau}, x = {x}"), generic, closed, 1.0))
                    })());
                }
            }
            r.push(worst(
                format!("special_functions/kernel_i/closed_form/N{n}/{label}/m{m}"),
                ANCHOR_I_CLOSED,
                1e-8,
                Tier::SpecialFunction,
                samples,
            ));
        }
    }
    // A J-root of each order: κ_4 = −1 has no real root.
    for (n, th, m) in [(2usize, root(0.0), 1i64), (3, root(0.0), 2), (4, root(PI / 4.0), 3), (6, root(0.0), 5)] {
        let samples = [0.3, 1.0, 4.0]
            .into_iter()
            .map(|tau: f64| {
                let want = tau.powf(m as f64 / n as f64 - 1.0) / gamma(m as f64 / n as f64);
                let got = i_jm(n, th, m, tau, 0.0, IMethod::Generic)?;
                Ok((format!("τ = {tau}"), c(want), got, want))
            })
            .chain(std::iter::once(Ok((
                "closed origin value".to_string(),
                c(1.0 / gamma(m as f64 / n as f64)),
                c(i_jm_at_origin(n, m, 1.0)),
                1.0,
            ))))
            .collect();
        r.push(worst(
            format!("special_functions/kernel_i/origin/N{n}/m{m}"),
            ANCHOR_I_ORIGIN,
            1e-10,
            Tier::SpecialFunction,
            samples,
        ));
    }
    // (N, J-root, label, m, λ, x), negative m included.
    let laplace = [
        (2usize, root(0.0), "θ=1", 0i64, 1.0, 0.0),
        (2, root(0.0), "θ=1", 1, 1.0, 0.5),
        (2, root(0.0), "θ=1", -1, 2.0, 0.8),
        (3, root(0.0), "θ=1", 1, 1.0, 0.5),
        (3, root(PI / 3.0), "θ=e^{iπ/3}", -2, 1.0, 1.0),
        (3, root(-PI / 3.0), "θ=e^{−iπ/3}", 2, 0.7, 0.4),
        (4, root(-PI / 4.0), "θ=e^{−iπ/4}", 1, 2.0, 0.5),
        (4, root(PI / 4.0), "θ=e^{iπ/4}", -1, 1.0, 0.3),
    ];
    for (n, th, label, m, lambda, x) in laplace {
        let name = format!("special_functions/kernel_i/laplace/N{n}/{label}/m{m}/l{lambda}/x{x}");
        r.push(match laplace_check_i(n, th, m, lambda, x) {
            Ok(chk) => {
                let e = ValidationEntry::new(name, ANCHOR_I_LAPLACE, chk.rhs, chk.lhs, 1e-6, Metric::Relative, Tier::SingleQuadrature);
                if chk.continued {
                    e.with_note("left side on a rotated contour")
                } else {
                    e
                }
            }
            Err(e) => ValidationEntry::failed(name, ANCHOR_I_LAPLACE, 1e-6, Tier::SingleQuadrature, e.to_string()),
        });
    }
}

/// The special-function suite: Mittag-Leffler cross-representations on the
/// `b × x` grid, the index shift, the error-function forms, Scorer's function
/// at the origin, and the `I_{j,m}` closed forms, origin values and Laplace
/// identity (including negative `m`).
pub fn special_function_suite() -> ValidationReport {
    let mut r = ValidationReport::new();
    mittag_leffler_entries(&mut r);
    let scorer = 3f64.powf(-2.0 / 3.0) * gamma(1.0 / 3.0) / PI;
    r.push(match airy_hi(c(0.0)) {
        Ok(v) => ValidationEntry::new("special_functions/scorer/origin", ANCHOR_SCORER, c(scorer), v, 1e-12, Metric::Relative, Tier::SpecialFunction),
        Err(e) => ValidationEntry::failed("special_functions/scorer/origin", ANCHOR_SCORER, 1e-12, Tier::SpecialFunction, e.to_string()),
    });
    kernel_entries(&mut r);
    r
}
