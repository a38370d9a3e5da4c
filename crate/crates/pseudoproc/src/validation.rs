//! The identity ledger and the transform ladder, aggregated into one
//! deterministic, serialisable report.
//!
//! * [`run_ledger`] collects every algebraic, special-function, kernel and
//!   transform identity for a list of orders.
//! * [`run_ladder`] connects the four transform levels by numeric forward
//!   transforms at the points of [`LADDER_MANIFEST`], and checks the marginals,
//!   the normalisation, the uniform law at the origin and the duality of the
//!   joint density.
//!
//! Entries are computed in parallel and merged sorted by name, so identical
//! inputs produce identical reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kernel::{kernel_invariants, KernelEval};
use crate::quadrature::{
    erfc_identity_suite, integrate_abscissa, integrate_semi_infinite, numeric_fourier, numeric_laplace, Abscissa,
    QuadratureSpec, SingularEnds,
};
use crate::report::{Metric, Summary, Tier, ValidationEntry, ValidationReport};
use crate::root_algebra::{verify_identities, PseudoParams, RootSystem};
use crate::special_functions::{laplace_check_i, special_function_suite};
use crate::transform_stack::{
    default_quadrature, integrate_over_x, level2_marginals, level2_mu_inverted, level3_marginals, level3_with,
    level4_joint_density, level4_split, marginal_sojourn_signed, marginal_sojourn_split, order_tag, transform_invariants,
    triple_transform, LadderPoint, Level3Form, Level4Form,
};

/// Version of [`LADDER_MANIFEST`]; bumped whenever a point changes.
pub const MANIFEST_VERSION: u32 = 1;

/// Fixed sample points of the consistency ladder.
pub const LADDER_MANIFEST: [LadderPoint; 4] = [
    LadderPoint { lambda: 1.0, mu: 0.5, nu: 1.0, t: 1.0, s: 0.4, x: -0.3 },
    LadderPoint { lambda: 2.0, mu: -1.2, nu: 0.5, t: 1.0, s: 0.3, x: 0.7 },
    LadderPoint { lambda: 0.5, mu: 0.8, nu: 2.0, t: 2.0, s: 1.5, x: -1.1 },
    LadderPoint { lambda: 1.5, mu: 0.0, nu: 1.0, t: 1.0, s: 0.7, x: 0.2 },
];

/// Fractions `s/t` at which the sojourn marginals and the uniform law at the
/// origin are checked.
pub const TIME_FRACTIONS: [f64; 3] = [0.2, 0.5, 0.8];

/// Relative tolerance of the ladder rungs and the sojourn marginals.
pub const LADDER_TOL: f64 = 1e-4;
/// Absolute tolerance of `∫∫ level4 = 1`.
pub const NORMALISATION_TOL: f64 = 1e-3;
/// Absolute tolerance of the duality check.
pub const DUALITY_TOL: f64 = 1e-8;
/// Relative tolerance of the `I_{j,m}` Laplace identity.
pub const LAPLACE_I_TOL: f64 = 1e-6;
/// Orders whose `I_{j,m}` Laplace identity is in the ledger, for every J-root
/// and `m ∈ {−2, …, N−1}`. Beyond them the moment quadrature behind the
/// generic `I_{j,m}` no longer resolves the highly oscillatory kernel.
pub const LAPLACE_I_ORDERS: [usize; 4] = [2, 3, 4, 6];

const ANCHOR_LADDER_L4: &str = "Laplace transform in t of the joint density is the ν-inverted transform";
const ANCHOR_LADDER_L3: &str = "Laplace transform in s of the ν-inverted transform is the μ-inverted transform";
const ANCHOR_LADDER_L2: &str = "Fourier transform in x of the μ-inverted transform is the triple transform";
const ANCHOR_SOJOURN_NEG: &str = "P{T(t) ∈ ds, X(t) ≤ 0}/ds = sin(#Kπ/N)/(πt) ((t−s)/s)^{#K/N}";
const ANCHOR_SOJOURN_POS: &str = "P{T(t) ∈ ds, X(t) ≥ 0}/ds = sin(#Jπ/N)/(πt) (s/(t−s))^{#J/N}";
const ANCHOR_LEVEL3_NEG: &str = "∫_{x≤0} of the ν-inverted transform = e^{−λs}(λs)^{−#K/N} E_{1,#J/N}(λs) − 1";
const ANCHOR_LEVEL3_POS: &str = "∫_{x≥0} of the ν-inverted transform = 1 − (λs)^{#J/N} e^{−λs} E_{1,#J/N+1}(λs)";
const ANCHOR_LEVEL2_MASS: &str = "half-line masses of the μ-inverted transform";
const ANCHOR_SOJOURN_TOTAL: &str = "the density of T(t) integrates to one";
const ANCHOR_SOJOURN_SIGN: &str = "P{X(t) ≤ 0} = #K/N";
const ANCHOR_NORMALISATION: &str = "the joint density has total mass one";
const ANCHOR_UNIFORM: &str = "given X(t) = 0, T(t) has the uniform law on (0, t)";
const ANCHOR_DUALITY: &str = "duality level4(t,s,x) = level4(t,t−s,−x)";
const ANCHOR_LAPLACE_I: &str = "Laplace transform of I_{j,m}(·; x) is λ^{−m/N} e^{−θ_j λ^{1/N} x}";

/// Quadrature settings of the ledger and ladder unless overridden.
pub fn default_spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-10, 1e-8)
}

/// Root-system parameters for a ledger run: each even order with its `κ_N`,
/// each odd order once per sign in `odd_kappas`.
pub fn ledger_params(orders: &[usize], odd_kappas: &[i8]) -> Result<Vec<PseudoParams>> {
    if orders.is_empty() {
        return Err(Error::InvalidParams("the ledger needs at least one order".into()));
    }
    let mut out = Vec::new();
    for &n in orders {
        if n % 2 == 0 {
            out.push(PseudoParams::new(n, None)?);
        } else {
            if odd_kappas.is_empty() {
                return Err(Error::InvalidParams(format!("odd order {n} needs at least one κ ∈ {{+1, −1}}")));
            }
            for &k in odd_kappas {
                out.push(PseudoParams::new(n, Some(k))?);
            }
        }
    }
    Ok(out)
}

fn c(re: f64) -> crate::Complex64 {
    crate::Complex64::new(re, 0.0)
}

fn rel_entry(name: String, anchor: &str, tol: f64, tier: Tier, r: Result<(f64, f64)>) -> ValidationEntry {
    match r {
        Ok((want, got)) => ValidationEntry::rel(name, anchor, want, got, tol, tier),
        Err(e) => ValidationEntry::failed(name, anchor, tol, tier, e.to_string()),
    }
}

fn abs_entry(name: String, anchor: &str, tol: f64, tier: Tier, r: Result<(f64, f64)>) -> ValidationEntry {
    match r {
        Ok((want, got)) => ValidationEntry::abs(name, anchor, want, got, tol, tier),
        Err(e) => ValidationEntry::failed(name, anchor, tol, tier, e.to_string()),
    }
}

/// `∫_0^∞ f(±y) dy` of a real function of `x`.
fn half_line<F: Fn(f64) -> Result<f64>>(f: F, sign: f64, scale: f64, spec: &QuadratureSpec) -> Result<f64> {
    let err = std::cell::RefCell::new(None);
    let g = |y: f64| match f(sign * y) {
        Ok(v) => c(v),
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            c(0.0)
        }
    };
    let r = integrate_semi_infinite(g, 0.0, scale, spec)?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(r.value.re),
    }
}

/// `∫_0^t g(s, t−s) ds` for a sojourn-type density with power-law ends.
fn over_time<F: Fn(f64, f64) -> Result<f64>>(rs: &RootSystem, t: f64, g: F, spec: &QuadratureSpec) -> Result<f64> {
    let n = rs.nf();
    let ends = SingularEnds::both(1.0 - rs.nk() as f64 / n, 1.0 - rs.nj() as f64 / n);
    let err = std::cell::RefCell::new(None);
    let f = |p: Abscissa| match g(p.from_left, p.to_right) {
        Ok(v) => c(v),
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            c(0.0)
        }
    };
    let r = integrate_abscissa(f, 0.0, t, ends, spec)?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(r.value.re),
    }
}

/// Sojourn marginals of one root system at `t = 1`: the sign-split density of
/// `T(t)` against the `x`-integral of the joint density (even orders), the
/// half-line masses of levels 2 and 3, and the total masses of the density of
/// `T(t)`.
fn marginal_ledger(rs: &RootSystem, spec: &QuadratureSpec) -> ValidationReport {
    let tag = order_tag(rs);
    let mut r = ValidationReport::new();
    let (t, s) = (1.0, 0.4);
    if rs.params.is_even() {
        let split = integrate_over_x(rs, s, t - s, spec);
        let want = marginal_sojourn_signed(rs, t, s);
        let pair = |neg: bool| -> Result<(f64, f64)> {
            let (a, b) = split.clone()?;
            let w = want.clone()?;
            Ok(if neg { (w.neg, a) } else { (w.pos, b) })
        };
        r.push(rel_entry(format!("marginal/sojourn_nonpositive/{tag}/t{t}/s{s}"), ANCHOR_SOJOURN_NEG, LADDER_TOL, Tier::NestedQuadrature, pair(true)));
        r.push(rel_entry(format!("marginal/sojourn_nonnegative/{tag}/t{t}/s{s}"), ANCHOR_SOJOURN_POS, LADDER_TOL, Tier::NestedQuadrature, pair(false)));
    }
    let (lambda, nu) = (1.1f64, 0.6);
    let scale = lambda.powf(-1.0 / rs.nf());
    let m2 = level2_marginals(rs, lambda, nu);
    let level2 = |x: f64| level2_mu_inverted(rs, lambda, nu, x).map(|v| v.re);
    r.push(rel_entry(
        format!("marginal/level2_nonpositive/{tag}/l{lambda}/n{nu}"),
        ANCHOR_LEVEL2_MASS,
        1e-8,
        Tier::SingleQuadrature,
        m2.clone().and_then(|m| Ok((m.neg, half_line(level2, -1.0, scale, spec)?))),
    ));
    r.push(rel_entry(
        format!("marginal/level2_nonnegative/{tag}/l{lambda}/n{nu}"),
        ANCHOR_LEVEL2_MASS,
        1e-8,
        Tier::SingleQuadrature,
        m2.and_then(|m| Ok((m.pos, half_line(level2, 1.0, scale, spec)?))),
    ));
    let s3 = 0.8;
    let m3 = level3_marginals(rs, lambda, s3);
    let level3 = |x: f64| level3_with(rs, lambda, s3, x, Level3Form::OrderOne, spec);
    r.push(rel_entry(
        format!("marginal/level3_nonpositive/{tag}/l{lambda}/s{s3}"),
        ANCHOR_LEVEL3_NEG,
        1e-8,
        Tier::SingleQuadrature,
        m3.clone().and_then(|m| Ok((m.neg, half_line(level3, -1.0, scale, spec)?))),
    ));
    if rs.n() <= 4 {
        // The right branch is a σ-convolution of quadrature-valued kernels for
        // N ≥ 5; its mass is checked on the ladder for the low orders only.
        r.push(rel_entry(
            format!("marginal/level3_nonnegative/{tag}/l{lambda}/s{s3}"),
            ANCHOR_LEVEL3_POS,
            1e-6,
            Tier::NestedQuadrature,
            m3.and_then(|m| Ok((m.pos, half_line(level3, 1.0, scale, spec)?))),
        ));
    }
    let tight = QuadratureSpec::with_tol(1e-13, 1e-12);
    r.push(abs_entry(
        format!("marginal/sojourn_total/{tag}"),
        ANCHOR_SOJOURN_TOTAL,
        1e-10,
        Tier::SingleQuadrature,
        over_time(rs, 1.7, |s, u| marginal_sojourn_split(rs, s, u), &tight).map(|v| (1.0, v)),
    ));
    r.push(abs_entry(
        format!("marginal/sojourn_nonpositive_total/{tag}"),
        ANCHOR_SOJOURN_SIGN,
        1e-8,
        Tier::SingleQuadrature,
        over_time(rs, 1.7, |s, u| Ok(crate::transform_stack::marginal_sojourn_signed_split(rs, s, u)?.neg), &tight)
            .map(|v| (rs.nk() as f64 / rs.nf(), v)),
    ));
    r.mark_formal(rs.params.formal_odd);
    r
}

/// The Laplace identity of `I_{j,m}` on the first `J`-root of a system, for a
/// positive and a negative `m`.
fn kernel_laplace_ledger(rs: &RootSystem) -> ValidationReport {
    let tag = order_tag(rs);
    let mut r = ValidationReport::new();
    if !LAPLACE_I_ORDERS.contains(&rs.n()) {
        return r;
    }
    let (lambda, x) = (1.5, 0.4);
    for (j, &theta) in rs.j_roots().iter().enumerate() {
        for m in -2..rs.n() as i64 {
            let name = format!("kernel_i_laplace/{tag}/j{j}/m{m}/l{lambda}/x{x}");
            r.push(match laplace_check_i(rs.n(), theta, m, lambda, x) {
                Ok(chk) => {
                    ValidationEntry::new(name, ANCHOR_LAPLACE_I, chk.rhs, chk.lhs, LAPLACE_I_TOL, Metric::Relative, Tier::SingleQuadrature)
                }
                Err(e) => ValidationEntry::failed(name, ANCHOR_LAPLACE_I, LAPLACE_I_TOL, Tier::SingleQuadrature, e.to_string()),
            });
        }
    }
    r
}

fn system_ledger(params: PseudoParams, spec: &QuadratureSpec) -> ValidationReport {
    let rs = match RootSystem::new(params) {
        Ok(rs) => rs,
        Err(e) => {
            let mut r = ValidationReport::new();
            r.push(ValidationEntry::failed(
                format!("roots[N={},κ={:+}]", params.order, params.kappa),
                "plumbing",
                0.0,
                Tier::Algebraic,
                e.to_string(),
            ));
            return r;
        }
    };
    let tasks: [&(dyn Fn() -> ValidationReport + Sync); 5] = [
        &|| verify_identities(&rs),
        &|| kernel_invariants(params),
        &|| transform_invariants(&rs),
        &|| marginal_ledger(&rs, spec),
        &|| kernel_laplace_ledger(&rs),
    ];
    let parts: Vec<ValidationReport> = tasks.par_iter().map(|f| f()).collect();
    let mut r = ValidationReport::new();
    for p in parts {
        r.merge(p);
    }
    r
}

/// The identity ledger for the given orders (odd orders once per sign in
/// `odd_kappas`): root-system identities, kernel invariants, transform form
/// equivalences, Spitzer factorisation, positivity, duality and marginals per
/// system, plus the special-function and error-function suites once.
/// Transform-level entries of odd orders are flagged formal.
pub fn run_ledger(orders: &[usize], odd_kappas: &[i8], spec: &QuadratureSpec) -> Result<ValidationReport> {
    spec.validate()?;
    let systems = ledger_params(orders, odd_kappas)?;
    let (parts, (special, erfc)) = rayon::join(
        || systems.par_iter().map(|&p| system_ledger(p, spec)).collect::<Vec<_>>(),
        // The suite pins its own tolerances, down to 1e−12, so it runs at the
        // tight default resolution whatever the ledger spec.
        || rayon::join(special_function_suite, || erfc_identity_suite(&default_quadrature())),
    );
    let mut r = ValidationReport::new();
    for p in parts {
        r.merge(p);
    }
    r.merge(special);
    r.merge(erfc);
    r.sort();
    Ok(r)
}

/// Laplace transform in `t` of the joint density at `(s, x)`:
/// `∫_0^∞ e^{−λ(s+u)} level4(s + u, s, x) du`.
fn laplace_of_level4(rs: &RootSystem, lambda: f64, s: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let inner = default_quadrature();
    // The density behaves like u^{−#J/N} as u → 0 (x ≥ 0).
    let gamma = 1.0 - rs.nj() as f64 / rs.nf();
    let spec = spec.with_singularities(SingularEnds::left(gamma));
    let err = std::cell::RefCell::new(None);
    let f = |u: f64| match level4_split(rs, s, u, x, Level4Form::Auto, &inner) {
        Ok(v) => c((-lambda * (s + u)).exp() * v),
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            c(0.0)
        }
    };
    let r = integrate_semi_infinite(f, 0.0, (1.0 / lambda).min(1.0), &spec)?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(r.value.re),
    }
}

/// Laplace transform in `s` of the `ν`-inverted transform at `(λ, x)`.
fn laplace_of_level3(rs: &RootSystem, lambda: f64, nu: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let conv = QuadratureSpec::with_tol(1e-10, 1e-8);
    let n = rs.nf();
    let gamma = 1.0 - rs.nj().max(rs.nk()) as f64 / n;
    let spec = spec.with_singularities(SingularEnds::left(gamma));
    let err = std::cell::RefCell::new(None);
    let f = |s: f64| {
        if s == 0.0 {
            return c(0.0);
        }
        match level3_with(rs, lambda, s, x, Level3Form::OrderOne, &conv) {
            Ok(v) => c(v),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                c(0.0)
            }
        }
    };
    let v = numeric_laplace(f, nu, &spec)?;
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v.re),
    }
}

fn ladder_point(rs: &RootSystem, i: usize, p: &LadderPoint, spec: &QuadratureSpec) -> ValidationReport {
    let tag = order_tag(rs);
    let mut r = ValidationReport::new();
    let tier = Tier::NestedQuadrature;
    // L2 → L1.
    let name = format!("ladder/{tag}/p{i}/level2_to_level1");
    r.push(
        match (
            triple_transform(rs, p.lambda, p.mu, p.nu),
            numeric_fourier(|x| level2_mu_inverted(rs, p.lambda, p.nu, x).unwrap_or(c(f64::NAN)), p.mu, spec),
        ) {
            (Ok(want), Ok(got)) => ValidationEntry::new(name, ANCHOR_LADDER_L2, want, got, LADDER_TOL, Metric::Relative, tier),
            (Err(e), _) | (_, Err(e)) => ValidationEntry::failed(name, ANCHOR_LADDER_L2, LADDER_TOL, tier, e.to_string()),
        },
    );
    // L3 → L2.
    r.push(rel_entry(
        format!("ladder/{tag}/p{i}/level3_to_level2"),
        ANCHOR_LADDER_L3,
        LADDER_TOL,
        tier,
        level2_mu_inverted(rs, p.lambda, p.nu, p.x)
            .and_then(|want| Ok((want.re, laplace_of_level3(rs, p.lambda, p.nu, p.x, spec)?))),
    ));
    if rs.params.is_even() {
        // L4 → L3.
        let conv = QuadratureSpec::with_tol(1e-10, 1e-8);
        r.push(rel_entry(
            format!("ladder/{tag}/p{i}/level4_to_level3"),
            ANCHOR_LADDER_L4,
            LADDER_TOL,
            tier,
            level3_with(rs, p.lambda, p.s, p.x, Level3Form::OrderOne, &conv)
                .and_then(|want| Ok((want, laplace_of_level4(rs, p.lambda, p.s, p.x, spec)?))),
        ));
        r.push(abs_entry(
            format!("ladder/{tag}/p{i}/duality"),
            ANCHOR_DUALITY,
            DUALITY_TOL,
            Tier::SingleQuadrature,
            level4_joint_density(rs, p.t, p.s, p.x)
                .and_then(|a| Ok((a, level4_joint_density(rs, p.t, p.t - p.s, -p.x)?))),
        ));
    }
    // Half-line masses of level 3 at (λ, s).
    let scale = p.lambda.powf(-1.0 / rs.nf());
    let m3 = level3_marginals(rs, p.lambda, p.s);
    let conv = QuadratureSpec::with_tol(1e-10, 1e-8);
    let level3 = |x: f64| level3_with(rs, p.lambda, p.s, x, Level3Form::OrderOne, &conv);
    r.push(rel_entry(
        format!("ladder/{tag}/p{i}/level3_nonpositive"),
        ANCHOR_LEVEL3_NEG,
        LADDER_TOL,
        Tier::SingleQuadrature,
        m3.clone().and_then(|m| Ok((m.neg, half_line(level3, -1.0, scale, spec)?))),
    ));
    r.push(rel_entry(
        format!("ladder/{tag}/p{i}/level3_nonnegative"),
        ANCHOR_LEVEL3_POS,
        LADDER_TOL,
        tier,
        m3.and_then(|m| Ok((m.pos, half_line(level3, 1.0, scale, spec)?))),
    ));
    r
}

/// Checks at a single time `t` for even orders: sign-split sojourn densities,
/// total mass of the joint density and the uniform law at the origin.
fn ladder_time_checks(rs: &RootSystem, t: f64, spec: &QuadratureSpec) -> Vec<ValidationEntry> {
    let tag = order_tag(rs);
    let ke = KernelEval::new(rs.params);
    let mut tasks: Vec<Box<dyn Fn() -> Vec<ValidationEntry> + Sync + '_>> = Vec::new();
    for frac in TIME_FRACTIONS {
        let tag = tag.clone();
        tasks.push(Box::new(move || {
            let s = frac * t;
            let split = integrate_over_x(rs, s, t - s, spec);
            let want = marginal_sojourn_signed(rs, t, s);
            let pair = |neg: bool| -> Result<(f64, f64)> {
                let (a, b) = split.clone()?;
                let w = want.clone()?;
                Ok(if neg { (w.neg, a) } else { (w.pos, b) })
            };
            let ratio = level4_joint_density(rs, t, s, 0.0).map(|v| (1.0, v * t / ke.p_at_zero(t)));
            vec![
                rel_entry(format!("ladder/{tag}/sojourn_nonpositive/s{frac}t"), ANCHOR_SOJOURN_NEG, LADDER_TOL, Tier::NestedQuadrature, pair(true)),
                rel_entry(format!("ladder/{tag}/sojourn_nonnegative/s{frac}t"), ANCHOR_SOJOURN_POS, LADDER_TOL, Tier::NestedQuadrature, pair(false)),
                rel_entry(format!("ladder/{tag}/uniform_origin/s{frac}t"), ANCHOR_UNIFORM, LADDER_TOL, Tier::SingleQuadrature, ratio),
            ]
        }));
    }
    let norm_tag = tag.clone();
    tasks.push(Box::new(move || {
        // Outer and inner quadratures at the normalisation tolerance's scale.
        let coarse = QuadratureSpec::with_tol(1e-7, 1e-5);
        let total = over_time(
            rs,
            t,
            |s, u| integrate_over_x(rs, s, u, &coarse).map(|(a, b)| a + b),
            &coarse,
        );
        vec![abs_entry(
            format!("ladder/{norm_tag}/normalisation/t{t}"),
            ANCHOR_NORMALISATION,
            NORMALISATION_TOL,
            Tier::NestedQuadrature,
            total.map(|v| (1.0, v)),
        )]
    }));
    tasks.par_iter().flat_map(|f| f()).collect()
}

/// The consistency ladder of one root system: numeric forward transforms
/// level 4 → 3 → 2 → 1 at the given points (level-4 rungs for even orders
/// only), level-3 half-line masses, duality at each point, and for even orders
/// the sojourn marginals, normalisation and uniform law at time `t`.
/// Odd-order entries are flagged formal.
pub fn run_ladder(params: PseudoParams, t: f64, points: &[LadderPoint], spec: &QuadratureSpec) -> Result<ValidationReport> {
    spec.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!("t must be positive and finite, got {t}")));
    }
    for p in points {
        if !(p.lambda > 0.0 && p.nu > 0.0 && p.s > 0.0 && p.s < p.t && p.mu.is_finite() && p.x.is_finite()) {
            return Err(Error::InvalidParams(format!("invalid ladder point {p:?}: need λ, ν > 0 and 0 < s < t")));
        }
    }
    let rs = RootSystem::new(params)?;
    let (per_point, timed) = rayon::join(
        || points.par_iter().enumerate().map(|(i, p)| ladder_point(&rs, i, p, spec)).collect::<Vec<_>>(),
        || if params.is_even() { ladder_time_checks(&rs, t, spec) } else { Vec::new() },
    );
    let mut r = ValidationReport::new();
    for p in per_point {
        r.merge(p);
    }
    r.entries.extend(timed);
    r.mark_formal(params.formal_odd);
    r.sort();
    Ok(r)
}

/// What a validation run covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    /// Orders of the ledger and the ladder.
    pub orders: Vec<usize>,
    /// Signs `κ` used for odd orders.
    pub odd_kappas: Vec<i8>,
    /// Time of the ladder's marginal checks.
    pub t: f64,
    pub quadrature: QuadratureSpec,
    pub ledger: bool,
    pub ladder: bool,
    pub manifest_version: u32,
    pub manifest: Vec<LadderPoint>,
    /// Keep only entries whose name contains this string.
    pub check: Option<String>,
}

impl ValidationConfig {
    /// Ledger and ladder for the given orders with default settings.
    pub fn new(orders: Vec<usize>, odd_kappas: Vec<i8>) -> Self {
        ValidationConfig {
            orders,
            odd_kappas,
            t: 1.0,
            quadrature: default_spec(),
            ledger: true,
            ladder: true,
            manifest_version: MANIFEST_VERSION,
            manifest: LADDER_MANIFEST.to_vec(),
            check: None,
        }
    }

    /// SHA-256 (hex) of the configuration's JSON form.
    pub fn spec_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("configuration serialises");
        format!("{:x}", Sha256::digest(json.as_bytes()))
    }
}

/// Report header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    /// Order of each root system in the run.
    #[serde(rename = "N")]
    pub orders: Vec<usize>,
    /// `κ` of each root system, aligned with `N`.
    pub kappa: Vec<i8>,
    pub spec_hash: String,
    pub config: ValidationConfig,
}

/// A validation report with its header and summary, as written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub meta: ReportMeta,
    pub entries: Vec<ValidationEntry>,
    pub summary: Summary,
}

impl ReportDocument {
    /// The entries as a report.
    pub fn report(&self) -> ValidationReport {
        ValidationReport {
            entries: self.entries.clone(),
        }
    }

    /// Pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Parses a document written by [`ReportDocument::to_json`].
    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Process exit code: 1 when a non-formal entry fails, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        exit_code(&self.report())
    }
}

/// Exit code of a report: nonzero iff a non-formal entry fails.
pub fn exit_code(report: &ValidationReport) -> i32 {
    if report.all_rigorous_pass() {
        0
    } else {
        1
    }
}

/// Runs the ledger and/or ladder described by `config`.
pub fn run_validation(config: &ValidationConfig) -> Result<ReportDocument> {
    let systems = ledger_params(&config.orders, &config.odd_kappas)?;
    let mut report = ValidationReport::new();
    if config.ledger {
        report.merge(run_ledger(&config.orders, &config.odd_kappas, &config.quadrature)?);
    }
    if config.ladder {
        let ladders: Vec<Result<ValidationReport>> = systems
            .par_iter()
            .map(|&p| run_ladder(p, config.t, &config.manifest, &config.quadrature))
            .collect();
        for l in ladders {
            report.merge(l?);
        }
    }
    if let Some(pattern) = &config.check {
        report = report.filter(pattern);
    }
    report.sort();
    Ok(ReportDocument {
        meta: ReportMeta {
            orders: systems.iter().map(|p| p.order).collect(),
            kappa: systems.iter().map(|p| p.kappa).collect(),
            spec_hash: config.spec_hash(),
            config: config.clone(),
        },
        summary: report.summary(),
        entries: report.entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_cover_both_signs_for_odd_orders() {
        let p = ledger_params(&[2, 3, 4], &[1, -1]).unwrap();
        let got: Vec<(usize, i8)> = p.iter().map(|p| (p.order, p.kappa)).collect();
        assert_eq!(got, vec![(2, 1), (3, 1), (3, -1), (4, -1)]);
        assert!(ledger_params(&[], &[1]).is_err());
        assert!(ledger_params(&[3], &[]).is_err());
        assert!(ledger_params(&[3], &[2]).is_err());
    }

    #[test]
    fn manifest_points_are_valid() {
        for p in LADDER_MANIFEST {
            assert!(p.lambda > 0.0 && p.nu > 0.0 && 0.0 < p.s && p.s < p.t);
        }
    }

    #[test]
    fn spec_hash_tracks_the_configuration() {
        let a = ValidationConfig::new(vec![2], vec![1, -1]);
        let mut b = a.clone();
        assert_eq!(a.spec_hash(), b.spec_hash());
        b.t = 2.0;
        assert_ne!(a.spec_hash(), b.spec_hash());
        assert_eq!(a.spec_hash().len(), 64);
    }

    #[test]
    fn exit_code_ignores_formal_failures() {
        let mut r = ValidationReport::new();
        r.push(ValidationEntry::abs("a", "plumbing", 1.0, 1.0, 1e-12, Tier::Algebraic));
        assert_eq!(exit_code(&r), 0);
        r.push(ValidationEntry::abs("b", "plumbing", 1.0, 2.0, 1e-12, Tier::Algebraic).formal(true));
        assert_eq!(exit_code(&r), 0);
        r.push(ValidationEntry::abs("c", "plumbing", 1.0, 2.0, 1e-12, Tier::Algebraic));
        assert_eq!(exit_code(&r), 1);
    }
}
