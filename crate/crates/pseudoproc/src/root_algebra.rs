//! The `N`-th roots of `κ_N`, their split by the sign of the real part, and
//! the Vandermonde-type coefficients built on them, with a ledger of the
//! algebraic identities they satisfy.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Metric, Tier, ValidationEntry, ValidationReport};

/// Half-width of the dead zone around the imaginary axis: a root with
/// `|Re θ|` below this is refused instead of being classified.
pub const IMAGINARY_AXIS_DEAD_ZONE: f64 = 1e-12;

/// Tolerance of every algebraic identity check.
pub const ALGEBRAIC_TOL: f64 = 1e-11;

/// Order `N` of the equation and the sign `κ_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoParams {
    pub order: usize,
    pub kappa: i8,
    /// Odd orders are computed by the same algebra but are only formal.
    pub formal_odd: bool,
}

impl PseudoParams {
    /// Validated parameters. For even `N` the sign is derived as
    /// `(−1)^{1+N/2}`; a supplied `kappa` must agree with it. Odd `N` requires
    /// an explicit `κ ∈ {+1, −1}`.
    pub fn new(order: usize, kappa: Option<i8>) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParams(format!(
                "order N must be at least 2, got {order}"
            )));
        }
        if order.is_multiple_of(2) {
            let derived = Self::even_kappa(order);
            if let Some(k) = kappa {
                if k != derived {
                    return Err(Error::InvalidParams(format!(
                        "for even N the sign is fixed: κ_N = (−1)^(1+N/2) = {derived:+} for N = {order}, got {k:+}"
                    )));
                }
            }
            Ok(PseudoParams {
                order,
                kappa: derived,
                formal_odd: false,
            })
        } else {
            match kappa {
                Some(k @ (1 | -1)) => Ok(PseudoParams {
                    order,
                    kappa: k,
                    formal_odd: true,
                }),
                Some(k) => Err(Error::InvalidParams(format!(
                    "κ must be +1 or −1, got {k}"
                ))),
                None => Err(Error::InvalidParams(format!(
                    "odd order N = {order} needs an explicit κ (+1 or −1)"
                ))),
            }
        }
    }

    /// Parameters for an even order with the derived sign.
    pub fn even(order: usize) -> Result<Self> {
        if !order.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("{order} is not even")));
        }
        Self::new(order, None)
    }

    /// The sign `(−1)^{1+N/2}` forced on even orders.
    pub fn even_kappa(order: usize) -> i8 {
        if (1 + order / 2).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `κ_N` as a float.
    pub fn kappa_f(&self) -> f64 {
        f64::from(self.kappa)
    }

    /// True for even orders.
    pub fn is_even(&self) -> bool {
        self.order.is_multiple_of(2)
    }
}

/// Roots, index split and coefficients for given parameters. Immutable after
/// construction; the power sums `α_m`, `β_m` are tabulated eagerly for
/// `|m| ≤ 2N` and summed directly outside that range.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSystem {
    pub params: PseudoParams,
    /// All roots, sorted by argument in `(−π, π]`.
    pub theta: Vec<Complex64>,
    /// Indices into `theta` of the roots with positive real part.
    pub j_idx: Vec<usize>,
    /// Indices into `theta` of the roots with negative real part.
    pub k_idx: Vec<usize>,
    /// `A_j`, aligned with `j_idx`.
    pub a: Vec<Complex64>,
    /// `B_k`, aligned with `k_idx`.
    pub b: Vec<Complex64>,
    /// `σ_ℓ` for `ℓ = 0..=#K`.
    pub sigma: Vec<Complex64>,
    alpha_table: Vec<Complex64>,
    beta_table: Vec<Complex64>,
}

fn vandermonde_coefficients(roots: &[Complex64]) -> Vec<Complex64> {
    roots
        .iter()
        .enumerate()
        .map(|(j, &tj)| {
            roots
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, &ti)| acc * ti / (ti - tj))
        })
        .collect()
}

fn elementary_symmetric(roots: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); roots.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (n, &r) in roots.iter().enumerate() {
        for l in (1..=n + 1).rev() {
            let prev = e[l - 1];
            e[l] += prev * r;
        }
    }
    e
}

fn power_sum(w: &[Complex64], roots: &[Complex64], m: i64) -> Complex64 {
    w.iter()
        .zip(roots)
        .map(|(&c, &r)| c * r.powi(m as i32))
        .sum()
}

impl RootSystem {
    /// Builds the root system for validated parameters.
    pub fn new(params: PseudoParams) -> Result<Self> {
        let n = params.order;
        if n < 2 {
            return Err(Error::InvalidParams("order must be at least 2".into()));
        }
        if params.is_even() && params.kappa != PseudoParams::even_kappa(n) {
            return Err(Error::InvalidParams(format!(
                "for even N the sign is fixed: κ_N = (−1)^(1+N/2) = {:+}",
                PseudoParams::even_kappa(n)
            )));
        }
        let arg_kappa = if params.kappa > 0 { 0.0 } else { PI };
        let mut angles: Vec<f64> = (0..n)
            .map(|i| {
                let mut a = (2.0 * PI * i as f64 + arg_kappa) / n as f64;
                if a > PI {
                    a -= 2.0 * PI;
                }
                a
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let theta: Vec<Complex64> = angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
        let mut j_idx = Vec::new();
        let mut k_idx = Vec::new();
        for (i, t) in theta.iter().enumerate() {
            if t.re.abs() < IMAGINARY_AXIS_DEAD_ZONE {
                return Err(Error::InvalidParams(format!(
                    "root θ = {t} lies on the imaginary axis; the J/K split is degenerate"
                )));
            }
            if t.re > 0.0 {
                j_idx.push(i);
            } else {
                k_idx.push(i);
            }
        }
        let jr: Vec<Complex64> = j_idx.iter().map(|&i| theta[i]).collect();
        let kr: Vec<Complex64> = k_idx.iter().map(|&i| theta[i]).collect();
        let a = vandermonde_coefficients(&jr);
        let b = vandermonde_coefficients(&kr);
        let sigma = elementary_symmetric(&kr);
        let span = 2 * n as i64;
        let alpha_table = (-span..=span).map(|m| power_sum(&a, &jr, m)).collect();
        let beta_table = (-span..=span).map(|m| power_sum(&b, &kr, m)).collect();
        Ok(RootSystem {
            params,
            theta,
            j_idx,
            k_idx,
            a,
            b,
            sigma,
            alpha_table,
            beta_table,
        })
    }

    /// Convenience constructor from `(N, κ)`.
    pub fn from_order(order: usize, kappa: Option<i8>) -> Result<Self> {
        Self::new(PseudoParams::new(order, kappa)?)
    }

    /// Order `N`.
    pub fn n(&self) -> usize {
        self.params.order
    }

    /// `N` as a float.
    pub fn nf(&self) -> f64 {
        self.params.order as f64
    }

    /// `κ_N` as a float.
    pub fn kappa(&self) -> f64 {
        self.params.kappa_f()
    }

    /// `#J`.
    pub fn nj(&self) -> usize {
        self.j_idx.len()
    }

    /// `#K`.
    pub fn nk(&self) -> usize {
        self.k_idx.len()
    }

    /// Roots with positive real part, aligned with [`RootSystem::a`].
    pub fn j_roots(&self) -> Vec<Complex64> {
        self.j_idx.iter().map(|&i| self.theta[i]).collect()
    }

    /// Roots with negative real part, aligned with [`RootSystem::b`].
    pub fn k_roots(&self) -> Vec<Complex64> {
        self.k_idx.iter().map(|&i| self.theta[i]).collect()
    }

    /// Position in `theta` of the root closest to `z`.
    pub fn index_of(&self, z: Complex64) -> usize {
        let mut best = 0;
        for (i, t) in self.theta.iter().enumerate() {
            if (t - z).norm() < (self.theta[best] - z).norm() {
                best = i;
            }
        }
        best
    }

    /// `α_m = Σ_{j∈J} A_j θ_j^m`.
    pub fn alpha(&self, m: i64) -> Complex64 {
        let span = 2 * self.n() as i64;
        if m.abs() <= span {
            self.alpha_table[(m + span) as usize]
        } else {
            power_sum(&self.a, &self.j_roots(), m)
        }
    }

    /// `β_m = Σ_{k∈K} B_k θ_k^m`.
    pub fn beta(&self, m: i64) -> Complex64 {
        let span = 2 * self.n() as i64;
        if m.abs() <= span {
            self.beta_table[(m + span) as usize]
        } else {
            power_sum(&self.b, &self.k_roots(), m)
        }
    }

    /// `Σ_{j∈J} θ_j`.
    pub fn sum_j(&self) -> Complex64 {
        self.j_roots().iter().sum()
    }

    /// `Σ_{k∈K} θ_k`.
    pub fn sum_k(&self) -> Complex64 {
        self.k_roots().iter().sum()
    }

    /// `∏_{j∈J} θ_j`.
    pub fn prod_j(&self) -> Complex64 {
        self.j_roots().iter().product()
    }

    /// `∏_{k∈K} θ_k`.
    pub fn prod_k(&self) -> Complex64 {
        self.k_roots().iter().product()
    }

    /// Closed value of `Σ_{j∈J} θ_j`: `1/sin(π/N)` for even `N`,
    /// `cos(π/2N)/sin(π/N)` for odd `N`.
    pub fn sum_j_closed(&self) -> f64 {
        let n = self.nf();
        if self.params.is_even() {
            1.0 / (PI / n).sin()
        } else {
            (PI / (2.0 * n)).cos() / (PI / n).sin()
        }
    }
}

/// Sample points for the polynomial and partial-fraction identities.
const SAMPLE_X: [f64; 5] = [0.3, -0.45, 0.8, 2.5, -1.7];

fn cx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn entry(name: String, anchor: &str, expected: Complex64, computed: Complex64) -> ValidationEntry {
    ValidationEntry::new(
        name,
        anchor,
        expected,
        computed,
        ALGEBRAIC_TOL,
        Metric::Absolute,
        Tier::Algebraic,
    )
}

/// Checks every algebraic identity of the root system; each identity becomes
/// one entry (absolute error against [`ALGEBRAIC_TOL`]).
pub fn verify_identities(rs: &RootSystem) -> ValidationReport {
    let mut r = ValidationReport::new();
    let n = rs.n();
    let nj = rs.nj() as i64;
    let nk = rs.nk() as i64;
    let kappa = cx(rs.kappa());
    let tag = format!("roots[N={},κ={:+}]", n, rs.params.kappa);
    let one = cx(1.0);
    let zero = cx(0.0);
    let jr = rs.j_roots();
    let kr = rs.k_roots();

    // Roots themselves.
    for (i, t) in rs.theta.iter().enumerate() {
        r.push(entry(format!("{tag}.root_power[{i}]"), "θ_i^N = κ_N", kappa, t.powi(n as i32)));
    }
    r.push(entry(
        format!("{tag}.split_count"),
        "#J + #K = N",
        cx(n as f64),
        cx((rs.nj() + rs.nk()) as f64),
    ));

    // Sum and product of all roots.
    let total: Complex64 = rs.theta.iter().sum();
    let product: Complex64 = rs.theta.iter().product();
    let sign = if (n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    r.push(entry(format!("{tag}.root_sums.sum"), "Σθ_i = 0", zero, total));
    r.push(entry(
        format!("{tag}.root_sums.product"),
        "∏θ_i = (−1)^(N−1)κ_N",
        kappa * sign,
        product,
    ));

    // Factorisation of x^N − κ_N at sample points, also with conjugate roots.
    let samples: Vec<Complex64> = SAMPLE_X
        .iter()
        .map(|&x| cx(x))
        .chain([Complex64::new(0.5, 0.4), Complex64::new(-1.2, -0.3)])
        .take(5)
        .collect();
    for (s, &x) in samples.iter().enumerate() {
        let lhs: Complex64 = rs.theta.iter().map(|&t| x - t).product();
        let lhs_c: Complex64 = rs.theta.iter().map(|&t| x - t.conj()).product();
        let rhs = x.powi(n as i32) - kappa;
        r.push(entry(format!("{tag}.factorisation[{s}]"), "∏(x−θ_i) = x^N − κ_N", rhs, lhs));
        r.push(entry(format!("{tag}.factorisation_conj[{s}]"), "∏(x−θ̄_i) = x^N − κ_N", rhs, lhs_c));
    }

    // Expansion of the K-factor: σ-expansion of ∏_{k∈K}(x−θ_k).
    for (s, &x) in samples.iter().enumerate() {
        let lhs: Complex64 = kr.iter().map(|&t| x - t).product();
        let rhs: Complex64 = (0..=rs.nk())
            .map(|l| {
                let sg = if l % 2 == 0 { 1.0 } else { -1.0 };
                rs.sigma[l] * sg * x.powi((rs.nk() - l) as i32)
            })
            .sum();
        r.push(entry(format!("{tag}.k_expansion[{s}]"), "∏_K(x−θ_k) = Σ(−1)^ℓ σ_ℓ x^(#K−ℓ)", lhs, rhs));
    }
    r.push(entry(
        format!("{tag}.k_expansion.sigma_top"),
        "σ_#K = ∏_K θ_k",
        rs.prod_k(),
        rs.sigma[rs.nk()],
    ));
    let sum_k_conj: Complex64 = kr.iter().map(|t| t.conj()).sum();
    r.push(entry(
        format!("{tag}.k_expansion.sigma_next"),
        "σ_(#K−1) = (∏_K θ_k)(Σ_K θ̄_k)",
        rs.prod_k() * sum_k_conj,
        rs.sigma[rs.nk() - 1],
    ));

    // J-root sum: weighted sum is a constant polynomial equal to Σθ_j.
    let closed = cx(rs.sum_j_closed());
    r.push(entry(
        format!("{tag}.j_root_sum.closed"),
        "Σ_J θ_j = 1/sin(π/N) (even) or cos(π/2N)/sin(π/N) (odd)",
        closed,
        rs.sum_j(),
    ));
    r.push(entry(format!("{tag}.j_root_sum.balance"), "Σ_J θ_j = −Σ_K θ_k", -rs.sum_k(), rs.sum_j()));
    for (s, &x) in samples.iter().enumerate() {
        let v: Complex64 = jr
            .iter()
            .enumerate()
            .map(|(j, &tj)| {
                let p: Complex64 = jr
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, &ti)| (ti * x - tj) / (ti - tj))
                    .product();
                tj * p
            })
            .sum();
        r.push(entry(
            format!("{tag}.j_root_sum.poly[{s}]"),
            "Σ_J θ_j ∏(θ_i x−θ_j)/(θ_i−θ_j) = Σ_J θ_j",
            closed,
            v,
        ));
    }

    // Vanishing weighted power sums.
    r.push(entry(format!("{tag}.vanishing_sums.sumA"), "Σ A_j = 1", one, rs.a.iter().sum()));
    r.push(entry(format!("{tag}.vanishing_sums.sumB"), "Σ B_k = 1", one, rs.b.iter().sum()));
    for m in 1..nj {
        r.push(entry(format!("{tag}.vanishing_sums.alpha[{m}]"), "Σ A_j θ_j^m = 0", zero, rs.alpha(m)));
    }
    for m in 1..nk {
        r.push(entry(format!("{tag}.vanishing_sums.beta[{m}]"), "Σ B_k θ_k^m = 0", zero, rs.beta(m)));
    }

    // Partial fractions.
    for (s, &xr) in SAMPLE_X.iter().enumerate() {
        let x = cx(xr);
        let xn = x.powi(n as i32) - kappa;
        let prod_j: Complex64 = jr.iter().map(|&t| one - t * x).product();
        let prod_k: Complex64 = kr.iter().map(|&t| one - t * x).product();
        let prod_k_conj: Complex64 = kr.iter().map(|&t| one - t.conj() * x).product();
        let prod_j_conj: Complex64 = jr.iter().map(|&t| one - t.conj() * x).product();
        let sa: Complex64 = rs.a.iter().zip(&jr).map(|(&a, &t)| a * t / (t - x)).sum();
        let sa_conj: Complex64 = rs.a.iter().zip(&jr).map(|(&a, &t)| a / (one - t.conj() * x)).sum();
        let sb: Complex64 = rs.b.iter().zip(&kr).map(|(&b, &t)| b * t / (t - x)).sum();
        let sb_conj: Complex64 = rs.b.iter().zip(&kr).map(|(&b, &t)| b / (one - t.conj() * x)).sum();
        let anchor_j = "Σ_J A_jθ_j/(θ_j−x) = 1/∏_J(1−θ_j x) = −κ∏_K(1−θ_k x)/(x^N−κ)";
        let anchor_k = "Σ_K B_kθ_k/(θ_k−x) = 1/∏_K(1−θ_k x) = −κ∏_J(1−θ_j x)/(x^N−κ)";
        r.push(entry(format!("{tag}.partial_fractions.J.product[{s}]"), anchor_j, one / prod_j, sa));
        r.push(entry(format!("{tag}.partial_fractions.J.conj[{s}]"), anchor_j, sa, sa_conj));
        r.push(entry(format!("{tag}.partial_fractions.J.cofactor[{s}]"), anchor_j, -kappa * prod_k / xn, sa));
        r.push(entry(format!("{tag}.partial_fractions.J.cofactor_conj[{s}]"), anchor_j, -kappa * prod_k_conj / xn, sa));
        r.push(entry(format!("{tag}.partial_fractions.K.product[{s}]"), anchor_k, one / prod_k, sb));
        r.push(entry(format!("{tag}.partial_fractions.K.conj[{s}]"), anchor_k, sb, sb_conj));
        r.push(entry(format!("{tag}.partial_fractions.K.cofactor[{s}]"), anchor_k, -kappa * prod_j / xn, sb));
        r.push(entry(format!("{tag}.partial_fractions.K.cofactor_conj[{s}]"), anchor_k, -kappa * prod_j_conj / xn, sb));
    }

    // Reciprocal relations.
    let nf = cx(rs.nf());
    for (kk, &tk) in kr.iter().enumerate() {
        let v: Complex64 = rs.a.iter().zip(&jr).map(|(&a, &tj)| a * tj / (tj - tk)).sum();
        r.push(entry(
            format!("{tag}.reciprocity.J[{kk}]"),
            "Σ_J A_jθ_j/(θ_j−θ_k) = 1/(N B_k)",
            one / (nf * rs.b[kk]),
            v,
        ));
    }
    for (jj, &tj) in jr.iter().enumerate() {
        let v: Complex64 = rs.b.iter().zip(&kr).map(|(&b, &tk)| b * tk / (tk - tj)).sum();
        r.push(entry(
            format!("{tag}.reciprocity.K[{jj}]"),
            "Σ_K B_kθ_k/(θ_k−θ_j) = 1/(N A_j)",
            one / (nf * rs.a[jj]),
            v,
        ));
    }

    // The β table.
    let sk = if (nk - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let sj = if (nj - 1) % 2 == 0 { 1.0 } else { -1.0 };
    r.push(entry(format!("{tag}.beta_table.beta0"), "β_0 = 1", one, rs.beta(0)));
    for m in 1..nk {
        r.push(entry(format!("{tag}.beta_table.beta_zero[{m}]"), "β_m = 0, 1 ≤ m ≤ #K−1", zero, rs.beta(m)));
    }
    r.push(entry(
        format!("{tag}.beta_table.beta_nk"),
        "β_#K = (−1)^(#K−1) ∏_K θ_k",
        rs.prod_k() * sk,
        rs.beta(nk),
    ));
    r.push(entry(
        format!("{tag}.beta_table.beta_nk1"),
        "β_(#K+1) = (−1)^(#K−1) (∏_K θ_k)(Σ_K θ_k)",
        rs.prod_k() * rs.sum_k() * sk,
        rs.beta(nk + 1),
    ));
    r.push(entry(format!("{tag}.beta_table.beta_n"), "β_N = κ_N", kappa, rs.beta(n as i64)));

    // α_{−m} = κ α_{N−m} and the α table.
    for m in 0..=(n as i64) {
        r.push(entry(
            format!("{tag}.alpha_reflect[{m}]"),
            "α_(−m) = κ_N α_(N−m)",
            kappa * rs.alpha(n as i64 - m),
            rs.alpha(-m),
        ));
    }
    r.push(entry(format!("{tag}.alpha_table.alpha0"), "α_0 = 1", one, rs.alpha(0)));
    r.push(entry(
        format!("{tag}.alpha_table.alpha_nk1"),
        "α_(−(#K−1)) = κ(−1)^(#J−1)(∏_J θ_j)(Σ_J θ_j)",
        kappa * sj * rs.prod_j() * rs.sum_j(),
        rs.alpha(-(nk - 1)),
    ));
    r.push(entry(
        format!("{tag}.alpha_table.alpha_nk"),
        "α_(−#K) = κ(−1)^(#J−1) ∏_J θ_j",
        kappa * sj * rs.prod_j(),
        rs.alpha(-nk),
    ));
    for m in (nk + 1)..(n as i64) {
        r.push(entry(
            format!("{tag}.alpha_table.alpha_zero[{m}]"),
            "α_(−m) = 0, #K+1 ≤ m ≤ N−1",
            zero,
            rs.alpha(-m),
        ));
    }
    r.push(entry(format!("{tag}.alpha_table.alpha_n"), "α_(−N) = κ_N", kappa, rs.alpha(-(n as i64))));

    // Products of α and β entries.
    r.push(entry(format!("{tag}.products.a0b0"), "α_0 β_0 = 1", one, rs.alpha(0) * rs.beta(0)));
    r.push(entry(
        format!("{tag}.products.aNbN"),
        "α_(−N) β_N = 1",
        one,
        rs.alpha(-(n as i64)) * rs.beta(n as i64),
    ));
    r.push(entry(
        format!("{tag}.products.aKbK"),
        "α_(−#K) β_#K = −1",
        -one,
        rs.alpha(-nk) * rs.beta(nk),
    ));
    r.push(entry(
        format!("{tag}.products.aKbK1"),
        "α_(−#K) β_(#K+1) = Σ_J θ_j",
        rs.sum_j(),
        rs.alpha(-nk) * rs.beta(nk + 1),
    ));
    r.push(entry(
        format!("{tag}.products.aK1bK"),
        "α_(1−#K) β_#K = Σ_K θ_k",
        rs.sum_k(),
        rs.alpha(1 - nk) * rs.beta(nk),
    ));

    // Products of σ̄ and β entries.
    let sig = |l: i64| rs.sigma[l as usize].conj();
    r.push(entry(format!("{tag}.sigma_beta.s0b0"), "σ̄_0 β_0 = 1", one, sig(0) * rs.beta(0)));
    r.push(entry(
        format!("{tag}.sigma_beta.sK1bK"),
        "σ̄_(#K−1) β_#K = (−1)^(#K−1) Σ_K θ_k",
        rs.sum_k() * sk,
        sig(nk - 1) * rs.beta(nk),
    ));
    r.push(entry(
        format!("{tag}.sigma_beta.sKbK1"),
        "σ̄_#K β_(#K+1) = (−1)^(#K−1) Σ_K θ_k",
        rs.sum_k() * sk,
        sig(nk) * rs.beta(nk + 1),
    ));
    r.push(entry(
        format!("{tag}.sigma_beta.sKbK"),
        "σ̄_#K β_#K = (−1)^(#K−1)",
        cx(sk),
        sig(nk) * rs.beta(nk),
    ));

    // Duality θ → −θ: even N pairs A_j with B_k for θ_k = −θ_j.
    if rs.params.is_even() {
        for (jj, &tj) in jr.iter().enumerate() {
            let kk = kr
                .iter()
                .enumerate()
                .min_by(|x, y| (x.1 + tj).norm().total_cmp(&(y.1 + tj).norm()))
                .map(|(i, _)| i)
                .expect("K is non-empty");
            r.push(entry(
                format!("{tag}.duality.A_eq_B[{jj}]"),
                "duality: A_j = B_k when θ_k = −θ_j",
                rs.b[kk],
                rs.a[jj],
            ));
        }
        for m in -(n as i64)..=(n as i64) {
            let sg = if m % 2 == 0 { 1.0 } else { -1.0 };
            r.push(entry(
                format!("{tag}.duality.alpha_beta[{m}]"),
                "duality: α_m = (−1)^m β_m",
                rs.beta(m) * sg,
                rs.alpha(m),
            ));
        }
    } else if let Ok(dual) = RootSystem::from_order(n, Some(-rs.params.kappa)) {
        for m in -(n as i64)..=(n as i64) {
            let sg = if m % 2 == 0 { 1.0 } else { -1.0 };
            r.push(entry(
                format!("{tag}.duality.alpha_beta_dual[{m}]"),
                "duality: α_m(κ) = (−1)^m β_m(−κ) for odd N",
                dual.beta(m) * sg,
                rs.alpha(m),
            ));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-13
    }

    #[test]
    fn even_kappa_is_derived() {
        assert_eq!(PseudoParams::even_kappa(2), 1);
        assert_eq!(PseudoParams::even_kappa(4), -1);
        assert_eq!(PseudoParams::even_kappa(6), 1);
        assert!(PseudoParams::new(4, Some(1)).is_err());
        assert!(PseudoParams::new(1, None).is_err());
        assert!(PseudoParams::new(3, None).is_err());
        assert!(PseudoParams::new(3, Some(2)).is_err());
        assert!(PseudoParams::new(3, Some(-1)).unwrap().formal_odd);
    }

    #[test]
    fn order_two_example() {
        let rs = RootSystem::from_order(2, None).unwrap();
        assert_eq!(rs.nj(), 1);
        assert_eq!(rs.nk(), 1);
        assert!(close(rs.j_roots()[0], Complex64::new(1.0, 0.0)));
        assert!(close(rs.k_roots()[0], Complex64::new(-1.0, 0.0)));
        assert!(close(rs.a[0], Complex64::new(1.0, 0.0)));
        assert!(close(rs.b[0], Complex64::new(1.0, 0.0)));
        assert!(close(rs.alpha(0), Complex64::new(1.0, 0.0)));
        assert!(close(rs.alpha(-1), Complex64::new(1.0, 0.0)));
        assert!(close(rs.beta(-1), Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn order_four_example() {
        let rs = RootSystem::from_order(4, None).unwrap();
        let e = |a: f64| Complex64::from_polar(1.0, a);
        let s2 = 2f64.sqrt();
        let q = std::f64::consts::FRAC_PI_4;
        let j1 = rs.j_idx.iter().position(|&i| close(rs.theta[i], e(-q))).unwrap();
        let j2 = rs.j_idx.iter().position(|&i| close(rs.theta[i], e(q))).unwrap();
        let k3 = rs.k_idx.iter().position(|&i| close(rs.theta[i], e(3.0 * q))).unwrap();
        let k4 = rs.k_idx.iter().position(|&i| close(rs.theta[i], e(-3.0 * q))).unwrap();
        assert!(close(rs.a[j1], e(-q) / s2));
        assert!(close(rs.b[k3], e(-q) / s2));
        assert!(close(rs.a[j2], e(q) / s2));
        assert!(close(rs.b[k4], e(q) / s2));
        assert!(close(rs.alpha(-1), Complex64::new(s2, 0.0)));
        assert!(close(rs.beta(-1), Complex64::new(-s2, 0.0)));
        assert!(close(rs.beta(2), Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn order_three_examples() {
        let e = |a: f64| Complex64::from_polar(1.0, a);
        let s3 = 3f64.sqrt();
        let p6 = std::f64::consts::PI / 6.0;
        let rs = RootSystem::from_order(3, Some(1)).unwrap();
        assert_eq!((rs.nj(), rs.nk()), (1, 2));
        assert!(close(rs.a[0], Complex64::new(1.0, 0.0)));
        let k2 = rs.k_idx.iter().position(|&i| close(rs.theta[i], e(4.0 * p6))).unwrap();
        let k3 = rs.k_idx.iter().position(|&i| close(rs.theta[i], e(-4.0 * p6))).unwrap();
        assert!(close(rs.b[k2], e(-p6) / s3));
        assert!(close(rs.b[k3], e(p6) / s3));
        let rs = RootSystem::from_order(3, Some(-1)).unwrap();
        assert_eq!((rs.nj(), rs.nk()), (2, 1));
        let j1 = rs.j_idx.iter().position(|&i| close(rs.theta[i], e(2.0 * p6))).unwrap();
        assert!(close(rs.a[j1], e(p6) / s3));
    }

    #[test]
    fn beta_closed_forms_order_six() {
        let rs = RootSystem::from_order(6, None).unwrap();
        let nk = rs.nk() as i64;
        let sk = if (nk - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let direct: Complex64 = rs
            .b
            .iter()
            .zip(rs.k_roots())
            .map(|(&b, t)| b * t.powi(nk as i32 + 1))
            .sum();
        let closed = rs.prod_k() * rs.sum_k() * sk;
        assert!((direct - closed).norm() < 1e-12);
    }

    #[test]
    fn sum_j_matches_closed_form_for_two() {
        let rs = RootSystem::from_order(2, None).unwrap();
        assert!((rs.sum_j().re - 1.0).abs() < 1e-15);
        assert!((rs.sum_j_closed() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_ledger_passes() {
        for (n, k) in [(2, None), (4, None), (6, None), (8, None), (10, None), (3, Some(1)), (3, Some(-1)), (5, Some(1)), (5, Some(-1)), (7, Some(1)), (7, Some(-1))] {
            let rs = RootSystem::from_order(n, k).unwrap();
            let rep = verify_identities(&rs);
            let bad: Vec<_> = rep.failures().iter().map(|e| (e.name.clone(), e.abs_err)).collect();
            assert!(bad.is_empty(), "N={n}: {bad:?}");
        }
    }
}
