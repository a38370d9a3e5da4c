//! Lattice evolution of the dyadic pseudo-walk and brute-force Spitzer
//! identities.

use num_complex::Complex64;
use proptest::prelude::*;
use pseudoproc::discrete_oracle::*;
use pseudoproc::kernel::KernelEval;
use pseudoproc::root_algebra::PseudoParams;

fn even(n: usize) -> PseudoParams {
    PseudoParams::new(n, None).unwrap()
}

#[test]
fn step_kernel_is_normalised() {
    let s = build_lattice(even(2), 0, 0.05, 10.0).unwrap();
    assert!((s.kernel_mass() - 1.0).abs() < 1e-6, "{}", s.kernel_mass());
    assert!((s.rho_h - 1.0).abs() < 1e-6);
}

#[test]
fn step_kernel_absolute_mass_matches_the_kernel() {
    let s = build_lattice(even(4), 2, 0.02, 10.0).unwrap();
    let rho = KernelEval::new(even(4)).abs_mass(0.25).unwrap();
    assert!((s.rho_h - rho).abs() < 1e-3, "{} vs {rho}", s.rho_h);
    assert!((s.kernel_mass() - 1.0).abs() < 1e-8);
}

#[test]
fn undamped_step_conserves_mass() {
    for order in [2, 4] {
        let mut s = build_lattice(even(order), 3, 0.02, 30.0).unwrap();
        for _ in 0..5 {
            let before = s.mass();
            let stats = s.step().unwrap();
            let change = (s.mass() - before).norm();
            assert!(change < 1e-8, "N={order}: {} vs {before}", s.mass());
            // The signed kernel can push mass of either sign off the grid.
            assert!(change <= stats.leaked + 1e-13, "N={order}: {change} vs {}", stats.leaked);
        }
    }
}

#[test]
fn strong_damping_leaves_the_negative_half_line_mass() {
    // With ν → ∞ one step from the origin keeps only X_1 < 0, whose mass is
    // 1/2 up to the half of the origin node counted as nonnegative.
    let mut s = build_lattice(even(2), 6, 0.005, 2.0).unwrap().with_nu(1e6);
    s.step().unwrap();
    let (pos, neg) = s.half_line_sums(0.0);
    let w0 = s.step_kernel[(s.step_kernel.len() - 1) / 2];
    assert!(pos.norm() < 1e-300);
    assert!((neg.re - 0.5).abs() <= 0.5 * w0 + 1e-12, "{neg} vs 1/2, w0 = {w0}");
    assert!(w0 < 0.02);
}

#[test]
fn absolute_mass_grows_at_most_geometrically() {
    let mut s = build_lattice(even(4), 3, 0.02, 12.0).unwrap().with_nu(0.8);
    let mut prev = s.abs_mass();
    for _ in 0..20 {
        let stats = s.step().unwrap();
        assert!(stats.abs_mass <= s.rho_h * prev * (1.0 + 1e-12));
        prev = stats.abs_mass;
    }
}

#[test]
fn undamped_transform_is_the_laplace_transform_of_one() {
    let p = even(2);
    let run = lattice_transform(p, 2, 1.0, 0.0, 0.0, default_config(p, 2, 1.0).unwrap(), HalfLine::Closed).unwrap();
    assert!((run.e_n - 1.0).norm() < 1e-10, "{}", run.e_n);
    assert!((run.e_n_product - 1.0).norm() < 1e-10);
}

/// `E_n(1, 0, 1)` of the Gaussian dyadic walk with exact steps, from the
/// Spitzer products with `P{X_k ≥ 0} = 1/2` (30-digit evaluation).
const EXACT_GAUSSIAN_WALK: [(u32, f64); 2] = [(4, 0.684419989375938320600846), (5, 0.695442833139791222690581)];

#[test]
fn gaussian_walk_transform() {
    let p = even(2);
    let closed = std::f64::consts::FRAC_1_SQRT_2;
    for (n, exact) in EXACT_GAUSSIAN_WALK {
        let config = default_config(p, n, 1.0).unwrap();
        let run = lattice_transform(p, n, 1.0, 0.0, 1.0, config, HalfLine::Closed).unwrap();
        assert!((run.e_closed.re - closed).abs() < 1e-15);
        // The lattice differs from the exact walk only through the origin node.
        assert!((run.e_n.re - exact).abs() < 0.5 * config.h, "n={n}: {} vs {exact}", run.e_n);
        assert!(run.e_n.im.abs() < 1e-12);
        assert!(run.assembly_gap < 1e-10);
    }
    // The dyadic walk itself is 3.2e−2 away from the limit at n = 4 and
    // 1.6e−2 at n = 5.
    let run = lattice_transform(p, 5, 1.0, 0.0, 1.0, default_config(p, 5, 1.0).unwrap(), HalfLine::Closed).unwrap();
    assert!(run.rel_err < 2e-2, "{}", run.rel_err);
}

#[test]
fn open_and_closed_half_lines_agree_to_grid_resolution() {
    for order in [2, 4] {
        let p = even(order);
        let config = default_config(p, 3, 1.0).unwrap();
        let a = lattice_transform(p, 3, 1.0, 0.5, 1.0, config, HalfLine::Closed).unwrap();
        let b = lattice_transform(p, 3, 1.0, 0.5, 1.0, config, HalfLine::Open).unwrap();
        let d = (a.e_n - b.e_n).norm();
        assert!(d < config.h, "N={order}: {d} vs h = {}", config.h);
        assert!(d > 0.0);
    }
}

#[test]
fn convergence_to_the_closed_form() {
    for order in [2, 4] {
        let p = even(order);
        let runs = convergence_study(p, &[2, 3, 4, 5], 1.0, 0.5, 1.0).unwrap();
        for w in runs.windows(2) {
            assert!(w[1].rel_err < w[0].rel_err, "N={order}: {} then {}", w[0].rel_err, w[1].rel_err);
        }
        for r in &runs {
            assert!(r.assembly_gap < 1e-10, "N={order} n={}: gap {}", r.n, r.assembly_gap);
            assert!(r.leakage <= r.budget);
        }
        assert!(runs[3].rel_err < convergence_tolerance(order), "N={order}: {}", runs[3].rel_err);
        let report = convergence_report(p, &[2, 3, 4, 5], 1.0, 0.5, 1.0);
        assert!(report.all_pass(), "{:#?}", report.failures());
    }
}

#[test]
fn leakage_is_detected() {
    let p = even(4);
    let config = LatticeConfig {
        h: 0.05,
        half_width: 12.0,
        k_max: 128,
    };
    let err = lattice_transform(p, 2, 1.0, 0.5, 1.0, config, HalfLine::Closed).unwrap_err();
    assert!(err.to_string().contains("leakage"), "{err}");
}

fn all_pass(walk: &[(f64, f64)], k: usize, mu: f64, nu: f64) {
    let r = spitzer_bruteforce(walk, k, mu, nu, Complex64::new(0.6, 0.2)).unwrap();
    assert_eq!(r.entries.len(), if nu > 0.0 { 3 } else { 1 });
    assert!(r.all_pass(), "{:#?}", r.failures());
}

#[test]
fn spitzer_symmetric_walk() {
    all_pass(&[(-1.0, 0.5), (1.0, 0.5)], 8, 0.7, 1.3);
}

#[test]
fn spitzer_asymmetric_walks() {
    all_pass(&[(-1.0, 0.7), (1.0, 0.3)], 8, 0.7, 1.3);
    all_pass(&[(-1.0, 0.3), (0.0, 0.45), (2.0, 0.25)], 6, -1.1, 0.4);
}

#[test]
fn spitzer_without_damping_is_the_log_series() {
    // ν = 0: E[e^{iμX_k}] = φ^k with φ = E[e^{iμξ}], and the first identity
    // reads Σ φ^k z^k = exp(Σ φ^k z^k/k) = 1/(1 − zφ).
    let walk = [(-1.0, 0.5), (1.0, 0.5)];
    let r = spitzer_bruteforce(&walk, 10, 0.7, 0.0, Complex64::new(0.5, -0.3)).unwrap();
    assert_eq!(r.entries.len(), 1);
    assert!(r.all_pass());
    let c = spitzer_coefficients(&walk, 10, 0.7, 0.0).unwrap();
    let phi = 0.7f64.cos();
    for (k, (l, r)) in c.lhs_joint.iter().zip(c.rhs_joint.iter()).enumerate() {
        assert!((l - phi.powi(k as i32)).norm() < 1e-14, "k={k}");
        assert!((r - phi.powi(k as i32)).norm() < 1e-14, "k={k}");
    }
}

#[test]
fn sojourn_counts_the_origin_as_nonnegative() {
    // Lazy walk: with the origin on the nonnegative side, one step of size 0
    // contributes e^{−ν} to the nonnegative coefficient of z^1.
    let c = spitzer_coefficients(&[(0.0, 1.0)], 3, 0.0, 0.5).unwrap();
    for k in 0..=3 {
        let want = (-0.5 * k as f64).exp();
        assert!((c.lhs_nonnegative[k] - want).norm() < 1e-15);
        assert!((c.rhs_nonnegative[k] - want).norm() < 1e-14);
        assert!(c.lhs_negative[k].norm() == 0.0 && c.rhs_negative[k].norm() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prop_spitzer_identities(
        v in prop::collection::vec(-3i32..=3, 2..=3),
        w in prop::collection::vec(0.05f64..1.0, 3),
        mu in -2.0f64..2.0,
        nu in 0.05f64..3.0,
    ) {
        let total: f64 = w[..v.len()].iter().sum();
        let walk: Vec<(f64, f64)> = v.iter().zip(w.iter()).map(|(&x, &p)| (x as f64, p / total)).collect();
        let r = spitzer_bruteforce(&walk, 6, mu, nu, Complex64::new(0.3, 0.4)).unwrap();
        prop_assert!(r.all_pass(), "{:?}", r.failures());
    }

    #[test]
    fn prop_step_is_a_bounded_linear_map(
        seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 11),
        nu in 0.0f64..5.0,
    ) {
        let mut s = build_lattice(even(4), 2, 0.05, 8.0).unwrap().with_nu(nu);
        let c = s.grid.m;
        for (i, (re, im)) in seed.iter().enumerate() {
            s.f[c - 5 + i] = Complex64::new(*re, *im);
        }
        let before = s.abs_mass();
        let mass = s.mass();
        let stats = s.step().unwrap();
        prop_assert!(stats.abs_mass <= s.rho_h * before * (1.0 + 1e-12));
        if nu == 0.0 {
            prop_assert!((s.mass() - mass).norm() < 1e-8);
        }
    }
}
