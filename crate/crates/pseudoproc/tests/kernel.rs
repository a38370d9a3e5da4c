//! Kernel values against independent high-precision quadrature, mass
//! identities, and the log-Laplace identities.

use std::f64::consts::PI;

use proptest::prelude::*;
use pseudoproc::kernel::*;
use pseudoproc::root_algebra::{PseudoParams, RootSystem};

fn ke(n: usize, kappa: Option<i8>) -> KernelEval {
    KernelEval::new(PseudoParams::new(n, kappa).unwrap())
}

/// `(1/π)∫_0^∞ e^{−μ^N} cos(μx) dμ` at 30 digits.
const FROZEN_P: &[(usize, f64, f64)] = &[
    (4, 1.0, 0.2426650945641037206867865),
    (4, 2.5, 0.07947859779170733614911835),
    (6, 1.0, 0.2507143994636543279033274),
    (6, 3.0, 0.03133487190285192144392835),
];

#[test]
fn even_kernel_matches_frozen_values() {
    for &(n, x, want) in FROZEN_P {
        let got = ke(n, None).heat_kernel(1.0, x).unwrap();
        assert!((got - want).abs() < 1e-12, "N={n} x={x}: {got}");
    }
    let got = ke(2, None).heat_kernel(1.0, 1.0).unwrap();
    assert!((got - (-0.25f64).exp() / (2.0 * PI.sqrt())).abs() < 1e-13);
}

#[test]
fn origin_values() {
    for n in [2, 4, 6] {
        let k = ke(n, None);
        for t in [0.5f64, 1.0, 2.0] {
            let want = libm::tgamma(1.0 / n as f64) / (n as f64 * PI * t.powf(1.0 / n as f64));
            assert!((k.heat_kernel(t, 0.0).unwrap() - want).abs() < 1e-12 * want);
        }
    }
}

#[test]
fn total_mass_and_sign_masses() {
    for n in [2, 4, 6] {
        let k = ke(n, None);
        let rs = RootSystem::new(k.params).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let (pos, neg) = k.sign_masses(t).unwrap();
            assert!((pos + neg - 1.0).abs() < 1e-8, "N={n} t={t}");
            assert!((pos - rs.nj() as f64 / n as f64).abs() < 1e-8);
        }
    }
}

#[test]
fn odd_order_sign_masses_are_formal_ratios() {
    for (n, kappa) in [(3, 1), (3, -1), (5, 1)] {
        let k = ke(n, Some(kappa));
        let rs = RootSystem::new(k.params).unwrap();
        let (pos, neg) = k.sign_masses(1.0).unwrap();
        assert!((pos - rs.nj() as f64 / n as f64).abs() < 1e-8, "N={n} κ={kappa}: {pos}");
        assert!((neg - rs.nk() as f64 / n as f64).abs() < 1e-8);
    }
}

#[test]
fn absolute_mass() {
    assert!((ke(2, None).abs_mass(1.0).unwrap() - 1.0).abs() < 1e-9);
    // 30-digit quadrature between the sign changes of p(1;·).
    let rho4 = 1.23729438545937996;
    let k = ke(4, None);
    let r1 = k.abs_mass(1.0).unwrap();
    let r2 = k.abs_mass(2.0).unwrap();
    assert!((r1 - rho4).abs() < 1e-8, "{r1}");
    assert!((r1 - r2).abs() < 1e-8, "{r1} vs {r2}");
    assert!(ke(3, Some(-1)).abs_mass(1.0).unwrap().is_infinite());
}

#[test]
fn chapman_kolmogorov() {
    for n in [2, 4] {
        let k = ke(n, None);
        for x in [0.0, 0.7, -1.6] {
            let conv = k.chapman_kolmogorov(0.4, 1.0, x).unwrap();
            let direct = k.heat_kernel(1.0, x).unwrap();
            assert!((conv - direct).abs() < 1e-5, "N={n} x={x}: {conv} vs {direct}");
        }
    }
}

#[test]
fn log_laplace_identities() {
    for n in [2, 4] {
        let rs = RootSystem::from_order(n, None).unwrap();
        let c = log_laplace_check(&rs, 1.0, 1.0).unwrap();
        assert!((c.numeric_j - c.closed_j).norm() < 1e-4, "N={n}: {c:?}");
        assert!((c.numeric_k - c.closed_k).norm() < 1e-4, "N={n}: {c:?}");
    }
}

#[test]
fn cubic_kernels_mirror_each_other() {
    let (up, down) = (ke(3, Some(1)), ke(3, Some(-1)));
    for x in [-2.0, -0.5, 0.0, 0.8, 1.7] {
        let a = up.heat_kernel(1.0, x).unwrap();
        let b = down.heat_kernel(1.0, -x).unwrap();
        assert!((a - b).abs() < 1e-11, "x={x}: {a} vs {b}");
    }
}

#[test]
fn invariant_report_passes_for_even_orders() {
    for n in [2, 4] {
        let rep = kernel_invariants(PseudoParams::even(n).unwrap());
        assert!(rep.all_pass(), "{:#?}", rep.failures());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn prop_even_kernel_is_symmetric(n in prop::sample::select(vec![2usize, 4, 6]), t in 0.2f64..3.0, x in 0.0f64..4.0) {
        let k = ke(n, None);
        let a = k.heat_kernel(t, x).unwrap();
        let b = k.heat_kernel(t, -x).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn prop_self_similarity(n in prop::sample::select(vec![2usize, 4, 6]), t in 0.2f64..3.0, x in -4.0f64..4.0) {
        let k = ke(n, None);
        let s = t.powf(-1.0 / n as f64);
        let a = k.heat_kernel(t, x).unwrap();
        let b = s * k.heat_kernel(1.0, s * x).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
    }
}
