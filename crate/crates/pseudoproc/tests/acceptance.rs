//! Acceptance criteria of the whole stack, one PASS/FAIL line per criterion.
//!
//! The ledger (all orders) and the ladder (`N ∈ {2, 4}` plus the formal
//! `N = 3`) are computed once and shared by the criteria that read them. The
//! lines are written straight to standard error so that they appear in the
//! test log even when the test passes.

use std::io::Write as _;
use std::process::Command;

use pseudoproc::discrete_oracle::{convergence_report, spitzer_bruteforce, SPITZER_TOLERANCE};
use pseudoproc::report::{ValidationEntry, ValidationReport};
use pseudoproc::root_algebra::{PseudoParams, RootSystem, ALGEBRAIC_TOL};
use pseudoproc::transform_stack::{
    brownian, default_quadrature, level2_mu_inverted, level3_nu_inverted, level4_joint_density,
};
use pseudoproc::validation::{default_spec, exit_code, run_ladder, run_ledger, ReportDocument, LADDER_MANIFEST};
use pseudoproc::Complex64;

/// Orders of the algebraic ledger.
const LEDGER_ORDERS: [usize; 8] = [2, 3, 4, 5, 6, 7, 8, 10];
/// Orders of the Spitzer factorisation grid.
const SPITZER_ORDERS: [&str; 5] = ["N2", "N3κ+1", "N3κ-1", "N4", "N6"];

const LEVEL2_REGRESSION_TOL: f64 = 1e-12;
const LEVEL3_REGRESSION_TOL: f64 = 1e-10;
const LEVEL4_REGRESSION_TOL: f64 = 1e-5;
const ORACLE_LEVELS: [u32; 4] = [2, 3, 4, 5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn emit(id: u32, title: &str, o: &Outcome) {
    let line = format!(
        "acceptance criterion {id:>2} {} — {title}: {}\n",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn select(r: &ValidationReport, pred: impl Fn(&ValidationEntry) -> bool) -> Vec<&ValidationEntry> {
    r.entries.iter().filter(|e| pred(e)).collect()
}

/// All entries pass, there is at least one, and each tolerance is within
/// `max_tol`; the detail names the first failure or the worst error.
fn all_pass(entries: &[&ValidationEntry], max_tol: f64) -> Outcome {
    if entries.is_empty() {
        return outcome(false, "no entries");
    }
    if let Some(e) = entries.iter().find(|e| !e.pass) {
        return outcome(false, format!("{} failed: err {:e}/{:e} tol {:e} {:?}", e.name, e.abs_err, e.rel_err, e.tolerance, e.note));
    }
    // Sweep entries scale the tolerance by the magnitude of the value and
    // report the worst point; the cap applies to the others.
    let is_sweep = |e: &ValidationEntry| e.note.as_deref().is_some_and(|n| n.starts_with("worst of"));
    if let Some(e) = entries.iter().find(|e| e.tolerance > max_tol && !is_sweep(e)) {
        return outcome(false, format!("{} has tolerance {:e} > {max_tol:e}", e.name, e.tolerance));
    }
    let worst = entries.iter().map(|e| e.abs_err.min(e.rel_err)).fold(0.0, f64::max);
    outcome(true, format!("{} entries, worst error {worst:.2e}", entries.len()))
}

fn merge(outcomes: Vec<Outcome>) -> Outcome {
    let pass = outcomes.iter().all(|o| o.pass);
    let detail = outcomes.iter().map(|o| o.detail.as_str()).collect::<Vec<_>>().join("; ");
    outcome(pass, detail)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn algebraic_ledger(ledger: &ValidationReport) -> Outcome {
    let families = [
        "root_sums",
        "factorisation[4]",
        "j_root_sum.closed",
        "k_expansion",
        "vanishing_sums",
        "partial_fractions.J.product[4]",
        "partial_fractions.K.product[4]",
        "reciprocity",
        "beta_table.beta_nk",
        "beta_table.beta_nk1",
        "alpha_table",
        "products",
        "sigma_beta",
    ];
    let roots = select(ledger, |e| e.name.starts_with("roots["));
    let mut missing = Vec::new();
    for n in LEDGER_ORDERS {
        let kappas: Vec<i8> = if n % 2 == 0 { vec![PseudoParams::even_kappa(n)] } else { vec![1, -1] };
        for k in kappas {
            let prefix = format!("roots[N={n},κ={k:+}].");
            for f in families {
                if !roots.iter().any(|e| e.name.starts_with(&prefix) && e.name.contains(f)) {
                    missing.push(format!("{prefix}{f}"));
                }
            }
        }
    }
    if !missing.is_empty() {
        return outcome(false, format!("missing identities: {missing:?}"));
    }
    all_pass(&roots, ALGEBRAIC_TOL)
}

fn spitzer_enumeration() -> Outcome {
    let z = Complex64::new(0.4, 0.2);
    let symmetric = spitzer_bruteforce(&[(1.0, 0.5), (-1.0, 0.5)], 8, 0.7, 0.3, z);
    let three_point = spitzer_bruteforce(&[(-1.0, 0.3), (0.0, 0.2), (2.0, 0.5)], 6, -1.1, 0.8, z);
    match (symmetric, three_point) {
        (Ok(a), Ok(b)) => {
            let mut r = a;
            r.merge(b);
            let entries = select(&r, |_| true);
            if entries.len() != 6 {
                return outcome(false, format!("expected three identities per walk, got {}", entries.len()));
            }
            all_pass(&entries, SPITZER_TOLERANCE.max(1e-12))
        }
        (Err(e), _) | (_, Err(e)) => outcome(false, e.to_string()),
    }
}

fn spitzer_grid(ledger: &ValidationReport) -> Outcome {
    merge(
        SPITZER_ORDERS
            .iter()
            .map(|tag| {
                let prefix = format!("spitzer/{tag}/");
                let e = select(ledger, |e| e.name.starts_with(&prefix));
                if e.len() != 125 {
                    return outcome(false, format!("{tag}: {} grid points, expected 125", e.len()));
                }
                let o = all_pass(&e, 1e-12);
                outcome(o.pass, format!("{tag}: {}", o.detail))
            })
            .collect(),
    )
}

fn gaussian_regressions() -> Outcome {
    let rs = RootSystem::from_order(2, None).unwrap();
    let mut worst2: f64 = 0.0;
    let mut worst3: f64 = 0.0;
    let mut worst4: f64 = 0.0;
    for (lambda, nu) in [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)] {
        for x in [-1.5, -0.3, 0.0, 0.4, 2.0] {
            let got = level2_mu_inverted(&rs, lambda, nu, x).unwrap();
            let want = brownian::level2(lambda, nu, x);
            worst2 = worst2.max((got - Complex64::new(want, 0.0)).norm() / want.abs());
        }
        for s in [0.3, 1.0, 2.5] {
            for x in [-2.0, -0.5, 0.0] {
                let got = level3_nu_inverted(&rs, lambda, s, x).unwrap();
                worst3 = worst3.max(rel(got, brownian::level3(lambda, s, x)));
            }
        }
    }
    let spec = default_quadrature();
    let mut points = 0;
    for s in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for x in [-1.0, -0.2, 0.3, 1.2] {
            let got = level4_joint_density(&rs, 1.0, s, x).unwrap();
            worst4 = worst4.max(rel(got, brownian::level4(1.0, s, x, &spec).unwrap()));
            points += 1;
        }
    }
    outcome(
        worst2 <= LEVEL2_REGRESSION_TOL && worst3 <= LEVEL3_REGRESSION_TOL && worst4 <= LEVEL4_REGRESSION_TOL && points == 20,
        format!("level 2 rel {worst2:.2e} (≤ 1e−12), level 3 rel {worst3:.2e} (≤ 1e−10), level 4 rel {worst4:.2e} over {points} points (≤ 1e−5)"),
    )
}

fn marginals(ledger: &ValidationReport, ladder: &ValidationReport) -> Outcome {
    let even = |e: &ValidationEntry| !e.formal_odd;
    let sojourn = select(ladder, |e| even(e) && (e.name.contains("/sojourn_nonpositive/") || e.name.contains("/sojourn_nonnegative/")));
    let norm = select(ladder, |e| even(e) && e.name.contains("/normalisation/"));
    let total = select(ledger, |e| e.name.starts_with("marginal/sojourn_total/"));
    let masses = select(ledger, |e| even(e) && e.name.contains(".sign_mass."));
    let parts = [("sojourn by sign", sojourn, 1e-4), ("normalisation", norm, 1e-3), ("sojourn total", total, 1e-10), ("sign masses", masses, 1e-8)];
    merge(
        parts
            .into_iter()
            .map(|(label, e, tol)| {
                let o = all_pass(&e, tol);
                outcome(o.pass, format!("{label}: {}", o.detail))
            })
            .collect(),
    )
}

fn uniform_law(ladder: &ValidationReport) -> Outcome {
    let e = select(ladder, |e| (e.name.starts_with("ladder/N2/") || e.name.starts_with("ladder/N4/")) && e.name.contains("/uniform_origin/"));
    if e.len() != 6 {
        return outcome(false, format!("expected 6 entries, got {}", e.len()));
    }
    all_pass(&e, 1e-4)
}

fn consistency_ladder(ladder: &ValidationReport) -> Outcome {
    let rung = |e: &ValidationEntry| e.name.contains("_to_level");
    let rigorous = select(ladder, |e| rung(e) && !e.formal_odd);
    let expected = 2 * LADDER_MANIFEST.len() * 3;
    if rigorous.len() != expected {
        return outcome(false, format!("expected {expected} rigorous rungs, got {}", rigorous.len()));
    }
    let main = all_pass(&rigorous, 1e-4);
    let formal = select(ladder, |e| rung(e) && e.formal_odd);
    let formal_ok = formal.iter().filter(|e| e.pass).count();
    let worst = formal.iter().map(|e| e.rel_err).fold(0.0, f64::max);
    outcome(
        main.pass && !formal.is_empty() && formal.iter().all(|e| e.formal_odd && !e.name.contains("level4")),
        format!("N ∈ {{2, 4}}: {}; formal N = 3 (L3→L2→L1): {formal_ok}/{} within 1e−4, worst {worst:.2e}", main.detail, formal.len()),
    )
}

fn oracle_convergence() -> Outcome {
    merge(
        [2usize, 4]
            .into_iter()
            .map(|n| {
                let r = convergence_report(PseudoParams::new(n, None).unwrap(), &ORACLE_LEVELS, 1.0, 0.5, 1.0);
                // Per-level errors are recorded without a bound; the final
                // level carries the threshold and the assemblies must agree.
                let e = select(&r, |_| true);
                let bounded = select(&r, |e| e.name.ends_with("/final") || e.name.contains("/assembly/"));
                let thresholds_ok = bounded.iter().all(|e| {
                    if e.name.ends_with("/final") {
                        e.tolerance == if n == 2 { 2e-2 } else { 5e-2 }
                    } else {
                        e.tolerance <= 1e-10
                    }
                });
                let o = all_pass(&e, f64::INFINITY);
                let final_err = e.iter().find(|e| e.name.ends_with("/final")).map_or(f64::NAN, |e| e.rel_err);
                let trace = e
                    .iter()
                    .find(|e| e.name.ends_with("/decreasing"))
                    .and_then(|e| e.note.clone())
                    .unwrap_or_default();
                let detail = if o.pass {
                    format!("N{n}: final rel err {final_err:.3e}, {trace}")
                } else {
                    format!("N{n}: {}", o.detail)
                };
                outcome(o.pass && thresholds_ok && bounded.len() == ORACLE_LEVELS.len() + 1, detail)
            })
            .collect(),
    )
}

fn special_functions(ledger: &ValidationReport) -> Outcome {
    let groups = [
        ("Mittag-Leffler", "special_functions/mittag_leffler/", 1e-10),
        ("Scorer", "special_functions/scorer/", 1e-12),
        ("I_{j,m} closed forms", "special_functions/kernel_i/closed_form/", 1e-8),
        ("I_{j,m} origin", "special_functions/kernel_i/origin/", 1e-10),
        ("I_{j,m} Laplace", "special_functions/kernel_i/laplace/", 1e-6),
        ("I_{j,m} Laplace per root", "kernel_i_laplace/", 1e-6),
        ("Gamma substitution", "quadrature/gamma_substitution/", 1e-12),
        ("Erfc integrals", "erfc_identities/", 1e-8),
    ];
    merge(
        groups
            .into_iter()
            .map(|(label, prefix, tol)| {
                let e = select(ledger, |e| e.name.starts_with(prefix));
                let o = all_pass(&e, tol);
                let negative_m = prefix.ends_with("laplace/") && !e.iter().any(|e| e.name.contains("/m-"));
                outcome(o.pass && !negative_m, format!("{label}: {}", o.detail))
            })
            .collect(),
    )
}

fn run_binary(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_pseudoproc"))
        .args(args)
        .env("PSEUDOPROC_THREADS", "2")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism_and_formats() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for args in [
        &["density", "--order", "4", "--grid-h", "0.5", "--grid-L", "1"][..],
        &["marginal", "--order", "2", "--format", "csv"][..],
        &["validate", "--order", "2", "--check", "marginal/"][..],
    ] {
        let (c1, o1) = run_binary(args);
        let (c2, o2) = run_binary(args);
        let same = c1 == 0 && c2 == 0 && o1 == o2 && !o1.is_empty();
        pass &= same;
        notes.push(format!("`{}` byte-identical: {same}", args[0]));
    }
    let (_, csv) = run_binary(&["marginal", "--order", "2", "--format", "csv"]);
    let csv = String::from_utf8(csv).unwrap_or_default();
    let csv_ok = csv.starts_with("t,s,density,") && !csv.contains('\r') && csv.lines().skip(1).all(|l| {
        l.split(',').all(|c| c.parse::<f64>().is_ok() && c.trim_start_matches('-').split('e').next().is_some_and(|m| m.len() == 18))
    });
    pass &= csv_ok;
    notes.push(format!("CSV format: {csv_ok}"));

    let (code, json) = run_binary(&["validate", "--order", "3", "--kappa", "-1", "--check", "forms/level3-right"]);
    let doc = ReportDocument::from_json(&String::from_utf8(json).unwrap_or_default());
    let formal_ok = code == 0
        && doc.as_ref().is_ok_and(|d| {
            d.summary.failed > 0 && d.summary.failed == d.summary.failed_formal && d.entries.iter().all(|e| e.formal_odd)
        });
    pass &= formal_ok;
    notes.push(format!("formal failures exit 0: {formal_ok}"));

    let rigorous_failure = doc.is_ok_and(|d| {
        let mut r = d.report();
        for e in &mut r.entries {
            e.formal_odd = false;
        }
        exit_code(&r) == 1
    });
    pass &= rigorous_failure;
    notes.push(format!("rigorous failure exit 1: {rigorous_failure}"));

    let (usage, _) = run_binary(&["roots", "--order", "4", "--kappa", "1"]);
    let (unknown, _) = run_binary(&["roots", "--no-such-flag"]);
    pass &= usage == 2 && unknown == 2;
    notes.push(format!("usage errors exit 2: {}", usage == 2 && unknown == 2));
    outcome(pass, notes.join(", "))
}

#[test]
fn acceptance_criteria() {
    let spec = default_spec();
    let ledger = run_ledger(&LEDGER_ORDERS, &[1, -1], &spec).expect("ledger runs");
    let mut ladder = ValidationReport::new();
    for params in [PseudoParams::new(2, None), PseudoParams::new(4, None), PseudoParams::new(3, Some(1))] {
        ladder.merge(run_ladder(params.unwrap(), 1.0, &LADDER_MANIFEST, &spec).expect("ladder runs"));
    }

    let results = [
        (1, "algebraic ledger, N ∈ {2,…,8,10}", algebraic_ledger(&ledger)),
        (2, "Spitzer brute force", spitzer_enumeration()),
        (3, "Spitzer factorisation grid", spitzer_grid(&ledger)),
        (4, "closed-form regression, N = 2", gaussian_regressions()),
        (5, "marginals", marginals(&ledger, &ladder)),
        (6, "conditional uniform law", uniform_law(&ladder)),
        (7, "consistency ladder", consistency_ladder(&ladder)),
        (8, "lattice oracle convergence", oracle_convergence()),
        (9, "special-function suite", special_functions(&ledger)),
        (10, "determinism and formats", determinism_and_formats()),
    ];
    for (id, title, o) in &results {
        emit(*id, title, o);
    }
    let failed: Vec<u32> = results.iter().filter(|(_, _, o)| !o.pass).map(|(id, _, _)| *id).collect();
    assert!(failed.is_empty(), "failed acceptance criteria: {failed:?}");
}
