//! Validation entries and reports shared by every checking routine.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Serde adapter keeping non-finite floats (failed entries carry NaN/∞)
/// representable in JSON, which has no literal for them.
mod lossless {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(x: f64) -> Repr {
        if x.is_finite() {
            Repr::Num(x)
        } else if x.is_nan() {
            Repr::Text("NaN".into())
        } else if x > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> std::result::Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::custom(format!("unexpected float literal {other}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod complex {
        use super::*;

        pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
            [to_repr(z.re), to_repr(z.im)].serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
            let [re, im] = <[Repr; 2]>::deserialize(d)?;
            Ok(Complex64::new(from_repr(re)?, from_repr(im)?))
        }
    }
}

/// Tolerance tier of a check; the tier fixes which error metric is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    /// Finite algebra on unit-modulus roots (absolute error, 1e−11).
    Algebraic,
    /// Special-function cross-representation (1e−8 unless tighter).
    SpecialFunction,
    /// One adaptive quadrature (1e−6 unless tighter).
    SingleQuadrature,
    /// Nested quadratures and ladder rungs (1e−4 unless stated).
    NestedQuadrature,
    /// Lattice-oracle convergence (2e−2 – 5e−2).
    OracleConvergence,
    /// Exact enumeration (brute-force Spitzer).
    Enumeration,
}

/// Which error is compared against the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Absolute,
    Relative,
}

/// One named check: expected vs computed value, errors, verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub name: String,
    /// Where the checked statement comes from, or `"plumbing"`.
    pub anchor: String,
    #[serde(with = "lossless::complex")]
    pub expected: Complex64,
    #[serde(with = "lossless::complex")]
    pub computed: Complex64,
    #[serde(with = "lossless")]
    pub abs_err: f64,
    #[serde(with = "lossless")]
    pub rel_err: f64,
    #[serde(with = "lossless")]
    pub tolerance: f64,
    pub metric: Metric,
    pub tier: Tier,
    pub pass: bool,
    pub formal_odd: bool,
    /// Failure reason or auxiliary information.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ValidationEntry {
    /// Builds an entry and decides `pass` from the chosen metric.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        expected: Complex64,
        computed: Complex64,
        tolerance: f64,
        metric: Metric,
        tier: Tier,
    ) -> Self {
        let abs_err = (computed - expected).norm();
        let scale = expected.norm();
        let rel_err = if scale > 0.0 {
            abs_err / scale
        } else {
            abs_err
        };
        let err = match metric {
            Metric::Absolute => abs_err,
            Metric::Relative => rel_err,
        };
        ValidationEntry {
            name: name.into(),
            anchor: anchor.into(),
            expected,
            computed,
            abs_err,
            rel_err,
            tolerance,
            metric,
            tier,
            pass: err <= tolerance && err.is_finite(),
            formal_odd: false,
            note: None,
        }
    }

    /// Absolute-error entry for real values.
    pub fn abs(
        name: impl Into<String>,
        anchor: impl Into<String>,
        expected: f64,
        computed: f64,
        tolerance: f64,
        tier: Tier,
    ) -> Self {
        Self::new(
            name,
            anchor,
            Complex64::new(expected, 0.0),
            Complex64::new(computed, 0.0),
            tolerance,
            Metric::Absolute,
            tier,
        )
    }

    /// Relative-error entry for real values.
    pub fn rel(
        name: impl Into<String>,
        anchor: impl Into<String>,
        expected: f64,
        computed: f64,
        tolerance: f64,
        tier: Tier,
    ) -> Self {
        Self::new(
            name,
            anchor,
            Complex64::new(expected, 0.0),
            Complex64::new(computed, 0.0),
            tolerance,
            Metric::Relative,
            tier,
        )
    }

    /// Entry recording a computation that raised an error.
    pub fn failed(
        name: impl Into<String>,
        anchor: impl Into<String>,
        tolerance: f64,
        tier: Tier,
        reason: impl Into<String>,
    ) -> Self {
        ValidationEntry {
            name: name.into(),
            anchor: anchor.into(),
            expected: Complex64::new(f64::NAN, 0.0),
            computed: Complex64::new(f64::NAN, 0.0),
            abs_err: f64::INFINITY,
            rel_err: f64::INFINITY,
            tolerance,
            metric: Metric::Absolute,
            tier,
            pass: false,
            formal_odd: false,
            note: Some(reason.into()),
        }
    }

    /// Marks the entry as a formally computed odd-order result.
    pub fn formal(mut self, formal_odd: bool) -> Self {
        self.formal_odd = formal_odd;
        self
    }

    /// Attaches a note.
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Pass/fail counts of a report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Failures among entries flagged `formal_odd` (do not affect the exit code).
    pub failed_formal: usize,
}

/// Ordered collection of validation entries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    /// Empty report.
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one entry.
    pub fn push(&mut self, e: ValidationEntry) {
        self.entries.push(e);
    }

    /// Appends all entries of another report.
    pub fn merge(&mut self, other: ValidationReport) {
        self.entries.extend(other.entries);
    }

    /// Sorts entries by name (stable), giving a deterministic merge order.
    pub fn sort(&mut self) {
        self.entries.sort_by(|a, b| a.name.cmp(&b.name));
    }

    /// Marks every entry as formal.
    pub fn mark_formal(&mut self, formal_odd: bool) {
        if formal_odd {
            for e in &mut self.entries {
                e.formal_odd = true;
            }
        }
    }

    /// Counts of passed and failed entries.
    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            total: self.entries.len(),
            ..Default::default()
        };
        for e in &self.entries {
            if e.pass {
                s.passed += 1;
            } else {
                s.failed += 1;
                if e.formal_odd {
                    s.failed_formal += 1;
                }
            }
        }
        s
    }

    /// True when every non-formal entry passes.
    pub fn all_rigorous_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass || e.formal_odd)
    }

    /// True when every entry passes.
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    /// Entries whose name contains `pattern`.
    pub fn filter(&self, pattern: &str) -> ValidationReport {
        ValidationReport {
            entries: self
                .entries
                .iter()
                .filter(|e| e.name.contains(pattern))
                .cloned()
                .collect(),
        }
    }

    /// Failed entries.
    pub fn failures(&self) -> Vec<&ValidationEntry> {
        self.entries.iter().filter(|e| !e.pass).collect()
    }
}
