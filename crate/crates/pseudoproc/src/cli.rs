//! Command-line front end.
//!
//! Every subcommand computes a table or a report, renders it as CSV or JSON
//! and writes it once, to `--out` or standard output. Exit codes: `0` success,
//! `1` validation failure or numerical error, `2` usage error (unknown flags,
//! missing subcommand-specific flags, invalid `(N, κ)`).
//!
//! CSV tables have a header row, LF line endings and every number written
//! with 17 significant digits, so values round-trip exactly. JSON documents
//! embed the effective configuration.

use std::ffi::OsString;
use std::io::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::discrete_oracle::{convergence_study, default_config, lattice_transform, HalfLine, OracleRun};
use crate::error::Error;
use crate::kernel::KernelEval;
use crate::root_algebra::{PseudoParams, RootSystem};
use crate::transform_stack::{
    level2_mu_inverted, level3_nu_inverted, level4_joint_density, marginal_sojourn, marginal_sojourn_signed,
    triple_transform, DensityGrid, S_CLIP,
};
use crate::validation::{run_validation, ValidationConfig};
use crate::Complex64;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PSEUDOPROC_THREADS";

/// Dyadic levels of the oracle convergence study when `--level` is absent.
pub const ORACLE_LEVELS: [u32; 4] = [2, 3, 4, 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Roots of κ_N, the J/K split, A/B coefficients and α/β tables.
    Roots,
    /// The signed kernel p(t; x) at --x or on the grid [−L, L] with step h.
    Kernel,
    /// One transform level at a point: --level 1 E(λ,μ,ν), 2 (λ,ν,x), 3 (λ,s,x), 4 (t,s,x).
    Transform,
    /// Joint density (level 4, default) or level 3 on an s × x grid.
    Density,
    /// Sojourn-time density of T(t), at --s or on a grid of s.
    Marginal,
    /// Lattice oracle E_n against the closed-form transform.
    Oracle,
    /// Identity ledger and consistency ladder; --order accepts a list.
    Validate,
}

/// Sojourn time and position of the order-N heat-type pseudo-process.
#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "pseudoproc", version, about)]
pub struct Cli {
    #[command(subcommand)]
    #[serde(rename = "subcommand")]
    pub command: Command,
    /// Order N of the equation; a comma-separated list for `validate`.
    #[arg(long = "order", global = true, value_delimiter = ',', default_value = "2")]
    pub order: Vec<usize>,
    /// Sign κ_N: derived for even N, required (+1 or −1) for odd N outside `validate`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<i8>,
    /// Time horizon t.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub t: f64,
    /// Sojourn time s, 0 < s < t.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Position x.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Laplace variable dual to t.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Fourier variable dual to x.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Laplace variable dual to s.
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    /// Transform level (1–4) or, for `oracle`, the dyadic level n.
    #[arg(long, global = true)]
    pub level: Option<u32>,
    /// Oracle: number of lattice steps.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Grid spacing (x grid, or the oracle lattice).
    #[arg(long = "grid-h", global = true)]
    pub grid_h: Option<f64>,
    /// Grid half-width (x grid, or the oracle lattice).
    #[arg(long = "grid-L", global = true)]
    pub grid_l: Option<f64>,
    /// Output format; JSON by default except for `kernel` and `density`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<std::path::PathBuf>,
    /// `validate`: keep only entries whose name contains NAME.
    #[arg(long, global = true, value_name = "NAME")]
    pub check: Option<String>,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(m) => Failure::Usage(m),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Rendered output plus the exit code it carries.
struct Output {
    text: String,
    code: i32,
}

/// 17 significant digits: every `f64` round-trips.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct Csv {
    text: String,
}

impl Csv {
    fn new(header: &[&str]) -> Self {
        Csv { text: header.join(",") + "\n" }
    }

    fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

impl Cli {
    fn format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Command::Kernel | Command::Density => Format::Csv,
            _ => Format::Json,
        })
    }

    fn single_order(&self) -> CliResult<usize> {
        match self.order.as_slice() {
            [n] => Ok(*n),
            _ => Err(Failure::Usage("this subcommand takes a single --order".into())),
        }
    }

    fn params(&self) -> CliResult<PseudoParams> {
        let n = self.single_order()?;
        PseudoParams::new(n, self.kappa).map_err(|e| {
            Failure::Usage(format!(
                "{e}\n(N, κ) must satisfy the even-N constraint κ_N = (−1)^(1+N/2); odd N takes --kappa 1 or --kappa -1"
            ))
        })
    }

    fn require(&self, name: &str, v: Option<f64>) -> CliResult<f64> {
        v.ok_or_else(|| Failure::Usage(format!("`{}` needs --{name}", self.command_name())))
    }

    fn command_name(&self) -> &'static str {
        match self.command {
            Command::Roots => "roots",
            Command::Kernel => "kernel",
            Command::Transform => "transform",
            Command::Density => "density",
            Command::Marginal => "marginal",
            Command::Oracle => "oracle",
            Command::Validate => "validate",
        }
    }

    /// x nodes: `--x` alone, or `[−L, L]` with step `h`.
    fn x_nodes(&self) -> CliResult<Vec<f64>> {
        if let Some(x) = self.x {
            return Ok(vec![x]);
        }
        let h = self.grid_h.unwrap_or(0.25);
        let l = self.grid_l.unwrap_or(3.0);
        if !(h > 0.0 && l >= 0.0 && l / h <= 1e6) {
            return Err(Failure::Usage(format!("invalid grid: --grid-h {h}, --grid-L {l}")));
        }
        let m = (l / h + 1e-9).floor() as i64;
        Ok((-m..=m).map(|i| i as f64 * h).collect())
    }

    /// s nodes: `--s` alone, or `t·k/10`, `k = 1..=9`.
    fn s_nodes(&self, t: f64) -> Vec<f64> {
        match self.s {
            Some(s) => vec![s],
            None => (1..=9).map(|k| t * k as f64 / 10.0).collect(),
        }
    }

    fn effective_config(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("configuration serialises");
        v["format"] = json!(self.format());
        v
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn json_output(cli: &Cli, body: Value) -> String {
    let doc = json!({ "config": cli.effective_config(), "result": body });
    serde_json::to_string_pretty(&doc).expect("output serialises") + "\n"
}

fn roots(cli: &Cli) -> CliResult<Output> {
    let rs = RootSystem::new(cli.params()?)?;
    let n = rs.n() as i64;
    let span: Vec<i64> = (-n..=2 * n).collect();
    let text = match cli.format() {
        Format::Json => {
            let table = |f: &dyn Fn(i64) -> Complex64| -> Vec<Value> {
                span.iter().map(|&m| json!({ "m": m, "value": complex_json(f(m)) })).collect()
            };
            let list = |v: &[Complex64]| -> Vec<Value> { v.iter().map(|&z| complex_json(z)).collect() };
            json_output(
                cli,
                json!({
                    "N": rs.n(),
                    "kappa": rs.params.kappa,
                    "formal_odd": rs.params.formal_odd,
                    "theta": list(&rs.theta),
                    "J": rs.j_idx,
                    "K": rs.k_idx,
                    "theta_J": list(&rs.j_roots()),
                    "theta_K": list(&rs.k_roots()),
                    "A": list(&rs.a),
                    "B": list(&rs.b),
                    "sigma": list(&rs.sigma),
                    "alpha": table(&|m| rs.alpha(m)),
                    "beta": table(&|m| rs.beta(m)),
                }),
            )
        }
        Format::Csv => {
            let mut csv = Csv::new(&["table", "index", "re", "im"]);
            let mut put = |name: &str, idx: i64, z: Complex64| {
                csv.row(&[name.to_string(), idx.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
            };
            for (i, &z) in rs.theta.iter().enumerate() {
                put("theta", i as i64, z);
            }
            for (i, &z) in rs.j_roots().iter().enumerate() {
                put("theta_J", i as i64, z);
            }
            for (i, &z) in rs.k_roots().iter().enumerate() {
                put("theta_K", i as i64, z);
            }
            for (i, &z) in rs.a.iter().enumerate() {
                put("A", i as i64, z);
            }
            for (i, &z) in rs.b.iter().enumerate() {
                put("B", i as i64, z);
            }
            for (i, &z) in rs.sigma.iter().enumerate() {
                put("sigma", i as i64, z);
            }
            for &m in &span {
                put("alpha", m, rs.alpha(m));
            }
            for &m in &span {
                put("beta", m, rs.beta(m));
            }
            csv.text
        }
    };
    Ok(Output { text, code: 0 })
}

fn kernel(cli: &Cli) -> CliResult<Output> {
    let k = KernelEval::new(cli.params()?);
    let xs = cli.x_nodes()?;
    let values = xs.iter().map(|&x| k.heat_kernel(cli.t, x)).collect::<crate::Result<Vec<f64>>>()?;
    let text = match cli.format() {
        Format::Csv => {
            let mut csv = Csv::new(&["t", "x", "p"]);
            for (&x, &p) in xs.iter().zip(&values) {
                csv.row(&[fmt_f64(cli.t), fmt_f64(x), fmt_f64(p)]);
            }
            csv.text
        }
        Format::Json => {
            let rows: Vec<Value> = xs.iter().zip(&values).map(|(&x, &p)| json!({ "x": x, "p": p })).collect();
            json_output(cli, json!({ "t": cli.t, "p_at_zero": k.p_at_zero(cli.t), "values": rows }))
        }
    };
    Ok(Output { text, code: 0 })
}

fn transform(cli: &Cli) -> CliResult<Output> {
    let rs = RootSystem::new(cli.params()?)?;
    let level = cli.level.unwrap_or(1);
    let (args, value): (Vec<(&str, f64)>, Complex64) = match level {
        1 => {
            let (l, m, n) = (cli.require("lambda", cli.lambda)?, cli.require("mu", cli.mu)?, cli.require("nu", cli.nu)?);
            (vec![("lambda", l), ("mu", m), ("nu", n)], triple_transform(&rs, l, m, n)?)
        }
        2 => {
            let (l, n, x) = (cli.require("lambda", cli.lambda)?, cli.require("nu", cli.nu)?, cli.require("x", cli.x)?);
            (vec![("lambda", l), ("nu", n), ("x", x)], level2_mu_inverted(&rs, l, n, x)?)
        }
        3 => {
            let (l, s, x) = (cli.require("lambda", cli.lambda)?, cli.require("s", cli.s)?, cli.require("x", cli.x)?);
            (vec![("lambda", l), ("s", s), ("x", x)], Complex64::new(level3_nu_inverted(&rs, l, s, x)?, 0.0))
        }
        4 => {
            let (s, x) = (cli.require("s", cli.s)?, cli.require("x", cli.x)?);
            (
                vec![("t", cli.t), ("s", s), ("x", x)],
                Complex64::new(level4_joint_density(&rs, cli.t, s, x)?, 0.0),
            )
        }
        other => return Err(Failure::Usage(format!("--level must be 1, 2, 3 or 4, got {other}"))),
    };
    let text = match cli.format() {
        Format::Json => {
            let mut point = serde_json::Map::new();
            for (k, v) in &args {
                point.insert(k.to_string(), json!(v));
            }
            json_output(cli, json!({ "level": level, "point": point, "value": complex_json(value) }))
        }
        Format::Csv => {
            let mut header: Vec<&str> = args.iter().map(|(k, _)| *k).collect();
            header.extend(["re", "im"]);
            let mut csv = Csv::new(&header);
            let mut cells: Vec<String> = args.iter().map(|&(_, v)| fmt_f64(v)).collect();
            cells.extend([fmt_f64(value.re), fmt_f64(value.im)]);
            csv.row(&cells);
            csv.text
        }
    };
    Ok(Output { text, code: 0 })
}

fn density(cli: &Cli) -> CliResult<Output> {
    let rs = RootSystem::new(cli.params()?)?;
    let xs = cli.x_nodes()?;
    let level = cli.level.unwrap_or(4);
    let (grid, requested) = match level {
        4 => {
            let requested = cli.s_nodes(cli.t);
            (DensityGrid::joint(&rs, cli.t, &requested, &xs)?, requested)
        }
        3 => {
            let lambda = cli.require("lambda", cli.lambda)?;
            let requested = match cli.s {
                Some(s) => vec![s],
                None => (1..=10).map(|k| 0.2 * k as f64).collect(),
            };
            (DensityGrid::nu_inverted(&rs, lambda, &requested, &xs)?, requested)
        }
        other => return Err(Failure::Usage(format!("density supports --level 3 or 4, got {other}"))),
    };
    let flags = |clipped: bool| -> String {
        let mut f = Vec::new();
        if clipped {
            f.push("clipped");
        }
        if grid.formal_odd {
            f.push("formal_odd");
        }
        f.join(";")
    };
    // Rows in requested order; dropped s nodes appear as NaN with a flag.
    let mut rows: Vec<(f64, f64, f64, String)> = Vec::new();
    for &s in &requested {
        match grid.s_nodes.iter().position(|&k| k == s) {
            Some(i) => {
                for (j, &x) in xs.iter().enumerate() {
                    rows.push((s, x, grid.at(i, j), flags(false)));
                }
            }
            None => {
                for &x in &xs {
                    rows.push((s, x, f64::NAN, flags(true)));
                }
            }
        }
    }
    let text = match cli.format() {
        Format::Csv => {
            let mut csv = Csv::new(&["s", "x", "value", "flags"]);
            for (s, x, v, f) in &rows {
                csv.row(&[fmt_f64(*s), fmt_f64(*x), fmt_f64(*v), f.clone()]);
            }
            csv.text
        }
        Format::Json => {
            let values: Vec<Value> = rows
                .iter()
                .map(|(s, x, v, f)| json!({ "s": s, "x": x, "value": if v.is_nan() { Value::Null } else { json!(v) }, "flags": f }))
                .collect();
            json_output(cli, json!({ "level": level, "s_clip_fraction": S_CLIP, "values": values }))
        }
    };
    Ok(Output { text, code: 0 })
}

fn marginal(cli: &Cli) -> CliResult<Output> {
    let rs = RootSystem::new(cli.params()?)?;
    let t = cli.t;
    let nodes = match cli.s {
        Some(s) => vec![s],
        None => (1..=19).map(|k| t * k as f64 / 20.0).collect(),
    };
    let mut rows = Vec::with_capacity(nodes.len());
    for &s in &nodes {
        let density = marginal_sojourn(&rs, t, s)?;
        let signed = marginal_sojourn_signed(&rs, t, s)?;
        rows.push((s, density, signed.neg, signed.pos));
    }
    let text = match cli.format() {
        Format::Json => {
            let one = |&(s, d, n, p): &(f64, f64, f64, f64)| {
                json!({ "t": t, "s": s, "density": d, "nonpositive": n, "nonnegative": p })
            };
            let body = if cli.s.is_some() { one(&rows[0]) } else { Value::Array(rows.iter().map(one).collect()) };
            json_output(cli, body)
        }
        Format::Csv => {
            let mut csv = Csv::new(&["t", "s", "density", "nonpositive", "nonnegative"]);
            for (s, d, n, p) in rows {
                csv.row(&[fmt_f64(t), fmt_f64(s), fmt_f64(d), fmt_f64(n), fmt_f64(p)]);
            }
            csv.text
        }
    };
    Ok(Output { text, code: 0 })
}

fn oracle(cli: &Cli) -> CliResult<Output> {
    let params = cli.params()?;
    let (lambda, mu, nu) = (cli.lambda.unwrap_or(1.0), cli.mu.unwrap_or(0.5), cli.nu.unwrap_or(1.0));
    let runs: Vec<OracleRun> = match cli.level {
        Some(n) => {
            let mut config = default_config(params, n, lambda)?;
            if let Some(k) = cli.kmax {
                config.k_max = k;
            }
            if let Some(h) = cli.grid_h {
                config.h = h;
            }
            if let Some(l) = cli.grid_l {
                config.half_width = l;
            }
            vec![lattice_transform(params, n, lambda, mu, nu, config, HalfLine::Closed)?]
        }
        None => {
            if cli.kmax.is_some() || cli.grid_h.is_some() || cli.grid_l.is_some() {
                return Err(Failure::Usage("--kmax, --grid-h and --grid-L need a single --level".into()));
            }
            convergence_study(params, &ORACLE_LEVELS, lambda, mu, nu)?
        }
    };
    let text = match cli.format() {
        Format::Json => {
            let rows: Vec<Value> = runs
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "E_n": complex_json(r.e_n),
                        "E_n_product": complex_json(r.e_n_product),
                        "E_closed": complex_json(r.e_closed),
                        "rel_err": r.rel_err,
                        "assembly_gap": r.assembly_gap,
                        "leakage": r.leakage,
                        "budget": r.budget,
                        "lattice": r.config,
                    })
                })
                .collect();
            let body = if cli.level.is_some() { rows[0].clone() } else { Value::Array(rows) };
            json_output(cli, body)
        }
        Format::Csv => {
            let mut csv = Csv::new(&[
                "n", "E_n_re", "E_n_im", "E_closed_re", "E_closed_im", "rel_err", "assembly_gap", "leakage", "budget", "h",
                "L", "kmax",
            ]);
            for r in &runs {
                csv.row(&[
                    r.n.to_string(),
                    fmt_f64(r.e_n.re),
                    fmt_f64(r.e_n.im),
                    fmt_f64(r.e_closed.re),
                    fmt_f64(r.e_closed.im),
                    fmt_f64(r.rel_err),
                    fmt_f64(r.assembly_gap),
                    fmt_f64(r.leakage),
                    fmt_f64(r.budget),
                    fmt_f64(r.config.h),
                    fmt_f64(r.config.half_width),
                    r.config.k_max.to_string(),
                ]);
            }
            csv.text
        }
    };
    Ok(Output { text, code: 0 })
}

fn validate(cli: &Cli) -> CliResult<Output> {
    let kappas = match cli.kappa {
        Some(k) => vec![k],
        None => vec![1, -1],
    };
    for &n in &cli.order {
        if n % 2 == 0 {
            PseudoParams::new(n, cli.kappa.filter(|_| cli.order.len() == 1)).map_err(Failure::from)?;
        }
    }
    let mut config = ValidationConfig::new(cli.order.clone(), kappas);
    config.t = cli.t;
    config.check = cli.check.clone();
    let doc = run_validation(&config)?;
    let code = doc.exit_code();
    let text = match cli.format() {
        Format::Json => doc.to_json() + "\n",
        Format::Csv => {
            let mut csv = Csv::new(&[
                "name", "expected_re", "expected_im", "computed_re", "computed_im", "abs_err", "rel_err", "tolerance", "metric",
                "tier", "pass", "formal_odd",
            ]);
            for e in &doc.entries {
                csv.row(&[
                    csv_quote(&e.name),
                    fmt_f64(e.expected.re),
                    fmt_f64(e.expected.im),
                    fmt_f64(e.computed.re),
                    fmt_f64(e.computed.im),
                    fmt_f64(e.abs_err),
                    fmt_f64(e.rel_err),
                    fmt_f64(e.tolerance),
                    format!("{:?}", e.metric),
                    format!("{:?}", e.tier),
                    e.pass.to_string(),
                    e.formal_odd.to_string(),
                ]);
            }
            csv.text
        }
    };
    Ok(Output { text, code })
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    // A pool may already exist when the library is driven in-process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn banner(cli: &Cli) -> Option<String> {
    let odd: Vec<String> = cli.order.iter().filter(|&&n| n % 2 == 1).map(|n| n.to_string()).collect();
    if odd.is_empty() {
        return None;
    }
    Some(format!(
        "note: odd order N = {} — transform, density and sojourn results are formal: the same algebra applies but the \
         pseudo-process has infinite total variation and the results are not rigorously justified",
        odd.join(", ")
    ))
}

fn dispatch(cli: &Cli) -> CliResult<Output> {
    configure_threads()?;
    match cli.command {
        Command::Roots => roots(cli),
        Command::Kernel => kernel(cli),
        Command::Transform => transform(cli),
        Command::Density => density(cli),
        Command::Marginal => marginal(cli),
        Command::Oracle => oracle(cli),
        Command::Validate => validate(cli),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Output goes to `--out` or standard output; diagnostics and the
/// formal-odd banner go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(b) = banner(&cli) {
        eprintln!("{b}");
    }
    let out = match dispatch(&cli) {
        Ok(out) => out,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return 2;
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            return 1;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, out.text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(out.text.as_bytes()).and_then(|_| stdout.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("pseudoproc").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for v in [1.0 / 3.0, std::f64::consts::PI, -2.5e-300, 6.02214076e23] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn defaults_and_lists() {
        let c = parse(&["marginal"]);
        assert_eq!((c.order.clone(), c.t, c.format()), (vec![2], 1.0, Format::Json));
        let c = parse(&["validate", "--order", "2,4", "--kappa", "-1"]);
        assert_eq!((c.order.clone(), c.kappa), (vec![2, 4], Some(-1)));
        assert_eq!(parse(&["density"]).format(), Format::Csv);
    }

    #[test]
    fn unknown_flags_are_usage_errors() {
        assert_eq!(run(["pseudoproc", "roots", "--bogus"]), 2);
        assert_eq!(run(["pseudoproc"]), 2);
    }

    #[test]
    fn invalid_sign_cites_the_even_constraint() {
        let c = parse(&["roots", "--order", "4", "--kappa", "1"]);
        match c.params() {
            Err(Failure::Usage(m)) => assert!(m.contains("even-N constraint"), "{m}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse(&["roots", "--order", "3"]).params(), Err(Failure::Usage(_))));
    }

    #[test]
    fn missing_point_flags_are_reported_before_computing() {
        let c = parse(&["transform", "--level", "3", "--lambda", "1"]);
        assert!(matches!(transform(&c), Err(Failure::Usage(m)) if m.contains("--s")));
    }

    #[test]
    fn csv_rows_are_lf_terminated() {
        let c = parse(&["kernel", "--x", "0.5", "--format", "csv"]);
        let out = kernel(&c).unwrap();
        assert!(out.text.starts_with("t,x,p\n") && out.text.ends_with('\n') && !out.text.contains('\r'));
        assert_eq!(out.text.lines().count(), 2);
    }
}
