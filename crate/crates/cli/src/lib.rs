//! Command-line front end for `unitroot`.
//!
//! [`run`] parses arguments, executes one job and returns the exit code and
//! rendered output; the binary only prints them.

pub mod cache;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use unitroot::analysis::{
    check_continuity, check_exact_agreement, check_identity, field_generation_report, independence_check,
    pole_certificate_from_series,
};
use unitroot::trace::{working_precision, TraceError};
use unitroot::{ClassNumberCache, FamilyParams, NewtonPolygon, PadicSeries, Route, TraceEngine};

use cache::{CacheFile, LoadState, CACHE_ENV};
use output::{padic_cells, padic_columns, Format, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PRECISION: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "unitroot", version, about = "Unit root L-functions of the Igusa tower via class numbers")]
pub struct Cli {
    /// Odd prime p.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Tame level N > 4, prime to p.
    #[arg(long = "N", global = true)]
    pub level: Option<u64>,
    /// Weight k.
    #[arg(long, global = true, default_value_t = 2, allow_negative_numbers = true)]
    pub k: i64,
    /// Truncation degree in T; cost grows like p^(m-max/2).
    #[arg(long = "m-max", global = true, default_value_t = 6)]
    pub m_max: usize,
    /// Target p-adic precision M.
    #[arg(long, global = true, default_value_t = 20, allow_negative_numbers = true)]
    pub precision: i64,
    /// Route for L: exponential of C_m, quotient of D series, or both compared.
    #[arg(long, global = true, default_value = "both")]
    pub route: Route,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Class-number cache file.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// Worker threads: `auto` or a positive count.
    #[arg(long, global = true, default_value = "auto")]
    pub threads: Threads,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

impl std::str::FromStr for Threads {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Self::Count(n)),
            _ => Err(format!("expected `auto` or a positive integer, got {s:?}")),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients and Newton polygon of D(k, T).
    Dseries,
    /// Coefficients and Newton polygon of L(k, T).
    Lfunction,
    /// Slopes of D(k, T) and L(k, T) for k up to --k-max.
    Slopes {
        #[arg(long = "k-max", allow_negative_numbers = true)]
        k_max: Option<i64>,
    },
    /// Verification reports; exit 3 when a check fails.
    #[command(subcommand)]
    Check(Check),
    /// Certified poles of L(k, T) on |T|_p = p, for k up to --k-max.
    Poles {
        #[arg(long = "k-max", allow_negative_numbers = true)]
        k_max: Option<i64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// Exponential and quotient routes for L agree.
    Identity,
    /// A_m and C_m at k and k + (p-1)p^s agree modulo p^(s+1).
    Continuity {
        #[arg(long, default_value_t = 0)]
        s: u32,
    },
    /// Exact C_m(k) embeds to A_m(k+2) - p^m A_m(k).
    Exact,
    /// Nonvanishing of sum a_i sqrt(n_i) for distinct squarefree n_i.
    Independence {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        radicands: Vec<String>,
    },
    /// Field generated by the exact C_1(k), ..., C_m(k).
    Fieldgen,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into() }
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        let code = if e.is_config_error() {
            EXIT_CONFIG
        } else if e.is_precision_failure() {
            EXIT_PRECISION
        } else {
            EXIT_INVARIANT
        };
        Self { code, message: e.to_string() }
    }
}

fn one_line(s: &str) -> String {
    s.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ")
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            return Outcome { code: EXIT_OK, stdout: e.to_string(), stderr: String::new() };
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default();
            return Outcome { code: EXIT_CONFIG, stdout: String::new(), stderr: format!("{}\n", one_line(first)) };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    let mut stderr = String::new();
    let result = execute(cli, &mut stderr);
    match result {
        Ok(report) => {
            let stdout = match report.render(cli.format) {
                Ok(s) => s,
                Err(e) => {
                    return Outcome { code: EXIT_INVARIANT, stdout: String::new(), stderr: format!("error: {e}\n") }
                }
            };
            let code = if report.ok {
                EXIT_OK
            } else {
                stderr.push_str("error: check failed\n");
                EXIT_INVARIANT
            };
            Outcome { code, stdout, stderr }
        }
        Err(e) => {
            stderr.push_str(&format!("error: {}\n", one_line(&e.message)));
            Outcome { code: e.code, stdout: String::new(), stderr }
        }
    }
}

fn execute(cli: &Cli, stderr: &mut String) -> Result<Report, CliError> {
    if let Command::Check(Check::Independence { coeffs, radicands }) = &cli.command {
        return independence(coeffs, radicands);
    }
    let params = family(cli)?;
    if cli.m_max == 0 {
        return Err(CliError::config("--m-max must be positive"));
    }
    if cli.precision < 1 {
        return Err(CliError::config("--precision must be positive"));
    }
    let cache_file = cli.cache.as_ref().map(CacheFile::open);
    if let Some(cf) = &cache_file {
        if cf.state() == LoadState::Discarded {
            stderr.push_str(&format!("warning: ignoring unreadable cache {}\n", cf.path().display()));
        }
    }
    let memo = cache_file.as_ref().map_or_else(ClassNumberCache::new, CacheFile::memo);
    let pool = {
        let builder = rayon::ThreadPoolBuilder::new();
        let builder = match cli.threads {
            Threads::Auto => builder,
            Threads::Count(n) => builder.num_threads(n),
        };
        builder.build().map_err(|e| CliError::config(format!("thread pool: {e}")))?
    };
    let report = pool.install(|| dispatch(cli, TraceEngine::new(params, &memo)));
    if let Some(cf) = &cache_file {
        if let Err(e) = cf.store(&memo) {
            stderr.push_str(&format!("warning: could not write cache {}: {e}\n", cf.path().display()));
        }
    }
    report
}

fn family(cli: &Cli) -> Result<FamilyParams, CliError> {
    let p = cli.p.ok_or_else(|| CliError::config("--p is required"))?;
    let n = cli.level.ok_or_else(|| CliError::config("--N is required"))?;
    Ok(FamilyParams::new(p, n)?)
}

fn dispatch(cli: &Cli, engine: TraceEngine<'_>) -> Result<Report, CliError> {
    let (k, m_max, prec) = (cli.k, cli.m_max, cli.precision);
    match &cli.command {
        Command::Dseries => {
            let r = engine.build_d(k, m_max, prec)?;
            require_precision(r.tracked_precision, prec)?;
            Ok(Report::new(&r, coefficient_table(&r.coefficients))
                .with_summary("tracked_precision", opt(r.tracked_precision))
                .with_summary("integral", r.integral)
                .with_summary("slopes", slope_string(&r.newton_polygon)))
        }
        Command::Lfunction => {
            let r = engine.build_l(k, m_max, prec, cli.route)?;
            require_precision(r.tracked_precision, prec)?;
            Ok(Report::new(&r, coefficient_table(&r.coefficients))
                .with_summary("route", format!("{:?}", r.route).to_lowercase())
                .with_summary("routes_agree", r.routes_agree.map_or("n/a".into(), |b| b.to_string()))
                .with_summary("tracked_precision", opt(r.tracked_precision))
                .with_summary("integral", r.integral)
                .with_summary("slopes", slope_string(&r.newton_polygon)))
        }
        Command::Slopes { k_max } => slopes(&engine, k, k_max.unwrap_or(k), m_max, prec),
        Command::Poles { k_max } => poles(&engine, k, k_max.unwrap_or(k), m_max, prec),
        Command::Check(check) => match check {
            Check::Identity => {
                let r = check_identity(&engine, k, m_max, prec)?;
                let mut cols = vec!["index".to_string()];
                cols.extend(padic_columns("exp"));
                cols.extend(padic_columns("quot"));
                cols.push("agree".into());
                let mut t = Table { columns: cols, rows: Vec::new() };
                for c in &r.coefficients {
                    let mut row = vec![c.index.to_string()];
                    row.extend(padic_cells(&c.exponential));
                    row.extend(padic_cells(&c.quotient));
                    row.push(c.agree.to_string());
                    t.push(row);
                }
                let mut rep = Report::new(&r, t)
                    .with_summary("agree", r.agree)
                    .with_summary("first_order_identity", r.first_order_identity)
                    .with_summary("integral", r.integral)
                    .with_summary("min_tracked_precision", opt(r.min_tracked_precision));
                rep.ok = r.agree && r.first_order_identity && r.integral;
                Ok(rep)
            }
            Check::Continuity { s } => {
                let r = check_continuity(&engine, k, *s, m_max, prec)?;
                let mut cols = vec!["m".to_string()];
                for name in ["a_k", "a_shifted", "c_k", "c_shifted"] {
                    cols.extend(padic_columns(name));
                }
                cols.extend(["a_congruent".into(), "c_congruent".into()]);
                let mut t = Table { columns: cols, rows: Vec::new() };
                for e in &r.entries {
                    let mut row = vec![e.m.to_string()];
                    for x in [&e.a_k, &e.a_shifted, &e.c_k, &e.c_shifted] {
                        row.extend(padic_cells(x));
                    }
                    row.extend([e.a_congruent.to_string(), e.c_congruent.to_string()]);
                    t.push(row);
                }
                let mut rep = Report::new(&r, t)
                    .with_summary("shifted_k", r.shifted_k)
                    .with_summary("modulus", format!("p^{}", r.modulus_exponent))
                    .with_summary("holds", r.holds);
                rep.ok = r.holds;
                Ok(rep)
            }
            Check::Exact => {
                let r = check_exact_agreement(&engine, k, m_max, prec)?;
                let mut cols = vec!["m".to_string(), "c_exact".to_string()];
                cols.extend(padic_columns("embedded"));
                cols.extend(padic_columns("from_a"));
                cols.push("agree".into());
                let mut t = Table { columns: cols, rows: Vec::new() };
                for e in &r.entries {
                    let mut row = vec![e.m.to_string(), e.c_exact.to_string()];
                    row.extend(padic_cells(&e.embedded));
                    row.extend(padic_cells(&e.from_a));
                    row.push(e.agree.to_string());
                    t.push(row);
                }
                let mut rep = Report::new(&r, t).with_summary("holds", r.holds);
                rep.ok = r.holds;
                Ok(rep)
            }
            Check::Fieldgen => {
                let r = field_generation_report(&engine, k, m_max)?;
                let mut t = Table::new(&["m", "c_exact", "support", "cumulative_degree"]);
                for l in &r.levels {
                    t.push(vec![
                        l.m.to_string(),
                        l.c_exact.to_string(),
                        join(&l.support),
                        l.cumulative_degree.to_string(),
                    ]);
                }
                let fields: Vec<String> =
                    r.contained_fields.iter().map(|f| format!("Q(sqrt {}) from m={}", f.radicand, f.first_m)).collect();
                Ok(Report::new(&r, t).with_summary("contained_fields", fields.join(", ")))
            }
            Check::Independence { .. } => unreachable!("handled before family validation"),
        },
    }
}

fn independence(coeffs: &[String], radicands: &[String]) -> Result<Report, CliError> {
    let coeffs: Vec<BigRational> = coeffs
        .iter()
        .map(|s| s.trim().parse().map_err(|_| CliError::config(format!("bad coefficient {s:?}"))))
        .collect::<Result<_, _>>()?;
    let radicands: Vec<BigInt> = radicands
        .iter()
        .map(|s| s.trim().parse().map_err(|_| CliError::config(format!("bad radicand {s:?}"))))
        .collect::<Result<_, _>>()?;
    let r = independence_check(&coeffs, &radicands).map_err(|e| CliError::config(e.to_string()))?;
    let mut t = Table::new(&["nonzero", "support", "generated_degree", "support_rank"]);
    t.push(vec![r.nonzero.to_string(), join(&r.support), r.generated_degree.to_string(), r.support_rank.to_string()]);
    Ok(Report::new(&r, t))
}

#[derive(Serialize)]
struct SlopeRecord<'a> {
    #[serde(flatten)]
    params: FamilyParams,
    k: i64,
    d_polygon: &'a NewtonPolygon,
    l_polygon: &'a NewtonPolygon,
}

fn k_range(k: i64, k_max: i64) -> Result<std::ops::RangeInclusive<i64>, CliError> {
    if k_max < k {
        return Err(CliError::config(format!("--k-max {k_max} is below --k {k}")));
    }
    Ok(k..=k_max)
}

fn slopes(engine: &TraceEngine<'_>, k: i64, k_max: i64, m_max: usize, prec: i64) -> Result<Report, CliError> {
    let ks = k_range(k, k_max)?;
    let table = engine.term_table(m_max, working_precision(engine.params().p, prec, m_max))?;
    let mut t = Table::new(&["k", "series", "slope", "length", "certified"]);
    let mut json = Vec::new();
    for k in ks {
        let d = table.d_series(k)?.truncate_precision(prec);
        let l = table.l_series(engine.params(), k, m_max, prec, Route::Exp)?;
        let dp = d.newton_polygon();
        for (name, poly) in [("D", &dp), ("L", &l.newton_polygon)] {
            for s in poly.segments() {
                t.push(vec![
                    k.to_string(),
                    name.into(),
                    s.slope.to_string(),
                    s.length.to_string(),
                    s.certified.to_string(),
                ]);
            }
        }
        json.push(to_json(&SlopeRecord { params: engine.params(), k, d_polygon: &dp, l_polygon: &l.newton_polygon }));
    }
    let mut rep = Report::new(&(), t);
    rep.json = serde_json::Value::Array(json);
    Ok(rep)
}

fn poles(engine: &TraceEngine<'_>, k: i64, k_max: i64, m_max: usize, prec: i64) -> Result<Report, CliError> {
    let ks = k_range(k, k_max)?;
    let table = engine.term_table(m_max, working_precision(engine.params().p, prec, m_max))?;
    let mut t = Table::new(&[
        "k",
        "denominator_circle_zeros",
        "numerator_circle_zeros",
        "certified_poles",
        "lower_bound",
        "truncation_conditional",
    ]);
    let mut json = Vec::new();
    let mut summary = Vec::new();
    for k in ks {
        let num = table.d_series(k + 2)?.truncate_precision(prec);
        let den = table.d_series(k)?.truncate_precision(prec);
        let c = pole_certificate_from_series(engine.params(), k, prec, &num, &den)?;
        t.push(vec![
            k.to_string(),
            c.denominator_circle_zeros.to_string(),
            c.numerator_circle_zeros.to_string(),
            c.certified_poles.to_string(),
            c.lower_bound.to_string(),
            c.truncation_conditional.to_string(),
        ]);
        let mut v = to_json(&c);
        v["summary"] = serde_json::Value::String(c.summary());
        json.push(v);
        summary.push((format!("k={k}"), c.summary()));
    }
    let mut rep = Report::new(&(), t);
    rep.json = serde_json::Value::Array(json);
    rep.summary = summary;
    Ok(rep)
}

fn to_json<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("reports serialize to JSON")
}

fn require_precision(tracked: Option<i64>, target: i64) -> Result<(), CliError> {
    match tracked {
        Some(t) if t < target => Err(CliError {
            code: EXIT_PRECISION,
            message: format!("tracked precision p^{t} is below the target p^{target}"),
        }),
        _ => Ok(()),
    }
}

fn coefficient_table(f: &PadicSeries) -> Table {
    let mut cols = vec!["index".to_string()];
    cols.extend(padic_columns(""));
    let mut t = Table { columns: cols, rows: Vec::new() };
    for (i, c) in f.tail().iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(padic_cells(c));
        t.push(row);
    }
    t
}

fn slope_string(poly: &NewtonPolygon) -> String {
    let parts: Vec<String> = poly
        .segments()
        .iter()
        .map(|s| format!("{}x{}{}", s.slope, s.length, if s.certified { "" } else { "?" }))
        .collect();
    parts.join(" ")
}

fn opt(x: Option<i64>) -> String {
    x.map_or_else(|| "inf".into(), |v| v.to_string())
}

fn join(v: &[BigInt]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}
