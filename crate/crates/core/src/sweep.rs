//! Parameter sweeps over `(f, c)` grids with CSV or JSON output.
//!
//! Work is split per modulus: L-values for `f` are computed once and reused for
//! every `c`. Rows come back in `(f, c)` order whatever the thread count, and all
//! numbers are rendered through [`format_sig`], so output files are byte-identical
//! across runs of the same spec.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::arith::{factorize, gcd, is_prime, Factorization};
use crate::moments::{moment_report_with, BruteMoments, MomentReport, ReportOptions};
use crate::par;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "f,c,phi_f,m_plus_exact,m_minus_exact,m_exact,m_brute_re,m_brute_im,m_asym,m_plus_asym,residual,residual_over_logf,brute_checked";

/// Significant digits in sweep output.
pub const SIGNIFICANT_DIGITS: usize = 15;

/// Relative tolerance for `brute_checked`.
pub const BRUTE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusFilter {
    All,
    Primes,
    Squarefree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub f_min: u64,
    pub f_max: u64,
    pub f_filter: ModulusFilter,
    pub c_list: Vec<u64>,
    /// Largest `f` cross-checked by brute force.
    pub brute_cap: u64,
    /// Worker count; 0 uses the global pool.
    pub threads: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    /// Accept `c = 1` in `c_list`.
    pub allow_untwisted: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            f_min: 5,
            f_max: 50,
            f_filter: ModulusFilter::All,
            c_list: vec![2],
            brute_cap: 2000,
            threads: 0,
            output_path: None,
            format: Format::Csv,
            allow_untwisted: false,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.c_list.is_empty() {
            return Err(Error::InvalidSweep("c list is empty".into()));
        }
        if self.f_min < 3 {
            return Err(Error::InvalidSweep(format!(
                "f_min = {} must be at least 3",
                self.f_min
            )));
        }
        if self.f_max < self.f_min {
            return Err(Error::InvalidSweep(format!(
                "f_max = {} is below f_min = {}",
                self.f_max, self.f_min
            )));
        }
        if self.c_list.contains(&0) {
            return Err(Error::InvalidSweep("c = 0 is not allowed".into()));
        }
        if self.c_list.contains(&1) && !self.allow_untwisted {
            return Err(Error::InvalidSweep(
                "c = 1 requires the untwisted flag".into(),
            ));
        }
        Ok(())
    }

    fn moduli(&self) -> Vec<u64> {
        (self.f_min..=self.f_max)
            .filter(|&f| match self.f_filter {
                ModulusFilter::All => true,
                ModulusFilter::Primes => is_prime(f),
                ModulusFilter::Squarefree => factorize(f).is_ok_and(|fz| fz.is_squarefree()),
            })
            .collect()
    }

    fn twists(&self) -> Vec<u64> {
        let mut c = self.c_list.clone();
        c.sort_unstable();
        c.dedup();
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub reports: Vec<MomentReport>,
    /// Pairs dropped for `gcd(f, c) > 1` or `f ≤ c`.
    pub skipped: usize,
}

fn brute_checked(r: &MomentReport) -> Option<bool> {
    let dev = r.exact_brute_deviation()?;
    let scale = 1.0
        + r.m_plus_exact
            .abs()
            .max(r.m_minus_exact.abs())
            .max(r.m_exact.abs());
    let imag = r.m_brute?.im.abs();
    Some(dev <= BRUTE_TOLERANCE * scale && imag <= BRUTE_TOLERANCE * scale)
}

/// Runs the sweep in memory.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let moduli = spec.moduli();
    let twists = spec.twists();
    let options = ReportOptions {
        brute_cap: spec.brute_cap,
        allow_untwisted: spec.allow_untwisted,
    };
    let per_modulus = par::with_threads(spec.threads, || {
        par::map_slice(&moduli, |&f| -> Result<(Vec<MomentReport>, usize)> {
            let valid: Vec<u64> = twists
                .iter()
                .copied()
                .filter(|&c| c < f && gcd(f, c) == 1)
                .collect();
            let skipped = twists.len() - valid.len();
            let brute = if f <= spec.brute_cap && !valid.is_empty() {
                Some(BruteMoments::new(f)?)
            } else {
                None
            };
            let reports = valid
                .iter()
                .map(|&c| moment_report_with(f, c, &options, brute.as_ref()))
                .collect::<Result<Vec<_>>>()?;
            Ok((reports, skipped))
        })
    });
    let mut outcome = SweepOutcome {
        reports: Vec::new(),
        skipped: 0,
    };
    for item in per_modulus {
        let (reports, skipped) = item?;
        outcome.reports.extend(reports);
        outcome.skipped += skipped;
    }
    Ok(outcome)
}

/// Renders `x` with `digits` significant digits in the style of C's `%.{digits}g`.
///
/// Locale-independent; non-finite values become `nan`, `inf` or `-inf`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt(x: f64) -> String {
    format_sig(x, SIGNIFICANT_DIGITS)
}

/// Values exactly as written to CSV, parsed back for JSON.
#[derive(Debug, Serialize)]
struct Row {
    f: u64,
    c: u64,
    phi_f: u64,
    m_plus_exact: f64,
    m_minus_exact: f64,
    m_exact: f64,
    m_brute_re: Option<f64>,
    m_brute_im: Option<f64>,
    m_asym: f64,
    m_plus_asym: f64,
    residual: f64,
    residual_over_logf: f64,
    brute_checked: bool,
}

fn rounded(x: f64) -> f64 {
    fmt(x).parse().unwrap_or(x)
}

impl Row {
    fn new(r: &MomentReport) -> Self {
        Self {
            f: r.f,
            c: r.c,
            phi_f: r.phi_f,
            m_plus_exact: rounded(r.m_plus_exact),
            m_minus_exact: rounded(r.m_minus_exact),
            m_exact: rounded(r.m_exact),
            m_brute_re: r.m_brute.map(|z| rounded(z.re)),
            m_brute_im: r.m_brute.map(|z| rounded(z.im)),
            m_asym: rounded(r.m_asym),
            m_plus_asym: rounded(r.m_plus_asym),
            residual: rounded(r.residual),
            residual_over_logf: rounded(r.residual_over_logf),
            brute_checked: brute_checked(r).unwrap_or(false),
        }
    }
}

pub fn render_csv(reports: &[MomentReport]) -> String {
    let mut out = String::with_capacity(64 * (reports.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let (re, im) = match r.m_brute {
            Some(z) => (fmt(z.re), fmt(z.im)),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.f,
            r.c,
            r.phi_f,
            fmt(r.m_plus_exact),
            fmt(r.m_minus_exact),
            fmt(r.m_exact),
            re,
            im,
            fmt(r.m_asym),
            fmt(r.m_plus_asym),
            fmt(r.residual),
            fmt(r.residual_over_logf),
            brute_checked(r).unwrap_or(false),
        );
    }
    out
}

pub fn render_json(reports: &[MomentReport]) -> Result<String> {
    let rows: Vec<Row> = reports.iter().map(Row::new).collect();
    let mut out = serde_json::to_string_pretty(&rows)?;
    out.push('\n');
    Ok(out)
}

pub fn render(reports: &[MomentReport], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(render_csv(reports)),
        Format::Json => render_json(reports),
    }
}

/// Runs the sweep and writes it to `spec.output_path` (or returns it if unset).
pub fn write_sweep(spec: &SweepSpec) -> Result<(String, SweepOutcome)> {
    let outcome = run_sweep(spec)?;
    let text = render(&outcome.reports, spec.format)?;
    if let Some(path) = &spec.output_path {
        std::fs::write(path, &text)?;
    }
    Ok((text, outcome))
}

/// Squarefree check used by the `squarefree` filter, exposed for callers that build their own grids.
pub fn is_squarefree(f: u64) -> bool {
    factorize(f)
        .as_ref()
        .is_ok_and(Factorization::is_squarefree)
}
