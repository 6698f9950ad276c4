//! Invariant suites run by `twisted-moment verify` and the acceptance harness.
//!
//! Every suite records the largest deviation it saw, the tolerance it was held to
//! and where the worst case occurred. Tolerances derive from one base value:
//! identities use it directly, identities involving the truncated series for `F`
//! use `1000×`, and exact-vs-brute comparisons use `10×` relative to `1 + |exact|`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::arith::{factorize, gcd, mobius};
use crate::characters::unit_group;
use crate::kernels::{
    cot_kernel, harmonic_kernel_rational, log_sine_kernel, log_sine_sum, log_sine_table,
    KernelConfig,
};
use crate::moments::{m_minus_exact, m_plus_exact};
use crate::moments::{BruteMoments, CharacterClass};
use crate::par;
use crate::sum::{CompensatedComplexSum, CompensatedSum};
use crate::Result;

/// Default base tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub tolerance: f64,
    pub orthogonality_fmax: u64,
    pub root_sum_fmax: u64,
    pub divisor_fmax: u64,
    pub log_sine_max: u64,
    pub harmonic_dmax: u64,
    pub double_sum_fmax: u64,
    pub trivial_fmax: u64,
    pub brute_fmax: u64,
    pub reduction_max: u64,
}

impl VerifyConfig {
    /// Every grid capped at `fmax`; the quartic double-sum suite also at 60.
    pub fn for_fmax(fmax: u64, tolerance: f64) -> Self {
        Self {
            tolerance,
            orthogonality_fmax: fmax,
            root_sum_fmax: fmax,
            divisor_fmax: fmax,
            log_sine_max: fmax,
            harmonic_dmax: fmax,
            double_sum_fmax: fmax.min(60),
            trivial_fmax: fmax,
            brute_fmax: fmax,
            reduction_max: fmax,
        }
    }

    /// The grids used by the acceptance harness.
    pub fn acceptance() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            orthogonality_fmax: 200,
            root_sum_fmax: 100,
            divisor_fmax: 2000,
            log_sine_max: 500,
            harmonic_dmax: 500,
            double_sum_fmax: 60,
            trivial_fmax: 200,
            brute_fmax: 300,
            reduction_max: 200,
        }
    }

    pub fn harmonic_tolerance(&self) -> f64 {
        self.tolerance * 1e3
    }

    pub fn brute_tolerance(&self) -> f64 {
        self.tolerance * 10.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Location of the largest deviation, e.g. `f=12 c=5 d=4`.
    pub worst: Option<String>,
    pub checks: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_deviation.is_finite() && self.max_deviation <= self.tolerance
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<24} max dev {:.3e} (tol {:.1e}, {} checks)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance,
            self.checks
        )?;
        if let (false, Some(w)) = (self.passed(), &self.worst) {
            write!(f, " worst at {w}")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Tracker {
    max: f64,
    worst: Option<String>,
    checks: usize,
}

impl Tracker {
    fn record(&mut self, deviation: f64, at: impl FnOnce() -> String) {
        self.checks += 1;
        if deviation > self.max || deviation.is_nan() {
            self.max = if deviation.is_nan() {
                f64::INFINITY
            } else {
                deviation
            };
            self.worst = Some(at());
        }
    }

    fn merge(&mut self, other: Tracker) {
        self.checks += other.checks;
        if other.max > self.max {
            self.max = other.max;
            self.worst = other.worst;
        }
    }

    fn finish(self, name: &'static str, tolerance: f64) -> SuiteReport {
        SuiteReport {
            name,
            max_deviation: self.max,
            tolerance,
            worst: self.worst,
            checks: self.checks,
        }
    }
}

/// Runs `per_f` over `lo..=hi` in parallel and merges in order.
fn over_moduli<F>(lo: u64, hi: u64, per_f: F) -> Result<Tracker>
where
    F: Fn(u64, &mut Tracker) -> Result<()> + Sync + Send,
{
    let mut total = Tracker::default();
    if hi < lo {
        return Ok(total);
    }
    let parts = par::map_range((hi - lo + 1) as usize, |i| {
        let mut t = Tracker::default();
        per_f(lo + i as u64, &mut t).map(|_| t)
    });
    for part in parts {
        total.merge(part?);
    }
    Ok(total)
}

/// Row and column orthogonality of the characters mod `f`.
pub fn orthogonality(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let t = over_moduli(2, cfg.orthogonality_fmax, |f, t| {
        let group = unit_group(f)?;
        let chars = group.characters();
        for chi in chars.iter().skip(1) {
            let mut acc = CompensatedComplexSum::new();
            for a in 1..=f {
                acc.add(group.eval(chi, a as i64));
            }
            t.record(acc.value().norm(), || format!("f={f} row"));
        }
        for &a in group.units() {
            let mut acc = CompensatedComplexSum::new();
            for chi in &chars {
                acc.add(group.eval(chi, a as i64));
            }
            let expected = if a == 1 { group.order() as f64 } else { 0.0 };
            t.record((acc.value() - expected).norm(), || format!("f={f} a={a}"));
        }
        Ok(())
    })?;
    Ok(t.finish("orthogonality", cfg.tolerance))
}

/// Full and coprime sums of `ζ_f^{at}` over `a`.
pub fn root_of_unity_sums(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let t = over_moduli(2, cfg.root_sum_fmax, |f, t| {
        let fz = factorize(f)?;
        let divisors = fz.divisors();
        for tt in 0..f {
            let root =
                |a: u64| Complex64::from_polar(1.0, 2.0 * PI * ((a * tt) % f) as f64 / f as f64);
            let mut full = CompensatedComplexSum::new();
            let mut coprime = CompensatedComplexSum::new();
            for a in 1..f {
                let z = root(a);
                full.add(z);
                if gcd(a, f) == 1 {
                    coprime.add(z);
                }
            }
            let full_expected = if tt == 0 { (f - 1) as f64 } else { -1.0 };
            t.record((full.value() - full_expected).norm(), || {
                format!("f={f} t={tt} full")
            });
            let g = gcd(tt, f);
            let ramanujan: i64 = divisors
                .iter()
                .filter(|&&d| g.is_multiple_of(d))
                .map(|&d| mobius(f / d).unwrap_or(0) * d as i64)
                .sum();
            t.record((coprime.value() - ramanujan as f64).norm(), || {
                format!("f={f} t={tt} coprime")
            });
        }
        Ok(())
    })?;
    Ok(t.finish("root-of-unity sums", cfg.tolerance))
}

/// `Σ_{d|f} μ(d)/d = φ(f)/f` (exact) and `Σ_{d|f} μ(d) log d / d = −(φ/f) Σ log p/(p−1)`.
pub fn divisor_sums(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let t = over_moduli(1, cfg.divisor_fmax, |f, t| {
        let fz = factorize(f)?;
        let mut exact = 0i64;
        let mut logs = CompensatedSum::new();
        for d in fz.divisors() {
            let mu = mobius(d)?;
            exact += mu * (f / d) as i64;
            logs.add(mu as f64 * (d as f64).ln() / d as f64);
        }
        let phi = fz.euler_phi();
        t.record((exact - phi as i64).unsigned_abs() as f64, || {
            format!("f={f} rational")
        });
        let expected = -(phi as f64 / f as f64) * fz.mobius_log_sum();
        t.record((logs.value() - expected).abs(), || format!("f={f} log"));
        Ok(())
    })?;
    Ok(t.finish("divisor sums", cfg.tolerance))
}

/// `Σ_{j<m} log(2 sin πj/m) = log m`.
pub fn log_sine_sums(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let t = over_moduli(1, cfg.log_sine_max, |m, t| {
        let dev = (log_sine_sum(m)? - (m as f64).ln()).abs();
        t.record(dev, || format!("m={m}"));
        Ok(())
    })?;
    Ok(t.finish("log-sine sums", cfg.tolerance))
}

/// `Σ_{0<a<d} F(a/d) = 2d log d`, deviation divided by `d`.
pub fn harmonic_divisor_identity(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let tol = cfg.harmonic_tolerance();
    let kcfg = KernelConfig::for_tolerance(tol)?;
    let t = over_moduli(2, cfg.harmonic_dmax, |d, t| {
        let mut acc = CompensatedSum::new();
        for a in 1..d {
            acc.add(harmonic_kernel_rational(a as i64, d, &kcfg)?);
        }
        let df = d as f64;
        t.record((acc.value() - 2.0 * df * df.ln()).abs() / df, || {
            format!("d={d}")
        });
        Ok(())
    })?;
    Ok(t.finish("harmonic divisor sum", tol))
}

const TWISTS: [u64; 6] = [1, 2, 3, 5, 7, 11];

/// `Σ_{j,k: d | j−ck} ℓ_j ℓ_k = (log(f/d))² + R(c, d)` by direct double sum.
pub fn double_sum_identity(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let t = over_moduli(2, cfg.double_sum_fmax, |f, t| {
        let logs = log_sine_table(f);
        let fz = factorize(f)?;
        for c in TWISTS.into_iter().filter(|&c| gcd(c, f) == 1) {
            for d in fz.divisors() {
                let mut acc = CompensatedSum::new();
                for k in 1..f {
                    let target = (c * k) % d;
                    let mut j = if target == 0 { d } else { target };
                    while j < f {
                        acc.add(logs[j as usize] * logs[k as usize]);
                        j += d;
                    }
                }
                let rhs = (f as f64 / d as f64).ln().powi(2) + log_sine_kernel(c, d)?;
                t.record((acc.value() - rhs).abs(), || format!("f={f} c={c} d={d}"));
            }
        }
        Ok(())
    })?;
    Ok(t.finish("divisor double sum", cfg.tolerance))
}

/// `(1/f) Σ_{(a,f)=1} Σ_j ζ^{aj} log(2 sin πj/f) = −(φ/f) Σ log p/(p−1)`.
pub fn trivial_character_value(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let t = over_moduli(2, cfg.trivial_fmax, |f, t| {
        let logs = log_sine_table(f);
        let mut acc = CompensatedSum::new();
        for a in (1..f).filter(|&a| gcd(a, f) == 1) {
            for j in 1..f {
                acc.add((2.0 * PI * ((a * j) % f) as f64 / f as f64).cos() * logs[j as usize]);
            }
        }
        let fz = factorize(f)?;
        let expected = -(fz.euler_phi() as f64 / f as f64) * fz.mobius_log_sum();
        t.record((acc.value() / f as f64 - expected).abs(), || {
            format!("f={f}")
        });
        Ok(())
    })?;
    Ok(t.finish("trivial character value", cfg.tolerance))
}

/// Closed-form `M₊`, `M₋` and their sum against character sums, relative to `1 + |exact|`.
pub fn exact_vs_brute(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let t = over_moduli(5, cfg.brute_fmax, |f, t| {
        let brute = BruteMoments::new(f)?;
        for c in (2..=(f - 1).min(10)).filter(|&c| gcd(c, f) == 1) {
            let plus = m_plus_exact(f, c)?;
            let minus = m_minus_exact(f, c)?;
            let total = plus + minus;
            let pairs = [
                (
                    "+",
                    plus,
                    brute.twisted_sum(c, CharacterClass::EvenNontrivial)?,
                ),
                ("-", minus, brute.twisted_sum(c, CharacterClass::Odd)?),
                ("all", total, brute.twisted_sum(c, CharacterClass::All)?),
            ];
            for (label, exact, b) in pairs {
                let dev = (exact - b.re).abs().max(b.im.abs()) / (1.0 + exact.abs());
                t.record(dev, || format!("f={f} c={c} {label}"));
            }
        }
        Ok(())
    })?;
    Ok(t.finish("exact vs brute", cfg.brute_tolerance()))
}

/// `R(c, d) = R(c mod d, d)` and `S(c, d) = S(c, d mod c)`.
pub fn reductions(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let t = over_moduli(2, cfg.reduction_max, |n, t| {
        for k in [1u64, 2, 7] {
            let big = n * k + 1;
            // R with the twist reduced mod d = n
            for c in [big, big + 2 * n, 3 * n + 2] {
                if gcd(c, n) == 1 {
                    let dev = (log_sine_kernel(c, n)? - log_sine_kernel(c % n, n)?).abs();
                    t.record(dev, || format!("R c={c} d={n}"));
                }
            }
            // S with the argument reduced mod c = n
            for d in [big, big + 3 * n] {
                if gcd(d, n) == 1 {
                    let dev = (cot_kernel(n, d as i64)? - cot_kernel(n, (d % n) as i64)?).abs();
                    t.record(dev, || format!("S c={n} d={d}"));
                }
            }
        }
        Ok(())
    })?;
    Ok(t.finish("kernel reductions", cfg.tolerance))
}

/// Every suite, in a fixed order.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        orthogonality(cfg)?,
        root_of_unity_sums(cfg)?,
        divisor_sums(cfg)?,
        log_sine_sums(cfg)?,
        harmonic_divisor_identity(cfg)?,
        double_sum_identity(cfg)?,
        trivial_character_value(cfg)?,
        exact_vs_brute(cfg)?,
        reductions(cfg)?,
    ])
}
