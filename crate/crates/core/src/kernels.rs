//! Trigonometric and harmonic kernels behind the moment formulas.
//!
//! * [`harmonic_kernel`]: the regularized harmonic-progression function
//!   `F(x) = Σ_{n≠0} (1/|n−x| − 1/|n|) + 1/|x|`, with `F = 0` on the integers.
//! * [`harmonic_remainder`]: `G(x) = F(x) − 1/x − 1/(1−x) + 1` on `(0, 1)`.
//! * [`log_sine_kernel`]: `R(c, d) = Σ_{k=1}^{d−1} log(2 sin πk/d)·log(2 sin πck/d)`.
//! * [`cot_kernel`]: `S(c, d) = Σ_{a=1}^{c−1} cot(πa/c)·cot(πad/c)`.
//!
//! # Evaluating `F`
//!
//! `x` is first reduced into `(0, 1)` by periodicity. Pairing the `±n` terms gives
//!
//! ```text
//! F(x) = 1/x + Σ_{n≥1} 2x² / (n (n² − x²)),
//! ```
//!
//! which is summed for `n ≤ N` in cancellation-free form. The remaining tail is
//! positive and at most `x²/(N(N+1))` (bound each term by `2x²/(n(n²−1))` and
//! telescope); it is replaced by its midpoint estimate `x²/(N+½)²`, so the
//! returned value is within [`harmonic_kernel_tail_bound`] of the series.
//!
//! The series agrees numerically with `1/x − 2γ − ψ(1−x) − ψ(1+x)` to better than
//! `1e-12`; note the signs of the digamma terms. The variant
//! `−2γ + ψ(1+x) + ψ(1−x) + 1/x` does not reproduce `F(1/2) = 4 log 2` and is not
//! used anywhere.

use std::f64::consts::PI;

use crate::arith::gcd;
use crate::sum::{sum_f64, CompensatedSum};
use crate::{Error, Result};

/// Euler–Mascheroni constant, 20 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// Truncation and tolerance for series-defined kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    truncation: u64,
    tolerance: f64,
}

impl KernelConfig {
    pub const MIN_TRUNCATION: u64 = 100;

    pub fn new(truncation: u64, tolerance: f64) -> Result<Self> {
        if truncation < Self::MIN_TRUNCATION {
            return Err(Error::InvalidArgument(format!(
                "series truncation {truncation} is below {}",
                Self::MIN_TRUNCATION
            )));
        }
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        Ok(Self {
            truncation,
            tolerance,
        })
    }

    /// Smallest truncation whose worst-case tail bound `1/N²` is within `tolerance`.
    pub fn for_tolerance(tolerance: f64) -> Result<Self> {
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        let n = (1.0 / tolerance.sqrt()).ceil() as u64;
        Self::new(n.max(Self::MIN_TRUNCATION), tolerance)
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

impl Default for KernelConfig {
    /// `tolerance = 1e-8`, `N = 10⁴`.
    fn default() -> Self {
        Self::for_tolerance(1e-8).expect("valid default")
    }
}

/// Upper bound on the truncation error of [`harmonic_kernel`] at `x`.
pub fn harmonic_kernel_tail_bound(x: f64, cfg: &KernelConfig) -> f64 {
    let t = x - x.floor();
    let n = cfg.truncation as f64;
    t * t / (n * (n + 1.0))
}

fn harmonic_kernel_reduced(t: f64, n_max: u64) -> f64 {
    debug_assert!(t > 0.0 && t < 1.0);
    let t2 = t * t;
    // smallest terms first
    let mut acc = CompensatedSum::new();
    let n_f = n_max as f64 + 0.5;
    acc.add(t2 / (n_f * n_f));
    for n in (1..=n_max).rev() {
        let n = n as f64;
        acc.add(2.0 * t2 / (n * (n * n - t2)));
    }
    acc.add(1.0 / t);
    acc.value()
}

/// `F(x)`; zero on the integers.
pub fn harmonic_kernel(x: f64, cfg: &KernelConfig) -> f64 {
    let t = x - x.floor();
    if t == 0.0 {
        return 0.0;
    }
    harmonic_kernel_reduced(t, cfg.truncation)
}

/// `F(num/den)` with the reduction mod 1 done in integer arithmetic.
pub fn harmonic_kernel_rational(num: i64, den: u64, cfg: &KernelConfig) -> Result<f64> {
    if den == 0 {
        return Err(Error::Zero);
    }
    let r = num.rem_euclid(den as i64);
    if r == 0 {
        return Ok(0.0);
    }
    Ok(harmonic_kernel_reduced(
        r as f64 / den as f64,
        cfg.truncation,
    ))
}

/// `G(x) = F(x) − 1/x − 1/(1−x) + 1` for `0 < x < 1`.
pub fn harmonic_remainder(x: f64, cfg: &KernelConfig) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutsideUnitInterval(x));
    }
    Ok(harmonic_kernel(x, cfg) - 1.0 / x - 1.0 / (1.0 - x) + 1.0)
}

/// `log(2 sin(πk/d))` for `0 ≤ k < d`, slot 0 set to 0.
///
/// Entries `k` and `d − k` are computed from the same angle and are bitwise equal.
pub fn log_sine_table(d: u64) -> Vec<f64> {
    let mut table = vec![0.0; d as usize];
    for k in 1..d {
        let j = k.min(d - k);
        if j < k {
            table[k as usize] = table[j as usize];
        } else {
            table[k as usize] = (2.0 * (PI * j as f64 / d as f64).sin()).ln();
        }
    }
    table
}

/// `Σ_{j=1}^{m−1} log(2 sin πj/m)`, which equals `log m`.
pub fn log_sine_sum(m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Zero);
    }
    Ok(sum_f64(log_sine_table(m).into_iter().skip(1)))
}

fn check_coprime(c: u64, d: u64) -> Result<()> {
    if c == 0 || d == 0 {
        return Err(Error::Zero);
    }
    if gcd(c, d) != 1 {
        return Err(Error::NotCoprime(c, d));
    }
    Ok(())
}

/// `R(c, d)` from a log-sine table, `ck` reduced mod `d` exactly.
pub fn log_sine_kernel(c: u64, d: u64) -> Result<f64> {
    check_coprime(c, d)?;
    let table = log_sine_table(d);
    Ok(log_sine_kernel_with_table(c, &table))
}

/// `R(c, d)` against a precomputed [`log_sine_table`] of length `d`.
pub fn log_sine_kernel_with_table(c: u64, table: &[f64]) -> f64 {
    let d = table.len() as u64;
    if d <= 1 {
        return 0.0;
    }
    let c = c % d;
    let mut acc = CompensatedSum::new();
    let mut ck = 0u64;
    for k in 1..d as usize {
        ck += c;
        if ck >= d {
            ck -= d;
        }
        acc.add(table[k] * table[ck as usize]);
    }
    acc.value()
}

/// `R(c, d)` through `(1/4d) Σ_{0<e<d} F(ce/d) F(e/d) − (log d)²`.
pub fn log_sine_kernel_via_harmonic(c: u64, d: u64, cfg: &KernelConfig) -> Result<f64> {
    check_coprime(c, d)?;
    if d == 1 {
        return Ok(0.0);
    }
    let mut acc = CompensatedSum::new();
    for e in 1..d {
        let fe = harmonic_kernel_rational(e as i64, d, cfg)?;
        let fce = harmonic_kernel_rational(((c % d) * e % d) as i64, d, cfg)?;
        acc.add(fe * fce);
    }
    let log_d = (d as f64).ln();
    Ok(acc.value() / (4.0 * d as f64) - log_d * log_d)
}

/// Main terms `π²d/(12c') − (log d)²` of `R(c, d)`, where `c' = c` for `d > c` and
/// `c' = c mod d` otherwise.
///
/// `c = 1` lies outside the regime this expansion describes and is rejected, as is
/// any `c` with `c mod d = 0`.
pub fn log_sine_kernel_asymptotic(c: u64, d: u64) -> Result<f64> {
    check_coprime(c, d)?;
    if c == 1 {
        return Err(Error::Untwisted);
    }
    let reduced = if d < c { c % d } else { c };
    if reduced == 0 {
        return Err(Error::InvalidArgument(format!(
            "c={c} is divisible by d={d}"
        )));
    }
    let log_d = (d as f64).ln();
    Ok(PI * PI * d as f64 / (12.0 * reduced as f64) - log_d * log_d)
}

/// `cot(πk/c)` for `0 ≤ k < c`, slot 0 set to 0, exact zero at `k = c/2` and exact
/// antisymmetry `cot(π(c−k)/c) = −cot(πk/c)`.
pub fn cot_table(c: u64) -> Vec<f64> {
    let mut table = vec![0.0; c as usize];
    for k in 1..c {
        let j = k.min(c - k);
        if 2 * k == c {
            table[k as usize] = 0.0;
        } else if j < k {
            table[k as usize] = -table[j as usize];
        } else {
            table[k as usize] = 1.0 / (PI * k as f64 / c as f64).tan();
        }
    }
    table
}

/// `S(c, d)`; depends on `d` only through `d mod c`.
pub fn cot_kernel(c: u64, d: i64) -> Result<f64> {
    if c == 0 {
        return Err(Error::Zero);
    }
    let d_red = d.rem_euclid(c as i64) as u64;
    if gcd(c, d_red) != 1 {
        return Err(Error::NotCoprime(c, d.unsigned_abs()));
    }
    let table = cot_table(c);
    let mut acc = CompensatedSum::new();
    for a in 1..c {
        acc.add(table[a as usize] * table[(a * d_red % c) as usize]);
    }
    Ok(acc.value())
}

/// The literal truncated sum and its two-term prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicProgression {
    pub truncated: f64,
    pub predicted: f64,
}

impl HarmonicProgression {
    pub fn difference(&self) -> f64 {
        self.truncated - self.predicted
    }
}

/// `Σ_{0<|n|<X, n≡b (mod a)} 1/|n|` against `(2 log X − 2 log a + 2γ)/a + F(b/a)/a`.
///
/// The two differ by `O(1/X)` uniformly in `a` and `b`.
pub fn harmonic_progression(
    cutoff: f64,
    a: u64,
    b: i64,
    cfg: &KernelConfig,
) -> Result<HarmonicProgression> {
    if a == 0 {
        return Err(Error::Zero);
    }
    if cutoff.is_nan() || cutoff <= a as f64 {
        return Err(Error::InvalidArgument(format!(
            "cutoff {cutoff} must exceed the step {a}"
        )));
    }
    let a_i = a as i64;
    // largest integer strictly below the cutoff
    let top = (cutoff.ceil() as i64) - 1;
    let mut terms = Vec::new();
    // n > 0 with n ≡ b, and n = −m < 0 with m ≡ −b
    for start in [b.rem_euclid(a_i), (-b).rem_euclid(a_i)] {
        let mut n = if start == 0 { a_i } else { start };
        while n <= top {
            terms.push(1.0 / n as f64);
            n += a_i;
        }
    }
    terms.sort_by(|x, y| x.total_cmp(y));
    let truncated = sum_f64(terms);
    let af = a as f64;
    let predicted = (2.0 * cutoff.ln() - 2.0 * af.ln() + 2.0 * EULER_GAMMA) / af
        + harmonic_kernel_rational(b, a, cfg)? / af;
    Ok(HarmonicProgression {
        truncated,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use statrs::function::gamma::digamma;
    use std::f64::consts::{LN_2, TAU};

    fn cfg() -> KernelConfig {
        KernelConfig::default()
    }

    /// Raw two-sided partial sums of the defining series, no pairing, no tail term.
    fn raw_series(x: f64, n_max: i64) -> f64 {
        let mut acc = CompensatedSum::new();
        for n in (1..=n_max).rev() {
            let n = n as f64;
            acc.add(1.0 / (n - x).abs() - 1.0 / n);
            acc.add(1.0 / (-n - x).abs() - 1.0 / n);
        }
        acc.add(1.0 / x.abs());
        acc.value()
    }

    fn digamma_form(x: f64) -> f64 {
        1.0 / x - 2.0 * EULER_GAMMA - digamma(1.0 - x) - digamma(1.0 + x)
    }

    #[test]
    fn config_validation() {
        assert!(KernelConfig::new(99, 1e-8).is_err());
        assert!(KernelConfig::new(100, 0.0).is_err());
        assert_eq!(KernelConfig::default().truncation(), 10_000);
        assert_eq!(KernelConfig::for_tolerance(1e-2).unwrap().truncation(), 100);
    }

    #[test]
    fn harmonic_kernel_vanishes_on_integers() {
        for n in -5..=5 {
            assert_eq!(harmonic_kernel(n as f64, &cfg()), 0.0);
        }
    }

    #[test]
    fn harmonic_kernel_at_one_half() {
        let expected = 4.0 * LN_2;
        assert!((harmonic_kernel(0.5, &cfg()) - expected).abs() < 1e-8);
        // raw series, 2·10⁶ terms: error ≈ x²/N² ≈ 6e-14
        assert!((raw_series(0.5, 2_000_000) - expected).abs() < 1e-8);
    }

    #[test]
    fn harmonic_kernel_matches_independent_forms() {
        for i in 1..200 {
            let x = i as f64 / 200.0;
            let f = harmonic_kernel(x, &cfg());
            assert!((f - digamma_form(x)).abs() < 1e-9, "x={x}");
        }
        for &x in &[0.1, 0.37, 0.5, 0.91] {
            let f = harmonic_kernel(x, &cfg());
            let raw = raw_series(x, 1_000_000);
            assert!((f - raw).abs() < 1e-10 + harmonic_kernel_tail_bound(x, &cfg()));
        }
    }

    #[test]
    fn printed_digamma_variant_is_not_the_series() {
        let printed = |x: f64| -2.0 * EULER_GAMMA + digamma(1.0 + x) + digamma(1.0 - x) + 1.0 / x;
        assert!((printed(0.5) - harmonic_kernel(0.5, &cfg())).abs() > 1.0);
    }

    #[test]
    fn harmonic_kernel_periodic_and_symmetric() {
        let c = cfg();
        let tol = c.tolerance();
        for i in 1..=1000 {
            let x = i as f64 / 1001.0 + 1e-4 * (i % 7) as f64;
            if x.fract() == 0.0 {
                continue;
            }
            let fx = harmonic_kernel(x, &c);
            assert!((fx - harmonic_kernel(x + 1.0, &c)).abs() < 2.0 * tol);
            assert!((fx - harmonic_kernel(1.0 - x, &c)).abs() < 2.0 * tol);
        }
        assert!((harmonic_kernel(0.25, &c) - harmonic_kernel(0.75, &c)).abs() < 2.0 * tol);
        assert!((harmonic_kernel(-0.3, &c) - harmonic_kernel(0.7, &c)).abs() < 2.0 * tol);
    }

    #[test]
    fn harmonic_kernel_divisor_identity_small() {
        let c = cfg();
        for d in 2..=100u64 {
            let s = sum_f64((1..d).map(|a| harmonic_kernel_rational(a as i64, d, &c).unwrap()));
            let expected = 2.0 * d as f64 * (d as f64).ln();
            assert!((s - expected).abs() < d as f64 * 1e-6, "d={d}");
        }
    }

    #[test]
    fn harmonic_remainder_properties() {
        let c = cfg();
        assert!(harmonic_remainder(1e-3, &c).unwrap().abs() < 1e-2);
        let g_half = harmonic_remainder(0.5, &c).unwrap();
        assert!((g_half - (4.0 * LN_2 - 3.0)).abs() < 1e-8);
        for i in 1..100 {
            let x = i as f64 / 100.0;
            let g = harmonic_remainder(x, &c).unwrap();
            assert!((g - harmonic_remainder(1.0 - x, &c).unwrap()).abs() < 1e-7);
            // |G(x)| ≤ C·x(1−x) with C = 1 (observed sup ≈ 0.91 at x = 1/2)
            assert!(g.abs() <= x * (1.0 - x), "x={x} G={g}");
        }
        // closed series for G
        for &x in &[0.05, 0.3, 0.5, 0.8] {
            let tail = sum_f64((2..2_000_000).rev().map(|n| {
                let n = n as f64;
                2.0 * x * x / (n * (n * n - x * x))
            }));
            let g = tail - x / (1.0 + x);
            assert!((g - harmonic_remainder(x, &c).unwrap()).abs() < 1e-9);
        }
        assert!(harmonic_remainder(0.0, &c).is_err());
        assert!(harmonic_remainder(1.0, &c).is_err());
    }

    #[test]
    fn log_sine_sum_examples() {
        assert_eq!(log_sine_sum(1).unwrap(), 0.0);
        assert!((log_sine_sum(3).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert!((log_sine_sum(100).unwrap() - 100f64.ln()).abs() < 1e-9);
        for m in 1..=500u64 {
            assert!((log_sine_sum(m).unwrap() - (m as f64).ln()).abs() < 1e-10 * m as f64);
        }
    }

    #[test]
    fn log_sine_kernel_examples() {
        for c in 1..10 {
            assert_eq!(log_sine_kernel(c, 1).unwrap(), 0.0);
        }
        let ln3 = 3f64.ln();
        assert!((log_sine_kernel(2, 3).unwrap() - ln3 * ln3 / 2.0).abs() < 1e-14);
        assert!(matches!(
            log_sine_kernel(2, 4),
            Err(Error::NotCoprime(2, 4))
        ));
        // direct evaluation without tables
        for (c, d) in [(2u64, 7u64), (3, 10), (5, 12), (7, 101)] {
            let direct: f64 = (1..d)
                .map(|k| {
                    let x = PI * k as f64 / d as f64;
                    let y = PI * (c * k) as f64 / d as f64;
                    (2.0 * x.sin()).ln() * (2.0 * y.sin()).abs().ln()
                })
                .sum();
            assert!((log_sine_kernel(c, d).unwrap() - direct).abs() < 1e-11);
        }
    }

    #[test]
    fn log_sine_kernel_reduces_mod_d_exactly() {
        for d in 2..=120u64 {
            for c in (d + 1)..(4 * d) {
                if gcd(c, d) == 1 {
                    assert_eq!(
                        log_sine_kernel(c, d).unwrap(),
                        log_sine_kernel(c % d, d).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn log_sine_kernel_via_harmonic_agrees() {
        let fine = KernelConfig::new(1_000_000, 1e-12).unwrap();
        assert_eq!(log_sine_kernel_via_harmonic(4, 1, &fine).unwrap(), 0.0);
        for (c, d) in [(2u64, 3u64), (3, 10)] {
            let r = log_sine_kernel(c, d).unwrap();
            let via = log_sine_kernel_via_harmonic(c, d, &fine).unwrap();
            assert!((r - via).abs() < 1e-6, "({c},{d}): {r} vs {via}");
        }
        let c = cfg();
        for d in 2..=60u64 {
            for cc in 1..d {
                if gcd(cc, d) == 1 {
                    let r = log_sine_kernel(cc, d).unwrap();
                    let via = log_sine_kernel_via_harmonic(cc, d, &c).unwrap();
                    assert!((r - via).abs() < 1e-6, "({cc},{d})");
                }
            }
        }
    }

    #[test]
    fn log_sine_kernel_asymptotic_cases() {
        let expected = PI * PI * 1001.0 / 24.0 - 1001f64.ln().powi(2);
        assert_eq!(log_sine_kernel_asymptotic(2, 1001).unwrap(), expected);
        // d < c uses c mod d
        assert_eq!(
            log_sine_kernel_asymptotic(13, 5).unwrap(),
            log_sine_kernel_asymptotic(3, 5).unwrap()
        );
        assert!(matches!(
            log_sine_kernel_asymptotic(1, 50),
            Err(Error::Untwisted)
        ));
        assert!(log_sine_kernel_asymptotic(3, 1).is_err());
        assert!(log_sine_kernel_asymptotic(4, 6).is_err());
    }

    #[test]
    fn cot_kernel_examples() {
        assert_eq!(cot_kernel(1, 5).unwrap(), 0.0);
        for d in [1, 3, 5, -1] {
            assert_eq!(cot_kernel(2, d).unwrap(), 0.0);
        }
        assert!((cot_kernel(3, 1).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((cot_kernel(3, 4).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((cot_kernel(3, 2).unwrap() + 2.0 / 3.0).abs() < 1e-14);
        assert!(cot_kernel(4, 6).is_err());
    }

    #[test]
    fn cot_kernel_reduces_mod_c_exactly() {
        for c in 1..=80u64 {
            for d in -(3 * c as i64)..(3 * c as i64) {
                if gcd(c, d.unsigned_abs()) == 1 {
                    assert_eq!(
                        cot_kernel(c, d).unwrap(),
                        cot_kernel(c, d.rem_euclid(c as i64)).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn harmonic_progression_examples() {
        let c = cfg();
        let x = 1e4;
        let p = harmonic_progression(x, 1, 0, &c).unwrap();
        assert_eq!(p.predicted, 2.0 * x.ln() + 2.0 * EULER_GAMMA);
        assert!(p.difference().abs() < 1e-3);
        // |difference| ≤ 2/X across steps and offsets
        for a in 1..=12u64 {
            for b in -(a as i64)..(2 * a as i64) {
                for x in [1e3, 1e4, 3.3e4] {
                    let p = harmonic_progression(x, a, b, &c).unwrap();
                    assert!(p.difference().abs() <= 2.0 / x, "a={a} b={b} X={x}");
                }
            }
        }
        assert!(harmonic_progression(3.0, 5, 1, &c).is_err());
    }

    #[test]
    fn log_expansion_of_unit_circle_points() {
        // −Σ_{0<|n|<X} zⁿ/(2|n|) → log|1−z|, tail ≤ 2/(|1−z|X)
        for d in 2..=50u64 {
            for k in 1..d {
                let theta = TAU * k as f64 / d as f64;
                let z = Complex64::from_polar(1.0, theta);
                let target = (Complex64::new(1.0, 0.0) - z).norm().ln();
                for x in [1_000u64, 10_000] {
                    let s = sum_f64((1..x).rev().map(|n| (n as f64 * theta).cos() / n as f64));
                    let bound = 2.0 / ((Complex64::new(1.0, 0.0) - z).norm() * x as f64);
                    assert!((-s - target).abs() <= bound, "d={d} k={k} X={x}");
                }
            }
        }
    }

    #[test]
    fn root_of_unity_sums() {
        use crate::arith::factorize;
        for f in 1..=100u64 {
            let fz = factorize(f).unwrap();
            for t in 0..(2 * f) {
                let zeta =
                    |a: u64| Complex64::from_polar(1.0, TAU * ((a * t) % f) as f64 / f as f64);
                // values f−1 / −1 hold for 1 ≤ a ≤ f−1 (the a = f term contributes 1)
                let full: Complex64 = (1..f).map(zeta).sum();
                let expected = if t % f == 0 { f as f64 - 1.0 } else { -1.0 };
                assert!((full - expected).norm() < 1e-9, "f={f} t={t}");

                let coprime: Complex64 = (1..=f).filter(|&a| gcd(a, f) == 1).map(zeta).sum();
                let g = gcd(t, f);
                let divisor_side: i64 = fz
                    .divisors()
                    .into_iter()
                    .filter(|d| g.is_multiple_of(*d))
                    .map(|d| crate::arith::mobius(f / d).unwrap() * d as i64)
                    .sum();
                assert!((coprime - divisor_side as f64).norm() < 1e-9, "f={f} t={t}");
            }
        }
    }
}
