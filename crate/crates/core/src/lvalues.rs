//! `L(1, χ)` for nontrivial characters through finite closed forms.
//!
//! For a nontrivial `χ mod f`:
//!
//! ```text
//! even χ:  L(1, χ) = −(1/f) Σ_{a=1}^{f−1} χ(a) V(a),   V(a) = Σ_{j=1}^{f−1} ζ_f^{aj} log(2 sin πj/f)
//! odd χ:   L(1, χ) = (π/2f) Σ_{a=1}^{f−1} χ(a) cot(πa/f)
//! ```
//!
//! `V` is real (the log-sine vector is symmetric under `j ↦ f − j`) and is the
//! discrete Fourier transform of `(0, log 2 sin(π/f), …, log 2 sin(π(f−1)/f))`.
//! [`l1_batch`] computes it once per modulus, directly below
//! [`DIRECT_DFT_CUTOFF`] and with an FFT above, then forms one outer sum per
//! character. [`l1_closed_form`] evaluates a single character from scratch and is
//! the reference the batch path is tested against.
//!
//! [`SeriesOracle`] is independent of both: it sums the Dirichlet series
//! `Σ χ(n)/n` over whole periods and closes it with an Abel-summation tail.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::{PI, TAU};

use crate::characters::{Character, Parity, UnitGroup};
use crate::kernels::{cot_table, log_sine_table};
use crate::par;
use crate::sum::{sum_f64, CompensatedComplexSum, CompensatedSum};
use crate::{Error, Result};

/// Moduli up to this size use the direct `O(f²)` transform in [`l1_batch`].
pub const DIRECT_DFT_CUTOFF: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    SeriesOracle,
}

/// Which transform computes `V(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transform {
    #[default]
    Auto,
    Direct,
    Fft,
}

/// `L(1, χ)` for every nontrivial `χ mod f`, indexed like [`UnitGroup::characters`].
#[derive(Debug, Clone)]
pub struct LValueTable {
    modulus: u64,
    values: Vec<Option<Complex64>>,
    method: Method,
}

impl LValueTable {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `None` for the trivial character (index 0).
    pub fn get(&self, index: usize) -> Option<Complex64> {
        self.values.get(index).copied().flatten()
    }

    /// Number of nontrivial characters covered.
    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(character index, L(1, χ))` for every nontrivial character.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
    }
}

fn check_character(group: &UnitGroup, chi: &Character) -> Result<()> {
    if chi.modulus() != group.modulus() {
        return Err(Error::ModulusMismatch {
            expected: group.modulus(),
            found: chi.modulus(),
        });
    }
    if chi.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    Ok(())
}

/// `cos(2πk/f)` for `0 ≤ k < f`, exactly symmetric in `k ↦ f − k`.
fn cos_table(f: u64) -> Vec<f64> {
    let n = f as usize;
    let mut table = vec![1.0; n];
    for k in 1..n {
        table[k] = if 2 * k > n {
            table[n - k]
        } else {
            (TAU * k as f64 / f as f64).cos()
        };
    }
    table
}

fn log_sine_transform_direct(f: u64) -> Vec<f64> {
    let logs = log_sine_table(f);
    let cosines = cos_table(f);
    let n = f as usize;
    par::map_range(n, |a| {
        let mut acc = CompensatedSum::new();
        let mut aj = 0usize;
        for &l in logs.iter().skip(1) {
            aj += a;
            if aj >= n {
                aj -= n;
            }
            acc.add(cosines[aj] * l);
        }
        acc.value()
    })
}

fn log_sine_transform_fft(f: u64) -> Vec<f64> {
    let mut buf: Vec<Complex64> = log_sine_table(f)
        .into_iter()
        .map(|l| Complex64::new(l, 0.0))
        .collect();
    let fft = FftPlanner::new().plan_fft_forward(buf.len());
    fft.process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// `V(a) = Σ_{j=1}^{f−1} ζ_f^{aj} log(2 sin πj/f)` for `0 ≤ a < f`.
pub fn log_sine_transform(f: u64, transform: Transform) -> Vec<f64> {
    if f <= 1 {
        return vec![0.0; f as usize];
    }
    match transform {
        Transform::Direct => log_sine_transform_direct(f),
        Transform::Fft => log_sine_transform_fft(f),
        Transform::Auto if f <= DIRECT_DFT_CUTOFF => log_sine_transform_direct(f),
        Transform::Auto => log_sine_transform_fft(f),
    }
}

/// `L(1, χ)` for one nontrivial character, evaluated from scratch.
pub fn l1_closed_form(group: &UnitGroup, chi: &Character) -> Result<Complex64> {
    check_character(group, chi)?;
    let f = group.modulus();
    let units = group.units();
    let values = group.values_on_units(chi);
    let ff = f as f64;
    match group.parity(chi) {
        Parity::Odd => {
            let cot = cot_table(f);
            let s = sum_closed(units, &values, |u| cot[u as usize]);
            Ok(s * (PI / (2.0 * ff)))
        }
        Parity::Even => {
            let logs = log_sine_table(f);
            let s = sum_closed(units, &values, |u| {
                let mut acc = CompensatedSum::new();
                for j in 1..f {
                    acc.add((TAU * ((u * j) % f) as f64 / ff).cos() * logs[j as usize]);
                }
                acc.value()
            });
            Ok(s * (-1.0 / ff))
        }
    }
}

fn sum_closed(units: &[u64], values: &[Complex64], weight: impl Fn(u64) -> f64) -> Complex64 {
    let mut acc = CompensatedComplexSum::new();
    for (&u, &v) in units.iter().zip(values) {
        acc.add(v * weight(u));
    }
    acc.value()
}

/// `(1/f) Σ_a χ(a) Σ_j ζ_f^{aj} (−log(2 sin πj/f) + i(πj/f − π/2))`, valid for
/// either parity before the parity-specific cancellations.
pub fn l1_generic_form(group: &UnitGroup, chi: &Character) -> Result<Complex64> {
    check_character(group, chi)?;
    let f = group.modulus();
    let ff = f as f64;
    let logs = log_sine_table(f);
    let kernel: Vec<Complex64> = (0..f)
        .map(|j| {
            if j == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(-logs[j as usize], PI * j as f64 / ff - PI / 2.0)
            }
        })
        .collect();
    let mut acc = CompensatedComplexSum::new();
    for (&u, v) in group.units().iter().zip(group.values_on_units(chi)) {
        let mut inner = CompensatedComplexSum::new();
        for j in 1..f {
            let zeta = Complex64::from_polar(1.0, TAU * ((u * j) % f) as f64 / ff);
            inner.add(zeta * kernel[j as usize]);
        }
        acc.add(v * inner.value());
    }
    Ok(acc.value() / ff)
}

/// All `L(1, χ)` for `χ mod f`, `f ≥ 3`, in one pass.
pub fn l1_batch(group: &UnitGroup) -> Result<LValueTable> {
    l1_batch_with(group, Transform::Auto)
}

/// [`l1_batch`] with an explicit choice of transform for `V`.
pub fn l1_batch_with(group: &UnitGroup, transform: Transform) -> Result<LValueTable> {
    let f = group.modulus();
    if f < 3 {
        return Err(Error::ModulusTooSmall(f, 3));
    }
    let ff = f as f64;
    let transform = log_sine_transform(f, transform);
    let cot = cot_table(f);
    let units = group.units();
    let even_weights: Vec<f64> = units.iter().map(|&u| -transform[u as usize] / ff).collect();
    let odd_weights: Vec<f64> = units
        .iter()
        .map(|&u| PI / (2.0 * ff) * cot[u as usize])
        .collect();

    let characters = group.characters();
    let values = par::map_slice(&characters, |chi| {
        if chi.is_trivial() {
            return None;
        }
        let weights = match group.parity(chi) {
            Parity::Even => &even_weights,
            Parity::Odd => &odd_weights,
        };
        let mut acc = CompensatedComplexSum::new();
        for (k, &w) in group.unit_root_indices(chi).into_iter().zip(weights) {
            acc.add(group.root(k) * w);
        }
        Some(acc.value())
    });
    Ok(LValueTable {
        modulus: f,
        values,
        method: Method::ClosedForm,
    })
}

/// Partial Dirichlet series over whole periods, shared by every character mod `f`.
///
/// With `N = n_periods · f`,
///
/// ```text
/// L(1, χ) ≈ Σ_{n≤N} χ(n)/n + Ā/(N+1),   Ā = (1/f) Σ_{n=1}^{f} Σ_{k≤n} χ(k)
/// ```
///
/// The tail `Σ_{n>N} χ(n)/n = Σ_{n>N} A(n)/(n(n+1))` follows from Abel summation
/// and `A(N) = 0`; replacing `A` by its period mean leaves an error of order
/// `1/n_periods²`. Without the correction the error is at most
/// `max|A|/(N+1) ≤ 1/n_periods`, which [`SeriesOracle::error_bound`] reports.
#[derive(Debug, Clone)]
pub struct SeriesOracle {
    modulus: u64,
    n_periods: u64,
    /// `Σ_{m<P} 1/(mf + r)` at index `r`, `1 ≤ r ≤ f`.
    residue_sums: Vec<f64>,
}

impl SeriesOracle {
    pub fn new(f: u64, n_periods: u64) -> Result<Self> {
        if f == 0 || n_periods == 0 {
            return Err(Error::Zero);
        }
        let residue_sums = (0..=f)
            .map(|r| {
                if r == 0 {
                    0.0
                } else {
                    sum_f64((0..n_periods).rev().map(|m| 1.0 / (m * f + r) as f64))
                }
            })
            .collect();
        Ok(Self {
            modulus: f,
            n_periods,
            residue_sums,
        })
    }

    pub fn n_periods(&self) -> u64 {
        self.n_periods
    }

    pub fn error_bound(&self) -> f64 {
        1.0 / self.n_periods as f64
    }

    pub fn evaluate(&self, group: &UnitGroup, chi: &Character) -> Result<Complex64> {
        check_character(group, chi)?;
        if group.modulus() != self.modulus {
            return Err(Error::ModulusMismatch {
                expected: self.modulus,
                found: group.modulus(),
            });
        }
        let f = self.modulus;
        let mut series = CompensatedComplexSum::new();
        let mut partial = Complex64::new(0.0, 0.0);
        let mut partial_sum = CompensatedComplexSum::new();
        for r in 1..=f {
            let v = group.eval(chi, r as i64);
            series.add(v * self.residue_sums[r as usize]);
            partial += v;
            partial_sum.add(partial);
        }
        let mean = partial_sum.value() / f as f64;
        let n_total = (self.n_periods * f) as f64;
        Ok(series.value() + mean / (n_total + 1.0))
    }
}

/// `Σ χ(n)/n` summed over `n_periods` full periods, with the Abel tail.
pub fn l1_series_oracle(group: &UnitGroup, chi: &Character, n_periods: u64) -> Result<Complex64> {
    check_character(group, chi)?;
    SeriesOracle::new(group.modulus(), n_periods)?.evaluate(group, chi)
}

/// All `L(1, χ)` from the series oracle.
pub fn l1_series_table(group: &UnitGroup, n_periods: u64) -> Result<LValueTable> {
    let oracle = SeriesOracle::new(group.modulus(), n_periods)?;
    let values = group
        .characters()
        .iter()
        .map(|chi| {
            if chi.is_trivial() {
                Ok(None)
            } else {
                oracle.evaluate(group, chi).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LValueTable {
        modulus: group.modulus(),
        values,
        method: Method::SeriesOracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::unit_group;

    fn nontrivial(group: &UnitGroup) -> Vec<Character> {
        group.characters().into_iter().skip(1).collect()
    }

    #[test]
    fn closed_form_examples() {
        let g4 = unit_group(4).unwrap();
        let chi4 = &nontrivial(&g4)[0];
        let l4 = l1_closed_form(&g4, chi4).unwrap();
        assert!((l4 - Complex64::new(PI / 4.0, 0.0)).norm() < 1e-14);

        let g3 = unit_group(3).unwrap();
        let l3 = l1_closed_form(&g3, &nontrivial(&g3)[0]).unwrap();
        let expected = PI / (3.0 * 3f64.sqrt());
        assert!((l3 - Complex64::new(expected, 0.0)).norm() < 1e-14);

        let g5 = unit_group(5).unwrap();
        let quad = nontrivial(&g5)
            .into_iter()
            .find(|c| g5.parity(c) == Parity::Even)
            .unwrap();
        let closed = l1_closed_form(&g5, &quad).unwrap();
        let oracle = l1_series_oracle(&g5, &quad, 200_000).unwrap();
        assert!((closed - oracle).norm() < 1e-9);
        // L(1, (·/5)) = 2 log(φ)/√5
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((closed.re - 2.0 * golden.ln() / 5f64.sqrt()).abs() < 1e-14);

        assert!(matches!(
            l1_closed_form(&g5, &g5.characters()[0]),
            Err(Error::TrivialCharacter)
        ));
    }

    #[test]
    fn series_oracle_examples() {
        let g4 = unit_group(4).unwrap();
        let chi = &nontrivial(&g4)[0];
        let v = l1_series_oracle(&g4, chi, 100_000).unwrap();
        assert!((v.re - PI / 4.0).abs() < 1e-4);

        let g3 = unit_group(3).unwrap();
        let v = l1_series_oracle(&g3, &nontrivial(&g3)[0], 100_000).unwrap();
        assert!((v.re - PI / (3.0 * 3f64.sqrt())).abs() < 1e-4);

        let g7 = unit_group(7).unwrap();
        let oracle = SeriesOracle::new(7, 1000).unwrap();
        for chi in nontrivial(&g7) {
            let a = oracle.evaluate(&g7, &chi).unwrap();
            let b = oracle.evaluate(&g7, &g7.conjugate(&chi)).unwrap();
            assert_eq!(a, b.conj());
        }
        assert!(l1_series_oracle(&g7, &g7.characters()[0], 10).is_err());
    }

    #[test]
    fn batch_matches_per_character() {
        for f in 3..=200u64 {
            let g = unit_group(f).unwrap();
            let table = l1_batch(&g).unwrap();
            assert_eq!(table.len() as u64, g.order() - 1);
            assert!(table.get(0).is_none());
            for (i, chi) in g.characters().iter().enumerate().skip(1) {
                let single = l1_closed_form(&g, chi).unwrap();
                let batch = table.get(i).unwrap();
                assert!((single - batch).norm() < 1e-10, "f={f} i={i}");
            }
        }
        assert!(matches!(
            l1_batch(&unit_group(2).unwrap()),
            Err(Error::ModulusTooSmall(2, 3))
        ));
    }

    #[test]
    fn fft_and_direct_transforms_agree() {
        for f in [3u64, 4, 17, 97, 128, 255, 513, 997, 1024, 2310] {
            let direct = log_sine_transform(f, Transform::Direct);
            let fft = log_sine_transform(f, Transform::Fft);
            let max = direct
                .iter()
                .zip(&fft)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(max < 1e-10, "f={f} max={max}");
        }
    }

    #[test]
    fn closed_form_matches_series_oracle() {
        for f in 3..=60u64 {
            let g = unit_group(f).unwrap();
            let table = l1_batch(&g).unwrap();
            let oracle = SeriesOracle::new(f, 1_000_000 / f).unwrap();
            for (i, chi) in g.characters().iter().enumerate().skip(1) {
                let o = oracle.evaluate(&g, chi).unwrap();
                assert!((table.get(i).unwrap() - o).norm() < 1e-3, "f={f} i={i}");
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for f in 3..=200u64 {
            let g = unit_group(f).unwrap();
            let table = l1_batch(&g).unwrap();
            for (i, chi) in g.characters().iter().enumerate().skip(1) {
                let j = g.character_index(&g.conjugate(chi));
                assert!((table.get(j).unwrap() - table.get(i).unwrap().conj()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn generic_form_matches_parity_forms() {
        for f in 3..=80u64 {
            let g = unit_group(f).unwrap();
            for chi in nontrivial(&g) {
                let generic = l1_generic_form(&g, &chi).unwrap();
                let closed = l1_closed_form(&g, &chi).unwrap();
                assert!((generic - closed).norm() < 1e-9, "f={f}");
            }
        }
    }

    #[test]
    fn batch_is_independent_of_thread_count() {
        let g = unit_group(840).unwrap();
        let one = par::with_threads(1, || l1_batch(&g).unwrap());
        let many = par::with_threads(6, || l1_batch(&g).unwrap());
        for ((_, a), (_, b)) in one.iter().zip(many.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
