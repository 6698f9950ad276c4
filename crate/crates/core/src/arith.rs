//! Elementary arithmetic: factorization, Möbius, Euler's totient, divisors,
//! modular exponentiation and primitive roots.
//!
//! Moduli in scope stay below ~10⁶, so factorization is plain trial division and
//! every divisor sum is generated from a [`Factorization`] rather than by testing
//! candidates.

use crate::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// `base^exp mod modulus`, with 128-bit intermediates.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Prime-power decomposition, primes strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn mobius(&self) -> i64 {
        if self.is_squarefree() {
            if self.factors.len().is_multiple_of(2) {
                1
            } else {
                -1
            }
        } else {
            0
        }
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// All divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Divisors `d` with `μ(n/d) ≠ 0`, paired with `μ(n/d)`, ascending in `d`.
    ///
    /// These are the only terms that survive in `Σ_{d|n} μ(n/d) g(d)`.
    pub fn mobius_complement_divisors(&self) -> Vec<(u64, i64)> {
        let base: u64 = self.factors.iter().map(|&(p, e)| p.pow(e - 1)).product();
        // d = base · (subset of primes) leaves n/d = product of the other primes
        let start_sign = if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        };
        let mut out = vec![(base, start_sign)];
        for &(p, _) in &self.factors {
            let len = out.len();
            for i in 0..len {
                let (d, sign) = out[i];
                out.push((d * p, -sign));
            }
        }
        out.sort_unstable();
        out
    }

    /// `Σ_{p|n} log(p) / (p − 1)`.
    pub fn mobius_log_sum(&self) -> f64 {
        self.primes()
            .map(|p| (p as f64).ln() / (p - 1) as f64)
            .sum()
    }
}

/// Trial-division factorization; `factorize(1)` is the empty product.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { n, factors })
}

pub fn mobius(n: u64) -> Result<i64> {
    Ok(factorize(n)?.mobius())
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(factorize(n)?.euler_phi())
}

/// `Σ_{p|f} log(p)/(p−1)`, so that `Σ_{d|f} μ(d) log(d)/d = −(φ(f)/f)·mobius_log_sum(f)`.
pub fn mobius_log_sum(f: u64) -> Result<f64> {
    Ok(factorize(f)?.mobius_log_sum())
}

pub fn is_prime(n: u64) -> bool {
    n >= 2
        && factorize(n)
            .map(|fz| fz.factors == [(n, 1)])
            .unwrap_or(false)
}

/// Primes in `[lo, hi]` by a sieve of Eratosthenes.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let n = hi as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    (lo.max(2)..=hi)
        .filter(|&k| !composite[k as usize])
        .collect()
}

/// Multiplicative order of `g` modulo `m`, given the factorization of the group
/// order `phi`. Assumes `gcd(g, m) = 1`.
pub fn multiplicative_order(g: u64, m: u64, phi: &Factorization) -> u64 {
    let mut order = phi.n();
    for &(l, e) in phi.factors() {
        for _ in 0..e {
            if mod_pow(g, order / l, m) == 1 {
                order /= l;
            } else {
                break;
            }
        }
    }
    order
}

/// Smallest generator of `(ℤ/qℤ)*` for an odd prime power `q`.
///
/// Candidates are tried upward from 2; `g` is accepted when `g^(φ(q)/ℓ) ≠ 1` for
/// every prime `ℓ | φ(q)`.
pub fn primitive_root(q: u64) -> Result<u64> {
    let fz = factorize(q)?;
    if q.is_multiple_of(2) || fz.factors().len() != 1 {
        return Err(Error::NotOddPrimePower(q));
    }
    let phi = fz.euler_phi();
    let phi_fz = factorize(phi)?;
    (2..q)
        .filter(|&g| gcd(g, q) == 1)
        .find(|&g| phi_fz.primes().all(|l| mod_pow(g, phi / l, q) != 1))
        .ok_or(Error::NotOddPrimePower(q))
}
