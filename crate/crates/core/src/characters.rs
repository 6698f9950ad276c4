//! Dirichlet characters mod `f` through the cyclic decomposition of `(ℤ/fℤ)*`.
//!
//! The unit group is split by CRT into prime-power components: an odd `pᵏ` gives
//! one cyclic factor of order `φ(pᵏ)` generated by a primitive root, `4` gives the
//! factor `⟨−1⟩`, and `2ᵏ` with `k ≥ 3` gives `⟨−1⟩ × ⟨5⟩`. Each local generator is
//! lifted to a global generator that is `1` on every other component.
//!
//! A [`Character`] is an exponent vector against those generators. Evaluation goes
//! through a discrete-log table built once per modulus and a table of `L`-th roots
//! of unity, `L` being the exponent of the group, so every character value is read
//! from the same table entry wherever it appears.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::arith::{factorize, gcd, lcm, primitive_root};
use crate::{Error, Result};

const NOT_A_UNIT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

/// One Dirichlet character, as exponents against [`UnitGroup::generators`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    modulus: u64,
    exponents: Vec<u64>,
}

impl Character {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

/// Generators, orders and discrete logarithms for `(ℤ/fℤ)*`.
///
/// Immutable after construction; share it freely across threads.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    modulus: u64,
    generators: Vec<u64>,
    orders: Vec<u64>,
    /// `L / orderᵢ`, the step in the root table per unit of exponent `i`.
    scales: Vec<u64>,
    exponent: u64,
    units: Vec<u64>,
    /// `dlog[r * rank + i]` for residue `r`, or `NOT_A_UNIT`.
    dlog: Vec<u32>,
    roots: Vec<Complex64>,
}

struct Component {
    modulus: u64,
    /// `(local generator, order)` pairs.
    generators: Vec<(u64, u64)>,
    /// Local discrete logs for every residue mod `modulus`.
    dlog: Box<dyn Fn(u64) -> Vec<u64>>,
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// `x ≡ g (mod q)`, `x ≡ 1 (mod f/q)`.
fn lift(g: u64, q: u64, f: u64) -> u64 {
    let m = f / q;
    if m == 1 {
        return g % f;
    }
    let t = ((g + q - 1) % q) as u128 * mod_inverse(m % q, q) as u128 % q as u128;
    ((1 + m as u128 * t) % f as u128) as u64
}

fn power_table(g: u64, order: u64, q: u64) -> Vec<u64> {
    // table[x] = k with g^k ≡ x, u64::MAX where undefined
    let mut table = vec![u64::MAX; q as usize];
    let mut x = 1u64;
    for k in 0..order {
        table[x as usize] = k;
        x = x * g % q;
    }
    table
}

fn components(f: u64) -> Result<Vec<Component>> {
    let fz = factorize(f)?;
    let mut out = Vec::new();
    for &(p, e) in fz.factors() {
        let q = p.pow(e);
        if p == 2 {
            match e {
                1 => {}
                2 => out.push(Component {
                    modulus: 4,
                    generators: vec![(3, 2)],
                    dlog: Box::new(|a| vec![u64::from(a % 4 == 3)]),
                }),
                _ => {
                    let order5 = q / 4;
                    let table = power_table(5, order5, q);
                    out.push(Component {
                        modulus: q,
                        generators: vec![(q - 1, 2), (5, order5)],
                        dlog: Box::new(move |a| {
                            let a = a % q;
                            let negated = a % 4 == 3;
                            let b = if negated { q - a } else { a };
                            vec![u64::from(negated), table[b as usize]]
                        }),
                    });
                }
            }
        } else {
            let g = primitive_root(q)?;
            let order = (p - 1) * p.pow(e - 1);
            let table = power_table(g, order, q);
            out.push(Component {
                modulus: q,
                generators: vec![(g, order)],
                dlog: Box::new(move |a| vec![table[(a % q) as usize]]),
            });
        }
    }
    Ok(out)
}

/// Builds the unit group structure of `ℤ/fℤ`.
pub fn unit_group(f: u64) -> Result<UnitGroup> {
    if f == 0 {
        return Err(Error::Zero);
    }
    let comps = components(f)?;
    let generators: Vec<u64> = comps
        .iter()
        .flat_map(|c| {
            c.generators
                .iter()
                .map(move |&(g, _)| lift(g, c.modulus, f))
        })
        .collect();
    let orders: Vec<u64> = comps
        .iter()
        .flat_map(|c| c.generators.iter().map(|&(_, o)| o))
        .collect();
    let exponent = orders.iter().fold(1, |acc, &o| lcm(acc, o));
    let scales = orders.iter().map(|&o| exponent / o).collect();
    let rank = orders.len();

    let mut dlog = vec![NOT_A_UNIT; f as usize * rank];
    let mut units = Vec::new();
    for r in 0..f {
        if gcd(r, f) != 1 {
            continue;
        }
        units.push(r);
        let mut slot = r as usize * rank;
        for c in &comps {
            for e in (c.dlog)(r) {
                dlog[slot] = e as u32;
                slot += 1;
            }
        }
    }

    Ok(UnitGroup {
        modulus: f,
        generators,
        orders,
        scales,
        exponent,
        units,
        dlog,
        roots: root_table(exponent),
    })
}

/// `exp(2πik/n)` for `0 ≤ k < n`, with `roots[n-k]` the exact conjugate of `roots[k]`.
fn root_table(n: u64) -> Vec<Complex64> {
    let n_us = n as usize;
    let mut roots = vec![Complex64::new(1.0, 0.0); n_us];
    for k in 1..n_us {
        if 2 * k > n_us {
            roots[k] = roots[n_us - k].conj();
        } else if 2 * k == n_us {
            roots[k] = Complex64::new(-1.0, 0.0);
        } else if 4 * k == n_us {
            roots[k] = Complex64::new(0.0, 1.0);
        } else {
            let (s, c) = (TAU * k as f64 / n as f64).sin_cos();
            roots[k] = Complex64::new(c, s);
        }
    }
    roots
}

impl UnitGroup {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// Group order `φ(f)`.
    pub fn order(&self) -> u64 {
        self.units.len() as u64
    }

    /// Exponent of the group: lcm of the generator orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Residues in `[0, f)` coprime to `f`, ascending.
    pub fn units(&self) -> &[u64] {
        &self.units
    }

    /// Discrete logarithm of `a` against the generators, `None` off the unit group.
    pub fn dlog(&self, a: i64) -> Option<&[u32]> {
        let r = a.rem_euclid(self.modulus as i64) as usize;
        let rank = self.orders.len();
        let entry = &self.dlog[r * rank..(r + 1) * rank];
        let unit = if rank > 0 {
            entry[0] != NOT_A_UNIT
        } else {
            gcd(r as u64, self.modulus) == 1
        };
        if !unit {
            None
        } else {
            Some(entry)
        }
    }

    /// `exp(2πi k / exponent)` read from the shared root table.
    #[inline]
    pub fn root(&self, k: u64) -> Complex64 {
        self.roots[(k % self.exponent) as usize]
    }

    /// All `φ(f)` characters in lexicographic order of exponent vectors; index 0 is trivial.
    pub fn characters(&self) -> Vec<Character> {
        let mut out = Vec::with_capacity(self.units.len());
        let mut exps = vec![0u64; self.orders.len()];
        loop {
            out.push(Character {
                modulus: self.modulus,
                exponents: exps.clone(),
            });
            // odometer, last position fastest
            let mut i = exps.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                exps[i] += 1;
                if exps[i] < self.orders[i] {
                    break;
                }
                exps[i] = 0;
            }
        }
    }

    /// Position of `chi` in [`UnitGroup::characters`].
    pub fn character_index(&self, chi: &Character) -> usize {
        chi.exponents
            .iter()
            .zip(&self.orders)
            .fold(0u64, |acc, (&e, &o)| acc * o + e) as usize
    }

    pub fn conjugate(&self, chi: &Character) -> Character {
        Character {
            modulus: chi.modulus,
            exponents: chi
                .exponents
                .iter()
                .zip(&self.orders)
                .map(|(&e, &o)| (o - e) % o)
                .collect(),
        }
    }

    /// Root-table index of `χ(a)`, or `None` when `gcd(a, f) > 1`.
    #[inline]
    pub fn root_index(&self, chi: &Character, a: i64) -> Option<u64> {
        self.dlog(a).map(|d| self.index_from_dlog(chi, d))
    }

    #[inline]
    fn index_from_dlog(&self, chi: &Character, dlog: &[u32]) -> u64 {
        let mut k = 0u64;
        for ((&e, &d), &s) in chi.exponents.iter().zip(dlog).zip(&self.scales) {
            k += e * d as u64 % self.exponent * s;
        }
        k % self.exponent
    }

    pub fn eval(&self, chi: &Character, a: i64) -> Complex64 {
        assert_eq!(chi.modulus, self.modulus, "character from another modulus");
        match self.root_index(chi, a) {
            Some(k) => self.roots[k as usize],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `χ(u)` for every `u` in [`UnitGroup::units`], same order.
    pub fn values_on_units(&self, chi: &Character) -> Vec<Complex64> {
        self.unit_root_indices(chi)
            .into_iter()
            .map(|k| self.roots[k as usize])
            .collect()
    }

    /// Root-table indices of `χ(u)` for every unit `u`, same order as [`UnitGroup::units`].
    pub fn unit_root_indices(&self, chi: &Character) -> Vec<u64> {
        let rank = self.orders.len();
        self.units
            .iter()
            .map(|&u| {
                let r = u as usize;
                self.index_from_dlog(chi, &self.dlog[r * rank..(r + 1) * rank])
            })
            .collect()
    }

    /// Parity from the exact root index of `χ(−1)`.
    pub fn parity(&self, chi: &Character) -> Parity {
        match self.root_index(chi, -1) {
            Some(k) if 2 * k == self.exponent => Parity::Odd,
            _ => Parity::Even,
        }
    }
}

/// Convenience: all characters mod `f`.
pub fn all_characters(f: u64) -> Result<(UnitGroup, Vec<Character>)> {
    let group = unit_group(f)?;
    let chars = group.characters();
    Ok((group, chars))
}
