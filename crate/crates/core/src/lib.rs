//! Twisted quadratic moments of Dirichlet L-functions at `s = 1`.
//!
//! For a modulus `f` and a twist `c` coprime to `f`, this crate evaluates
//!
//! ```text
//! M(f, c) = Σ_{χ ≠ χ₀ mod f} χ(c) |L(1, χ)|²
//! ```
//!
//! together with its even part `M₊` and odd part `M₋` in three independent ways:
//!
//! * exactly, through finite divisor sums of log-sine and cotangent kernels
//!   ([`moments::m_plus_exact`], [`moments::m_minus_exact`]);
//! * by brute force, enumerating every character and every `L(1, χ)`
//!   ([`moments::BruteMoments`]);
//! * asymptotically, through the two-term main terms
//!   ([`moments::m_asymptotic`], [`moments::m_plus_asymptotic`]).
//!
//! The [`sweep`] and [`verify`] modules drive parameter sweeps and identity
//! suites on top of these.
//!
//! Data-parallel loops run on rayon when the default `parallel` feature is on and
//! fall back to plain iterators otherwise. Results are bitwise identical either way.

pub mod arith;
pub mod characters;
mod error;
pub mod kernels;
pub mod lvalues;
pub mod moments;
pub mod par;
pub mod sum;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
