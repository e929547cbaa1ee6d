//! Arithmetic modulo a prime `q`: primitive root, discrete logarithms and
//! Dirichlet characters.
//!
//! Characters are labelled by `a` in `[0, q-2]` through the generator `g`:
//! `chi_a(g^j) = exp(2 pi i a j / (q-1))`, and `chi_a(n) = 0` when `q | n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::primes::{distinct_prime_factors, is_prime, pow_mod};

/// Default memory cap for the discrete-log and root-of-unity tables.
pub const DEFAULT_MEMORY_CAP: u64 = 2 << 30;

const MAX_MODULUS: u64 = 1 << 31;

/// Bytes used per residue by the tables of [`PrimeModulus`].
const BYTES_PER_RESIDUE: u64 = 4 + 4 + 16;

/// A prime modulus together with its character-group coordinates.
#[derive(Debug, Clone)]
pub struct PrimeModulus {
    q: u64,
    g: u64,
    /// `dlog[n]` for `1 <= n < q`; entry 0 is unused.
    dlog: Vec<u32>,
    /// `pow[j] = g^j mod q` for `0 <= j < q-1`.
    pow: Vec<u32>,
    /// `roots[j] = exp(2 pi i j / (q-1))`.
    roots: Vec<Complex64>,
}

/// Label `a` of the character `chi_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharacterIndex(pub u64);

impl CharacterIndex {
    pub const PRINCIPAL: CharacterIndex = CharacterIndex(0);

    pub fn is_principal(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// The exponent `kappa`: 0 for even characters, 1 for odd ones.
    pub fn kappa(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Parity of `chi_a`. For odd prime `q`, `chi_a(-1) = (-1)^a`.
pub fn parity(a: CharacterIndex) -> Parity {
    if a.0.is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Smallest primitive root modulo the prime `q`.
pub fn primitive_root(q: u64) -> u64 {
    if q == 2 {
        return 1;
    }
    let order = q - 1;
    let factors = distinct_prime_factors(order);
    (2..q)
        .find(|&g| factors.iter().all(|&l| pow_mod(g, order / l, q) != 1))
        .expect("a prime modulus always has a primitive root")
}

impl PrimeModulus {
    /// Builds the modulus with the default memory cap.
    pub fn new(q: u64) -> Result<Self> {
        Self::with_memory_cap(q, DEFAULT_MEMORY_CAP)
    }

    pub fn with_memory_cap(q: u64, memory_cap: u64) -> Result<Self> {
        if q < 3 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if q > MAX_MODULUS {
            return Err(Error::TooLarge(format!("modulus {q} exceeds 2^31")));
        }
        let bytes = q.saturating_mul(BYTES_PER_RESIDUE);
        if bytes > memory_cap {
            return Err(Error::TooLarge(format!(
                "tables for q = {q} need {bytes} bytes, cap is {memory_cap}"
            )));
        }
        let g = primitive_root(q);
        let order = (q - 1) as usize;
        let mut dlog = vec![u32::MAX; q as usize];
        let mut pow = vec![0u32; order];
        let mut cur = 1u64;
        for (j, slot) in pow.iter_mut().enumerate() {
            *slot = cur as u32;
            dlog[cur as usize] = j as u32;
            cur = cur * g % q;
        }
        debug_assert_eq!(cur, 1);
        let roots = (0..order)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / order as f64))
            .collect();
        Ok(Self { q, g, dlog, pow, roots })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// The primitive root used as coordinate generator.
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// `phi(q) = q - 1`, the number of characters.
    pub fn order(&self) -> u64 {
        self.q - 1
    }

    /// Discrete logarithm of `n` to base `g`, or `None` when `q | n`.
    pub fn dlog(&self, n: u64) -> Option<u64> {
        let r = (n % self.q) as usize;
        (r != 0).then(|| self.dlog[r] as u64)
    }

    /// `g^j mod q`.
    pub fn power(&self, j: u64) -> u64 {
        self.pow[(j % self.order()) as usize] as u64
    }

    /// `exp(2 pi i j / (q-1))`.
    pub fn root(&self, j: u64) -> Complex64 {
        self.roots[(j % self.order()) as usize]
    }

    pub fn characters(&self) -> impl Iterator<Item = CharacterIndex> {
        (0..self.order()).map(CharacterIndex)
    }

    /// `chi_a(n)`.
    pub fn char_value(&self, a: CharacterIndex, n: u64) -> Complex64 {
        match self.dlog(n) {
            None => Complex64::new(0.0, 0.0),
            Some(j) => {
                let idx = (a.0 as u128 * j as u128 % self.order() as u128) as u64;
                self.roots[idx as usize]
            }
        }
    }

    /// A borrowed view of one character, usable as a multiplicative source.
    pub fn character(&self, a: CharacterIndex) -> Character<'_> {
        Character {
            modulus: self,
            index: a,
        }
    }
}

/// One Dirichlet character modulo a prime.
#[derive(Debug, Clone, Copy)]
pub struct Character<'a> {
    pub modulus: &'a PrimeModulus,
    pub index: CharacterIndex,
}

impl Character<'_> {
    pub fn value(&self, n: u64) -> Complex64 {
        self.modulus.char_value(self.index, n)
    }

    pub fn parity(&self) -> Parity {
        parity(self.index)
    }
}
