//! Prime sieves, smallest-prime-factor tables and a deterministic primality test.

use crate::error::{Error, Result};

/// Largest bound any sieve in the crate will accept.
pub const SIEVE_CAP: u64 = 100_000_000;

const SEGMENT: usize = 1 << 16;

/// All primes `p <= n`, by a segmented sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Result<Vec<u64>> {
    if n > SIEVE_CAP {
        return Err(Error::TooLarge(format!(
            "prime sieve bound {n} exceeds cap {SIEVE_CAP}"
        )));
    }
    if n < 2 {
        return Ok(Vec::new());
    }
    let root = (n as f64).sqrt() as u64 + 1;
    let small = simple_sieve(root.min(n));
    let mut out = small.clone();
    let mut lo = root.min(n) + 1;
    let mut seg = vec![true; SEGMENT];
    while lo <= n {
        let hi = (lo + SEGMENT as u64 - 1).min(n);
        let len = (hi - lo + 1) as usize;
        seg[..len].fill(true);
        for &p in &small {
            if p * p > hi {
                break;
            }
            let mut start = lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut m = start;
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        out.extend((0..len).filter(|&i| seg[i]).map(|i| lo + i as u64));
        lo = hi + 1;
    }
    Ok(out)
}

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| is[i]).map(|i| i as u64).collect()
}

/// Primes in the half-open real interval `(lo, hi]`.
pub fn primes_in(lo: f64, hi: f64) -> Result<Vec<u64>> {
    if !(hi >= 2.0) || hi <= lo {
        return Ok(Vec::new());
    }
    if hi > SIEVE_CAP as f64 {
        return Err(Error::TooLarge(format!(
            "prime interval upper end {hi} exceeds cap {SIEVE_CAP}"
        )));
    }
    let top = hi.floor() as u64;
    Ok(primes_up_to(top)?.into_iter().filter(|&p| (p as f64) > lo).collect())
}

/// Smallest-prime-factor table for `0..=limit` (entries 0 and 1 are 0 and 1).
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
    primes: Vec<u64>,
}

impl SpfTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit > SIEVE_CAP {
            return Err(Error::TooLarge(format!(
                "factor table bound {limit} exceeds cap {SIEVE_CAP}"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        if n >= 1 {
            spf[1] = 1;
        }
        let mut primes = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let si = spf[i];
            for &p in &primes {
                let p32 = p as u32;
                if p32 > si || i * p as usize > n {
                    break;
                }
                spf[i * p as usize] = p32;
            }
        }
        Ok(Self { spf, primes })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Smallest prime factor of `n` (1 for `n = 1`).
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    /// Largest prime factor of `n` (1 for `n = 1`).
    pub fn largest_prime_factor(&self, mut n: u64) -> u64 {
        let mut best = 1;
        while n > 1 {
            let p = self.spf(n);
            best = p;
            n /= p;
        }
        best
    }

    /// Prime factorisation as (prime, exponent) pairs in increasing order.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf(n);
            n /= p;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

/// Distinct prime factors of `n` by trial division.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let ps = primes_up_to(200_000).unwrap();
        let brute: Vec<u64> = (2..=200_000u64).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, brute);
        assert_eq!(primes_up_to(100).unwrap().len(), 25);
    }

    #[test]
    fn sieve_refuses_above_cap() {
        assert!(matches!(primes_up_to(SIEVE_CAP + 1), Err(Error::TooLarge(_))));
    }

    #[test]
    fn miller_rabin_known_values() {
        assert!(is_prime(2));
        assert!(is_prime(20011));
        assert!(!is_prime(9));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn spf_factorization() {
        let t = SpfTable::new(1000).unwrap();
        assert_eq!(t.factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(t.largest_prime_factor(360), 5);
        assert_eq!(t.largest_prime_factor(1), 1);
        assert_eq!(t.primes().len(), 168);
    }

    #[test]
    fn primes_in_half_open() {
        assert_eq!(primes_in(1.0, 3.0).unwrap(), vec![2, 3]);
        assert_eq!(primes_in(2.0, 7.0).unwrap(), vec![3, 5, 7]);
        assert!(primes_in(1.0, 1.5).unwrap().is_empty());
    }
}
