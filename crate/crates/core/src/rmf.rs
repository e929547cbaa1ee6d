//! Steinhaus random multiplicative functions.
//!
//! `f(p)` is uniform on the unit circle and independent across primes; `f` is
//! extended completely multiplicatively. Each `f(p)` is drawn from a ChaCha8
//! stream keyed by `(seed, p)`, so enlarging `limit` never changes existing
//! values and samples can be built in any order or thread.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::primes::SpfTable;

/// The value `f(p)` of the Steinhaus function with the given seed.
pub fn steinhaus_value(seed: u64, p: u64) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p);
    let u: f64 = rng.random();
    Complex64::from_polar(1.0, TAU * u)
}

/// Seed of the `trial`-th sample derived from a master seed (SplitMix64 finaliser).
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Which integers a restricted sum keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeFilter {
    /// `P+(n) <= y`.
    Smooth(u64),
    /// `P-(n) > y`.
    Rough(u64),
}

/// `n = smooth * rough` with `P+(smooth) <= y < P-(rough)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothRoughSplit {
    pub smooth: u64,
    pub rough: u64,
}

/// Splits `n` into its `y`-smooth and `y`-rough parts. `1` counts as both.
pub fn smooth_rough_decompose(n: u64, y: u64) -> Result<SmoothRoughSplit> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut rest = n;
    let mut smooth = 1;
    let mut p = 2;
    while p <= y && p * p <= rest {
        while rest.is_multiple_of(p) {
            rest /= p;
            smooth *= p;
        }
        p += 1;
    }
    // whatever is left is 1 or a prime, or has all prime factors > y
    if rest > 1 && rest <= y {
        smooth *= rest;
        rest = 1;
    }
    Ok(SmoothRoughSplit { smooth, rough: rest })
}

/// One seeded realisation of `f` on `[1, limit]`.
#[derive(Debug, Clone)]
pub struct RmfSample {
    seed: u64,
    table: Arc<SpfTable>,
    /// `prime_values[p]` is `f(p)` for prime `p`, zero elsewhere.
    prime_values: Vec<Complex64>,
}

impl RmfSample {
    pub fn new(seed: u64, limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument(format!("limit {limit} must be at least 2")));
        }
        Ok(Self::with_table(seed, Arc::new(SpfTable::new(limit)?)))
    }

    /// Draws a sample over a shared factor table.
    pub fn with_table(seed: u64, table: Arc<SpfTable>) -> Self {
        let mut prime_values = vec![Complex64::new(0.0, 0.0); table.limit() as usize + 1];
        for &p in table.primes() {
            prime_values[p as usize] = steinhaus_value(seed, p);
        }
        Self {
            seed,
            table,
            prime_values,
        }
    }

    /// A deterministic assignment `p -> value(p)`, e.g. `f = 1`.
    pub fn from_fn(limit: u64, value: impl Fn(u64) -> Complex64) -> Result<Self> {
        let table = Arc::new(SpfTable::new(limit.max(2))?);
        let mut prime_values = vec![Complex64::new(0.0, 0.0); table.limit() as usize + 1];
        for &p in table.primes() {
            prime_values[p as usize] = value(p);
        }
        Ok(Self {
            seed: 0,
            table,
            prime_values,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn limit(&self) -> u64 {
        self.table.limit()
    }

    pub fn primes(&self) -> &[u64] {
        self.table.primes()
    }

    pub fn table(&self) -> &Arc<SpfTable> {
        &self.table
    }

    /// `f(p)`, or `None` when `p` is not a prime `<= limit`.
    pub fn at_prime(&self, p: u64) -> Option<Complex64> {
        if p > self.limit() || p < 2 || self.table.spf(p) != p {
            return None;
        }
        Some(self.prime_values[p as usize])
    }

    fn check(&self, n: u64) -> Result<()> {
        if n > self.limit() {
            return Err(Error::OutOfRange {
                what: "n",
                value: n,
                limit: self.limit(),
            });
        }
        Ok(())
    }

    /// `f(n)` by complete multiplicativity.
    pub fn f_at(&self, n: u64) -> Result<Complex64> {
        if n == 0 {
            return Err(Error::InvalidArgument("f is defined on n >= 1".into()));
        }
        self.check(n)?;
        let mut acc = Complex64::new(1.0, 0.0);
        let mut rest = n;
        while rest > 1 {
            let p = self.table.spf(rest);
            acc *= self.prime_values[p as usize];
            rest /= p;
        }
        Ok(acc)
    }

    /// `[0, f(1), ..., f(x)]`, built in one linear pass.
    pub fn values_up_to(&self, x: u64) -> Result<Vec<Complex64>> {
        self.check(x)?;
        let mut out = vec![Complex64::new(0.0, 0.0); x as usize + 1];
        if x >= 1 {
            out[1] = Complex64::new(1.0, 0.0);
        }
        for n in 2..=x as usize {
            let p = self.table.spf(n as u64) as usize;
            out[n] = self.prime_values[p] * out[n / p];
        }
        Ok(out)
    }

    /// `sum_{n <= x} f(n)`.
    pub fn partial_sum(&self, x: f64) -> Result<Complex64> {
        let top = floor_arg(x);
        let values = self.values_up_to(top)?;
        Ok(compensated_sum(values.into_iter().skip(1)))
    }

    /// `sum_{n <= x} f(n)` over `n` passing the prime-factor filter.
    pub fn restricted_sum(&self, x: f64, filter: PrimeFilter) -> Result<Complex64> {
        let top = floor_arg(x);
        let values = self.values_up_to(top)?;
        let keep = |n: u64| match filter {
            PrimeFilter::Smooth(y) => self.table.largest_prime_factor(n) <= y,
            PrimeFilter::Rough(y) => n == 1 || self.table.spf(n) > y,
        };
        Ok(compensated_sum(
            (1..=top).filter(|&n| keep(n)).map(|n| values[n as usize]),
        ))
    }
}

fn floor_arg(x: f64) -> u64 {
    if x < 1.0 {
        0
    } else {
        x.floor() as u64
    }
}

/// Neumaier-compensated complex summation.
pub fn compensated_sum(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let (mut sr, mut cr, mut si, mut ci) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for v in values {
        neumaier_step(&mut sr, &mut cr, v.re);
        neumaier_step(&mut si, &mut ci, v.im);
    }
    Complex64::new(sr + cr, si + ci)
}

fn neumaier_step(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

/// Largest `floor(x)^k` the exact moment enumeration accepts.
pub const EXACT_MOMENT_CAP: u64 = 100_000_000;

/// `E|sum_{n <= x} f(n)|^{2k}`, equal to the number of solutions of
/// `n_1 ... n_k = n_{k+1} ... n_{2k}` with all `n_i <= x`.
pub fn exact_moment_2k(x: f64, k: u32) -> Result<u128> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidArgument(format!("k = {k} must be 1, 2 or 3")));
    }
    let n = floor_arg(x);
    if n == 0 {
        return Ok(0);
    }
    let box_size = (n as u128).pow(k);
    if box_size > EXACT_MOMENT_CAP as u128 {
        return Err(Error::TooLarge(format!(
            "floor(x)^k = {box_size} exceeds {EXACT_MOMENT_CAP}"
        )));
    }
    if k == 1 {
        return Ok(n as u128);
    }
    let mut counts: HashMap<u64, u64> = HashMap::new();
    let mut products = vec![1u64];
    for _ in 0..k {
        products = products.iter().flat_map(|&p| (1..=n).map(move |m| p * m)).collect();
    }
    for p in products {
        *counts.entry(p).or_insert(0) += 1;
    }
    Ok(counts.values().map(|&c| (c as u128) * (c as u128)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic_and_restartable() {
        let a = RmfSample::new(42, 1000).unwrap();
        let b = RmfSample::new(42, 1000).unwrap();
        let c = RmfSample::new(42, 5000).unwrap();
        for &p in a.primes() {
            assert_eq!(a.at_prime(p), b.at_prime(p));
            assert_eq!(a.at_prime(p), c.at_prime(p));
        }
        let d = RmfSample::new(43, 1000).unwrap();
        assert_ne!(a.at_prime(2), d.at_prime(2));
        assert_ne!(a.at_prime(2), a.at_prime(3));
    }

    #[test]
    fn values_defined_on_primes_only() {
        let s = RmfSample::new(1, 10).unwrap();
        assert_eq!(s.primes(), &[2, 3, 5, 7]);
        assert!(s.at_prime(4).is_none());
        assert!(s.at_prime(11).is_none());
        for &p in s.primes() {
            assert!((s.at_prime(p).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn multiplicativity_and_range() {
        let s = RmfSample::new(9, 200).unwrap();
        assert_eq!(s.f_at(1).unwrap(), Complex64::new(1.0, 0.0));
        let f2 = s.at_prime(2).unwrap();
        let f3 = s.at_prime(3).unwrap();
        assert!((s.f_at(12).unwrap() - f2 * f2 * f3).norm() < 1e-12);
        let all = s.values_up_to(200).unwrap();
        for n in 1..=200 {
            assert!((all[n as usize] - s.f_at(n).unwrap()).norm() < 1e-12);
            assert!((all[n as usize].norm() - 1.0).abs() < 1e-10);
        }
        assert!(matches!(s.f_at(201), Err(Error::OutOfRange { .. })));
        assert!(matches!(s.partial_sum(500.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn partial_sum_small_cases() {
        let s = RmfSample::new(5, 100).unwrap();
        assert!((s.partial_sum(1.0).unwrap() - 1.0).norm() < 1e-15);
        let f2 = s.at_prime(2).unwrap();
        assert!((s.partial_sum(2.0).unwrap() - (f2 + 1.0)).norm() < 1e-15);
    }

    #[test]
    fn restricted_sums_by_enumeration() {
        let s = RmfSample::new(77, 100).unwrap();
        let f = |n| s.f_at(n).unwrap();
        let rough = s.restricted_sum(10.0, PrimeFilter::Rough(3)).unwrap();
        assert!((rough - (f(1) + f(5) + f(7))).norm() < 1e-12);
        let smooth = s.restricted_sum(10.0, PrimeFilter::Smooth(3)).unwrap();
        let expected: Complex64 = [1, 2, 3, 4, 6, 8, 9].iter().map(|&n| f(n)).sum();
        assert!((smooth - expected).norm() < 1e-12);
        let vacuous = s.restricted_sum(50.0, PrimeFilter::Smooth(50)).unwrap();
        assert!((vacuous - s.partial_sum(50.0).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn decomposition_examples() {
        let d = |n, y| smooth_rough_decompose(n, y).unwrap();
        assert_eq!(d(12, 2), SmoothRoughSplit { smooth: 4, rough: 3 });
        assert_eq!(d(1, 10), SmoothRoughSplit { smooth: 1, rough: 1 });
        assert_eq!(d(30, 3), SmoothRoughSplit { smooth: 6, rough: 5 });
        assert_eq!(d(49, 5), SmoothRoughSplit { smooth: 1, rough: 49 });
        assert_eq!(d(98, 7), SmoothRoughSplit { smooth: 98, rough: 1 });
    }

    #[test]
    fn exact_moment_examples() {
        assert_eq!(exact_moment_2k(2.0, 2).unwrap(), 6);
        assert_eq!(exact_moment_2k(3.0, 2).unwrap(), 15);
        for x in [1.0, 7.5, 40.0] {
            assert_eq!(exact_moment_2k(x, 1).unwrap(), x as u128);
        }
        assert!(matches!(exact_moment_2k(20_000.0, 2), Err(Error::TooLarge(_))));
        assert!(exact_moment_2k(5.0, 4).is_err());
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut vals = vec![Complex64::new(1e16, 0.0)];
        vals.extend(std::iter::repeat_n(Complex64::new(1.0, 0.0), 1000));
        vals.push(Complex64::new(-1e16, 0.0));
        assert_eq!(compensated_sum(vals).re, 1000.0);
    }
}
