//! Prefix sums `S_chi(x) = sum_{n <= x} chi(n)` for every character modulo `q`
//! at once.
//!
//! In discrete-log coordinates `S_{chi_a}(x) = sum_j b_j exp(2 pi i a j / (q-1))`
//! with `b_j = 1(g^j mod q <= x)`, so the whole table is one length-`(q-1)`
//! DFT. `q-1` is never a power of two; the planner picks mixed-radix, Rader or
//! Bluestein kernels as the factorisation requires.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::modarith::PrimeModulus;

/// `S_{chi_a}(x)` for every `a`, indexed by `a`.
#[derive(Debug, Clone)]
pub struct PrefixSumTable {
    pub q: u64,
    pub x: f64,
    pub values: Vec<Complex64>,
}

impl PrefixSumTable {
    /// `floor(x)`, the number of summed integers.
    pub fn count(&self) -> u64 {
        self.x.floor() as u64
    }
}

/// DFT input: `coeffs[j] = sum of w(n) over n = g^j (mod q)`.
#[derive(Debug, Clone)]
pub struct WeightedIndicator {
    coeffs: Vec<Complex64>,
}

impl WeightedIndicator {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    /// Folds weights on integers `n` into residue classes; multiples of `q` are dropped.
    pub fn fold<I>(modulus: &PrimeModulus, weights: I) -> Self
    where
        I: IntoIterator<Item = (u64, Complex64)>,
    {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); modulus.order() as usize];
        for (n, w) in weights {
            if let Some(j) = modulus.dlog(n) {
                coeffs[j as usize] += w;
            }
        }
        Self { coeffs }
    }

    /// Indicator of `1 <= n <= floor(x)`, for `x < q`.
    pub fn prefix(modulus: &PrimeModulus, x: f64) -> Self {
        let top = (x.floor() as u64).min(modulus.order());
        let coeffs = (0..modulus.order())
            .map(|j| {
                let on = modulus.power(j) <= top;
                Complex64::new(if on { 1.0 } else { 0.0 }, 0.0)
            })
            .collect();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
}

fn check_x(modulus: &PrimeModulus, x: f64) -> Result<()> {
    if !(x >= 1.0 && x <= modulus.q() as f64) {
        return Err(Error::InvalidArgument(format!(
            "x = {x} must satisfy 1 <= x <= q = {}",
            modulus.q()
        )));
    }
    Ok(())
}

/// Entry `a` is `sum_j coeffs[j] exp(2 pi i a j / (q-1))`.
pub fn weighted_char_sums(modulus: &PrimeModulus, w: &WeightedIndicator) -> Result<Vec<Complex64>> {
    let len = modulus.order() as usize;
    if w.coeffs.len() != len {
        return Err(Error::InvalidArgument(format!(
            "weighted indicator has length {}, expected q-1 = {len}",
            w.coeffs.len()
        )));
    }
    let mut buf = w.coeffs.clone();
    // The inverse transform carries the positive exponent and is unnormalised.
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    Ok(buf)
}

/// All prefix sums by one DFT, `O(q log q)`.
pub fn all_char_sums_fft(modulus: &PrimeModulus, x: f64) -> Result<PrefixSumTable> {
    check_x(modulus, x)?;
    let values = weighted_char_sums(modulus, &WeightedIndicator::prefix(modulus, x))?;
    Ok(PrefixSumTable {
        q: modulus.q(),
        x,
        values,
    })
}

/// All prefix sums by direct summation, `O(q x)`.
pub fn all_char_sums_naive(modulus: &PrimeModulus, x: f64) -> Result<PrefixSumTable> {
    check_x(modulus, x)?;
    let top = (x.floor() as u64).min(modulus.q() - 1);
    let order = modulus.order();
    let logs: Vec<u64> = (1..=top).map(|n| modulus.dlog(n).unwrap()).collect();
    let values = (0..order)
        .into_par_iter()
        .map(|a| {
            logs.iter()
                .map(|&j| modulus.root((a as u128 * j as u128 % order as u128) as u64))
                .sum()
        })
        .collect();
    Ok(PrefixSumTable {
        q: modulus.q(),
        x,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn full_period_vanishes() {
        let m = PrimeModulus::new(5).unwrap();
        for t in [
            all_char_sums_fft(&m, 4.0).unwrap(),
            all_char_sums_naive(&m, 4.0).unwrap(),
        ] {
            assert!((t.values[0] - c(4.0)).norm() < 1e-12);
            for v in &t.values[1..] {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn x_one_gives_ones() {
        let m = PrimeModulus::new(13).unwrap();
        for t in [
            all_char_sums_fft(&m, 1.0).unwrap(),
            all_char_sums_naive(&m, 1.0).unwrap(),
        ] {
            assert!(t.values.iter().all(|v| (v - c(1.0)).norm() < 1e-12));
        }
    }

    #[test]
    fn legendre_prefix_mod_seven() {
        let m = PrimeModulus::new(7).unwrap();
        for t in [
            all_char_sums_fft(&m, 3.0).unwrap(),
            all_char_sums_naive(&m, 3.0).unwrap(),
        ] {
            assert!((t.values[3] - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_of_constant_and_delta() {
        let m = PrimeModulus::new(11).unwrap();
        let ones = WeightedIndicator::new(vec![c(1.0); 10]);
        let out = weighted_char_sums(&m, &ones).unwrap();
        assert!((out[0] - c(10.0)).norm() < 1e-12);
        assert!(out[1..].iter().all(|v| v.norm() < 1e-12));
        let mut delta = vec![c(0.0); 10];
        delta[0] = c(1.0);
        let out = weighted_char_sums(&m, &WeightedIndicator::new(delta)).unwrap();
        assert!(out.iter().all(|v| (v - c(1.0)).norm() < 1e-12));
    }

    #[test]
    fn prefix_indicator_specialises() {
        let m = PrimeModulus::new(101).unwrap();
        let w = WeightedIndicator::fold(&m, (1..=37).map(|n| (n, c(1.0))));
        let a = weighted_char_sums(&m, &w).unwrap();
        let b = all_char_sums_fft(&m, 37.5).unwrap();
        for (u, v) in a.iter().zip(&b.values) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn wrong_length_and_bad_x_rejected() {
        let m = PrimeModulus::new(11).unwrap();
        assert!(weighted_char_sums(&m, &WeightedIndicator::new(vec![c(1.0); 3])).is_err());
        assert!(all_char_sums_fft(&m, 0.5).is_err());
        assert!(all_char_sums_fft(&m, 12.0).is_err());
    }
}
