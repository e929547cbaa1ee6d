//! Moment estimators over characters and Steinhaus samples, and a log-log
//! shape diagnostic.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charsum::{all_char_sums_fft, PrefixSumTable};
use crate::error::{Error, Result};
use crate::modarith::{CharacterIndex, PrimeModulus};
use crate::primes::SpfTable;
use crate::proxy::{ProxyEvaluator, ProxyParams};
use crate::rmf::{compensated_sum, trial_seed, RmfSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentKind {
    ExactCharacters,
    McRmf,
    ExactDiagonal,
}

/// Normalisation of a character average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Divisor {
    /// `phi(q) = q - 1`.
    #[default]
    Phi,
    /// `q - 2`, the number of non-principal characters.
    NonPrincipal,
}

impl Divisor {
    pub fn value(self, q: u64) -> f64 {
        match self {
            Divisor::Phi => (q - 1) as f64,
            Divisor::NonPrincipal => (q - 2) as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub kind: MomentKind,
    pub divisor: Option<Divisor>,
}

pub(crate) fn sum_f64(values: impl IntoIterator<Item = f64>) -> f64 {
    compensated_sum(values.into_iter().map(|v| Complex64::new(v, 0.0))).re
}

impl MomentEstimate {
    /// Sample mean with `stderr = sd / sqrt(n)`.
    pub fn from_samples(values: &[f64], kind: MomentKind) -> Self {
        let n = values.len() as f64;
        let mean = sum_f64(values.iter().copied()) / n;
        let var = if values.len() > 1 {
            sum_f64(values.iter().map(|v| (v - mean).powi(2))) / (n - 1.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            stderr: (var / n).sqrt(),
            trials: values.len() as u64,
            kind,
            divisor: None,
        }
    }

    pub fn exact(value: f64, count: u64, kind: MomentKind, divisor: Option<Divisor>) -> Self {
        Self {
            value,
            stderr: 0.0,
            trials: count,
            kind,
            divisor,
        }
    }
}

/// `|z|^{2k}`, with `0^{2k} = 0` for `k > 0`.
pub fn abs_pow(z: Complex64, k: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    let n = z.norm_sqr();
    if n == 0.0 {
        0.0
    } else {
        (k * n.ln()).exp()
    }
}

/// Average of `|S_chi|^{2k}` over a prefix-sum table.
pub fn moment_from_table(table: &PrefixSumTable, k: f64, exclude_principal: bool, divisor: Divisor) -> MomentEstimate {
    let start = usize::from(exclude_principal);
    let terms: Vec<f64> = table.values[start..].par_iter().map(|&s| abs_pow(s, k)).collect();
    MomentEstimate::exact(
        sum_f64(terms) / divisor.value(table.q),
        (table.values.len() - start) as u64,
        MomentKind::ExactCharacters,
        Some(divisor),
    )
}

/// `(1/d) sum_chi |sum_{n <= x} chi(n)|^{2k}` by the DFT table.
pub fn char_moment(
    modulus: &PrimeModulus,
    x: f64,
    k: f64,
    exclude_principal: bool,
    divisor: Divisor,
) -> Result<MomentEstimate> {
    check_k_moment(k)?;
    let table = all_char_sums_fft(modulus, x)?;
    Ok(moment_from_table(&table, k, exclude_principal, divisor))
}

fn check_k_moment(k: f64) -> Result<()> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("k must be a finite real >= 0, got {k}")));
    }
    Ok(())
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two trials, got {trials}"
        )));
    }
    Ok(())
}

/// Monte-Carlo estimate of `E |sum_{n <= x} f(n)|^{2k}`.
pub fn rmf_moment_mc(x: f64, k: f64, trials: u64, seed: u64) -> Result<MomentEstimate> {
    Ok(rmf_moment_grid(&[x], k, trials, seed)?.remove(0))
}

/// One estimate per `x`, all from the same samples.
pub fn rmf_moment_grid(xs: &[f64], k: f64, trials: u64, seed: u64) -> Result<Vec<MomentEstimate>> {
    check_k_moment(k)?;
    check_trials(trials)?;
    if xs.is_empty() || xs.iter().any(|&x| !(x >= 1.0)) {
        return Err(Error::InvalidArgument("every x must be >= 1".into()));
    }
    let top = xs.iter().fold(1.0f64, |a, &b| a.max(b)).floor() as u64;
    let table = Arc::new(SpfTable::new(top.max(2))?);
    let cuts: Vec<u64> = xs.iter().map(|x| x.floor() as u64).collect();
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let sample = RmfSample::with_table(trial_seed(seed, i), Arc::clone(&table));
            let values = sample.values_up_to(top).expect("x within table");
            let mut prefix = Vec::with_capacity(values.len() + 1);
            prefix.push(Complex64::new(0.0, 0.0));
            let mut acc = Complex64::new(0.0, 0.0);
            for v in values.into_iter().skip(1) {
                acc += v;
                prefix.push(acc);
            }
            cuts.iter().map(|&c| abs_pow(prefix[c as usize], k)).collect()
        })
        .collect();
    Ok((0..xs.len())
        .map(|j| {
            let col: Vec<f64> = per_trial.iter().map(|row| row[j]).collect();
            MomentEstimate::from_samples(&col, MomentKind::McRmf)
        })
        .collect())
}

/// `log R(chi_a)` for every `a`, principal included at index 0.
pub fn proxy_logs(modulus: &PrimeModulus, params: &ProxyParams) -> Result<Vec<f64>> {
    let ev = ProxyEvaluator::new(params)?;
    modulus
        .characters()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&a| ev.r_full_log(&modulus.character(a)))
        .collect()
}

/// Errors unless `prod_m y_m^{4 J_m} x < q`.
pub fn check_cross_length(modulus: &PrimeModulus, x: f64, params: &ProxyParams) -> Result<()> {
    let log_len = params.desk_length_log() + x.ln();
    if log_len >= (modulus.q() as f64).ln() {
        return Err(Error::LengthViolation {
            length: log_len.exp(),
            q: modulus.q(),
        });
    }
    Ok(())
}

/// `(1/phi(q)) sum_{chi != chi_0} |S_chi(x)|^2 R(chi)`.
pub fn cross_moment(modulus: &PrimeModulus, x: f64, params: &ProxyParams) -> Result<f64> {
    check_cross_length(modulus, x, params)?;
    let table = all_char_sums_fft(modulus, x)?;
    let logs = proxy_logs(modulus, params)?;
    Ok(cross_from_parts(&table, &logs))
}

pub(crate) fn cross_from_parts(table: &PrefixSumTable, logs: &[f64]) -> f64 {
    let terms = table.values[1..]
        .iter()
        .zip(&logs[1..])
        .map(|(s, &lr)| s.norm_sqr() * lr.exp());
    sum_f64(terms) / Divisor::Phi.value(table.q)
}

pub(crate) fn power_from_logs(q: u64, logs: &[f64], k: f64) -> f64 {
    let e = k / (k - 1.0);
    sum_f64(logs[1..].iter().map(|&lr| (e * lr).exp())) / Divisor::Phi.value(q)
}

/// `(1/phi(q)) sum_{chi != chi_0} R(chi)^{k/(k-1)}`.
pub fn proxy_power_moment(modulus: &PrimeModulus, params: &ProxyParams) -> Result<f64> {
    let logs = proxy_logs(modulus, params)?;
    Ok(power_from_logs(modulus.q(), &logs, params.k))
}

/// `R(chi_a)` for one character.
pub fn proxy_value(modulus: &PrimeModulus, params: &ProxyParams, a: CharacterIndex) -> Result<f64> {
    ProxyEvaluator::new(params)?.r_full_eval(&modulus.character(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub exponent_stderr: f64,
    pub points: usize,
}

impl ShapeFit {
    /// Normal-approximation interval `exponent +- z * stderr`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (
            self.exponent - z * self.exponent_stderr,
            self.exponent + z * self.exponent_stderr,
        )
    }
}

/// Least-squares fit of `log(value)` against `log log(scale)`.
pub fn shape_fit(points: &[(f64, f64)]) -> Result<ShapeFit> {
    if points.len() < 4 {
        return Err(Error::Degenerate(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(s, v)| !(s > std::f64::consts::E) || !(v > 0.0)) {
        return Err(Error::Degenerate(
            "scales must exceed e and values must be positive".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|(s, _)| s.ln().ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 1e-300) {
        return Err(Error::Degenerate("scales are not distinct".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(ShapeFit {
        exponent: slope,
        intercept,
        residual: (ssr / n).sqrt(),
        exponent_stderr: (ssr / (n - 2.0) / sxx).sqrt(),
        points: points.len(),
    })
}

/// Fits `log(moment / x^k)` against `log log x`.
pub fn shape_fit_moments(xs: &[f64], moments: &[f64], k: f64) -> Result<ShapeFit> {
    if xs.len() != moments.len() {
        return Err(Error::InvalidArgument("xs and moments differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = xs.iter().zip(moments).map(|(&x, &m)| (x, m / x.powf(k))).collect();
    shape_fit(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_moment_example() {
        let m = PrimeModulus::new(11).unwrap();
        let e = char_moment(&m, 5.0, 1.0, true, Divisor::Phi).unwrap();
        assert!((e.value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn trivial_cases() {
        let m = PrimeModulus::new(5).unwrap();
        assert!(char_moment(&m, 4.0, 3.0, true, Divisor::Phi).unwrap().value < 1e-20);
        let m = PrimeModulus::new(101).unwrap();
        let e = char_moment(&m, 1.0, 2.7, false, Divisor::Phi).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mc_deterministic_and_second_moment() {
        let a = rmf_moment_mc(100.0, 1.0, 2000, 11).unwrap();
        let b = rmf_moment_mc(100.0, 1.0, 2000, 11).unwrap();
        assert_eq!(a, b);
        assert!((a.value - 100.0).abs() <= 3.0 * a.stderr);
    }

    #[test]
    fn planted_shape() {
        let pts: Vec<f64> = [1e2, 1e3, 1e4, 1e5, 1e6].to_vec();
        let ms: Vec<f64> = pts.iter().map(|&x: &f64| x * x * x.ln().powi(4)).collect();
        let fit = shape_fit_moments(&pts, &ms, 2.0).unwrap();
        assert!((fit.exponent - 4.0).abs() < 1e-6);
        let flat: Vec<(f64, f64)> = pts.iter().map(|&x| (x, 3.0)).collect();
        assert!(shape_fit(&flat).unwrap().exponent.abs() < 1e-12);
        let same = vec![(10.0, 1.0); 4];
        assert!(matches!(shape_fit(&same), Err(Error::Degenerate(_))));
    }
}
