//! Expected Euler products, prime cosine sums and Mertens-type products.
//!
//! For a Steinhaus `f` and `100 (1 + max(alpha^2, beta^2)) <= z < y`,
//!
//! ```text
//! E prod_{z <= p <= y} |1 - f(p) p^{-1/2-s1-i t1}|^{-2 alpha} |1 - f(p) p^{-1/2-s2-i t2}|^{-2 beta}
//!   = exp( sum_{z <= p <= y} [ alpha^2 / p^{1+2 s1} + beta^2 / p^{1+2 s2}
//!                              + 2 alpha beta cos((t2 - t1) log p) / p^{1+s1+s2} ]
//!          + O(max(alpha, alpha^3, beta, beta^3) / sqrt z) ).
//! ```
//!
//! The main term is evaluated exactly; the `O` bracket is reported, not added.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::Calibration;
use crate::error::{Error, Result};
use crate::moments::{MomentEstimate, MomentKind};
use crate::primes::primes_up_to;
use crate::quadrature::{integrate_panels, QuadOptions};
use crate::rmf::{steinhaus_value, trial_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerProductSpec {
    pub alpha: f64,
    pub beta: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub t1: f64,
    pub t2: f64,
    pub z: f64,
    pub y: f64,
}

impl EulerProductSpec {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [self.alpha, self.beta, self.sigma1, self.sigma2];
        if nonneg.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::HypothesisViolated(
                "alpha, beta, sigma1, sigma2 must be non-negative".into(),
            ));
        }
        let floor = 100.0 * (1.0 + self.alpha.powi(2).max(self.beta.powi(2)));
        if !(floor <= self.z && self.z < self.y) {
            return Err(Error::HypothesisViolated(format!(
                "need 100(1 + max(alpha^2, beta^2)) = {floor} <= z = {} < y = {}",
                self.z, self.y
            )));
        }
        Ok(())
    }

    /// The two per-prime factors `(alpha, sigma1, t1)` and `(beta, sigma2, t2)`.
    pub fn factors(&self) -> [EulerFactor; 2] {
        [
            EulerFactor {
                alpha: self.alpha,
                sigma: self.sigma1,
                t: self.t1,
            },
            EulerFactor {
                alpha: self.beta,
                sigma: self.sigma2,
                t: self.t2,
            },
        ]
    }

    /// Primes `p` with `z <= p <= y`.
    pub fn primes(&self) -> Result<Vec<u64>> {
        let z = self.z;
        Ok(primes_up_to(self.y.floor() as u64)?
            .into_iter()
            .filter(|&p| p as f64 >= z)
            .collect())
    }
}

/// `|1 - u p^{-1/2 - sigma - i t}|^{-2 alpha}` for one prime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerFactor {
    pub alpha: f64,
    pub sigma: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerMainTerm {
    /// The exact prime sum in the exponent.
    pub exponent: f64,
    /// `max(alpha, alpha^3, beta, beta^3) / sqrt(z)`, the size of the omitted error.
    pub bracket: f64,
    pub prime_count: usize,
}

impl EulerMainTerm {
    pub fn value(&self) -> f64 {
        self.exponent.exp()
    }
}

/// The exponent of the main term, summed over the given primes.
pub fn prime_sum_exponent(primes: &[u64], spec: &EulerProductSpec) -> f64 {
    let EulerProductSpec {
        alpha,
        beta,
        sigma1,
        sigma2,
        t1,
        t2,
        ..
    } = *spec;
    primes
        .iter()
        .map(|&p| {
            let p = p as f64;
            let lp = p.ln();
            alpha * alpha * (-(1.0 + 2.0 * sigma1) * lp).exp()
                + beta * beta * (-(1.0 + 2.0 * sigma2) * lp).exp()
                + 2.0 * alpha * beta * ((t2 - t1) * lp).cos() * (-(1.0 + sigma1 + sigma2) * lp).exp()
        })
        .sum()
}

pub fn euler_expectation_main_term(spec: &EulerProductSpec) -> Result<EulerMainTerm> {
    spec.validate()?;
    let primes = spec.primes()?;
    let a = spec.alpha.max(spec.alpha.powi(3)).max(spec.beta).max(spec.beta.powi(3));
    Ok(EulerMainTerm {
        exponent: prime_sum_exponent(&primes, spec),
        bracket: a / spec.z.sqrt(),
        prime_count: primes.len(),
    })
}

fn factor_product(p: u64, u: Complex64, factors: &[EulerFactor]) -> f64 {
    let lp = (p as f64).ln();
    factors
        .iter()
        .map(|fa| {
            let z = Complex64::from_polar((-(0.5 + fa.sigma) * lp).exp(), -fa.t * lp);
            (Complex64::new(1.0, 0.0) - u * z).norm_sqr().powf(-fa.alpha)
        })
        .product()
}

/// `E prod_i |1 - u p^{-1/2 - sigma_i - i t_i}|^{-2 alpha_i}` for `u` uniform on the
/// unit circle, by adaptive quadrature over the angle.
pub fn single_prime_expectation_oracle(p: u64, factors: &[EulerFactor]) -> Result<f64> {
    for fa in factors {
        let radius = (p as f64).powf(-(0.5 + fa.sigma));
        if radius >= 1.0 && fa.alpha > 0.0 {
            return Err(Error::Divergent(format!("|p^(-1/2-sigma)| = {radius} >= 1 at p = {p}")));
        }
    }
    if factors.iter().all(|f| f.alpha == 0.0) {
        return Ok(1.0);
    }
    let breaks: Vec<f64> = (0..=8).map(|i| TAU * i as f64 / 8.0).collect();
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let r = integrate_panels(
        |theta| Complex64::new(factor_product(p, Complex64::from_polar(1.0, theta), factors), 0.0),
        &breaks,
        opts,
    )?;
    Ok(r.value.re / TAU)
}

/// `log E prod_{z <= p <= y}` computed prime by prime with the quadrature oracle.
pub fn euler_product_log_oracle(spec: &EulerProductSpec) -> Result<f64> {
    spec.validate()?;
    let factors = spec.factors();
    spec.primes()?
        .par_iter()
        .map(|&p| single_prime_expectation_oracle(p, &factors).map(f64::ln))
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.iter().sum())
}

/// Monte-Carlo estimate of the expected Euler product over Steinhaus samples.
pub fn euler_product_mc(spec: &EulerProductSpec, trials: u64, seed: u64) -> Result<MomentEstimate> {
    spec.validate()?;
    if trials < 2 {
        return Err(Error::InvalidArgument("need at least two trials".into()));
    }
    let primes = spec.primes()?;
    let factors = spec.factors();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            primes
                .iter()
                .map(|&p| factor_product(p, steinhaus_value(s, p), &factors).ln())
                .sum::<f64>()
                .exp()
        })
        .collect();
    Ok(MomentEstimate::from_samples(&values, MomentKind::McRmf))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CosineBranch {
    /// `|t| <= 1 / log y`, bound `log log y`.
    Small,
    /// `1 / log y < |t| <= 10`, bound `log(1/|t|)`.
    Mid,
    /// `|t| > 10`, bound `log log |t|`.
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosineSumResult {
    pub t: f64,
    pub y: f64,
    /// `sum_{p <= y} cos(t log p) / p`.
    pub value: f64,
    pub branch: CosineBranch,
    /// Leading term of the active branch.
    pub bound: f64,
    pub slack: f64,
}

impl CosineSumResult {
    pub fn within_bound(&self) -> bool {
        self.value <= self.bound + self.slack
    }
}

pub fn cosine_sum(t: f64, y: f64) -> Result<CosineSumResult> {
    cosine_sum_with_slack(t, y, Calibration::default().cosine_slack)
}

pub fn cosine_sum_with_slack(t: f64, y: f64, slack: f64) -> Result<CosineSumResult> {
    if !(y >= 2.0) {
        return Err(Error::InvalidArgument(format!("y = {y} must be at least 2")));
    }
    let primes = primes_up_to(y.floor() as u64)?;
    let value = primes
        .iter()
        .map(|&p| {
            let p = p as f64;
            (t * p.ln()).cos() / p
        })
        .sum();
    let at = t.abs();
    let (branch, bound) = if at <= 1.0 / y.ln() {
        (CosineBranch::Small, y.ln().ln())
    } else if at <= 10.0 {
        (CosineBranch::Mid, (1.0 / at).ln())
    } else {
        (CosineBranch::Large, at.ln().ln())
    };
    Ok(CosineSumResult {
        t,
        y,
        value,
        branch,
        bound,
        slack,
    })
}

/// `prod_{p <= y} (1 - 1/p)`.
pub fn mertens_product(y: f64) -> Result<f64> {
    if !(y >= 2.0) {
        return Err(Error::InvalidArgument(format!("y = {y} must be at least 2")));
    }
    Ok(primes_up_to(y.floor() as u64)?
        .iter()
        .map(|&p| (1.0 - 1.0 / p as f64).ln())
        .sum::<f64>()
        .exp())
}

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `e^{-gamma}`, the limit of `log y * prod_{p <= y}(1 - 1/p)`.
pub fn mertens_third_limit() -> f64 {
    (-EULER_GAMMA).exp()
}
