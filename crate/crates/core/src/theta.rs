//! `theta(1, chi) = sum_n chi(n) n^kappa exp(-pi n^2 / q)` for every character,
//! its moments, and numeric checks of the supporting lemmas.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::charsum::{weighted_char_sums, WeightedIndicator};
use crate::error::{Error, Result};
use crate::modarith::{parity, CharacterIndex, Parity, PrimeModulus};
use crate::moments::{abs_pow, sum_f64, Divisor, MomentEstimate, MomentKind};
use crate::primes::primes_up_to;
use crate::quadrature::{integrate_panels, QuadOptions};
use crate::rmf::RmfSample;
use crate::source::MultiplicativeSource;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub a: u64,
    pub kappa: u32,
    pub value: Complex64,
    pub truncation_point: f64,
    pub tail_bound: f64,
}

/// `sqrt(q) (log q)^2`.
pub fn default_truncation(q: u64) -> f64 {
    let qf = q as f64;
    qf.sqrt() * qf.ln().powi(2)
}

/// `q^{1 + kappa} exp(-pi T^2 / q)`.
pub fn theta_tail_bound(q: u64, kappa: u32, truncation: f64) -> f64 {
    let qf = q as f64;
    qf.powi(1 + kappa as i32) * (-PI * truncation * truncation / qf).exp()
}

fn theta_weight(n: u64, kappa: u32, q: f64) -> f64 {
    let nf = n as f64;
    nf.powi(kappa as i32) * (-PI * nf * nf / q).exp()
}

pub fn theta_all(modulus: &PrimeModulus) -> Result<Vec<ThetaValue>> {
    theta_all_truncated(modulus, default_truncation(modulus.q()))
}

/// All `theta(1, chi_a)` from one weighted DFT per parity.
pub fn theta_all_truncated(modulus: &PrimeModulus, truncation: f64) -> Result<Vec<ThetaValue>> {
    let q = modulus.q();
    if q < 11 {
        return Err(Error::InvalidArgument(format!("theta needs q >= 11, got {q}")));
    }
    if !(truncation >= 1.0) {
        return Err(Error::InvalidArgument(format!("truncation point {truncation} below 1")));
    }
    let top = truncation.floor() as u64;
    let qf = q as f64;
    let by_parity: Vec<Vec<Complex64>> = [0u32, 1]
        .par_iter()
        .map(|&kappa| {
            let w = WeightedIndicator::fold(
                modulus,
                (1..=top).map(|n| (n, Complex64::new(theta_weight(n, kappa, qf), 0.0))),
            );
            weighted_char_sums(modulus, &w)
        })
        .collect::<Result<_>>()?;
    Ok(modulus
        .characters()
        .map(|a| {
            let kappa = parity(a).kappa();
            ThetaValue {
                a: a.0,
                kappa,
                value: by_parity[kappa as usize][a.0 as usize],
                truncation_point: truncation,
                tail_bound: theta_tail_bound(q, kappa, truncation),
            }
        })
        .collect())
}

/// `(1/phi(q)) sum |theta(1, chi)|^{2k}` over even `chi != chi_0`, or over all odd `chi`.
pub fn theta_moment(modulus: &PrimeModulus, k: f64, which: Parity) -> Result<MomentEstimate> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("k must be a finite real >= 0, got {k}")));
    }
    let thetas = theta_all(modulus)?;
    Ok(theta_moment_from(&thetas, modulus.q(), k, which))
}

pub fn theta_moment_from(thetas: &[ThetaValue], q: u64, k: f64, which: Parity) -> MomentEstimate {
    let terms: Vec<f64> = thetas
        .iter()
        .filter(|t| t.kappa == which.kappa() && t.a != 0)
        .map(|t| abs_pow(t.value, k))
        .collect();
    let count = terms.len() as u64;
    MomentEstimate::exact(
        sum_f64(terms) / Divisor::Phi.value(q),
        count,
        MomentKind::ExactCharacters,
        Some(Divisor::Phi),
    )
}

/// `(2/phi(q)) sum_{chi even} chi(n) conj chi(m)`.
pub fn even_orthogonality_check(modulus: &PrimeModulus, n: u64, m: u64) -> Result<f64> {
    let q = modulus.q();
    for v in [n, m] {
        if v == 0 || v >= q {
            return Err(Error::OutOfRange {
                what: "residue",
                value: v,
                limit: q - 1,
            });
        }
    }
    let s: Complex64 = modulus
        .characters()
        .filter(|&a| parity(a) == Parity::Even)
        .map(|a| modulus.char_value(a, n) * modulus.char_value(a, m).conj())
        .sum();
    Ok(2.0 * s.re / Divisor::Phi.value(q))
}

/// `g(t) = t^kappa sum_{P+(m) <= y} m^kappa exp(-pi (m t)^2 / q) f(m)`.
pub fn g_value(sample: &RmfSample, q: u64, y_smooth: u64, t: f64, kappa: u32) -> Result<Complex64> {
    let qf = q as f64;
    let top = ((745.0 * qf / PI).sqrt() / t).ceil() as u64 + 1;
    if top > sample.limit() {
        return Err(Error::OutOfRange {
            what: "g(t) summation length",
            value: top,
            limit: sample.limit(),
        });
    }
    let table = sample.table();
    let values = sample.values_up_to(top)?;
    let s: Complex64 = (1..=top)
        .filter(|&m| table.largest_prime_factor(m) <= y_smooth)
        .map(|m| {
            let mf = m as f64;
            values[m as usize] * mf.powi(kappa as i32) * (-PI * (mf * t).powi(2) / qf).exp()
        })
        .sum();
    Ok(s * t.powi(kappa as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzProbe {
    pub lhs: f64,
    pub rhs_scale: f64,
}

/// `|g(t + alpha) - g(t)|` against `alpha sqrt(q) / t^2` (or `alpha q / t^2` when odd).
pub fn g_lipschitz_probe(
    sample: &RmfSample,
    q: u64,
    y_smooth: u64,
    t: f64,
    alpha: f64,
    kappa: u32,
) -> Result<LipschitzProbe> {
    if !(alpha > 0.0 && alpha < t) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < alpha < t, got alpha = {alpha}, t = {t}"
        )));
    }
    let lhs = (g_value(sample, q, y_smooth, t + alpha, kappa)? - g_value(sample, q, y_smooth, t, kappa)?).norm();
    let qf = q as f64;
    let scale = if kappa == 0 { qf.sqrt() } else { qf };
    Ok(LipschitzProbe {
        lhs,
        rhs_scale: alpha * scale / (t * t),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinCheck {
    pub s: f64,
    pub numeric: Complex64,
    pub closed_form: Complex64,
    /// Bound on the part of the closed form owed to smooth `m` beyond the enumeration cap.
    pub truncation_bound: f64,
    pub quadrature_error: f64,
}

impl MellinCheck {
    pub fn relative_error(&self) -> f64 {
        (self.numeric - self.closed_form).norm() / self.closed_form.norm()
    }
}

const SMOOTH_ENUM_CAP: usize = 200_000;

/// `y`-smooth `m <= cap` with `f(m)`, ascending.
fn smooth_values<S: MultiplicativeSource + ?Sized>(
    primes: &[u64],
    source: &S,
    cap: u64,
) -> Result<Vec<(u64, Complex64)>> {
    let fp: Vec<Complex64> = primes.iter().map(|&p| source.at_prime(p)).collect();
    let mut out = vec![(1u64, Complex64::new(1.0, 0.0))];
    let mut stack = vec![(1u64, Complex64::new(1.0, 0.0), 0usize)];
    while let Some((m, v, start)) = stack.pop() {
        for i in start..primes.len() {
            let Some(next) = m.checked_mul(primes[i]).filter(|&n| n <= cap) else {
                break;
            };
            let nv = v * fp[i];
            out.push((next, nv));
            if out.len() > SMOOTH_ENUM_CAP {
                return Err(Error::TooLarge(format!(
                    "more than {SMOOTH_ENUM_CAP} smooth integers below {cap}"
                )));
            }
            stack.push((next, nv, i));
        }
    }
    out.sort_unstable_by_key(|e| e.0);
    Ok(out)
}

/// `Gamma(s/2) / (2 pi^{s/2})`.
pub fn mellin_gamma_factor(s: f64) -> f64 {
    gamma(s / 2.0) / (2.0 * PI.powf(s / 2.0))
}

/// Compares a quadrature of `int_0^inf h(v) v^{-s-1} dv`, with
/// `h(v) = sum_{P+(m) <= y} f(m) exp(-pi m^2 / v^2)`, against the Euler-product
/// closed form. The integral is taken in `w = log v`.
pub fn mellin_factor_check<S: MultiplicativeSource + ?Sized>(y_smooth: u64, s: f64, source: &S) -> Result<MellinCheck> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("s must be a positive real, got {s}")));
    }
    let primes = primes_up_to(y_smooth)?;
    let mut closed = Complex64::new(mellin_gamma_factor(s), 0.0);
    for &p in &primes {
        let z = source.at_prime(p) * (p as f64).powf(-s);
        if z.norm() >= 1.0 {
            return Err(Error::Divergent(format!("|f({p}) {p}^-s| >= 1")));
        }
        closed /= Complex64::new(1.0, 0.0) - z;
    }
    // smallest power of ten past which the smooth tail is below ~1e-13
    let np = primes.len() as i32;
    let mut ln_cap = 10f64.ln();
    while ln_cap < 18.0 * 10f64.ln() && (-s * ln_cap + np as f64 * ln_cap.ln()) > -13.0 * 10f64.ln() {
        ln_cap += 10f64.ln();
    }
    let cap = if primes.is_empty() { 1 } else { ln_cap.exp() as u64 };
    let smooth = smooth_values(&primes, source, cap)?;
    let truncation_bound = if primes.is_empty() {
        0.0
    } else {
        // count of smooth m in (cap, X] is at most (log X)^np; sum by parts
        mellin_gamma_factor(s) * (-s * ln_cap).exp() * (ln_cap + 1.0 / s).powi(np) * (np as f64 + 1.0) / s
    };
    let ms: Vec<f64> = smooth.iter().map(|e| e.0 as f64).collect();
    let mut prefix = Vec::with_capacity(smooth.len() + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    prefix.push(acc);
    for &(_, v) in &smooth {
        acc += v;
        prefix.push(acc);
    }
    let total = acc;
    let h = |w: f64| -> Complex64 {
        let scale = (-2.0 * w).exp();
        // weights below this index are 1 to double precision
        let flat = (w.exp() * (1e-17 / PI).sqrt()).max(0.0);
        let start = ms.partition_point(|&m| m <= flat);
        let mut sum = prefix[start];
        for i in start..ms.len() {
            let e = PI * ms[i] * ms[i] * scale;
            if e > 745.0 {
                break;
            }
            sum += smooth[i].1 * (-e).exp();
        }
        sum * (-s * w).exp()
    };
    let w_lo = -4.0;
    let w_hi = (cap as f64).ln() + 20.0;
    let panels = ((w_hi - w_lo).ceil() as usize).max(1);
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| w_lo + (w_hi - w_lo) * i as f64 / panels as f64)
        .collect();
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-13,
        max_intervals: 50_000,
    };
    let body = integrate_panels(h, &breaks, opts)?;
    let tail = total * (-s * w_hi).exp() / s;
    Ok(MellinCheck {
        s,
        numeric: body.value + tail,
        closed_form: closed,
        truncation_bound,
        quadrature_error: body.error,
    })
}

/// Direct `sum_{n <= T} chi(n) n^kappa exp(-pi n^2 / q)`.
pub fn theta_direct(modulus: &PrimeModulus, a: CharacterIndex, truncation: f64) -> Complex64 {
    let qf = modulus.q() as f64;
    let kappa = parity(a).kappa();
    (1..=truncation.floor() as u64)
        .map(|n| modulus.char_value(a, n) * theta_weight(n, kappa, qf))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::ConstantSource;

    #[test]
    fn quadratic_character_mod_13() {
        let m = PrimeModulus::new(13).unwrap();
        let th = theta_all(&m).unwrap();
        let a = CharacterIndex(6);
        let direct = theta_direct(&m, a, default_truncation(13));
        assert!((th[6].value - direct).norm() < 1e-10);
        assert_eq!(th[6].kappa, 0);
    }

    #[test]
    fn conjugation_and_principal() {
        let m = PrimeModulus::new(31).unwrap();
        let th = theta_all(&m).unwrap();
        assert!(th[0].value.im.abs() < 1e-12 && th[0].value.re > 0.0);
        for a in 1..30 {
            assert!((th[30 - a].value - th[a].value.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn zeroth_moment_counts() {
        let m = PrimeModulus::new(23).unwrap();
        let e = theta_moment(&m, 0.0, Parity::Even).unwrap();
        assert!((e.value - 10.0 / 22.0).abs() < 1e-14);
    }

    #[test]
    fn even_orthogonality_examples() {
        let m = PrimeModulus::new(7).unwrap();
        assert!((even_orthogonality_check(&m, 2, 5).unwrap() - 1.0).abs() < 1e-12);
        assert!(even_orthogonality_check(&m, 2, 3).unwrap().abs() < 1e-12);
        assert!((even_orthogonality_check(&m, 4, 4).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mellin_single_term() {
        let one = ConstantSource(Complex64::new(1.0, 0.0));
        for s in [0.5, 1.0, 2.0] {
            let c = mellin_factor_check(1, s, &one).unwrap();
            assert!(c.relative_error() < 1e-9, "s = {s}: {c:?}");
        }
    }

    #[test]
    fn lipschitz_scale_law() {
        let sample = RmfSample::new(3, 5000).unwrap();
        let a = g_lipschitz_probe(&sample, 10007, 50, 10.0, 0.5, 0).unwrap();
        let b = g_lipschitz_probe(&sample, 10007, 50, 20.0, 0.5, 0).unwrap();
        assert!((a.rhs_scale / b.rhs_scale - 4.0).abs() < 1e-12);
    }
}
