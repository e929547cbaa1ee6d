//! Named, deterministic checks of the identities and inequalities behind the
//! moment bounds, each producing a [`CheckReport`].

use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calibration::Calibration;
use crate::charsum::{all_char_sums_fft, all_char_sums_naive, weighted_char_sums, WeightedIndicator};
use crate::dirichlet_poly::{restricted_divisor_count, BiPoly, DirichletPoly};
use crate::error::{Error, Result};
use crate::euler::{
    cosine_sum_with_slack, euler_expectation_main_term, euler_product_log_oracle, euler_product_mc, mertens_product,
    mertens_third_limit, EulerProductSpec,
};
use crate::modarith::{CharacterIndex, Parity, PrimeModulus};
use crate::moments::{
    char_moment, check_cross_length, cross_from_parts, power_from_logs, proxy_logs, rmf_moment_mc, Divisor,
};
use crate::primes::{primes_up_to, SpfTable};
use crate::proxy::{
    build_params, err_direct, err_series, r_trunc_from_re, DeskProfile, ProfileSpec, ProxyEvaluator, ProxyParams,
};
use crate::quadrature::{integrate_panels, QuadOptions};
use crate::rmf::{exact_moment_2k, trial_seed, RmfSample};
use crate::source::{ConstantSource, MultiplicativeSource};
use crate::theta::{
    default_truncation, even_orthogonality_check, g_lipschitz_probe, mellin_factor_check, mellin_gamma_factor,
    theta_all, theta_all_truncated, theta_direct, theta_moment_from,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    /// Relative to `scale`.
    pub tolerance: f64,
    pub scale: f64,
    pub pass: bool,
    pub context: Value,
}

fn holds(lhs: f64, rhs: f64, relation: Relation, slack: f64) -> bool {
    match relation {
        Relation::Eq => (lhs - rhs).abs() <= slack,
        Relation::Le => lhs <= rhs + slack,
        Relation::Ge => lhs >= rhs - slack,
    }
}

impl CheckReport {
    /// Tolerance relative to `max(|lhs|, |rhs|)`.
    pub fn new(name: &str, lhs: f64, rhs: f64, relation: Relation, tolerance: f64, context: Value) -> Self {
        Self::with_scale(name, lhs, rhs, relation, tolerance, lhs.abs().max(rhs.abs()), context)
    }

    /// Tolerance is absolute.
    pub fn absolute(name: &str, lhs: f64, rhs: f64, relation: Relation, tolerance: f64, context: Value) -> Self {
        Self::with_scale(name, lhs, rhs, relation, tolerance, 1.0, context)
    }

    pub fn with_scale(
        name: &str,
        lhs: f64,
        rhs: f64,
        relation: Relation,
        tolerance: f64,
        scale: f64,
        context: Value,
    ) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            relation,
            tolerance,
            scale,
            pass: holds(lhs, rhs, relation, tolerance * scale),
            context,
        }
    }
}

fn cnum(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// `(1/phi(q)) sum_chi |sum_n c_n chi(n)|^2` against `sum |c_n|^2`; `coeffs[i]` is `c_{i+1}`.
pub fn check_orthogonality_correspondence(modulus: &PrimeModulus, coeffs: &[Complex64]) -> Result<CheckReport> {
    let q = modulus.q();
    if coeffs.len() as u64 >= q {
        return Err(Error::LengthViolation {
            length: coeffs.len() as f64,
            q,
        });
    }
    let w = WeightedIndicator::fold(modulus, coeffs.iter().enumerate().map(|(i, &c)| (i as u64 + 1, c)));
    let sums = weighted_char_sums(modulus, &w)?;
    let lhs = sums.iter().map(|s| s.norm_sqr()).sum::<f64>() / Divisor::Phi.value(q);
    let rhs: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    Ok(CheckReport::new(
        "orthogonality_correspondence",
        lhs,
        rhs,
        Relation::Eq,
        1e-9,
        json!({"q": q, "length": coeffs.len()}),
    ))
}

/// `prod (1 + x_i) >= 1 - sum |x_i|` for `x_i >= -1`.
pub fn check_bernoulli(xs: &[f64]) -> Result<CheckReport> {
    if let Some(bad) = xs.iter().find(|&&v| !(v >= -1.0)) {
        return Err(Error::DomainError(format!("entry {bad} is below -1")));
    }
    let lhs: f64 = xs.iter().map(|v| 1.0 + v).product();
    let rhs = 1.0 - xs.iter().map(|v| v.abs()).sum::<f64>();
    Ok(CheckReport::absolute(
        "bernoulli",
        lhs,
        rhs,
        Relation::Ge,
        1e-12,
        json!({"len": xs.len()}),
    ))
}

/// Coefficients `a_n = f(n)` on `y`-smooth `n <= n_cap`.
pub fn smooth_coefficients(sample: &RmfSample, y_smooth: u64, n_cap: u64) -> Result<Vec<(u64, Complex64)>> {
    let values = sample.values_up_to(n_cap)?;
    let table = sample.table();
    Ok((1..=n_cap)
        .filter(|&n| table.largest_prime_factor(n) <= y_smooth)
        .map(|n| (n, values[n as usize]))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParsevalSides {
    pub lhs: f64,
    pub rhs: f64,
    pub quadrature_error: f64,
    pub cutoff: f64,
}

/// Both sides of `int_1^inf |A(x)|^2 x^{-1-2 sigma} dx = (1/2 pi) int |F(sigma+it)|^2 / |sigma+it|^2 dt`
/// for a finite coefficient list.
pub fn parseval_sides(coeffs: &[(u64, Complex64)], sigma: f64) -> Result<ParsevalSides> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let mut c: Vec<(u64, Complex64)> = coeffs.iter().copied().filter(|(n, _)| *n >= 1).collect();
    c.sort_by_key(|e| e.0);
    if c.is_empty() {
        return Ok(ParsevalSides {
            lhs: 0.0,
            rhs: 0.0,
            quadrature_error: 0.0,
            cutoff: 0.0,
        });
    }
    // left side: A is constant on [n_i, n_{i+1})
    let two_s = 2.0 * sigma;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lhs = 0.0;
    for (i, &(n, a)) in c.iter().enumerate() {
        acc += a;
        let lo = (n as f64).powf(-two_s);
        let hi = c.get(i + 1).map_or(0.0, |e| (e.0 as f64).powf(-two_s));
        lhs += acc.norm_sqr() * (lo - hi) / two_s;
    }
    // right side: quadrature on [-T, T] plus tails of each (n, m) term
    let logs: Vec<f64> = c.iter().map(|e| (e.0 as f64).ln()).collect();
    let weights: Vec<Complex64> = c.iter().zip(&logs).map(|(e, l)| e.1 * (-sigma * l).exp()).collect();
    let lam_max = logs.last().copied().unwrap_or(0.0).max(1e-3);
    let min_gap = logs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let cutoff = if min_gap.is_finite() {
        (1e4f64).max(200.0 / min_gap)
    } else {
        1e3
    };
    let integrand = |t: f64| -> Complex64 {
        let f: Complex64 = weights.iter().zip(&logs).map(|(w, l)| w * Complex64::cis(-t * l)).sum();
        Complex64::new(f.norm_sqr() / (sigma * sigma + t * t), 0.0)
    };
    let panels = ((2.0 * cutoff * lam_max / std::f64::consts::PI).ceil() as usize).clamp(8, 400_000);
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| -cutoff + 2.0 * cutoff * i as f64 / panels as f64)
        .collect();
    let diag: f64 = weights.iter().map(|w| w.norm_sqr()).sum();
    let opts = QuadOptions {
        abs_tol: 1e-14 * diag.max(1e-300),
        rel_tol: 1e-13,
        max_intervals: panels + 200_000,
    };
    let body = integrate_panels(integrand, &breaks, opts)?;
    // int_{|t| > T} dt / (sigma^2 + t^2)
    let diag_tail = diag * 2.0 * (std::f64::consts::FRAC_PI_2 - (cutoff / sigma).atan()) / sigma;
    // int_{|t| > T} cos(lam t) / (sigma^2 + t^2) dt by two integrations by parts
    let mut off_tail = 0.0;
    let t2 = sigma * sigma + cutoff * cutoff;
    for i in 0..c.len() {
        for j in (i + 1)..c.len() {
            let lam = logs[j] - logs[i];
            let re = 2.0 * (weights[i] * weights[j].conj()).re;
            let first = -(lam * cutoff).sin() / (lam * t2);
            let second = -(lam * cutoff).cos() * 2.0 * cutoff / (lam * lam * t2 * t2);
            off_tail += re * 2.0 * (first + second);
        }
    }
    let rhs = (body.value.re + diag_tail + off_tail) / (2.0 * std::f64::consts::PI);
    Ok(ParsevalSides {
        lhs,
        rhs,
        quadrature_error: body.error / (2.0 * std::f64::consts::PI),
        cutoff,
    })
}

pub fn check_parseval(coeffs: &[(u64, Complex64)], sigma: f64, tolerance: f64) -> Result<CheckReport> {
    let s = parseval_sides(coeffs, sigma)?;
    Ok(CheckReport::new(
        "parseval",
        s.lhs,
        s.rhs,
        Relation::Eq,
        tolerance,
        json!({"sigma": sigma, "terms": coeffs.len(), "cutoff": s.cutoff, "quadrature_error": s.quadrature_error}),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeCoefficient {
    pub p: u64,
    pub a_p: Complex64,
    pub a_p2: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenMomentInstance {
    /// `(n, c_n)`.
    pub c: Vec<(u64, Complex64)>,
    pub a: Vec<PrimeCoefficient>,
    pub j: u32,
}

const EVENMOMENT_TERM_CAP: f64 = 2e6;

/// `E |sum c_n f(n)|^2 |sum_p a_p f(p)/sqrt(p) + a_{p^2} f(p^2)/p|^{2j}` against
/// `(sum d~(n) |c_n|^2) j! (2 sum |a_p|^2/p + 6 |a_{p^2}|^2/p^2)^j`. With a modulus the
/// left side is the character average instead.
pub fn check_lemma_evenmoment(
    inst: &EvenMomentInstance,
    modulus: Option<&PrimeModulus>,
    cal: &Calibration,
) -> Result<CheckReport> {
    if inst.j > 6 {
        return Err(Error::TooLarge(format!("j = {} exceeds 6", inst.j)));
    }
    let q_terms = (2 * inst.a.len()).max(1) as f64;
    if inst.c.len() as f64 * q_terms.powi(inst.j as i32) > EVENMOMENT_TERM_CAP {
        return Err(Error::TooLarge("diagonal expansion has too many terms".into()));
    }
    let cpoly = DirichletPoly::from_terms(inst.c.iter().copied());
    let qpoly = DirichletPoly::from_terms(inst.a.iter().flat_map(|t| {
        let pf = t.p as f64;
        [(t.p, t.a_p / pf.sqrt()), (t.p * t.p, t.a_p2 / pf)]
    }));
    let prod = cpoly.mul(&qpoly.pow(inst.j));
    let lhs = match modulus {
        None => prod.mean_square(),
        Some(m) => {
            let x = cpoly.length();
            let pmax = inst.a.iter().map(|t| t.p).max().unwrap_or(1);
            let len = x as f64 * (pmax as f64).powi(2 * inst.j as i32);
            if len >= m.q() as f64 {
                return Err(Error::LengthViolation { length: len, q: m.q() });
            }
            let w = WeightedIndicator::fold(m, prod.terms.iter().map(|(&n, &c)| (n, c)));
            weighted_char_sums(m, &w)?.iter().map(|s| s.norm_sqr()).sum::<f64>() / Divisor::Phi.value(m.q())
        }
    };
    let set: Vec<u64> = inst.a.iter().map(|t| t.p).collect();
    let top = inst.c.iter().map(|e| e.0).max().unwrap_or(1).max(2);
    let table = SpfTable::new(top)?;
    let dsum: f64 = inst
        .c
        .iter()
        .map(|&(n, c)| restricted_divisor_count(n, &set, &table) as f64 * c.norm_sqr())
        .sum();
    let prime_part: f64 = inst
        .a
        .iter()
        .map(|t| {
            let pf = t.p as f64;
            2.0 * t.a_p.norm_sqr() / pf + 6.0 * t.a_p2.norm_sqr() / (pf * pf)
        })
        .sum();
    let fact: f64 = (1..=inst.j).map(|i| i as f64).product();
    let rhs = dsum * fact * prime_part.powi(inst.j as i32);
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(CheckReport::absolute(
        "lemma_evenmoment",
        ratio,
        cal.evenmoment_c_max,
        Relation::Le,
        0.0,
        json!({"lhs": lhs, "rhs": rhs, "j": inst.j, "primes": set, "characters": modulus.map(|m| m.q())}),
    ))
}

/// Number of `n` in `(a, b]` with no prime factor `<= y` (`n = 1` counts).
pub fn rough_count(a: u64, b: u64, y: u64) -> Result<u64> {
    if b > crate::primes::SIEVE_CAP {
        return Err(Error::TooLarge(format!("B = {b} exceeds {}", crate::primes::SIEVE_CAP)));
    }
    if b <= a {
        return Ok(0);
    }
    let mut keep = vec![true; (b - a) as usize];
    for p in primes_up_to(y.min(b))? {
        let first = (a / p + 1) * p;
        let mut n = first;
        while n <= b {
            keep[(n - a - 1) as usize] = false;
            n += p;
        }
    }
    Ok(keep.iter().filter(|&&k| k).count() as u64)
}

pub fn check_rough_count(a: u64, b: u64, y: u64, cal: &Calibration) -> Result<CheckReport> {
    let count = rough_count(a, b, y)?;
    let width = (b - a.min(b)) as f64;
    let scale = if y >= 2 { width / (y as f64).ln() } else { width };
    let ratio = count as f64 / scale;
    let pass = ratio >= cal.sieve_ratio_min && ratio <= cal.sieve_ratio_max;
    Ok(CheckReport {
        name: "rough_count".into(),
        lhs: ratio,
        rhs: cal.sieve_ratio_max,
        relation: Relation::Le,
        tolerance: 0.0,
        scale: 1.0,
        pass,
        context: json!({"a": a, "b": b, "y": y, "count": count, "expected_scale": scale,
                        "window": [cal.sieve_ratio_min, cal.sieve_ratio_max]}),
    })
}

/// `|S_chi(x)| = |sum_{x < n < q} chi(n)|` for every `chi != chi_0`; reports the worst gap.
pub fn check_reflection(modulus: &PrimeModulus, x: f64) -> Result<CheckReport> {
    let q = modulus.q() as f64;
    if !(x >= q / 2.0 && x < q) {
        return Err(Error::InvalidArgument(format!("need q/2 <= x < q, got x = {x}")));
    }
    let at_x = all_char_sums_fft(modulus, x)?;
    let full = all_char_sums_fft(modulus, q - 1.0)?;
    let gap = at_x.values[1..]
        .iter()
        .zip(&full.values[1..])
        .map(|(s, f)| (s.norm() - (f - s).norm()).abs())
        .fold(0.0, f64::max);
    Ok(CheckReport::absolute(
        "reflection",
        gap,
        0.0,
        Relation::Eq,
        1e-9,
        json!({"q": modulus.q(), "x": x, "principal_gap": (at_x.values[0].norm() - (full.values[0] - at_x.values[0]).norm()).abs()}),
    ))
}

/// Hoelder: `(M_2k)^{1/k} (M_{R^{k/(k-1)}})^{(k-1)/k} >= M_cross`.
pub fn check_holder_chain(modulus: &PrimeModulus, x: f64, params: &ProxyParams) -> Result<CheckReport> {
    check_cross_length(modulus, x, params)?;
    let k = params.k;
    let table = all_char_sums_fft(modulus, x)?;
    let logs = proxy_logs(modulus, params)?;
    let m2k = crate::moments::moment_from_table(&table, k, true, Divisor::Phi).value;
    let mr = power_from_logs(modulus.q(), &logs, k);
    let cross = cross_from_parts(&table, &logs);
    let lhs = m2k.powf(1.0 / k) * mr.powf((k - 1.0) / k);
    Ok(CheckReport::new(
        "holder_chain",
        lhs,
        cross,
        Relation::Ge,
        1e-9,
        json!({"q": modulus.q(), "x": x, "k": k, "m2k": m2k, "m_r": mr, "cross": cross, "params": params}),
    ))
}

/// Equality case of the Hoelder step: at `x = 1` every `|S_chi|` is 1, so a constant
/// weight `R = c` makes `|S|^{2k}` and `R^{k/(k-1)}` proportional.
pub fn check_holder_equality(modulus: &PrimeModulus, k: f64, c: f64) -> Result<CheckReport> {
    if !(k > 1.0) || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need k > 1 and c > 0, got k={k}, c={c}"
        )));
    }
    let table = all_char_sums_fft(modulus, 1.0)?;
    let logs = vec![c.ln(); table.values.len()];
    let m2k = crate::moments::moment_from_table(&table, k, true, Divisor::Phi).value;
    let mr = power_from_logs(modulus.q(), &logs, k);
    let cross = cross_from_parts(&table, &logs);
    Ok(CheckReport::new(
        "holder_chain_equality",
        m2k.powf(1.0 / k) * mr.powf((k - 1.0) / k),
        cross,
        Relation::Eq,
        1e-12,
        json!({"q": modulus.q(), "k": k, "c": c}),
    ))
}

/// `R^{k/(k-1)} <= sum_{l1, l2} prod_m R_{m,l1} R_{m,l2}^{1/(k-1)}` for every character.
pub fn check_subadditivity(modulus: &PrimeModulus, params: &ProxyParams) -> Result<CheckReport> {
    let ev = ProxyEvaluator::new(params)?;
    let chars: Vec<CharacterIndex> = modulus.characters().collect();
    let worst = chars
        .par_iter()
        .map(|&a| {
            ev.subadditivity_logs(&modulus.character(a)).map(|(l, r)| {
                if l == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    l - r
                }
            })
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    // compare exp(worst) <= 1, i.e. lhs / rhs <= 1
    Ok(CheckReport::absolute(
        "subadditivity",
        worst.exp(),
        1.0,
        Relation::Le,
        1e-9,
        json!({"q": modulus.q(), "k": params.k, "worst_log_margin": worst}),
    ))
}

fn dirichlet_level_poly(params: &ProxyParams, primes: &[u64], l: i64) -> DirichletPoly {
    let s = l as f64 / params.log_y;
    DirichletPoly::from_terms(primes.iter().flat_map(|&p| {
        let pf = p as f64;
        let ph = Complex64::cis(-s * pf.ln());
        [(p, ph * pf.powf(-0.5)), (p * p, ph * ph * (0.5 / pf))]
    }))
}

/// `R` expanded into monomials `f(n) conj f(m)`.
pub fn proxy_bipoly(params: &ProxyParams) -> Result<BiPoly> {
    let ev = ProxyEvaluator::new(params)?;
    let mut total = BiPoly::default();
    for l in params.shifts() {
        let mut prod = BiPoly::one();
        for lv in &params.levels {
            let primes = ev.level_primes(lv.m)?;
            let d = BiPoly::holomorphic(&dirichlet_level_poly(params, &primes, l));
            let t = d.real_part().scale(params.k - 1.0).truncated_exp(lv.j);
            prod = prod.mul(&t.mul(&t));
        }
        total = total.add(&prod);
    }
    Ok(total)
}

/// `(1/phi(q)) sum_{all chi} |S_chi(x)|^2 R(chi) = E |sum_{n <= x} f(n)|^2 R(f)` when short.
pub fn check_proxy_correspondence(modulus: &PrimeModulus, x: f64, params: &ProxyParams) -> Result<CheckReport> {
    check_cross_length(modulus, x, params)?;
    let table = all_char_sums_fft(modulus, x)?;
    let logs = proxy_logs(modulus, params)?;
    let cross = cross_from_parts(&table, &logs);
    let principal = table.values[0].norm_sqr() * logs[0].exp() / Divisor::Phi.value(modulus.q());
    let s = DirichletPoly::from_terms((1..=x.floor() as u64).map(|n| (n, Complex64::new(1.0, 0.0))));
    let full = BiPoly::from_pair(&s, &s).mul(&proxy_bipoly(params)?);
    let rhs = full.expectation();
    Ok(CheckReport::new(
        "proxy_correspondence",
        cross + principal,
        rhs.re,
        Relation::Eq,
        1e-9,
        json!({"q": modulus.q(), "x": x, "cross_nonprincipal": cross, "principal_term": principal,
               "rmf_imag": rhs.im, "monomials": full.len(), "params": params}),
    ))
}

/// `sum_r #{(n1, n2) : n1 n2 = r mod q}^2` over `n_i <= x`.
pub fn multiplicative_energy_mod(q: u64, x: u64) -> u128 {
    let mut counts = vec![0u64; q as usize];
    for a in 1..=x {
        for b in 1..=x {
            counts[((a as u128 * b as u128) % q as u128) as usize] += 1;
        }
    }
    counts.iter().map(|&c| c as u128 * c as u128).sum()
}

/// `(1/phi(q)) sum_chi |S_chi(x)|^4` against the energy count.
pub fn check_fourth_moment_energy(modulus: &PrimeModulus, x: f64) -> Result<CheckReport> {
    let q = modulus.q();
    if !(x >= 1.0 && x < q as f64) {
        return Err(Error::InvalidArgument(format!("need 1 <= x < q, got {x}")));
    }
    let lhs = char_moment(modulus, x, 2.0, false, Divisor::Phi)?.value;
    let rhs = multiplicative_energy_mod(q, x.floor() as u64) as f64;
    Ok(CheckReport::new(
        "fourth_moment_energy",
        lhs,
        rhs,
        Relation::Eq,
        1e-8,
        json!({"q": q, "x": x}),
    ))
}

/// Non-principal second moment against `floor(x) - floor(x)^2 / (q - 1)`.
pub fn check_second_moment(modulus: &PrimeModulus, x: f64) -> Result<CheckReport> {
    let lhs = char_moment(modulus, x, 1.0, true, Divisor::Phi)?.value;
    let fx = x.floor();
    let rhs = fx - fx * fx / (modulus.q() - 1) as f64;
    Ok(CheckReport::new(
        "second_moment_closed_form",
        lhs,
        rhs,
        Relation::Eq,
        1e-8,
        json!({"q": modulus.q(), "x": x}),
    ))
}

/// Table agreement between the DFT and direct prefix sums, in units of `sqrt(x)`.
pub fn check_fft_naive(modulus: &PrimeModulus, x: f64) -> Result<CheckReport> {
    let a = all_char_sums_fft(modulus, x)?;
    let b = all_char_sums_naive(modulus, x)?;
    let gap = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max);
    Ok(CheckReport::absolute(
        "fft_naive",
        gap / x.sqrt(),
        0.0,
        Relation::Eq,
        1e-8,
        json!({"q": modulus.q(), "x": x, "max_abs_gap": gap}),
    ))
}

/// Random Err instances with `|Re D| <= 5`, `J <= 30`, `k` in `[2, 4]`.
pub fn err_instances(seed: u64, count: usize) -> Vec<(f64, f64, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                rng.random_range(-5.0..=5.0),
                rng.random_range(2.0..=4.0),
                rng.random_range(1..=30u32),
            )
        })
        .collect()
}

/// Direct difference against the double-tail series. The first report measures the gap
/// against the size of the operands `exp(2(k-1)Re D)` and `R`; the second is plainly
/// relative on instances where the error is not swamped by cancellation.
pub fn check_err_series(instances: &[(f64, f64, u32)]) -> Vec<CheckReport> {
    let mut worst_scaled = 0.0f64;
    let mut worst_plain = 0.0f64;
    let mut plain_count = 0usize;
    for &(re, k, j) in instances {
        let direct = err_direct(re, k, j);
        let series = err_series(re, k, j);
        let scale = (2.0 * (k - 1.0) * re)
            .exp()
            .max(r_trunc_from_re(re, k, j))
            .max(series.abs());
        worst_scaled = worst_scaled.max((direct - series).abs() / scale);
        if series.abs() >= 1e-3 * scale {
            plain_count += 1;
            worst_plain = worst_plain.max((direct - series).abs() / series.abs());
        }
    }
    vec![
        CheckReport::absolute(
            "err_series_operand_relative",
            worst_scaled,
            0.0,
            Relation::Eq,
            1e-10,
            json!({"instances": instances.len()}),
        ),
        CheckReport::absolute(
            "err_series_plain_relative",
            worst_plain,
            0.0,
            Relation::Eq,
            1e-10,
            json!({"instances": plain_count}),
        ),
    ]
}

/// Largest `c` needed in `R^{1/(k-1)} <= (1 + c e^{-J}) U` over the given sources.
pub fn domination_constant<S: MultiplicativeSource>(params: &ProxyParams, sources: &[S]) -> Result<f64> {
    let ev = ProxyEvaluator::new(params)?;
    let mut worst = 0.0f64;
    for s in sources {
        for l in params.shifts() {
            for m in 1..=params.num_levels() {
                worst = worst.max(ev.domination_constant(s, m, l)?);
            }
        }
    }
    Ok(worst)
}

/// Random desk parameters paired with Steinhaus samples that cover their primes.
pub fn random_desk_cases(seed: u64, count: usize) -> Result<Vec<(ProxyParams, RmfSample)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = Arc::new(SpfTable::new(5000)?);
    (0..count)
        .map(|i| {
            let log_y = rng.random_range(1.0f64..5000f64.ln());
            let levels = rng.random_range(1..=3usize);
            let js: Vec<u32> = (0..levels).map(|_| rng.random_range(1..=6u32)).collect();
            let k = rng.random_range(2.0..=4.0);
            let mut desk = DeskProfile::new(js);
            desk.ratio = rng.random_range(2.0..=20.0);
            let params = build_params(log_y, k, 1.0, &ProfileSpec::Desk(desk))?;
            Ok((
                params,
                RmfSample::with_table(trial_seed(seed, i as u64), Arc::clone(&table)),
            ))
        })
        .collect()
}

pub fn check_domination(cases: &[(ProxyParams, RmfSample)], cal: &Calibration) -> Result<CheckReport> {
    let worst = cases
        .par_iter()
        .map(|(p, s)| domination_constant(p, std::slice::from_ref(s)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(CheckReport::absolute(
        "surrogate_domination",
        worst,
        cal.domination_c,
        Relation::Le,
        0.0,
        json!({"sources": cases.len()}),
    ))
}

/// `R_{m,l} >= 0` and `R >= 0` over the given cases.
pub fn check_nonnegativity(cases: &[(ProxyParams, RmfSample)]) -> Result<CheckReport> {
    let mut min_val = f64::INFINITY;
    for (p, s) in cases {
        let ev = ProxyEvaluator::new(p)?;
        for l in p.shifts() {
            for m in 1..=p.num_levels() {
                min_val = min_val.min(ev.r_trunc_eval(s, m, l)?);
            }
        }
        min_val = min_val.min(ev.r_full_eval(s)?);
    }
    Ok(CheckReport::absolute(
        "proxy_nonnegative",
        min_val,
        0.0,
        Relation::Ge,
        0.0,
        json!({"cases": cases.len()}),
    ))
}

/// `D_{m,0}(chi_0) <= y_m` and `R(chi_0) <= (#shifts) prod_m (k y_m)^{2 J_m}`.
pub fn check_principal_bound(modulus: &PrimeModulus, params: &ProxyParams) -> Result<Vec<CheckReport>> {
    let ev = ProxyEvaluator::new(params)?;
    let chi0 = modulus.character(CharacterIndex::PRINCIPAL);
    let worst_d = params
        .levels
        .iter()
        .map(|lv| ev.d_eval(&chi0, lv.m, 0).map(|d| d.value.re - lv.upper()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let log_r = ev.r_full_log(&chi0)?;
    let log_bound = (params.num_shifts() as f64).ln()
        + params
            .levels
            .iter()
            .map(|lv| 2.0 * lv.j as f64 * (params.k * lv.upper()).ln())
            .sum::<f64>();
    Ok(vec![
        CheckReport::absolute(
            "principal_d_bound",
            worst_d,
            0.0,
            Relation::Le,
            1e-12,
            json!({"q": modulus.q()}),
        ),
        CheckReport::absolute(
            "principal_r_bound",
            log_r,
            log_bound,
            Relation::Le,
            1e-12,
            json!({"q": modulus.q(), "note": "logarithms"}),
        ),
    ])
}

/// `log E_l(f)` against the sum over levels of `log R_{m,l}` with a long truncation.
pub fn check_exponential_consistency(cases: &[(ProxyParams, RmfSample)]) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for (p, s) in cases {
        let ev = ProxyEvaluator::new(p)?;
        let table = ev.d_table(s)?;
        for l in p.shifts() {
            let e = ev.e_exp_log(s, l)?;
            let r: f64 = p
                .levels
                .iter()
                .map(|lv| r_trunc_from_re(table.get(lv.m, l).re, p.k, 200).ln())
                .sum();
            worst = worst.max((e - r).abs() / e.abs().max(1.0));
        }
    }
    Ok(CheckReport::absolute(
        "exponential_consistency",
        worst,
        0.0,
        Relation::Eq,
        1e-10,
        json!({"cases": cases.len()}),
    ))
}

/// `(1/phi(q)) sum_{even chi != chi_0} |theta|^2` by the double sum over `n = +-m`.
pub fn theta_even_second_moment_quadratic(modulus: &PrimeModulus) -> f64 {
    let q = modulus.q();
    let qf = q as f64;
    let top = default_truncation(q).floor() as u64;
    let w: Vec<f64> = (0..=top)
        .map(|n| (-std::f64::consts::PI * (n * n) as f64 / qf).exp())
        .collect();
    let mut by_class = vec![0.0f64; q as usize];
    for n in 1..=top {
        by_class[(n % q) as usize] += w[n as usize];
    }
    // sum_{n = +-m} w_n w_m = sum_r c_r (c_r + c_{q-r})
    let diag: f64 = (1..q as usize)
        .map(|r| by_class[r] * (by_class[r] + by_class[q as usize - r]))
        .sum();
    let theta0: f64 = (1..=top).filter(|n| n % q != 0).map(|n| w[n as usize]).sum();
    0.5 * diag - theta0 * theta0 / (qf - 1.0)
}

pub fn check_theta_direct(modulus: &PrimeModulus) -> Result<CheckReport> {
    let th = theta_all(modulus)?;
    let gap = th
        .par_iter()
        .map(|t| (t.value - theta_direct(modulus, CharacterIndex(t.a), t.truncation_point)).norm())
        .reduce(|| 0.0, f64::max);
    Ok(CheckReport::absolute(
        "theta_direct",
        gap,
        0.0,
        Relation::Eq,
        1e-9,
        json!({"q": modulus.q()}),
    ))
}

pub fn check_theta_tail(modulus: &PrimeModulus) -> Result<CheckReport> {
    let a = theta_all(modulus)?;
    let b = theta_all_truncated(modulus, 2.0 * default_truncation(modulus.q()))?;
    let worst = a
        .iter()
        .zip(&b)
        .map(|(u, v)| (u.value - v.value).norm() - u.tail_bound)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CheckReport::absolute(
        "theta_tail",
        worst,
        0.0,
        Relation::Le,
        1e-12,
        json!({"q": modulus.q()}),
    ))
}

pub fn check_even_orthogonality(modulus: &PrimeModulus, pairs: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = modulus.q();
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let n = rng.random_range(1..q);
        let m = rng.random_range(1..q);
        let ind = if (n + m) % q == 0 || n == m { 1.0 } else { 0.0 };
        worst = worst.max((even_orthogonality_check(modulus, n, m)? - ind).abs());
    }
    Ok(CheckReport::absolute(
        "even_orthogonality",
        worst,
        0.0,
        Relation::Eq,
        1e-9,
        json!({"q": q, "pairs": pairs}),
    ))
}

pub fn check_theta_quadratic(modulus: &PrimeModulus) -> Result<CheckReport> {
    let th = theta_all(modulus)?;
    let lhs = theta_moment_from(&th, modulus.q(), 1.0, Parity::Even).value;
    let rhs = theta_even_second_moment_quadratic(modulus);
    Ok(CheckReport::new(
        "theta_even_quadratic_form",
        lhs,
        rhs,
        Relation::Eq,
        1e-9,
        json!({"q": modulus.q()}),
    ))
}

/// Worst `|g(t+alpha) - g(t)| / scale` over random `(t, alpha, seed)`.
pub fn check_lipschitz(q: u64, cases: usize, seed: u64, cal: &Calibration) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qf = q as f64;
    let t_min = 2.0;
    let limit = ((745.0 * qf / std::f64::consts::PI).sqrt() / t_min).ceil() as u64 + 2;
    let table = Arc::new(SpfTable::new(limit.max(2))?);
    let mut worst = 0.0f64;
    for i in 0..cases {
        let t = rng.random_range(t_min..=2.0 * qf.sqrt().max(t_min + 1.0));
        let alpha = rng.random_range(1e-3..=0.5) * t;
        let kappa = rng.random_range(0..=1u32);
        let y = rng.random_range(2..=50u64);
        let sample = RmfSample::with_table(trial_seed(seed, i as u64), Arc::clone(&table));
        let probe = g_lipschitz_probe(&sample, q, y, t, alpha, kappa)?;
        worst = worst.max(probe.lhs / probe.rhs_scale);
    }
    Ok(CheckReport::absolute(
        "g_lipschitz",
        worst,
        cal.lipschitz_c,
        Relation::Le,
        0.0,
        json!({"q": q, "cases": cases}),
    ))
}

pub fn check_mellin<S: MultiplicativeSource + ?Sized>(
    y_smooth: u64,
    s: f64,
    source: &S,
    tolerance: f64,
) -> Result<CheckReport> {
    let c = mellin_factor_check(y_smooth, s, source)?;
    Ok(CheckReport::new(
        "mellin_factor",
        c.numeric.re,
        c.closed_form.re,
        Relation::Eq,
        tolerance,
        json!({"s": s, "y_smooth": y_smooth, "numeric": cnum(c.numeric), "closed_form": cnum(c.closed_form),
               "relative_error": c.relative_error(), "truncation_bound": c.truncation_bound,
               "quadrature_error": c.quadrature_error, "gamma_factor": mellin_gamma_factor(s)}),
    ))
}

/// MC estimate of the Euler product against the main term, with the acceptance rule
/// `|log MC - exponent| <= max(3 stderr / MC, 10 bracket)`.
pub fn check_euler_mc(spec: &EulerProductSpec, trials: u64, seed: u64, cal: &Calibration) -> Result<CheckReport> {
    let main = euler_expectation_main_term(spec)?;
    let mc = euler_product_mc(spec, trials, seed)?;
    let gap = (mc.value.ln() - main.exponent).abs();
    let allowed = (3.0 * mc.stderr / mc.value).max(cal.euler_bracket_factor * main.bracket);
    Ok(CheckReport::absolute(
        "euler_mc",
        gap,
        allowed,
        Relation::Le,
        0.0,
        json!({"spec": spec, "mc": mc.value, "stderr": mc.stderr, "exponent": main.exponent,
               "bracket": main.bracket, "trials": trials, "seed": seed}),
    ))
}

/// Product of per-prime quadratures against the main term.
pub fn check_euler_oracle(spec: &EulerProductSpec, cal: &Calibration) -> Result<CheckReport> {
    let main = euler_expectation_main_term(spec)?;
    let oracle = euler_product_log_oracle(spec)?;
    Ok(CheckReport::absolute(
        "euler_oracle",
        (oracle - main.exponent).abs(),
        cal.euler_bracket_factor * main.bracket,
        Relation::Le,
        0.0,
        json!({"spec": spec, "oracle_log": oracle, "exponent": main.exponent}),
    ))
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::cis(rng.random_range(0.0..std::f64::consts::TAU))
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

/// Small random instances for the even-moment lemma.
pub fn random_evenmoment_instances(seed: u64, count: usize) -> Vec<EvenMomentInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = [2u64, 3, 5, 7, 11, 13];
    (0..count)
        .map(|_| {
            let x = rng.random_range(1..=30u64);
            let c = (1..=x).map(|n| (n, random_complex(&mut rng))).collect();
            let np = rng.random_range(1..=3usize);
            let a = pool[..np + 1]
                .iter()
                .skip(rng.random_range(0..=1usize))
                .take(np)
                .map(|&p| PrimeCoefficient {
                    p,
                    a_p: random_unit(&mut rng),
                    a_p2: random_unit(&mut rng) * 0.5,
                })
                .collect();
            EvenMomentInstance {
                c,
                a,
                j: rng.random_range(0..=4u32),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Holder,
    Proxy,
    Theta,
    Euler,
    Parseval,
    Rmf,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "identities",
        "holder",
        "proxy",
        "theta",
        "euler",
        "parseval",
        "rmf",
        "all",
    ];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identities" => Suite::Identities,
            "holder" => Suite::Holder,
            "proxy" => Suite::Proxy,
            "theta" => Suite::Theta,
            "euler" => Suite::Euler,
            "parseval" => Suite::Parseval,
            "rmf" => Suite::Rmf,
            "all" => Suite::All,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown suite {other:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub q: u64,
    pub x: f64,
    pub k: f64,
    pub seed: u64,
    pub trials: u64,
    pub calibration: Calibration,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            q: 101,
            x: 10.0,
            k: 2.0,
            seed: 7,
            trials: 4000,
            calibration: Calibration::default(),
        }
    }
}

/// Desk parameters with one level `y = 2`, `J = 1`, so that `R` has length 16.
pub fn holder_params(q: u64, k: f64) -> Result<ProxyParams> {
    build_params(
        2f64.ln(),
        k,
        1.0,
        &ProfileSpec::Desk(DeskProfile {
            js: vec![1],
            ratio: 20.0,
            modulus: Some(q),
        }),
    )
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    if suite == Suite::All {
        let mut out = Vec::new();
        for s in [
            Suite::Identities,
            Suite::Holder,
            Suite::Proxy,
            Suite::Theta,
            Suite::Euler,
            Suite::Parseval,
            Suite::Rmf,
        ] {
            out.extend(run_suite(s, cfg)?);
        }
        return Ok(out);
    }
    let cal = &cfg.calibration;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    match suite {
        Suite::Identities => {
            let m = PrimeModulus::new(cfg.q)?;
            let q = cfg.q;
            let x = cfg.x.clamp(1.0, (q - 1) as f64);
            let ind = vec![Complex64::new(1.0, 0.0); x.floor() as usize];
            out.push(check_orthogonality_correspondence(&m, &ind)?);
            let len = 50.min(q as usize - 1);
            let coeffs: Vec<Complex64> = (0..len).map(|_| random_complex(&mut rng)).collect();
            out.push(check_orthogonality_correspondence(&m, &coeffs)?);
            out.push(check_second_moment(&m, x)?);
            out.push(check_fourth_moment_energy(&m, x.min(40.0))?);
            out.push(check_fft_naive(&m, x)?);
            if q >= 3 {
                out.push(check_reflection(&m, ((3 * q) / 4).max(q.div_ceil(2)) as f64)?);
            }
            let mut worst: Option<CheckReport> = None;
            for _ in 0..200 {
                let n = rng.random_range(1..=20usize);
                let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let r = check_bernoulli(&xs)?;
                if worst.as_ref().is_none_or(|w| r.lhs - r.rhs < w.lhs - w.rhs) {
                    worst = Some(r);
                }
            }
            out.extend(worst);
        }
        Suite::Holder => {
            let m = PrimeModulus::new(cfg.q)?;
            let params = holder_params(cfg.q, cfg.k.max(2.0))?;
            let x_max = ((cfg.q as f64 - 1.0) / 16.0).floor();
            if x_max < 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "holder suite needs q >= 17, got {}",
                    cfg.q
                )));
            }
            let x = cfg.x.clamp(1.0, x_max);
            out.push(check_holder_chain(&m, x, &params)?);
            out.push(check_holder_equality(&m, params.k, 3.0)?);
            out.push(check_subadditivity(&m, &params)?);
            out.push(check_proxy_correspondence(&m, x, &params)?);
        }
        Suite::Proxy => {
            let cases = random_desk_cases(cfg.seed, 200)?;
            out.push(check_nonnegativity(&cases)?);
            out.extend(check_err_series(&err_instances(cfg.seed, 100)));
            out.push(check_domination(&cases, cal)?);
            out.push(check_exponential_consistency(&cases[..20])?);
            let m = PrimeModulus::new(cfg.q)?;
            let params = holder_params(cfg.q, cfg.k.max(2.0)).or_else(|_| {
                build_params(
                    2f64.ln(),
                    cfg.k.max(2.0),
                    1.0,
                    &ProfileSpec::Desk(DeskProfile::new(vec![1])),
                )
            })?;
            out.extend(check_principal_bound(&m, &params)?);
        }
        Suite::Theta => {
            let m = PrimeModulus::new(cfg.q)?;
            out.push(check_theta_direct(&m)?);
            out.push(check_theta_tail(&m)?);
            out.push(check_even_orthogonality(&m, 100, cfg.seed)?);
            out.push(check_theta_quadratic(&m)?);
            out.push(check_lipschitz(cfg.q, 100, cfg.seed, cal)?);
        }
        Suite::Euler => {
            for (i, (alpha, beta)) in [(0.5, 0.5), (1.0, 0.3), (0.2, 1.2)].into_iter().enumerate() {
                let z = 200.0 * (1.0 + f64::max(alpha * alpha, beta * beta));
                let spec = EulerProductSpec {
                    alpha,
                    beta,
                    sigma1: 0.0,
                    sigma2: 0.01,
                    t1: 0.0,
                    t2: 0.5,
                    z,
                    y: 20.0 * z,
                };
                out.push(check_euler_mc(&spec, cfg.trials, trial_seed(cfg.seed, i as u64), cal)?);
                out.push(check_euler_oracle(&spec, cal)?);
            }
            let y = 1e6;
            for t in [0.0, 0.5, 3.0, 50.0] {
                let c = cosine_sum_with_slack(t, y, cal.cosine_slack)?;
                out.push(CheckReport::absolute(
                    "cosine_sum",
                    c.value,
                    c.bound + c.slack,
                    Relation::Le,
                    0.0,
                    json!({"t": t, "y": y, "branch": c.branch}),
                ));
            }
            let mp = mertens_product(y)? * y.ln();
            out.push(CheckReport::new(
                "mertens_third",
                mp,
                mertens_third_limit(),
                Relation::Eq,
                1e-2,
                json!({"y": y}),
            ));
        }
        Suite::Parseval => {
            let one = Complex64::new(1.0, 0.0);
            for sigma in [0.25, 0.5, 1.0] {
                out.push(check_parseval(&[(1, one)], sigma, 1e-10)?);
                out.push(check_parseval(&[(1, one), (2, one)], sigma, 1e-10)?);
            }
            let table = Arc::new(SpfTable::new(64)?);
            for i in 0..10u64 {
                let sample = RmfSample::with_table(trial_seed(cfg.seed, i), Arc::clone(&table));
                let y = rng.random_range(2..=7u64);
                let n_cap = rng.random_range(8..=64u64);
                let sigma = rng.random_range(0.2..=1.0);
                let coeffs = smooth_coefficients(&sample, y, n_cap)?;
                out.push(check_parseval(&coeffs, sigma, 1e-4)?);
            }
            let f1 = ConstantSource(one);
            for s in [0.5, 1.0, 2.0] {
                out.push(check_mellin(1, s, &f1, 1e-6)?);
            }
            let sample = RmfSample::new(cfg.seed, 3)?;
            out.push(check_mellin(3, 1.0, &sample, 1e-6)?);
        }
        Suite::Rmf => {
            for (i, x) in [20.0, 50.0].into_iter().enumerate() {
                let exact = exact_moment_2k(x, 2)? as f64;
                let mc = rmf_moment_mc(x, 2.0, cfg.trials, trial_seed(cfg.seed, i as u64))?;
                out.push(CheckReport::absolute(
                    "rmf_fourth_moment",
                    (mc.value - exact).abs(),
                    3.0 * mc.stderr,
                    Relation::Le,
                    0.0,
                    json!({"x": x, "exact": exact, "mc": mc.value, "stderr": mc.stderr, "trials": cfg.trials}),
                ));
            }
            let mc = rmf_moment_mc(100.0, 1.0, cfg.trials, cfg.seed)?;
            out.push(CheckReport::absolute(
                "rmf_second_moment",
                (mc.value - 100.0).abs(),
                3.0 * mc.stderr,
                Relation::Le,
                0.0,
                json!({"x": 100, "mc": mc.value, "stderr": mc.stderr}),
            ));
            let worst = random_evenmoment_instances(cfg.seed, 20)
                .iter()
                .map(|inst| check_lemma_evenmoment(inst, None, cal))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max_by(|a, b| a.lhs.total_cmp(&b.lhs));
            out.extend(worst);
            out.push(check_rough_count(100_000, 200_000, 100, cal)?);
        }
        Suite::All => unreachable!(),
    }
    Ok(out)
}

/// True when every report passes.
pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
