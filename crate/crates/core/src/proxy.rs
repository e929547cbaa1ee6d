//! The proxy object `R(chi)`: a sum over shifts `l` of products over levels `m`
//! of squared truncated exponentials of short Dirichlet polynomials over primes.
//!
//! Parameters are held in log space since `x` and `y` are routinely far beyond
//! `f64` range in the paper-scale profile.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{primes_in, SIEVE_CAP};
use crate::source::MultiplicativeSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Paper,
    Desk,
}

/// User-chosen level structure for desk-scale runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeskProfile {
    /// `J_1, ..., J_M`; the number of levels is `js.len()`.
    pub js: Vec<u32>,
    /// `log y_{m-1} = log y_m / ratio`.
    pub ratio: f64,
    /// When set, require `prod_m y_m^{4 J_m} < q`.
    pub modulus: Option<u64>,
}

impl DeskProfile {
    pub fn new(js: Vec<u32>) -> Self {
        Self {
            js,
            ratio: 20.0,
            modulus: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProfileSpec {
    Paper,
    Desk(DeskProfile),
}

/// One level `(y_{m-1}, y_m]` with its truncation index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub m: usize,
    /// `log y_{m-1}`, zero for the first level.
    pub log_lower: f64,
    pub log_upper: f64,
    pub j: u32,
}

impl Level {
    pub fn lower(&self) -> f64 {
        self.log_lower.exp()
    }

    pub fn upper(&self) -> f64 {
        self.log_upper.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyParams {
    pub log_x: f64,
    pub k: f64,
    pub c0: f64,
    pub log_y: f64,
    pub levels: Vec<Level>,
    pub profile: Profile,
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 2.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("k must be a finite real >= 2, got {k}")));
    }
    Ok(())
}

/// Builds the level chain for `y = x^{1/C0}` given `log x`.
pub fn build_params(log_x: f64, k: f64, c0: f64, profile: &ProfileSpec) -> Result<ProxyParams> {
    check_k(k)?;
    if !(c0 > 0.0) || !(log_x > 0.0) || !log_x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need log x > 0 and C0 > 0, got log x = {log_x}, C0 = {c0}"
        )));
    }
    let log_y = log_x / c0;
    match profile {
        ProfileSpec::Paper => paper_params(log_x, k, c0, log_y),
        ProfileSpec::Desk(desk) => desk_params(log_x, k, c0, log_y, desk),
    }
}

fn paper_params(log_x: f64, k: f64, c0: f64, log_y: f64) -> Result<ProxyParams> {
    if !(log_y > 1.0) {
        return Err(Error::InfeasibleParams(format!(
            "log log y must be positive, got log y = {log_y}"
        )));
    }
    let ll = log_y.ln();
    let hi = log_y / (ll * ll);
    let lo = hi / 20.0;
    let mut logs = vec![log_y];
    let mut cur = log_y;
    while cur > hi {
        cur /= 20.0;
        logs.push(cur);
    }
    if cur < lo {
        return Err(Error::InfeasibleParams(format!(
            "log y_1 = {cur} falls below the window [{lo}, {hi}]"
        )));
    }
    logs.reverse();
    let big_m = logs.len();
    let j_first = ll.powf(1.5).ceil() as u32;
    let j_top = (c0 / (1e5 * k)).ceil() as u32;
    if j_top < 1 {
        return Err(Error::InfeasibleParams("J_M = ceil(C0 / (1e5 k)) is zero".into()));
    }
    let levels: Vec<Level> = logs
        .iter()
        .enumerate()
        .map(|(i, &lu)| {
            let m = i + 1;
            let j = if m == 1 {
                j_first
            } else if m == big_m {
                j_top
            } else {
                j_top + (big_m - m) as u32
            };
            Level {
                m,
                log_lower: if m == 1 { 0.0 } else { logs[i - 1] },
                log_upper: lu,
                j,
            }
        })
        .collect();
    let params = ProxyParams {
        log_x,
        k,
        c0,
        log_y,
        levels,
        profile: Profile::Paper,
    };
    let len = params.paper_length_log();
    if len >= log_x {
        return Err(Error::InfeasibleParams(format!(
            "log prod y_m^(1e4 k J_m) = {len} is not below log x = {log_x}"
        )));
    }
    Ok(params)
}

fn desk_params(log_x: f64, k: f64, c0: f64, log_y: f64, desk: &DeskProfile) -> Result<ProxyParams> {
    if desk.js.is_empty() || desk.js.contains(&0) {
        return Err(Error::InvalidArgument(
            "desk profile needs at least one level and every J_m >= 1".into(),
        ));
    }
    if !(desk.ratio > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level ratio must exceed 1, got {}",
            desk.ratio
        )));
    }
    let big_m = desk.js.len();
    let upper = |m: usize| log_y / desk.ratio.powi((big_m - m) as i32);
    let levels = desk
        .js
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let m = i + 1;
            Level {
                m,
                log_lower: if m == 1 { 0.0 } else { upper(m - 1) },
                log_upper: upper(m),
                j,
            }
        })
        .collect();
    let params = ProxyParams {
        log_x,
        k,
        c0,
        log_y,
        levels,
        profile: Profile::Desk,
    };
    if let Some(q) = desk.modulus {
        let len = params.desk_length_log();
        if len >= (q as f64).ln() {
            return Err(Error::InfeasibleParams(format!(
                "log prod y_m^(4 J_m) = {len} is not below log q = {}",
                (q as f64).ln()
            )));
        }
    }
    Ok(params)
}

/// `a_m = 2 ceil(200 k J_m)`.
pub fn class_exponent(k: f64, j: u32) -> u32 {
    2 * (200.0 * k * j as f64).ceil() as u32
}

impl ProxyParams {
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn y(&self) -> f64 {
        self.log_y.exp()
    }

    pub fn level(&self, m: usize) -> Result<&Level> {
        if m == 0 || m > self.levels.len() {
            return Err(Error::OutOfRange {
                what: "level m",
                value: m as u64,
                limit: self.levels.len() as u64,
            });
        }
        Ok(&self.levels[m - 1])
    }

    /// Largest admissible `|l|`.
    pub fn max_shift(&self) -> i64 {
        (self.log_y / 2.0).floor() as i64
    }

    pub fn shifts(&self) -> impl Iterator<Item = i64> {
        let l = self.max_shift();
        -l..=l
    }

    pub fn num_shifts(&self) -> usize {
        (2 * self.max_shift() + 1) as usize
    }

    /// `sum_m 1e4 k J_m log y_m`.
    pub fn paper_length_log(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| 1e4 * self.k * l.j as f64 * l.log_upper)
            .sum()
    }

    /// `sum_m 4 J_m log y_m`, the log-length of `R` as a Dirichlet polynomial.
    pub fn desk_length_log(&self) -> f64 {
        self.levels.iter().map(|l| 4.0 * l.j as f64 * l.log_upper).sum()
    }

    /// `sum_m (4 J_m + 2 a_m) log y_m`.
    pub fn surrogate_length_log(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| (4.0 * l.j as f64 + 2.0 * class_exponent(self.k, l.j) as f64) * l.log_upper)
            .sum()
    }

    fn check_shift(&self, l: i64) -> Result<()> {
        if l.abs() > self.max_shift() {
            return Err(Error::OutOfRange {
                what: "|l|",
                value: l.unsigned_abs(),
                limit: self.max_shift() as u64,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletPolyValue {
    pub m: usize,
    pub l: i64,
    pub value: Complex64,
}

/// `sum_{j <= order} u^j / j!`.
pub fn truncated_exp(u: f64, order: u32) -> f64 {
    let mut term = 1.0;
    let mut acc = 1.0;
    for j in 1..=order {
        term *= u / j as f64;
        acc += term;
    }
    acc
}

/// `R_{m,l}` as a function of `Re D`.
pub fn r_trunc_from_re(re_d: f64, k: f64, order: u32) -> f64 {
    truncated_exp((k - 1.0) * re_d, order).powi(2)
}

/// `exp(2 (k-1) Re D) - R_{m,l}`, with the truncated exponential carried in
/// double-double so alternating terms do not swamp the difference.
pub fn err_direct(re_d: f64, k: f64, order: u32) -> f64 {
    let u = (k - 1.0) * re_d;
    let mut term = Dd { hi: 1.0, lo: 0.0 };
    let mut t = term;
    for j in 1..=order {
        term = term.mul_f(u).div_f(j as f64);
        t = t.add(term);
    }
    let sq = t.mul(t);
    let e = (2.0 * u).exp();
    let (s, err) = Dd::two_sum(e, -sq.hi);
    s + (err - sq.lo)
}

/// Double-double value `hi + lo`, used where the alternating tail cancels heavily.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from_parts(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = Dd::two_sum(self.hi, o.hi);
        Dd::from_parts(s, e + self.lo + o.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + self.hi * o.lo + self.lo * o.hi;
        Dd::from_parts(p, e)
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        Dd::from_parts(p, e)
    }

    fn div_f(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let p = q1 * b;
        let e = q1.mul_add(b, -p);
        let r = (self.hi - p - e + self.lo) / b;
        Dd::from_parts(q1, r)
    }
}

/// `sum_{max(j1, j2) > J} u^{j1+j2} / (j1! j2!)` with `u = (k-1) Re D`,
/// enumerated pair by pair in order of total degree, in double-double.
pub fn err_series(re_d: f64, k: f64, order: u32) -> f64 {
    let u = (k - 1.0) * re_d;
    let top = (2 * order as usize + 2).max((4.0 * u.abs()).ceil() as usize + 80);
    let mut t = Vec::with_capacity(top + 1);
    t.push(Dd { hi: 1.0, lo: 0.0 });
    for j in 1..=top {
        let prev = t[j - 1];
        t.push(prev.mul_f(u).div_f(j as f64));
    }
    let jm = order as usize;
    let mut acc = Dd::ZERO;
    for d in (jm + 1)..=top {
        for j1 in d.saturating_sub(top)..=d.min(top) {
            let j2 = d - j1;
            if j1.max(j2) > jm {
                acc = acc.add(t[j1].mul(t[j2]));
            }
        }
    }
    acc.hi + acc.lo
}

/// Lagrange bound on `|err|`: with `rho = |u|^{J+1} e^{|u|} / (J+1)!`,
/// `|e^{2u} - T_J(u)^2| <= rho (2 e^{|u|} + rho)`.
pub fn err_tail_bound(re_d: f64, k: f64, order: u32) -> f64 {
    let u = ((k - 1.0) * re_d).abs();
    let mut rho = u.exp();
    for j in 1..=(order + 1) {
        rho *= u / j as f64;
    }
    rho * (2.0 * u.exp() + rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelClass {
    pub n: u32,
    /// Infimum of the selected interval.
    pub w: f64,
    pub a: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicClass {
    pub l2: i64,
    pub levels: Vec<LevelClass>,
}

/// `I_0 = [0, u]`, `I_n = (u 2^{n-1}, u 2^n]` with `u = J / (100 k)`.
pub fn class_of(re_abs: f64, k: f64, order: u32) -> LevelClass {
    let unit = order as f64 / (100.0 * k);
    let a = class_exponent(k, order);
    if re_abs <= unit {
        return LevelClass { n: 0, w: 0.0, a };
    }
    let mut n = ((re_abs / unit).log2().ceil() as i64).max(1) as u32;
    while n > 1 && unit * 2f64.powi(n as i32 - 1) >= re_abs {
        n -= 1;
    }
    while unit * 2f64.powi(n as i32) < re_abs {
        n += 1;
    }
    LevelClass {
        n,
        w: unit * 2f64.powi(n as i32 - 1),
        a,
    }
}

fn class_contains(re_abs: f64, k: f64, order: u32, class: &LevelClass) -> bool {
    let unit = order as f64 / (100.0 * k);
    if class.n == 0 {
        re_abs <= unit
    } else {
        let lo = unit * 2f64.powi(class.n as i32 - 1);
        re_abs > lo && re_abs <= 2.0 * lo
    }
}

/// `log U_{m,l2}` from `D` and a class consistent with `|Re D|`.
pub fn surrogate_log(d: Complex64, k: f64, order: u32, class: &LevelClass) -> Result<f64> {
    if !class_contains(d.re.abs(), k, order, class) {
        return Err(Error::ClassMismatch {
            value: d.re.abs(),
            class: class.n,
        });
    }
    if class.n == 0 {
        return Ok(2.0 * truncated_exp(d.re, order).abs().ln());
    }
    let w = class.w;
    let jf = order as f64;
    let power = class.a as f64 * (d.norm() / w).ln();
    if w <= 100.0 * k * jf {
        Ok(4.0 * w + power)
    } else {
        let ln_fact: f64 = (1..=order).map(|i| (i as f64).ln()).sum();
        let inner = 2f64.ln() + jf * (k - 1.0).ln() + jf * (2.0 * w).ln() - ln_fact;
        Ok(2.0 / (k - 1.0) * inner + power)
    }
}

/// `log(sum exp(v))`, with `-inf` entries contributing nothing.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY || top.is_nan() {
        return top;
    }
    if top == f64::INFINITY {
        return f64::INFINITY;
    }
    top + v.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

struct PrimeWeight {
    p: u64,
    ln_p: f64,
    half: f64,
    full: f64,
}

/// `D_{m,l}` for every level and shift of one source.
#[derive(Debug, Clone, PartialEq)]
pub struct DTable {
    pub max_shift: i64,
    /// `values[m - 1][l + max_shift]`.
    pub values: Vec<Vec<Complex64>>,
}

impl DTable {
    pub fn get(&self, m: usize, l: i64) -> Complex64 {
        self.values[m - 1][(l + self.max_shift) as usize]
    }
}

/// Evaluates the proxy machinery for fixed parameters against any source.
pub struct ProxyEvaluator<'p> {
    params: &'p ProxyParams,
    level_primes: Vec<Vec<PrimeWeight>>,
}

impl<'p> ProxyEvaluator<'p> {
    pub fn new(params: &'p ProxyParams) -> Result<Self> {
        let y = params.y();
        if !(y <= SIEVE_CAP as f64) {
            return Err(Error::TooLarge(format!(
                "y = e^{} exceeds the sieve cap {SIEVE_CAP}",
                params.log_y
            )));
        }
        let level_primes = params
            .levels
            .iter()
            .map(|lv| {
                primes_in(lv.lower(), lv.upper()).map(|ps| {
                    ps.into_iter()
                        .map(|p| {
                            let pf = p as f64;
                            PrimeWeight {
                                p,
                                ln_p: pf.ln(),
                                half: pf.powf(-0.5),
                                full: 0.5 / pf,
                            }
                        })
                        .collect()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { params, level_primes })
    }

    pub fn params(&self) -> &ProxyParams {
        self.params
    }

    pub fn level_primes(&self, m: usize) -> Result<Vec<u64>> {
        self.params.level(m)?;
        Ok(self.level_primes[m - 1].iter().map(|w| w.p).collect())
    }

    fn check_source<S: MultiplicativeSource + ?Sized>(&self, source: &S) -> Result<()> {
        if let Some(limit) = source.prime_limit() {
            let top = self.level_primes.iter().flatten().map(|w| w.p).max().unwrap_or(0);
            if top > limit {
                return Err(Error::OutOfRange {
                    what: "largest level prime",
                    value: top,
                    limit,
                });
            }
        }
        Ok(())
    }

    fn level_values<S: MultiplicativeSource + ?Sized>(&self, source: &S, m: usize) -> Vec<Complex64> {
        self.level_primes[m - 1].iter().map(|w| source.at_prime(w.p)).collect()
    }

    fn d_from_values(&self, m: usize, l: i64, values: &[Complex64]) -> Complex64 {
        let s = l as f64 / self.params.log_y;
        self.level_primes[m - 1]
            .iter()
            .zip(values)
            .map(|(w, &f)| {
                let phase = Complex64::cis(-s * w.ln_p);
                f * phase * w.half + f * f * phase * phase * w.full
            })
            .sum()
    }

    pub fn d_eval<S: MultiplicativeSource + ?Sized>(&self, source: &S, m: usize, l: i64) -> Result<DirichletPolyValue> {
        self.params.level(m)?;
        self.params.check_shift(l)?;
        self.check_source(source)?;
        let vals = self.level_values(source, m);
        Ok(DirichletPolyValue {
            m,
            l,
            value: self.d_from_values(m, l, &vals),
        })
    }

    pub fn d_table<S: MultiplicativeSource + ?Sized>(&self, source: &S) -> Result<DTable> {
        self.check_source(source)?;
        let max_shift = self.params.max_shift();
        let values = (1..=self.params.num_levels())
            .map(|m| {
                let vals = self.level_values(source, m);
                self.params.shifts().map(|l| self.d_from_values(m, l, &vals)).collect()
            })
            .collect();
        Ok(DTable { max_shift, values })
    }

    pub fn r_trunc_eval<S: MultiplicativeSource + ?Sized>(&self, source: &S, m: usize, l: i64) -> Result<f64> {
        let d = self.d_eval(source, m, l)?;
        Ok(r_trunc_from_re(d.value.re, self.params.k, self.params.levels[m - 1].j))
    }

    /// `log R` from a precomputed table; `-inf` when `R = 0`.
    pub fn r_full_log_from(&self, table: &DTable) -> f64 {
        let k = self.params.k;
        log_sum_exp(self.params.shifts().map(|l| {
            self.params
                .levels
                .iter()
                .map(|lv| 2.0 * truncated_exp((k - 1.0) * table.get(lv.m, l).re, lv.j).abs().ln())
                .sum::<f64>()
        }))
    }

    pub fn r_full_log<S: MultiplicativeSource + ?Sized>(&self, source: &S) -> Result<f64> {
        Ok(self.r_full_log_from(&self.d_table(source)?))
    }

    pub fn r_full_eval<S: MultiplicativeSource + ?Sized>(&self, source: &S) -> Result<f64> {
        Ok(self.r_full_log(source)?.exp())
    }

    /// `log` of the shift-`l` term of `E(f)`: `2 (k-1) Re sum_{p <= y}(...)`.
    pub fn e_exp_log<S: MultiplicativeSource + ?Sized>(&self, source: &S, l: i64) -> Result<f64> {
        self.params.check_shift(l)?;
        self.check_source(source)?;
        let total: f64 = (1..=self.params.num_levels())
            .map(|m| self.d_from_values(m, l, &self.level_values(source, m)).re)
            .sum();
        Ok(2.0 * (self.params.k - 1.0) * total)
    }

    /// `log E(f)`, summed over all shifts.
    pub fn e_total_log<S: MultiplicativeSource + ?Sized>(&self, source: &S) -> Result<f64> {
        let logs = self
            .params
            .shifts()
            .map(|l| self.e_exp_log(source, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(log_sum_exp(logs))
    }

    pub fn err_eval<S: MultiplicativeSource + ?Sized>(&self, source: &S, m: usize, l: i64) -> Result<f64> {
        let d = self.d_eval(source, m, l)?;
        Ok(err_direct(d.value.re, self.params.k, self.params.levels[m - 1].j))
    }

    pub fn classify_dyadic<S: MultiplicativeSource + ?Sized>(&self, source: &S, l2: i64) -> Result<DyadicClass> {
        self.params.check_shift(l2)?;
        self.check_source(source)?;
        let levels = self
            .params
            .levels
            .iter()
            .map(|lv| {
                let d = self.d_from_values(lv.m, l2, &self.level_values(source, lv.m));
                class_of(d.re.abs(), self.params.k, lv.j)
            })
            .collect();
        Ok(DyadicClass { l2, levels })
    }

    /// `log U_{m,l2}`.
    pub fn u_log<S: MultiplicativeSource + ?Sized>(
        &self,
        source: &S,
        m: usize,
        l2: i64,
        class: &DyadicClass,
    ) -> Result<f64> {
        let d = self.d_eval(source, m, l2)?;
        let lc = class.levels.get(m - 1).ok_or_else(|| {
            Error::InvalidArgument(format!("class has {} levels, asked for level {m}", class.levels.len()))
        })?;
        surrogate_log(d.value, self.params.k, self.params.levels[m - 1].j, lc)
    }

    pub fn u_eval<S: MultiplicativeSource + ?Sized>(
        &self,
        source: &S,
        m: usize,
        l2: i64,
        class: &DyadicClass,
    ) -> Result<f64> {
        Ok(self.u_log(source, m, l2, class)?.exp())
    }

    /// Smallest `c` with `R^{1/(k-1)} <= (1 + c e^{-J}) U` at one level and shift.
    pub fn domination_constant<S: MultiplicativeSource + ?Sized>(&self, source: &S, m: usize, l2: i64) -> Result<f64> {
        let class = self.classify_dyadic(source, l2)?;
        let u = self.u_log(source, m, l2, &class)?;
        let r = self.r_trunc_eval(source, m, l2)?;
        let j = self.params.levels[m - 1].j as f64;
        let ratio = (r.ln() / (self.params.k - 1.0) - u).exp();
        Ok(((ratio - 1.0) * j.exp()).max(0.0))
    }

    /// `(log R^{k/(k-1)}, log sum_{l1,l2} prod_m R_{m,l1} R_{m,l2}^{1/(k-1)})`.
    pub fn subadditivity_logs<S: MultiplicativeSource + ?Sized>(&self, source: &S) -> Result<(f64, f64)> {
        let table = self.d_table(source)?;
        let k = self.params.k;
        let per_shift: Vec<f64> = self
            .params
            .shifts()
            .map(|l| {
                self.params
                    .levels
                    .iter()
                    .map(|lv| 2.0 * truncated_exp((k - 1.0) * table.get(lv.m, l).re, lv.j).abs().ln())
                    .sum()
            })
            .collect();
        let log_r = log_sum_exp(per_shift.iter().copied());
        let lhs = k / (k - 1.0) * log_r;
        let rhs = log_r + log_sum_exp(per_shift.iter().map(|v| v / (k - 1.0)));
        Ok((lhs, rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::ConstantSource;

    fn one() -> ConstantSource {
        ConstantSource(Complex64::new(1.0, 0.0))
    }

    fn desk(log_y: f64, js: Vec<u32>) -> ProxyParams {
        build_params(log_y, 2.0, 1.0, &ProfileSpec::Desk(DeskProfile::new(js))).unwrap()
    }

    #[test]
    fn paper_chain_at_e400() {
        let p = build_params(400.0 * 2e5, 2.0, 2e5, &ProfileSpec::Paper).unwrap();
        let logs: Vec<f64> = p.levels.iter().map(|l| l.log_upper).collect();
        assert_eq!(logs.len(), 3);
        assert!((logs[0] - 1.0).abs() < 1e-12);
        assert!((logs[1] - 20.0).abs() < 1e-12);
        assert!((logs[2] - 400.0).abs() < 1e-12);
        let ll = 400f64.ln();
        assert!(logs[0] >= 400.0 / (20.0 * ll * ll) && logs[0] <= 400.0 / (ll * ll));
        assert_eq!(p.levels[0].j, ll.powf(1.5).ceil() as u32);
        assert_eq!(p.levels[2].j, 1);
        assert_eq!(p.levels[1].j, 2);
    }

    #[test]
    fn desk_length_guard() {
        let spec = ProfileSpec::Desk(DeskProfile {
            js: vec![50],
            ratio: 20.0,
            modulus: Some(101),
        });
        assert!(matches!(
            build_params(2f64.ln(), 2.0, 1.0, &spec),
            Err(Error::InfeasibleParams(_))
        ));
    }

    #[test]
    fn d_on_small_interval() {
        let p = desk(3f64.ln(), vec![1]);
        let ev = ProxyEvaluator::new(&p).unwrap();
        let d = ev.d_eval(&one(), 1, 0).unwrap().value;
        let want = 0.5f64.sqrt() + 0.25 + 3f64.powf(-0.5) + 1.0 / 6.0;
        assert!((d.re - want).abs() < 1e-15 && d.im.abs() < 1e-15);
    }

    #[test]
    fn r_trunc_small_cases() {
        assert_eq!(r_trunc_from_re(0.0, 3.0, 5), 1.0);
        assert_eq!(r_trunc_from_re(1.0, 2.0, 1), 4.0);
    }

    #[test]
    fn classes_and_ties() {
        let unit = 1.0 / 200.0;
        assert_eq!(class_of(0.0, 2.0, 1), LevelClass { n: 0, w: 0.0, a: 800 });
        assert_eq!(class_of(unit, 2.0, 1).n, 0);
        let c = class_of(1.5 * unit, 2.0, 1);
        assert_eq!((c.n, c.w), (1, unit));
        assert_eq!(class_of(2.0 * unit, 2.0, 1).n, 1);
        assert_eq!(class_of(2.0 * unit + 1e-12, 2.0, 1).n, 2);
    }

    #[test]
    fn err_series_matches_direct() {
        for &(re, j) in &[(0.3, 2u32), (-1.7, 5), (4.9, 30), (2.0, 10)] {
            let a = err_direct(re, 2.0, j);
            let b = err_series(re, 2.0, j);
            let scale = (2.0 * re).exp().max(r_trunc_from_re(re, 2.0, j));
            assert!((a - b).abs() <= 1e-13 * scale, "{re} {j}: {a} vs {b}");
        }
    }

    #[test]
    fn mismatched_class_rejected() {
        let c = class_of(0.0, 2.0, 1);
        assert!(surrogate_log(Complex64::new(1.0, 0.0), 2.0, 1, &c).is_err());
    }

    #[test]
    fn log_sum_exp_basic() {
        let v = log_sum_exp([0.0, 0.0f64.ln().max(f64::NEG_INFINITY), 1f64.ln()]);
        assert!((v - 2f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }
}
