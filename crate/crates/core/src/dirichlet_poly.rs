//! Sparse Dirichlet polynomials in `f(n)` and `conj f(m)`.
//!
//! For a Steinhaus `f`, `E f(n) conj f(m) = 1(n = m)`; for characters modulo a
//! prime `q` the same holds after averaging whenever `n, m < q`. Expanding a
//! product into monomials therefore gives both averages exactly, with no
//! sampling and no character sums.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::primes::SpfTable;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `sum_n c_n f(n)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DirichletPoly {
    pub terms: HashMap<u64, Complex64>,
}

impl DirichletPoly {
    pub fn one() -> Self {
        Self::monomial(1, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(n: u64, c: Complex64) -> Self {
        let mut terms = HashMap::new();
        terms.insert(n, c);
        Self { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u64, Complex64)>) -> Self {
        let mut out = Self::default();
        for (n, c) in terms {
            *out.terms.entry(n).or_default() += c;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&n, &a) in &self.terms {
            for (&m, &b) in &other.terms {
                *out.terms.entry(n * m).or_default() += a * b;
            }
        }
        out
    }

    pub fn pow(&self, j: u32) -> Self {
        (0..j).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Largest `n` carrying a term.
    pub fn length(&self) -> u64 {
        self.terms.keys().copied().max().unwrap_or(0)
    }

    /// `E |P(f)|^2 = sum |c_n|^2`.
    pub fn mean_square(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Evaluates with `value(n)` supplying `f(n)`.
    pub fn evaluate(&self, value: impl Fn(u64) -> Complex64) -> Complex64 {
        self.terms.iter().map(|(&n, &c)| c * value(n)).sum()
    }
}

/// `sum c_{n,m} f(n) conj f(m)`, stored with `gcd(n, m) = 1`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BiPoly {
    pub terms: HashMap<(u64, u64), Complex64>,
}

impl BiPoly {
    pub fn one() -> Self {
        let mut terms = HashMap::new();
        terms.insert((1, 1), Complex64::new(1.0, 0.0));
        Self { terms }
    }

    pub fn constant(c: f64) -> Self {
        Self::one().scale(c)
    }

    fn insert(&mut self, n: u64, m: u64, c: Complex64) {
        let g = gcd(n, m);
        *self.terms.entry((n / g, m / g)).or_default() += c;
    }

    /// `P conj(Q)`.
    pub fn from_pair(p: &DirichletPoly, q: &DirichletPoly) -> Self {
        let mut out = Self::default();
        for (&n, &a) in &p.terms {
            for (&m, &b) in &q.terms {
                out.insert(n, m, a * b.conj());
            }
        }
        out
    }

    pub fn holomorphic(p: &DirichletPoly) -> Self {
        let mut out = Self::default();
        for (&n, &c) in &p.terms {
            out.insert(n, 1, c);
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(n, m), &c)| ((m, n), c.conj())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(n, m), &c) in &other.terms {
            *out.terms.entry((n, m)).or_default() += c;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&k, &c)| (k, c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&(n1, m1), &a) in &self.terms {
            for (&(n2, m2), &b) in &other.terms {
                out.insert(n1 * n2, m1 * m2, a * b);
            }
        }
        out.prune();
        out
    }

    /// `(P + conj P) / 2`.
    pub fn real_part(&self) -> Self {
        self.add(&self.conj()).scale(0.5)
    }

    /// `sum_{j <= order} u^j / j!` composed with this polynomial.
    pub fn truncated_exp(&self, order: u32) -> Self {
        let mut acc = Self::one();
        let mut power = Self::one();
        let mut fact = 1.0;
        for j in 1..=order {
            power = power.mul(self);
            fact *= j as f64;
            acc = acc.add(&power.scale(1.0 / fact));
        }
        acc
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > 1e-300);
    }

    /// Expectation over a Steinhaus `f`: the coefficient of `(1, 1)`.
    pub fn expectation(&self) -> Complex64 {
        self.terms.get(&(1, 1)).copied().unwrap_or_default()
    }

    /// Evaluates with `value(n)` supplying `f(n)`.
    pub fn evaluate(&self, value: impl Fn(u64) -> Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(n, m), &c)| c * value(n) * value(m).conj())
            .sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `d~(n)`: the number of divisors of `n` built only from primes in `set`.
pub fn restricted_divisor_count(n: u64, set: &[u64], table: &SpfTable) -> u64 {
    table
        .factorize(n)
        .iter()
        .filter(|(p, _)| set.contains(p))
        .map(|&(_, e)| e as u64 + 1)
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn mean_square_is_diagonal() {
        let s = DirichletPoly::from_terms((1..=5).map(|n| (n, c(1.0))));
        let sq = BiPoly::from_pair(&s, &s);
        assert!((sq.expectation() - c(5.0)).norm() < 1e-14);
        assert!((s.mean_square() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn fourth_moment_of_prefix_sum() {
        // E|sum_{n<=3} f(n)|^4 = 15
        let s = DirichletPoly::from_terms((1..=3).map(|n| (n, c(1.0))));
        let sq = s.mul(&s);
        assert!((sq.mean_square() - 15.0).abs() < 1e-12);
        let bi = BiPoly::from_pair(&s, &s);
        assert!((bi.mul(&bi).expectation() - c(15.0)).norm() < 1e-12);
    }

    #[test]
    fn real_part_and_truncated_exp() {
        let d = BiPoly::holomorphic(&DirichletPoly::monomial(2, c(0.3)));
        let re = d.real_part();
        // E (Re 0.3 f(2))^2 = 0.09 / 2
        assert!((re.mul(&re).expectation() - c(0.045)).norm() < 1e-15);
        let e = re.truncated_exp(2);
        assert!((e.expectation() - c(1.0 + 0.045 / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn restricted_divisors() {
        let t = SpfTable::new(100).unwrap();
        assert_eq!(restricted_divisor_count(12, &[2], &t), 3);
        assert_eq!(restricted_divisor_count(12, &[2, 3], &t), 6);
        assert_eq!(restricted_divisor_count(35, &[2], &t), 1);
    }
}
