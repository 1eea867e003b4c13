//! Exact coefficients: complex rationals and Laurent polynomials in a single
//! formal symbol (κ for the Hopf engine, κ̄ for twists).

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Q = BigRational;
pub type CQ = Complex<Q>;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn cq(re: Q, im: Q) -> CQ {
    Complex::new(re, im)
}

pub fn cq_int(n: i64) -> CQ {
    Complex::new(q(n, 1), Q::zero())
}

pub fn cq_i() -> CQ {
    Complex::new(Q::zero(), Q::one())
}

pub fn cq_inv(z: &CQ) -> Option<CQ> {
    let n = &z.re * &z.re + &z.im * &z.im;
    if n.is_zero() {
        return None;
    }
    Some(Complex::new(&z.re / &n, -&z.im / &n))
}

fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_cq(z: &CQ) -> String {
    match (z.re.is_zero(), z.im.is_zero()) {
        (_, true) => fmt_q(&z.re),
        (true, false) => format!("{}i", fmt_q(&z.im)),
        _ => {
            let sign = if z.im.is_negative() { "-" } else { "+" };
            format!("({}{}{}i)", fmt_q(&z.re), sign, fmt_q(&z.im.abs()))
        }
    }
}

/// Laurent polynomial Σ c_n s^n with exact complex-rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<i32, CQ>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(cq_int(1))
    }

    pub fn constant(c: CQ) -> Self {
        Poly::monomial(c, 0)
    }

    pub fn monomial(c: CQ, power: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(power, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &CQ)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, power: i32) -> CQ {
        self.terms.get(&power).cloned().unwrap_or_else(CQ::zero)
    }

    pub fn min_power(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    fn add_term(&mut self, power: i32, c: CQ) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(power).or_insert_with(CQ::zero);
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&power);
        }
    }

    pub fn scale(&self, c: &CQ) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn shift(&self, by: i32) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, v)| (k + by, v.clone())).collect(),
        }
    }

    /// Drops every power above `max`.
    pub fn truncate(&self, max: i32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| **k <= max)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn mul_truncated(&self, other: &Poly, max: Option<i32>) -> Poly {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let p = a + b;
                if max.map_or(true, |m| p <= m) {
                    out.add_term(p, ca * cb);
                }
            }
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_truncated(rhs, None)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("s"))
    }
}

impl Poly {
    pub fn render(&self, symbol: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| match k {
                0 => fmt_cq(v),
                1 => format!("{}·{}", fmt_cq(v), symbol),
                _ => format!("{}·{}^{}", fmt_cq(v), symbol, k),
            })
            .collect();
        parts.join(" + ")
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arithmetic_cancels() {
        let a = Poly::monomial(cq_i(), -1);
        let b = &a + &Poly::one();
        let c = &b - &a;
        assert_eq!(c, Poly::one());
        let sq = &a * &a;
        assert_eq!(sq.coeff(-2), cq_int(-1));
    }

    #[test]
    fn truncation_drops_high_powers() {
        let p = &Poly::monomial(cq_int(1), 1) + &Poly::monomial(cq_int(2), 3);
        let t = p.mul_truncated(&p, Some(3));
        assert_eq!(t.max_power(), Some(2));
    }

    #[test]
    fn inverse_of_complex_rational() {
        let z = cq(q(1, 2), q(3, 1));
        let w = cq_inv(&z).unwrap();
        assert_eq!(&z * &w, cq_int(1));
        assert!(cq_inv(&cq_int(0)).is_none());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(2, 3), BigInt::from(0));
    }
}
