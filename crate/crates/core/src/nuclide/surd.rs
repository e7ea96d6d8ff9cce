//! Exact arithmetic on finite sums `sum_m c_m sqrt(m)` with rational `c_m`
//! and square-free integer `m`.
//!
//! Clebsch-Gordan coefficients and Gaunt integrals are all of the form
//! `±sqrt(p/q)`; products and sums of them stay in this ring, so transition
//! strengths come out as exact rationals.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg};

use num_rational::Ratio;

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Surd {
    // square-free radicand -> rational coefficient; no zero coefficients stored
    terms: BTreeMap<i128, Rational>,
}

impl Surd {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut s = Self::zero();
        s.push(1, r);
        s
    }

    pub fn from_int(n: i128) -> Self {
        Self::from_rational(Rational::from_integer(n))
    }

    /// `sign * sqrt(r)` for a non-negative rational `r`.
    pub fn signed_sqrt(sign: i32, r: Rational) -> Self {
        assert!(r >= Rational::from_integer(0), "sqrt of negative rational");
        if r == Rational::from_integer(0) || sign == 0 {
            return Self::zero();
        }
        // sqrt(p/q) = sqrt(p q) / q
        let (p, q) = (*r.numer(), *r.denom());
        let (outer, inner) = split_square(p * q);
        let coeff = Rational::new(outer * sign.signum() as i128, q);
        let mut s = Self::zero();
        s.push(inner, coeff);
        s
    }

    fn push(&mut self, radicand: i128, coeff: Rational) {
        if coeff == Rational::from_integer(0) {
            return;
        }
        let entry = self.terms.entry(radicand).or_insert_with(|| Rational::from_integer(0));
        *entry += coeff;
        if *entry == Rational::from_integer(0) {
            self.terms.remove(&radicand);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The exact square if it is rational, i.e. when at most one radicand is
    /// present.
    pub fn square_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::from_integer(0)),
            1 => {
                let (&m, c) = self.terms.iter().next().unwrap();
                Some(c * c * Rational::from_integer(m))
            }
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&m, c)| ratio_to_f64(c) * (m as f64).sqrt())
            .sum()
    }
}

pub fn ratio_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Writes `n = outer^2 * inner` with `inner` square-free.
fn split_square(mut n: i128) -> (i128, i128) {
    debug_assert!(n > 0);
    let mut outer = 1;
    let mut inner = 1;
    let mut p = 2;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            outer *= p;
        }
        if n % p == 0 {
            n /= p;
            inner *= p;
        }
        p += 1;
    }
    (outer, inner * n)
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        for (&m, c) in &rhs.terms {
            out.push(m, *c);
        }
        out
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (&m1, c1) in &self.terms {
            for (&m2, c2) in &rhs.terms {
                // sqrt(m1) sqrt(m2) = g sqrt(m1 m2 / g^2) with both square-free
                let g = gcd(m1, m2);
                let radicand = (m1 / g) * (m2 / g);
                out.push(radicand, c1 * c2 * Rational::from_integer(g));
            }
        }
        out
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(mut self) -> Surd {
        for c in self.terms.values_mut() {
            *c = -*c;
        }
        self
    }
}
