//! Exact finite sums `Σ c_r √r` with rational `c_r` and pairwise
//! non-commensurable positive integer radicands `r`.
//!
//! Volumes of rational simplices are square roots of rationals, so every
//! mass is such a sum. Square roots of distinct square-free integers are
//! linearly independent over the rationals, hence a sum with a nonzero
//! coefficient is nonzero and its sign is found by refining interval bounds
//! on each root until the enclosure excludes zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::Rational;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurdSum {
    terms: BTreeMap<BigInt, Rational>,
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Write a positive integer as `s² · rest`, stripping small-prime squares
/// and a perfect-square remainder.
fn split_square(mut n: BigInt) -> (BigInt, BigInt) {
    let mut outside = BigInt::one();
    for &p in &SMALL_PRIMES {
        let sq = BigInt::from(p * p);
        while (&n % &sq).is_zero() {
            n /= &sq;
            outside *= p;
        }
    }
    if let Some(r) = is_square(&n) {
        return (outside * r, BigInt::one());
    }
    (outside, n)
}

impl SurdSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(c: Rational) -> Self {
        let mut s = Self::zero();
        s.push(BigInt::one(), c);
        s
    }

    /// `√x` for a nonnegative rational `x`.
    pub fn sqrt_of(x: &Rational) -> Self {
        Self::scaled_sqrt(Rational::one(), x)
    }

    /// `c·√x`.
    pub fn scaled_sqrt(c: Rational, x: &Rational) -> Self {
        assert!(!x.is_negative(), "square root of a negative rational");
        let mut s = Self::zero();
        if x.is_zero() || c.is_zero() {
            return s;
        }
        // √(p/q) = √(p·q) / q
        let n = x.numer() * x.denom();
        let (outside, rest) = split_square(n);
        let coeff = c * Rational::new(outside, x.denom().clone());
        s.push(rest, coeff);
        s
    }

    fn push(&mut self, radicand: BigInt, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let mut key = radicand;
        let mut coeff = coeff;
        if !self.terms.contains_key(&key) {
            // merge with a commensurable radicand: √r = √(r r') / r' · √r'
            let found = self
                .terms
                .keys()
                .find_map(|other| is_square(&(&key * other)).map(|root| (other.clone(), root)));
            if let Some((other, root)) = found {
                coeff *= Rational::new(root, other.clone());
                key = other;
            }
        }
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when it is rational (all radicands are 1).
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BigInt::one()).cloned(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| c.to_f64().unwrap_or(f64::NAN) * r.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (r, v) in &self.terms {
            out.terms.insert(r.clone(), v * c);
        }
        out
    }

    /// Exact product.
    pub fn mul(&self, other: &SurdSum) -> SurdSum {
        let mut out = SurdSum::zero();
        for (r, c) in &self.terms {
            for (r2, c2) in &other.terms {
                out += SurdSum::scaled_sqrt(c * c2, &Rational::from_integer(r * r2));
            }
        }
        out
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let approx = self.to_f64();
        let magnitude: f64 = self
            .terms
            .iter()
            .map(|(r, c)| c.to_f64().unwrap_or(0.0).abs() * r.to_f64().unwrap_or(0.0).sqrt())
            .sum();
        if approx.is_finite() && magnitude.is_finite() && approx.abs() > 1e-9 * magnitude.max(1e-300) {
            return if approx > 0.0 { 1 } else { -1 };
        }
        let mut bits = 64u32;
        loop {
            let scale = BigInt::one() << (2 * bits);
            let unit = Rational::new(BigInt::one(), BigInt::one() << bits);
            let mut lo = Rational::zero();
            let mut hi = Rational::zero();
            for (r, c) in &self.terms {
                let floor = (r * &scale).sqrt();
                let root_lo = Rational::new(floor, BigInt::one() << bits);
                let exact = is_square(r).is_some();
                let root_hi = if exact { root_lo.clone() } else { &root_lo + &unit };
                if c.is_positive() {
                    lo += c * &root_lo;
                    hi += c * &root_hi;
                } else {
                    lo += c * &root_hi;
                    hi += c * &root_lo;
                }
            }
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
            assert!(bits <= 1 << 16, "surd sign refinement did not terminate");
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &Rational)> {
        self.terms.iter()
    }
}

impl PartialOrd for SurdSum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SurdSum {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.clone() - other.clone()).signum() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl Add for SurdSum {
    type Output = SurdSum;
    fn add(mut self, rhs: SurdSum) -> SurdSum {
        self += rhs;
        self
    }
}

impl AddAssign for SurdSum {
    fn add_assign(&mut self, rhs: SurdSum) {
        for (r, c) in rhs.terms {
            self.push(r, c);
        }
    }
}

impl Neg for SurdSum {
    type Output = SurdSum;
    fn neg(self) -> SurdSum {
        self.scale(&-Rational::one())
    }
}

impl Sub for SurdSum {
    type Output = SurdSum;
    fn sub(self, rhs: SurdSum) -> SurdSum {
        self + (-rhs)
    }
}

impl Mul<&Rational> for &SurdSum {
    type Output = SurdSum;
    fn mul(self, rhs: &Rational) -> SurdSum {
        self.scale(rhs)
    }
}

impl std::iter::Sum for SurdSum {
    fn sum<I: Iterator<Item = SurdSum>>(iter: I) -> SurdSum {
        iter.fold(SurdSum::zero(), |a, b| a + b)
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (r, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if r.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*sqrt({r})")?;
            }
        }
        Ok(())
    }
}

/// `a ≤ b` decided exactly.
pub fn le(a: &SurdSum, b: &SurdSum) -> bool {
    (b.clone() - a.clone()).signum() >= 0
}
