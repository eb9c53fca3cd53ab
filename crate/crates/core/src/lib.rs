//! Polyhedral chains in `[0,1]^d` with coefficients in a normed abelian group.
//!
//! All chain arithmetic is exact: coordinates and coefficients are
//! arbitrary-precision rationals, and masses are kept as finite sums of
//! rational multiples of square roots ([`surd::SurdSum`]) so that mass
//! inequalities can be decided without rounding.
//!
//! Module map:
//!
//! * [`groups`]: coefficient groups (real, integer, mod p, circle) and the
//!   quotient map `R -> R/Z` with its minimal-norm section.
//! * [`geometry`], [`grid`]: simplices, volumes, cones, the Kuhn triangulation.
//! * [`chains`]: formal sums, boundary, mass, restriction, subdivision.
//! * [`flatnorm`]: the complex-relative flat norm LP and an exact oracle.
//! * [`approx`]: shrinking, singular translation, disjoint representatives,
//!   cycle extension and telescoping decompositions.
//! * [`lifting`]: lifting circle-valued chains to real chains.
//! * [`coarea`]: level-set decomposition of piecewise-constant functions.
//! * [`io`], [`cli`]: chain files, reports and the command line front-end.

// Index loops read more naturally than iterator chains in the matrix code.
#![allow(clippy::needless_range_loop)]

pub mod approx;
pub mod batch;
pub mod chains;
pub mod cli;
pub mod coarea;
pub mod error;
pub mod flatnorm;
pub mod generate;
pub mod geometry;
pub mod grid;
pub mod groups;
pub mod io;
pub mod lifting;
pub mod linalg;
pub mod lp;
pub mod surd;

pub use chains::PolyChain;
pub use error::{Error, Result};
pub use geometry::{Point, Simplex};
pub use grid::{GridComplex, GridSpec};
pub use groups::{Coefficient, GroupTag};
pub use surd::SurdSum;

pub use num::BigRational as Rational;

/// Parse a rational written as `p/q`, `p` or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    use num::{BigInt, Num, Signed};
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str_radix(p.trim(), 10).map_err(|_| bad())?;
        let q = BigInt::from_str_radix(q.trim(), 10).map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::from(0)
        } else {
            BigInt::from_str_radix(int, 10).map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let frac_num = BigInt::from_str_radix(frac, 10).map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10), frac.len());
        let mut value = Rational::from_integer(int_part.abs()) + Rational::new(frac_num, scale);
        if neg {
            value = -value;
        }
        return Ok(value);
    }
    BigInt::from_str_radix(s, 10)
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// Shorthand for a small rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }
}
