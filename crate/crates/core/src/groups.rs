//! Normed abelian coefficient groups.
//!
//! Four groups are supported: the reals and the integers with the absolute
//! value, `Z/p` with the symmetric quotient norm `min(v, p - v)`, and the
//! circle `R/Z` with `min(frac, 1 - frac)`. Every value is an exact rational
//! held in its canonical representative.

use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupTag {
    Real,
    Integer,
    ModP(u64),
    Circle,
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::Real => write!(f, "real"),
            GroupTag::Integer => write!(f, "integer"),
            GroupTag::ModP(p) => write!(f, "mod:{p}"),
            GroupTag::Circle => write!(f, "circle"),
        }
    }
}

impl std::str::FromStr for GroupTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "real" => Ok(GroupTag::Real),
            "integer" => Ok(GroupTag::Integer),
            "circle" => Ok(GroupTag::Circle),
            other => {
                let p = other
                    .strip_prefix("mod:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown group {other:?}")))?;
                GroupTag::mod_p(p)
            }
        }
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

impl GroupTag {
    pub fn mod_p(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidCoefficient(format!(
                "ModP requires p >= 2, got {p}"
            )));
        }
        Ok(GroupTag::ModP(p))
    }

    /// Canonical representative of `v` in this group.
    pub fn reduce(&self, v: &Rational) -> Result<Rational> {
        match self {
            GroupTag::Real => Ok(v.clone()),
            GroupTag::Integer => {
                if v.is_integer() {
                    Ok(v.clone())
                } else {
                    Err(Error::InvalidCoefficient(format!("{v} is not an integer")))
                }
            }
            GroupTag::ModP(p) => {
                if !v.is_integer() {
                    return Err(Error::InvalidCoefficient(format!(
                        "{v} is not an integer mod {p}"
                    )));
                }
                let p = BigInt::from(*p);
                Ok(Rational::from_integer(v.to_integer().mod_floor(&p)))
            }
            GroupTag::Circle => Ok(frac(v)),
        }
    }

    pub fn add(&self, a: &Rational, b: &Rational) -> Rational {
        self.reduce(&(a + b))
            .expect("sum of group elements stays in the group")
    }

    pub fn neg(&self, a: &Rational) -> Rational {
        self.reduce(&-a.clone()).expect("negation stays in the group")
    }

    /// Multiply by an integer (the group is a Z-module).
    pub fn times(&self, a: &Rational, n: i64) -> Rational {
        self.reduce(&(a * Rational::from_integer(n.into())))
            .expect("integer multiple stays in the group")
    }

    pub fn norm(&self, a: &Rational) -> Rational {
        match self {
            GroupTag::Real | GroupTag::Integer => a.abs(),
            GroupTag::ModP(p) => {
                let p = Rational::from_integer(BigInt::from(*p));
                let other = &p - a;
                if *a <= other {
                    a.clone()
                } else {
                    other
                }
            }
            GroupTag::Circle => {
                let other = Rational::one() - a;
                if *a <= other {
                    a.clone()
                } else {
                    other
                }
            }
        }
    }
}

/// A group element: tag plus canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    group: GroupTag,
    value: Rational,
}

impl Coefficient {
    pub fn new(group: GroupTag, value: Rational) -> Result<Self> {
        let value = group.reduce(&value)?;
        Ok(Self { group, value })
    }

    pub fn zero(group: GroupTag) -> Self {
        Self {
            group,
            value: Rational::zero(),
        }
    }

    pub fn real(value: Rational) -> Self {
        Self {
            group: GroupTag::Real,
            value,
        }
    }

    pub fn circle(value: Rational) -> Self {
        Self {
            group: GroupTag::Circle,
            value: frac(&value),
        }
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn into_value(self) -> Rational {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn norm(&self) -> Rational {
        self.group.norm(&self.value)
    }

    pub fn add(&self, other: &Coefficient) -> Result<Coefficient> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(
                self.group.to_string(),
                other.group.to_string(),
            ));
        }
        Ok(Coefficient {
            group: self.group,
            value: self.group.add(&self.value, &other.value),
        })
    }

    pub fn neg(&self) -> Coefficient {
        Coefficient {
            group: self.group,
            value: self.group.neg(&self.value),
        }
    }

    pub fn sub(&self, other: &Coefficient) -> Result<Coefficient> {
        self.add(&other.neg())
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.value, self.group)
    }
}

/// The quotient map `R -> R/Z`.
pub fn project(g: &Coefficient) -> Result<Coefficient> {
    if g.group != GroupTag::Real {
        return Err(Error::GroupMismatch("real".into(), g.group.to_string()));
    }
    Ok(Coefficient::circle(g.value.clone()))
}

/// Minimal-norm preimage of a circle element; `1/2` maps to `+1/2`.
pub fn section(g: &Coefficient) -> Result<Coefficient> {
    if g.group != GroupTag::Circle {
        return Err(Error::GroupMismatch("circle".into(), g.group.to_string()));
    }
    Ok(Coefficient::real(section_value(&g.value)))
}

pub(crate) fn section_value(v: &Rational) -> Rational {
    if *v <= Rational::new(1.into(), 2.into()) {
        v.clone()
    } else {
        v - Rational::one()
    }
}

/// Constant `C` relating the real and circle norms: `‖φ(g)‖ ≤ C|g|` and
/// every circle element has a preimage of norm `≤ C‖g‖`. It equals one for
/// the quotient norm.
pub const QUOTIENT_CONSTANT: i64 = 1;
