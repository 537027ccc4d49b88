//! The two curve families and their rational parameter.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::modp::{PrimeField, Residue};
use crate::oracle::AffineModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("c must be nonzero")]
    ZeroParameter,
    #[error("cannot parse {0:?} as an integer or num/den")]
    BadRational(String),
    #[error("unknown family {0:?} (expected c1 or c2)")]
    BadFamily(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `y^2 = x^8 + c`
    C1,
    /// `y^2 = x^7 - c*x`
    C2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::C1 => "c1",
            Family::C2 => "c2",
        })
    }
}

impl FromStr for Family {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "c1" => Ok(Family::C1),
            "c2" => Ok(Family::C2),
            _ => Err(CurveError::BadFamily(s.to_string())),
        }
    }
}

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self, CurveError> {
        if den == 0 {
            return Err(CurveError::BadRational(format!("{num}/{den}")));
        }
        let g = num_integer::gcd(num, den);
        let sign = if den < 0 { -1 } else { 1 };
        Ok(Self { num: sign * num / g, den: sign * den / g })
    }

    pub fn integer(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// Whether `p` divides neither numerator nor denominator.
    pub fn is_unit_at(&self, p: u64) -> bool {
        !self.num.unsigned_abs().is_multiple_of(p) && !self.den.unsigned_abs().is_multiple_of(p)
    }

    /// `num * den^-1 mod p`; `None` when `p` divides the denominator.
    pub fn reduce(&self, field: &PrimeField) -> Option<Residue> {
        let den = field.inv(field.reduce_signed(self.den)).ok()?;
        Some(field.mul(field.reduce_signed(self.num), den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CurveError::BadRational(s.to_string());
        let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
        match s.split_once('/') {
            Some((n, d)) => Rational::new(parse(n)?, parse(d)?),
            None => Ok(Rational::integer(parse(s)?)),
        }
    }
}

/// One member of a family: the family tag and a nonzero rational `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurveFamily {
    pub family: Family,
    pub c: Rational,
}

impl CurveFamily {
    pub fn new(family: Family, c: Rational) -> Result<Self, CurveError> {
        if c.num == 0 {
            return Err(CurveError::ZeroParameter);
        }
        Ok(Self { family, c })
    }

    pub fn c1(c: i64) -> Result<Self, CurveError> {
        Self::new(Family::C1, Rational::integer(c))
    }

    pub fn c2(c: i64) -> Result<Self, CurveError> {
        Self::new(Family::C2, Rational::integer(c))
    }

    /// Good reduction: `p > 3` (or `p = 3` for C1) and `c` a unit at `p`.
    pub fn is_good_prime(&self, p: u64) -> bool {
        let min = match self.family {
            Family::C1 => 3,
            Family::C2 => 5,
        };
        p >= min && p % 2 == 1 && self.c.is_unit_at(p)
    }

    /// The affine model `y^2 = f(x)` reduced mod p.
    pub fn model(&self, field: &PrimeField) -> Option<AffineModel> {
        let c = self.c.reduce(field)?;
        Some(match self.family {
            Family::C1 => AffineModel::c1(c, field),
            Family::C2 => AffineModel::c2(c, field),
        })
    }
}

impl fmt::Display for CurveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::C1 => write!(f, "y^2=x^8+({})", self.c),
            Family::C2 => write!(f, "y^2=x^7-({})x", self.c),
        }
    }
}
