//! Exact rational scalars.
//!
//! Every coordinate, slope, and width in the engine is a `Rat`: an
//! arbitrary-precision rational that serializes as a `"p/q"` string (`"p"`
//! when the denominator is 1). No floating point enters any verdict.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True when the value is an integer (denominator 1 in lowest terms).
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// Largest integer ≤ self, as a `Rat`.
    pub fn floor(&self) -> Rat {
        Rat(self.0.floor())
    }

    /// Smallest integer ≥ self, as a `Rat`.
    pub fn ceil(&self) -> Rat {
        Rat(self.0.ceil())
    }

    /// The integer value, if the rational is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.0.is_integer() {
            Some(self.0.to_integer())
        } else {
            None
        }
    }

    /// Floor as a machine integer; panics on overflow (desk-scale inputs).
    pub fn floor_i64(&self) -> i64 {
        use num::ToPrimitive;
        self.0
            .floor()
            .to_integer()
            .to_i64()
            .expect("floor exceeds i64 range")
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Exact midpoint of two rationals.
    pub fn midpoint(a: &Rat, b: &Rat) -> Rat {
        (a.clone() + b.clone()) / Rat::int(2)
    }

    /// Least positive rational generating `aZ ∩ bZ`, for positive a, b.
    ///
    /// For a = p1/q1 and b = p2/q2 in lowest terms, the intersection of the
    /// two cyclic subgroups of (Q, +) is generated by lcm(p1, p2)/gcd(q1, q2).
    pub fn lattice_lcm(a: &Rat, b: &Rat) -> Rat {
        use num::Integer;
        assert!(a.is_positive() && b.is_positive());
        let (p1, q1) = (a.0.numer(), a.0.denom());
        let (p2, q2) = (b.0.numer(), b.0.denom());
        Rat(BigRational::new(p1.lcm(p2), q1.gcd(q2)))
    }

    /// True when `self` is an integer multiple of `step` (step > 0).
    pub fn is_multiple_of(&self, step: &Rat) -> bool {
        assert!(step.is_positive());
        (self.clone() / step.clone()).is_integer()
    }

    /// Least positive rational generating `aZ + bZ`, for nonzero a, b.
    ///
    /// For a = p1/q1 and b = p2/q2 in lowest terms the sum of the two cyclic
    /// subgroups of (Q, +) is generated by gcd(p1*q2, p2*q1)/(q1*q2).
    pub fn lattice_gcd(a: &Rat, b: &Rat) -> Rat {
        use num::Integer;
        assert!(!a.is_zero() && !b.is_zero());
        let (p1, q1) = (a.0.numer(), a.0.denom());
        let (p2, q2) = (b.0.numer(), b.0.denom());
        Rat(BigRational::new((p1 * q2).gcd(&(p2 * q1)), q1 * q2))
    }
}

/// The integer solutions of `x*a + y*b = c` for rational a, b, c (not both
/// a, b zero): a particular solution plus the step between consecutive ones.
///
/// Every solution is `(x + s*x_step, y + s*y_step)` for an integer `s`, and
/// the steps are themselves integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSolution {
    pub x: Rat,
    pub y: Rat,
    pub x_step: Rat,
    pub y_step: Rat,
}

/// Solve `x*a + y*b = c` over the integers. Returns `None` when `c` is not
/// in the subgroup `aZ + bZ` of the rationals.
pub fn solve_integer_combination(a: &Rat, b: &Rat, c: &Rat) -> Option<LatticeSolution> {
    use num::Integer;
    assert!(
        !(a.is_zero() && b.is_zero()),
        "degenerate lattice equation 0x + 0y = c"
    );
    // Clear denominators: with d = lcm of the three denominators, the
    // equation becomes x*A + y*B = C over the integers.
    let d = a.0.denom().lcm(b.0.denom()).lcm(c.0.denom());
    let scale = |r: &Rat| (&r.0 * BigRational::from_integer(d.clone())).to_integer();
    let (big_a, big_b, big_c) = (scale(a), scale(b), scale(c));
    let eg = big_a.extended_gcd(&big_b);
    if (&big_c % &eg.gcd) != BigInt::zero() {
        return None;
    }
    let m = &big_c / &eg.gcd;
    Some(LatticeSolution {
        x: Rat(BigRational::from_integer(eg.x * &m)),
        y: Rat(BigRational::from_integer(eg.y * &m)),
        x_step: Rat(BigRational::from_integer(&big_b / &eg.gcd)),
        y_step: Rat(BigRational::from_integer(-(&big_a / &eg.gcd))),
    })
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Error produced when a `"p/q"` string fails to parse.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(pub String);

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseRatError(s.to_string());
        match s.split_once('/') {
            Some((num, den)) => {
                let num: BigInt = num.trim().parse().map_err(|_| bad())?;
                let den: BigInt = den.trim().parse().map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(Rat(BigRational::new(num, den)))
            }
            None => {
                let num: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Rat(BigRational::from_integer(num)))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rat(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn div(self, rhs: &'a Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rat(&self.0 / &rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

/// Convenience constructor used pervasively in tests: `rat(1, 8)` = 1/8.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}
