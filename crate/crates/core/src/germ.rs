//! Germs of piecewise-linear functions at a point.
//!
//! A [`Germ1D`] records everything a PL function does arbitrarily close to a
//! base point: the value (when the point is in the domain) and the affine
//! maps governing each side (when that side of the domain reaches the
//! point). Because the data is affine, germ-level questions — continuity,
//! matching slopes, the sign of a difference "just left of x" — all have
//! exact answers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::pl::{Affine, PLFunction};
use crate::rat::Rat;

/// Regularity grade for structures and checks: continuous, or continuously
/// differentiable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum SmoothnessClass {
    C0,
    C1,
}

impl SmoothnessClass {
    pub fn grade(self) -> u8 {
        match self {
            SmoothnessClass::C0 => 0,
            SmoothnessClass::C1 => 1,
        }
    }
}

impl From<SmoothnessClass> for u8 {
    fn from(r: SmoothnessClass) -> u8 {
        r.grade()
    }
}

impl TryFrom<u8> for SmoothnessClass {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            0 => Ok(SmoothnessClass::C0),
            1 => Ok(SmoothnessClass::C1),
            other => Err(format!("smoothness grade must be 0 or 1, got {other}")),
        }
    }
}

impl fmt::Display for SmoothnessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.grade())
    }
}

impl FromStr for SmoothnessClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "0" => Ok(SmoothnessClass::C0),
            "1" => Ok(SmoothnessClass::C1),
            other => Err(format!("smoothness grade must be 0 or 1, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GermError {
    #[error("function is not defined on any side of {0}")]
    NotDefinedNear(Rat),
}

/// The germ of a PL function at `base`.
///
/// `value` is present iff `base` lies in the domain. `left` / `right` are
/// the affine maps valid on `(base-ε, base)` / `(base, base+ε)` whenever
/// that side of the domain reaches `base`. When the point is in the (open)
/// domain all three are present and `right` also gives the value.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Germ1D {
    pub base: Rat,
    pub value: Option<Rat>,
    pub left: Option<Affine>,
    pub right: Option<Affine>,
}

impl Germ1D {
    /// Extracts the germ of `f` at `base`; `None` when `f` is defined on
    /// neither side and not at the point.
    pub fn of(f: &PLFunction, base: &Rat) -> Option<Germ1D> {
        let has_left = f.domain().intervals().iter().any(|iv| {
            iv.lo < crate::interval::Bound::Finite(base.clone())
                && iv.hi >= crate::interval::Bound::Finite(base.clone())
        });
        let has_right = f.domain().intervals().iter().any(|iv| {
            iv.lo <= crate::interval::Bound::Finite(base.clone())
                && iv.hi > crate::interval::Bound::Finite(base.clone())
        });
        if !has_left && !has_right {
            return None;
        }
        let value = f.eval(base);
        let left = if has_left {
            Some(
                f.piece_affine_left_of(base)
                    .expect("left neighborhood is covered"),
            )
        } else {
            None
        };
        let right = if has_right {
            Some(
                f.piece_affine_at(base)
                    .expect("right neighborhood is covered"),
            )
        } else {
            None
        };
        Some(Germ1D {
            base: base.clone(),
            value,
            left,
            right,
        })
    }

    pub fn left_limit(&self) -> Option<Rat> {
        self.left.as_ref().map(|a| a.eval(&self.base))
    }

    pub fn right_limit(&self) -> Option<Rat> {
        self.right.as_ref().map(|a| a.eval(&self.base))
    }

    pub fn is_two_sided(&self) -> bool {
        self.left.is_some() && self.right.is_some()
    }

    /// Germwise sum (defined sides/values intersect).
    pub fn add(&self, other: &Germ1D) -> Germ1D {
        assert_eq!(self.base, other.base, "germ bases must agree");
        Germ1D {
            base: self.base.clone(),
            value: match (&self.value, &other.value) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
            left: zip_affine(&self.left, &other.left, Affine::add),
            right: zip_affine(&self.right, &other.right, Affine::add),
        }
    }

    pub fn sub(&self, other: &Germ1D) -> Germ1D {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Germ1D {
        Germ1D {
            base: self.base.clone(),
            value: self.value.as_ref().map(|v| -v),
            left: self.left.as_ref().map(Affine::neg),
            right: self.right.as_ref().map(Affine::neg),
        }
    }

    /// True when the germ is identically zero on every side where it is
    /// defined (and at the point, if defined).
    pub fn is_zero(&self) -> bool {
        self.value.as_ref().is_none_or(Rat::is_zero)
            && self
                .left
                .as_ref()
                .is_none_or(|a| a.eval(&self.base).is_zero() && a.slope.is_zero())
            && self
                .right
                .as_ref()
                .is_none_or(|a| a.eval(&self.base).is_zero() && a.slope.is_zero())
    }
}

fn zip_affine(
    a: &Option<Affine>,
    b: &Option<Affine>,
    op: fn(&Affine, &Affine) -> Affine,
) -> Option<Affine> {
    match (a, b) {
        (Some(x), Some(y)) => Some(op(x, y)),
        _ => None,
    }
}

/// Is `f` of class `C^r` at `x0`, judged on its domain?
///
/// * Point in the domain: the left limit must match the value (the right
///   piece carries the value by convention), and for `C^1` the side slopes
///   must agree.
/// * Punctured neighborhood: the check asks whether the hole is removable
///   to that class (matching limits; matching slopes for `C^1`).
/// * One side only: affine pieces are smooth, so the answer is yes.
/// * Defined on neither side: [`GermError::NotDefinedNear`].
pub fn is_cr_at(f: &PLFunction, x0: &Rat, r: SmoothnessClass) -> Result<bool, GermError> {
    let germ = Germ1D::of(f, x0).ok_or_else(|| GermError::NotDefinedNear(x0.clone()))?;
    Ok(germ_is_cr(&germ, r))
}

/// The `C^r` judgement on already-extracted germ data.
pub fn germ_is_cr(germ: &Germ1D, r: SmoothnessClass) -> bool {
    match (&germ.left, &germ.right) {
        (Some(l), Some(rt)) => {
            let touch = match &germ.value {
                Some(v) => l.eval(&germ.base) == *v,
                None => l.eval(&germ.base) == rt.eval(&germ.base),
            };
            let smooth = match r {
                SmoothnessClass::C0 => true,
                SmoothnessClass::C1 => l.slope == rt.slope,
            };
            touch && smooth
        }
        // One-sided: a single affine piece is as smooth as it gets.
        _ => true,
    }
}

/// Does `a(x) > 0` hold for all x in some `(base, base+ε)`?
pub fn strictly_positive_right_of(a: &Affine, base: &Rat) -> bool {
    let v = a.eval(base);
    v.is_positive() || (v.is_zero() && a.slope.is_positive())
}

/// Does `a(x) > 0` hold for all x in some `(base-ε, base)`?
pub fn strictly_positive_left_of(a: &Affine, base: &Rat) -> bool {
    let v = a.eval(base);
    v.is_positive() || (v.is_zero() && a.slope.is_negative())
}

/// Does `a(x) >= 0` hold near `base` on the right?
pub fn nonnegative_right_of(a: &Affine, base: &Rat) -> bool {
    let v = a.eval(base);
    v.is_positive() || (v.is_zero() && !a.slope.is_negative())
}

/// Does `a(x) >= 0` hold near `base` on the left?
pub fn nonnegative_left_of(a: &Affine, base: &Rat) -> bool {
    let v = a.eval(base);
    v.is_positive() || (v.is_zero() && !a.slope.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::OpenSet1D;
    use crate::rat::rat;

    fn tent() -> PLFunction {
        // 1/8 - |x|, the in-window part of a wrapped constant near 0.
        PLFunction::constant(OpenSet1D::line(), rat(9, 8))
            .sub(&PLFunction::constant(OpenSet1D::line(), Rat::one()).add(&PLFunction::abs()))
    }

    #[test]
    fn germ_of_tent_at_zero() {
        let g = Germ1D::of(&tent(), &Rat::zero()).unwrap();
        assert_eq!(g.value, Some(rat(1, 8)));
        let l = g.left.unwrap();
        let r = g.right.unwrap();
        assert_eq!(l.slope, Rat::one());
        assert_eq!(r.slope, rat(-1, 1));
        assert_eq!(l.eval(&Rat::zero()), rat(1, 8));
        assert_eq!(r.eval(&Rat::zero()), rat(1, 8));
    }

    #[test]
    fn cr_checks_on_kinks_and_jumps() {
        let abs = PLFunction::abs();
        assert_eq!(is_cr_at(&abs, &Rat::zero(), SmoothnessClass::C0), Ok(true));
        assert_eq!(is_cr_at(&abs, &Rat::zero(), SmoothnessClass::C1), Ok(false));
        assert_eq!(is_cr_at(&abs, &Rat::one(), SmoothnessClass::C1), Ok(true));
        let step = PLFunction::step(Rat::zero(), Rat::zero(), Rat::one());
        assert_eq!(is_cr_at(&step, &Rat::zero(), SmoothnessClass::C0), Ok(false));
    }

    #[test]
    fn punctured_germ_judges_removability() {
        let punctured = OpenSet1D::from_intervals(vec![
            crate::interval::Interval::new(
                crate::interval::Bound::NEG_INF,
                crate::interval::Bound::Finite(Rat::zero()),
            )
            .unwrap(),
            crate::interval::Interval::new(
                crate::interval::Bound::Finite(Rat::zero()),
                crate::interval::Bound::POS_INF,
            )
            .unwrap(),
        ]);
        let f = PLFunction::abs().restrict(&punctured);
        let g = Germ1D::of(&f, &Rat::zero()).unwrap();
        assert_eq!(g.value, None);
        assert!(g.is_two_sided());
        assert_eq!(is_cr_at(&f, &Rat::zero(), SmoothnessClass::C0), Ok(true));
        assert_eq!(is_cr_at(&f, &Rat::zero(), SmoothnessClass::C1), Ok(false));
    }

    #[test]
    fn one_sided_germs() {
        let f = PLFunction::abs().restrict(&OpenSet1D::open(Rat::zero(), Rat::one()));
        let g = Germ1D::of(&f, &Rat::zero()).unwrap();
        assert!(g.left.is_none());
        assert!(g.right.is_some());
        assert_eq!(g.value, None);
        assert_eq!(is_cr_at(&f, &Rat::zero(), SmoothnessClass::C1), Ok(true));
        assert_eq!(
            is_cr_at(&f, &Rat::int(5), SmoothnessClass::C0),
            Err(GermError::NotDefinedNear(Rat::int(5)))
        );
    }

    #[test]
    fn side_sign_rules() {
        let id = Affine::identity(); // x
        assert!(strictly_positive_right_of(&id, &Rat::zero()));
        assert!(!strictly_positive_left_of(&id, &Rat::zero()));
        let ramp = Affine::new(rat(-1, 1), Rat::one()); // 1 - x
        assert!(strictly_positive_left_of(&ramp, &Rat::one()));
        assert!(!strictly_positive_right_of(&ramp, &Rat::one()));
        let zero = Affine::zero();
        assert!(!strictly_positive_left_of(&zero, &Rat::zero()));
        assert!(nonnegative_left_of(&zero, &Rat::zero()));
        assert!(nonnegative_right_of(&zero, &Rat::zero()));
    }

    #[test]
    fn germ_arithmetic() {
        let a = Germ1D::of(&PLFunction::abs(), &Rat::zero()).unwrap();
        let sum = a.sub(&a);
        assert!(sum.is_zero());
        let doubled = a.add(&a);
        assert_eq!(doubled.right.unwrap().slope, Rat::int(2));
    }
}
