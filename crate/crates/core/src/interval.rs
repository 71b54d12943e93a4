//! Open subsets of the rational line.
//!
//! An [`OpenSet1D`] is a finite union of disjoint open intervals with
//! rational or infinite endpoints, kept sorted and normalized. Intervals
//! that merely touch at an endpoint stay separate — `(0,1) ∪ (1,2)` is not
//! `(0,2)` as an open set.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rat::Rat;

/// An interval endpoint: a rational or ±∞.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Finite(Rat),
    #[serde(with = "infinity")]
    Infinite(Sign),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sign {
    Neg,
    Pos,
}

mod infinity {
    use super::Sign;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(sign: &Sign, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match sign {
            Sign::Neg => "-inf",
            Sign::Pos => "inf",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Sign, D::Error> {
        match String::deserialize(d)?.as_str() {
            "-inf" => Ok(Sign::Neg),
            "inf" | "+inf" => Ok(Sign::Pos),
            other => Err(de::Error::custom(format!("not an infinity: {other:?}"))),
        }
    }
}

impl Bound {
    pub const NEG_INF: Bound = Bound::Infinite(Sign::Neg);
    pub const POS_INF: Bound = Bound::Infinite(Sign::Pos);

    pub fn finite(r: Rat) -> Bound {
        Bound::Finite(r)
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            Bound::Finite(r) => Some(r),
            Bound::Infinite(_) => None,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        use Bound::*;
        match (self, other) {
            (Infinite(Sign::Neg), Infinite(Sign::Neg)) => Ordering::Equal,
            (Infinite(Sign::Pos), Infinite(Sign::Pos)) => Ordering::Equal,
            (Infinite(Sign::Neg), _) => Ordering::Less,
            (_, Infinite(Sign::Neg)) => Ordering::Greater,
            (Infinite(Sign::Pos), _) => Ordering::Greater,
            (_, Infinite(Sign::Pos)) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(r) => write!(f, "{r}"),
            Bound::Infinite(Sign::Neg) => write!(f, "-inf"),
            Bound::Infinite(Sign::Pos) => write!(f, "inf"),
        }
    }
}

/// A nonempty open interval `(lo, hi)` with `lo < hi`.
///
/// Serializes as the two-element array `[lo, hi]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (lo, hi) = <(Bound, Bound)>::deserialize(d)?;
        Interval::new(lo, hi).ok_or_else(|| serde::de::Error::custom("empty interval"))
    }
}

impl Interval {
    /// Builds `(lo, hi)`; returns `None` when the interval would be empty.
    pub fn new(lo: Bound, hi: Bound) -> Option<Interval> {
        if lo < hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    /// Finite open interval `(lo, hi)`.
    pub fn open(lo: Rat, hi: Rat) -> Option<Interval> {
        Interval::new(Bound::Finite(lo), Bound::Finite(hi))
    }

    /// The whole line `(-inf, inf)`.
    pub fn line() -> Interval {
        Interval {
            lo: Bound::NEG_INF,
            hi: Bound::POS_INF,
        }
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = match &self.lo {
            Bound::Finite(lo) => x > lo,
            Bound::Infinite(Sign::Neg) => true,
            Bound::Infinite(Sign::Pos) => false,
        };
        let below = match &self.hi {
            Bound::Finite(hi) => x < hi,
            Bound::Infinite(Sign::Pos) => true,
            Bound::Infinite(Sign::Neg) => false,
        };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = std::cmp::max(self.lo.clone(), other.lo.clone());
        let hi = std::cmp::min(self.hi.clone(), other.hi.clone());
        Interval::new(lo, hi)
    }

    /// Some rational inside the interval (midpoint, or a unit step in from a
    /// finite end for half-infinite intervals; 0 for the whole line).
    pub fn sample(&self) -> Rat {
        match (&self.lo, &self.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => Rat::midpoint(a, b),
            (Bound::Finite(a), Bound::Infinite(_)) => a.clone() + Rat::one(),
            (Bound::Infinite(_), Bound::Finite(b)) => b.clone() - Rat::one(),
            (Bound::Infinite(_), Bound::Infinite(_)) => Rat::zero(),
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.lo, self.hi)
    }
}

/// A finite union of disjoint, sorted open intervals.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpenSet1D {
    intervals: Vec<Interval>,
}

impl OpenSet1D {
    pub fn empty() -> Self {
        OpenSet1D { intervals: vec![] }
    }

    pub fn line() -> Self {
        OpenSet1D {
            intervals: vec![Interval::line()],
        }
    }

    pub fn interval(iv: Interval) -> Self {
        OpenSet1D {
            intervals: vec![iv],
        }
    }

    /// Finite open interval as a set; empty set when `lo >= hi`.
    pub fn open(lo: Rat, hi: Rat) -> Self {
        match Interval::open(lo, hi) {
            Some(iv) => OpenSet1D::interval(iv),
            None => OpenSet1D::empty(),
        }
    }

    /// Normalizes an arbitrary list of intervals: sorts and merges
    /// *overlapping* intervals (touching endpoints are not merged).
    pub fn from_intervals(mut ivs: Vec<Interval>) -> Self {
        ivs.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match out.last_mut() {
                // Strict overlap: previous hi strictly above next lo.
                Some(prev) if prev.hi > iv.lo => {
                    if iv.hi > prev.hi {
                        prev.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        OpenSet1D { intervals: out }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// The component interval containing `x`, if any.
    pub fn component_of(&self, x: &Rat) -> Option<&Interval> {
        self.intervals.iter().find(|iv| iv.contains(x))
    }

    /// True when some open neighborhood of `x` lies in the set
    /// (equivalent to membership, the set being open).
    pub fn contains_neighborhood_of(&self, x: &Rat) -> bool {
        self.contains(x)
    }

    pub fn intersect(&self, other: &OpenSet1D) -> OpenSet1D {
        let mut out = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                if let Some(c) = a.intersect(b) {
                    out.push(c);
                }
            }
        }
        OpenSet1D::from_intervals(out)
    }

    pub fn union(&self, other: &OpenSet1D) -> OpenSet1D {
        let mut ivs = self.intervals.clone();
        ivs.extend(other.intervals.iter().cloned());
        OpenSet1D::from_intervals(ivs)
    }

    /// One sample point per component.
    pub fn samples(&self) -> Vec<Rat> {
        self.intervals.iter().map(|iv| iv.sample()).collect()
    }
}

impl fmt::Debug for OpenSet1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.intervals.iter().map(|iv| format!("{iv:?}")).collect();
        write!(f, "{}", parts.join(" u "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::open(Rat::int(lo), Rat::int(hi)).unwrap()
    }

    #[test]
    fn touching_intervals_stay_separate() {
        let s = OpenSet1D::from_intervals(vec![iv(0, 1), iv(1, 2)]);
        assert_eq!(s.intervals().len(), 2);
        assert!(!s.contains(&Rat::one()));
        assert!(s.contains(&rat(1, 2)));
        assert!(s.contains(&rat(3, 2)));
    }

    #[test]
    fn overlapping_intervals_merge() {
        let s = OpenSet1D::from_intervals(vec![iv(0, 2), iv(1, 3), iv(10, 11)]);
        assert_eq!(s.intervals().len(), 2);
        assert!(s.contains(&Rat::int(2)));
        assert!(!s.contains(&Rat::int(5)));
    }

    #[test]
    fn nested_intervals_merge() {
        let s = OpenSet1D::from_intervals(vec![iv(0, 10), iv(1, 2)]);
        assert_eq!(s.intervals().len(), 1);
        assert_eq!(s.intervals()[0], iv(0, 10));
    }

    #[test]
    fn intersection() {
        let a = OpenSet1D::from_intervals(vec![iv(0, 2), iv(3, 5)]);
        let b = OpenSet1D::open(Rat::one(), Rat::int(4));
        let c = a.intersect(&b);
        assert_eq!(c.intervals(), &[iv(1, 2), iv(3, 4)]);
        let empty = a.intersect(&OpenSet1D::open(Rat::int(7), Rat::int(9)));
        assert!(empty.is_empty());
    }

    #[test]
    fn infinite_bounds_order_and_contain() {
        let line = OpenSet1D::line();
        assert!(line.contains(&Rat::int(-1000)));
        let ray = OpenSet1D::interval(Interval::new(Bound::NEG_INF, Bound::finite(Rat::zero())).unwrap());
        assert!(ray.contains(&Rat::int(-7)));
        assert!(!ray.contains(&Rat::zero()));
        assert!(Bound::NEG_INF < Bound::finite(Rat::int(-100)));
        assert!(Bound::finite(Rat::int(100)) < Bound::POS_INF);
    }

    #[test]
    fn serde_shape_is_endpoint_pairs() {
        let s = OpenSet1D::from_intervals(vec![iv(0, 1)]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"[["0","1"]]"#);
        let line = serde_json::to_string(&OpenSet1D::line()).unwrap();
        assert_eq!(line, r#"[["-inf","inf"]]"#);
        let back: OpenSet1D = serde_json::from_str(&line).unwrap();
        assert_eq!(back, OpenSet1D::line());
        assert!(serde_json::from_str::<Interval>(r#"["2","1"]"#).is_err());
    }
}
