//! Exact piecewise-linear functions and partial PL homeomorphisms.
//!
//! A [`PLFunction`] is an open domain together with affine pieces on
//! half-open cells `[from, to)`; the value at a shared cell boundary belongs
//! to the right-hand piece, so jump discontinuities are representable and
//! show up as `left limit != value`. All arithmetic (sums, compositions,
//! inverses, preimages) is exact over the rationals.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::interval::{Bound, Interval, OpenSet1D, Sign};
use crate::rat::Rat;

/// An affine map `x -> slope*x + intercept`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub slope: Rat,
    pub intercept: Rat,
}

impl Affine {
    pub fn new(slope: Rat, intercept: Rat) -> Self {
        Affine { slope, intercept }
    }

    pub fn constant(c: Rat) -> Self {
        Affine::new(Rat::zero(), c)
    }

    pub fn identity() -> Self {
        Affine::new(Rat::one(), Rat::zero())
    }

    pub fn zero() -> Self {
        Affine::constant(Rat::zero())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        &(&self.slope * x) + &self.intercept
    }

    pub fn add(&self, other: &Affine) -> Affine {
        Affine::new(
            &self.slope + &other.slope,
            &self.intercept + &other.intercept,
        )
    }

    pub fn sub(&self, other: &Affine) -> Affine {
        Affine::new(
            &self.slope - &other.slope,
            &self.intercept - &other.intercept,
        )
    }

    pub fn neg(&self) -> Affine {
        Affine::new(-&self.slope, -&self.intercept)
    }

    pub fn scale(&self, k: &Rat) -> Affine {
        Affine::new(k * &self.slope, k * &self.intercept)
    }

    /// `self` after `inner`: x -> self(inner(x)).
    pub fn compose(&self, inner: &Affine) -> Affine {
        Affine::new(
            &self.slope * &inner.slope,
            &(&self.slope * &inner.intercept) + &self.intercept,
        )
    }

    /// Inverse map, when the slope is nonzero.
    pub fn invert(&self) -> Option<Affine> {
        if self.slope.is_zero() {
            return None;
        }
        let inv = Rat::one() / self.slope.clone();
        Some(Affine::new(inv.clone(), -&(&inv * &self.intercept)))
    }

    pub fn is_zero(&self) -> bool {
        self.slope.is_zero() && self.intercept.is_zero()
    }

    /// Unique solution of `self(x) = y`, when the slope is nonzero.
    pub fn solve(&self, y: &Rat) -> Option<Rat> {
        if self.slope.is_zero() {
            None
        } else {
            Some(&(y - &self.intercept) / &self.slope)
        }
    }

    /// One-sided limit of `self(x)` as x approaches the (possibly infinite)
    /// bound. Finite bounds give the affine value; infinite ones follow the
    /// slope sign (a flat piece tends to its constant).
    pub fn limit_at(&self, b: &Bound) -> Bound {
        match b {
            Bound::Finite(x) => Bound::Finite(self.eval(x)),
            Bound::Infinite(sign) => {
                if self.slope.is_zero() {
                    Bound::Finite(self.intercept.clone())
                } else {
                    let flip = self.slope.is_negative();
                    let s = match (sign, flip) {
                        (Sign::Pos, false) | (Sign::Neg, true) => Sign::Pos,
                        _ => Sign::Neg,
                    };
                    Bound::Infinite(s)
                }
            }
        }
    }
}

impl fmt::Debug for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slope.is_zero() {
            write!(f, "{}", self.intercept)
        } else if self.intercept.is_zero() {
            write!(f, "{}*x", self.slope)
        } else {
            write!(f, "{}*x + {}", self.slope, self.intercept)
        }
    }
}

/// One affine piece on the half-open cell `[from, to)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub from: Bound,
    pub to: Bound,
    pub slope: Rat,
    pub intercept: Rat,
}

impl Piece {
    pub fn affine(&self) -> Affine {
        Affine::new(self.slope.clone(), self.intercept.clone())
    }

    fn covers(&self, x: &Rat) -> bool {
        let xb = Bound::Finite(x.clone());
        self.from <= xb && xb < self.to
    }
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:?}, {:?}) -> {:?}",
            self.from,
            self.to,
            self.affine()
        )
    }
}

/// Defects detected while validating PL data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PLError {
    #[error("piece cell [{0:?}, {1:?}) is empty or reversed")]
    EmptyPiece(Bound, Bound),
    #[error("pieces overlap near {0:?}")]
    OverlappingPieces(Bound),
    #[error("domain point {0} not covered by any piece")]
    UncoveredDomain(Rat),
    #[error("map has a jump at {0}")]
    Jump(Rat),
    #[error("map folds (slope sign change) at {0}")]
    Fold(Rat),
    #[error("map is constant near {0}, not injective")]
    ConstantPiece(Rat),
    #[error("map images of different domain components overlap near {0}")]
    ImageOverlap(Rat),
}

/// An exact piecewise-affine function on an open subset of the line.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPLFunction")]
pub struct PLFunction {
    domain: OpenSet1D,
    pieces: Vec<Piece>,
}

#[derive(Deserialize)]
struct RawPLFunction {
    domain: OpenSet1D,
    pieces: Vec<Piece>,
}

impl TryFrom<RawPLFunction> for PLFunction {
    type Error = PLError;
    fn try_from(raw: RawPLFunction) -> Result<Self, PLError> {
        PLFunction::new(raw.domain, raw.pieces)
    }
}

impl PLFunction {
    /// Validates, trims pieces to the domain, and merges mergeable
    /// neighbors, producing a canonical representation.
    pub fn new(domain: OpenSet1D, mut pieces: Vec<Piece>) -> Result<Self, PLError> {
        pieces.sort_by(|a, b| a.from.cmp(&b.from).then_with(|| a.to.cmp(&b.to)));
        for p in &pieces {
            if p.from >= p.to {
                return Err(PLError::EmptyPiece(p.from.clone(), p.to.clone()));
            }
        }
        for w in pieces.windows(2) {
            if w[0].to > w[1].from {
                return Err(PLError::OverlappingPieces(w[1].from.clone()));
            }
        }
        // Coverage: every domain component must be tiled without gaps.
        for comp in domain.intervals() {
            let mut covered_to: Option<Bound> = None;
            for p in &pieces {
                if p.to <= comp.lo || p.from >= comp.hi {
                    continue;
                }
                match &covered_to {
                    None => {
                        if p.from > comp.lo {
                            return Err(PLError::UncoveredDomain(
                                Interval::new(comp.lo.clone(), p.from.clone())
                                    .expect("nonempty gap")
                                    .sample(),
                            ));
                        }
                        covered_to = Some(p.to.clone());
                    }
                    Some(t) => {
                        if p.from > *t {
                            return Err(PLError::UncoveredDomain(
                                Interval::new(t.clone(), p.from.clone())
                                    .expect("nonempty gap")
                                    .sample(),
                            ));
                        }
                        covered_to = Some(p.to.clone());
                    }
                }
                if covered_to.as_ref().unwrap() >= &comp.hi {
                    break;
                }
            }
            let done = covered_to.is_some_and(|t| t >= comp.hi);
            if !done {
                return Err(PLError::UncoveredDomain(comp.sample()));
            }
        }
        // Trim each piece to the domain components it meets, then merge.
        let mut trimmed: Vec<Piece> = Vec::new();
        for p in &pieces {
            for comp in domain.intervals() {
                let lo = std::cmp::max(p.from.clone(), comp.lo.clone());
                let hi = std::cmp::min(p.to.clone(), comp.hi.clone());
                if lo < hi {
                    trimmed.push(Piece {
                        from: lo,
                        to: hi,
                        slope: p.slope.clone(),
                        intercept: p.intercept.clone(),
                    });
                }
            }
        }
        trimmed.sort_by(|a, b| a.from.cmp(&b.from));
        let mut merged: Vec<Piece> = Vec::new();
        for p in trimmed {
            match merged.last_mut() {
                Some(prev)
                    if prev.to == p.from
                        && prev.slope == p.slope
                        && prev.intercept == p.intercept =>
                {
                    prev.to = p.to;
                }
                _ => merged.push(p),
            }
        }
        Ok(PLFunction {
            domain,
            pieces: merged,
        })
    }

    /// Constant function on a domain.
    pub fn constant(domain: OpenSet1D, c: Rat) -> Self {
        PLFunction::affine(domain, Affine::constant(c))
    }

    /// Single affine map on a domain.
    pub fn affine(domain: OpenSet1D, a: Affine) -> Self {
        let piece = Piece {
            from: Bound::NEG_INF,
            to: Bound::POS_INF,
            slope: a.slope,
            intercept: a.intercept,
        };
        PLFunction::new(domain, vec![piece]).expect("affine covers everything")
    }

    /// Continuous piecewise-linear interpolation through `(x, y)` nodes on
    /// the open interval spanned by the first and last node.
    pub fn polyline(nodes: &[(Rat, Rat)]) -> Result<Self, PLError> {
        assert!(nodes.len() >= 2, "polyline needs at least two nodes");
        let mut pieces = Vec::new();
        for w in nodes.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            assert!(x0 < x1, "polyline nodes must be strictly increasing");
            let slope = &(y1 - y0) / &(x1 - x0);
            let intercept = y0 - &(&slope * x0);
            pieces.push(Piece {
                from: Bound::Finite(x0.clone()),
                to: Bound::Finite(x1.clone()),
                slope,
                intercept,
            });
        }
        let domain = OpenSet1D::open(nodes[0].0.clone(), nodes[nodes.len() - 1].0.clone());
        PLFunction::new(domain, pieces)
    }

    /// The function `x -> |x|` on the whole line.
    pub fn abs() -> Self {
        PLFunction::new(
            OpenSet1D::line(),
            vec![
                Piece {
                    from: Bound::NEG_INF,
                    to: Bound::Finite(Rat::zero()),
                    slope: Rat::int(-1),
                    intercept: Rat::zero(),
                },
                Piece {
                    from: Bound::Finite(Rat::zero()),
                    to: Bound::POS_INF,
                    slope: Rat::one(),
                    intercept: Rat::zero(),
                },
            ],
        )
        .expect("abs is well formed")
    }

    /// Step function: `left` on x < at, `right` on x >= at, whole line.
    pub fn step(at: Rat, left: Rat, right: Rat) -> Self {
        PLFunction::new(
            OpenSet1D::line(),
            vec![
                Piece {
                    from: Bound::NEG_INF,
                    to: Bound::Finite(at.clone()),
                    slope: Rat::zero(),
                    intercept: left,
                },
                Piece {
                    from: Bound::Finite(at),
                    to: Bound::POS_INF,
                    slope: Rat::zero(),
                    intercept: right,
                },
            ],
        )
        .expect("step is well formed")
    }

    pub fn domain(&self) -> &OpenSet1D {
        &self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// The affine governing the cell containing `x` (`from <= x < to`),
    /// regardless of domain membership.
    pub fn piece_affine_at(&self, x: &Rat) -> Option<Affine> {
        self.pieces.iter().find(|p| p.covers(x)).map(|p| p.affine())
    }

    /// The affine governing points immediately left of `x`.
    pub fn piece_affine_left_of(&self, x: &Rat) -> Option<Affine> {
        let xb = Bound::Finite(x.clone());
        self.pieces
            .iter()
            .find(|p| p.from < xb && p.to >= xb)
            .map(|p| p.affine())
    }

    /// Value at `x`, `None` outside the domain.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        if !self.domain.contains(x) {
            return None;
        }
        Some(
            self.piece_affine_at(x)
                .expect("coverage invariant")
                .eval(x),
        )
    }

    /// All finite cell boundaries lying strictly inside some domain
    /// component (candidate kink/jump positions), sorted, deduplicated.
    pub fn interior_breakpoints(&self) -> Vec<Rat> {
        let mut out: Vec<Rat> = Vec::new();
        for p in &self.pieces {
            for b in [&p.from, &p.to] {
                if let Bound::Finite(x) = b {
                    if self.domain.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Interior breakpoints where the left limit differs from the value.
    pub fn jump_points(&self) -> Vec<Rat> {
        self.interior_breakpoints()
            .into_iter()
            .filter(|b| {
                let left = self.piece_affine_left_of(b);
                let val = self.eval(b);
                match (left, val) {
                    (Some(l), Some(v)) => l.eval(b) != v,
                    _ => false,
                }
            })
            .collect()
    }

    /// Restricts to `domain ∩ set`.
    pub fn restrict(&self, set: &OpenSet1D) -> PLFunction {
        let domain = self.domain.intersect(set);
        PLFunction::new(domain, self.pieces.clone()).expect("restriction keeps coverage")
    }

    pub fn neg(&self) -> PLFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                from: p.from.clone(),
                to: p.to.clone(),
                slope: -&p.slope,
                intercept: -&p.intercept,
            })
            .collect();
        PLFunction::new(self.domain.clone(), pieces).expect("negation keeps shape")
    }

    pub fn scale(&self, k: &Rat) -> PLFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                from: p.from.clone(),
                to: p.to.clone(),
                slope: k * &p.slope,
                intercept: k * &p.intercept,
            })
            .collect();
        PLFunction::new(self.domain.clone(), pieces).expect("scaling keeps shape")
    }

    /// Pointwise sum on the intersection of domains.
    pub fn add(&self, other: &PLFunction) -> PLFunction {
        self.zip_with(other, Affine::add)
    }

    /// Pointwise difference on the intersection of domains.
    pub fn sub(&self, other: &PLFunction) -> PLFunction {
        self.zip_with(other, Affine::sub)
    }

    fn zip_with(&self, other: &PLFunction, op: fn(&Affine, &Affine) -> Affine) -> PLFunction {
        let domain = self.domain.intersect(other.domain());
        let mut cuts: Vec<Bound> = vec![Bound::NEG_INF, Bound::POS_INF];
        for p in self.pieces.iter().chain(other.pieces.iter()) {
            for b in [&p.from, &p.to] {
                if !cuts.contains(b) {
                    cuts.push(b.clone());
                }
            }
        }
        cuts.sort();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let cell = match Interval::new(w[0].clone(), w[1].clone()) {
                Some(c) => c,
                None => continue,
            };
            if domain.intersect(&OpenSet1D::interval(cell.clone())).is_empty() {
                continue;
            }
            let s = cell.sample();
            let a = self
                .piece_affine_at(&s)
                .expect("cell sample covered by lhs");
            let b = other
                .piece_affine_at(&s)
                .expect("cell sample covered by rhs");
            let c = op(&a, &b);
            pieces.push(Piece {
                from: cell.lo,
                to: cell.hi,
                slope: c.slope,
                intercept: c.intercept,
            });
        }
        PLFunction::new(domain, pieces).expect("zip preserves coverage")
    }

    /// True when the function is identically zero on its domain.
    pub fn is_zero_on_domain(&self) -> bool {
        self.pieces.iter().all(|p| p.affine().is_zero())
    }

    /// Exact function equality: same domain, same values.
    pub fn eq_as_functions(&self, other: &PLFunction) -> bool {
        self.domain == other.domain && self.sub(other).is_zero_on_domain()
    }
}

impl fmt::Debug for PLFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PL{{dom {:?}; ", self.domain)?;
        let parts: Vec<String> = self.pieces.iter().map(|p| format!("{p:?}")).collect();
        write!(f, "{}}}", parts.join("; "))
    }
}

/// A partial PL homeomorphism: continuous, piecewise strictly monotonic,
/// injective, with open image. The carrier of chart-complex transports.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PLFunction", into = "PLFunction")]
pub struct PLMap {
    func: PLFunction,
}

impl TryFrom<PLFunction> for PLMap {
    type Error = PLError;
    fn try_from(func: PLFunction) -> Result<Self, PLError> {
        PLMap::new(func)
    }
}

impl From<PLMap> for PLFunction {
    fn from(m: PLMap) -> PLFunction {
        m.func
    }
}

impl PLMap {
    /// Validates a PL function as a partial homeomorphism.
    pub fn new(func: PLFunction) -> Result<Self, PLError> {
        // No jumps on the domain.
        if let Some(b) = func.jump_points().first() {
            return Err(PLError::Jump(b.clone()));
        }
        // Strictly monotonic pieces, consistent direction per component.
        for comp in func.domain().intervals() {
            let mut dir: Option<bool> = None; // true = increasing
            for p in func.pieces() {
                if p.to <= comp.lo || p.from >= comp.hi {
                    continue;
                }
                if p.slope.is_zero() {
                    let cell = Interval::new(
                        std::cmp::max(p.from.clone(), comp.lo.clone()),
                        std::cmp::min(p.to.clone(), comp.hi.clone()),
                    )
                    .expect("nonempty overlap");
                    return Err(PLError::ConstantPiece(cell.sample()));
                }
                let up = p.slope.is_positive();
                match dir {
                    None => dir = Some(up),
                    Some(d) if d != up => {
                        // The fold sits at this piece's left end.
                        let at = match &p.from {
                            Bound::Finite(x) => x.clone(),
                            _ => comp.sample(),
                        };
                        return Err(PLError::Fold(at));
                    }
                    _ => {}
                }
            }
        }
        // Images of distinct components must not overlap.
        let map = PLMap { func };
        let images: Vec<Interval> = map
            .component_images()
            .into_iter()
            .map(|(_, img)| img)
            .collect();
        let mut sorted = images.clone();
        sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
        for w in sorted.windows(2) {
            if w[0].hi > w[1].lo {
                let mid = w[1]
                    .intersect(&w[0])
                    .expect("overlapping image intervals")
                    .sample();
                return Err(PLError::ImageOverlap(mid));
            }
        }
        Ok(map)
    }

    /// Identity on a set.
    pub fn identity(domain: OpenSet1D) -> Self {
        PLMap::new(PLFunction::affine(domain, Affine::identity())).expect("identity is a homeo")
    }

    /// Single affine homeomorphism on a set (slope must be nonzero).
    pub fn affine(domain: OpenSet1D, a: Affine) -> Result<Self, PLError> {
        PLMap::new(PLFunction::affine(domain, a))
    }

    pub fn as_function(&self) -> &PLFunction {
        &self.func
    }

    pub fn domain(&self) -> &OpenSet1D {
        self.func.domain()
    }

    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        self.func.eval(x)
    }

    /// Per-component open image intervals, paired with the component.
    fn component_images(&self) -> Vec<(Interval, Interval)> {
        let mut out = Vec::new();
        for comp in self.func.domain().intervals() {
            let mut lo_limit: Option<Bound> = None;
            let mut hi_limit: Option<Bound> = None;
            for p in self.func.pieces() {
                if p.to <= comp.lo || p.from >= comp.hi {
                    continue;
                }
                let a = p.affine();
                let cell_lo = std::cmp::max(p.from.clone(), comp.lo.clone());
                let cell_hi = std::cmp::min(p.to.clone(), comp.hi.clone());
                let va = a.limit_at(&cell_lo);
                let vb = a.limit_at(&cell_hi);
                let (lo, hi) = if va <= vb { (va, vb) } else { (vb, va) };
                lo_limit = Some(match lo_limit {
                    None => lo,
                    Some(cur) => std::cmp::min(cur, lo),
                });
                hi_limit = Some(match hi_limit {
                    None => hi,
                    Some(cur) => std::cmp::max(cur, hi),
                });
            }
            let (lo, hi) = (
                lo_limit.expect("component has pieces"),
                hi_limit.expect("component has pieces"),
            );
            out.push((
                comp.clone(),
                Interval::new(lo, hi).expect("monotonic image is nonempty"),
            ));
        }
        out
    }

    /// The open image of the map.
    pub fn image(&self) -> OpenSet1D {
        OpenSet1D::from_intervals(
            self.component_images()
                .into_iter()
                .map(|(_, img)| img)
                .collect(),
        )
    }

    /// Exact inverse homeomorphism.
    pub fn invert(&self) -> PLMap {
        let mut pieces = Vec::new();
        for comp in self.func.domain().intervals() {
            for p in self.func.pieces() {
                if p.to <= comp.lo || p.from >= comp.hi {
                    continue;
                }
                let a = p.affine();
                let inv = a.invert().expect("monotonic piece inverts");
                let cell_lo = std::cmp::max(p.from.clone(), comp.lo.clone());
                let cell_hi = std::cmp::min(p.to.clone(), comp.hi.clone());
                let va = a.limit_at(&cell_lo);
                let vb = a.limit_at(&cell_hi);
                let (lo, hi) = if va <= vb { (va, vb) } else { (vb, va) };
                pieces.push(Piece {
                    from: lo,
                    to: hi,
                    slope: inv.slope,
                    intercept: inv.intercept,
                });
            }
        }
        let func = PLFunction::new(self.image(), pieces).expect("inverse pieces tile the image");
        PLMap::new(func).expect("inverse of a homeo is a homeo")
    }

    /// Image of an open set under the map (exact).
    pub fn map_open_set(&self, set: &OpenSet1D) -> OpenSet1D {
        let restricted = set.intersect(self.func.domain());
        let mut out = Vec::new();
        for iv in restricted.intervals() {
            for p in self.func.pieces() {
                let cell_lo = std::cmp::max(p.from.clone(), iv.lo.clone());
                let cell_hi = std::cmp::min(p.to.clone(), iv.hi.clone());
                if cell_lo >= cell_hi {
                    continue;
                }
                let a = p.affine();
                let va = a.limit_at(&cell_lo);
                let vb = a.limit_at(&cell_hi);
                let (lo, hi) = if va <= vb { (va, vb) } else { (vb, va) };
                if let Some(img) = Interval::new(lo, hi) {
                    out.push(img);
                }
            }
        }
        // Adjacent cells of a continuous monotonic map produce touching
        // image intervals; glue them back together where the map really is
        // continuous across the cut (always, for a PLMap).
        let mut glued = OpenSet1D::from_intervals(out);
        glued = self.reglue(glued);
        glued
    }

    /// Merges image intervals that touch at the image of an interior domain
    /// point (openness repair after piecewise mapping).
    fn reglue(&self, set: OpenSet1D) -> OpenSet1D {
        let mut ivs: Vec<Interval> = set.intervals().to_vec();
        loop {
            let mut merged_any = false;
            'outer: for i in 0..ivs.len() {
                for j in 0..ivs.len() {
                    if i == j {
                        continue;
                    }
                    if ivs[i].hi == ivs[j].lo {
                        if let Bound::Finite(y) = &ivs[i].hi {
                            // The joint belongs to the image iff its preimage
                            // is an interior domain point of the map.
                            if self.invert().eval(y).is_some() {
                                let lo = ivs[i].lo.clone();
                                let hi = ivs[j].hi.clone();
                                let (a, b) = if i < j { (j, i) } else { (i, j) };
                                ivs.remove(a);
                                ivs.remove(b);
                                ivs.push(Interval::new(lo, hi).expect("glued interval nonempty"));
                                merged_any = true;
                                break 'outer;
                            }
                        }
                    }
                }
            }
            if !merged_any {
                break;
            }
        }
        OpenSet1D::from_intervals(ivs)
    }

    /// Preimage of an open set (exact).
    pub fn preimage_of(&self, set: &OpenSet1D) -> OpenSet1D {
        self.invert().map_open_set(set)
    }

    /// Composition `self ∘ inner` on the exact composable domain
    /// `{x : inner(x) ∈ dom(self)}`.
    pub fn compose(&self, inner: &PLMap) -> PLMap {
        let domain = inner.preimage_of(self.func.domain());
        // Cut points: inner's boundaries plus preimages of self's boundaries.
        let mut cuts: Vec<Bound> = vec![Bound::NEG_INF, Bound::POS_INF];
        let push = |b: Bound, cuts: &mut Vec<Bound>| {
            if !cuts.contains(&b) {
                cuts.push(b);
            }
        };
        for p in inner.func.pieces() {
            push(p.from.clone(), &mut cuts);
            push(p.to.clone(), &mut cuts);
        }
        for p in self.func.pieces() {
            for b in [&p.from, &p.to] {
                if let Bound::Finite(y) = b {
                    // Solve inner(x) = y on each inner piece.
                    for q in inner.func.pieces() {
                        if let Some(x) = q.affine().solve(y) {
                            if q.covers(&x) {
                                push(Bound::Finite(x), &mut cuts);
                            }
                        }
                    }
                }
            }
        }
        cuts.sort();
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let cell = match Interval::new(w[0].clone(), w[1].clone()) {
                Some(c) => c,
                None => continue,
            };
            if domain.intersect(&OpenSet1D::interval(cell.clone())).is_empty() {
                continue;
            }
            let s = cell.sample();
            let fi = inner
                .func
                .piece_affine_at(&s)
                .expect("sample in inner piece");
            let fo = self
                .func
                .piece_affine_at(&fi.eval(&s))
                .expect("image sample in outer piece");
            let c = fo.compose(&fi);
            pieces.push(Piece {
                from: cell.lo,
                to: cell.hi,
                slope: c.slope,
                intercept: c.intercept,
            });
        }
        let func = PLFunction::new(domain, pieces).expect("composition tiles its domain");
        PLMap::new(func).expect("composition of homeos is a homeo")
    }

    pub fn eq_as_functions(&self, other: &PLMap) -> bool {
        self.func.eq_as_functions(&other.func)
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLMap{:?}", self.func)
    }
}
