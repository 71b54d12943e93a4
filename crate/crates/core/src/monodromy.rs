//! Words over a pregroupoid carrier and the groupoid they present.
//!
//! A pregroupoid is a set of arrows that contains the identities and is
//! closed under inversion, with a *partial* product: the composite of two
//! carrier arrows is defined exactly when the ambient composite lands back
//! in the carrier.  Formal words over the carrier, taken up to contraction
//! of defined products and deletion of identities, present a groupoid that
//! can be strictly larger than the ambient one — a circle fiber unwinds
//! into a line, a half-twist unwinds into an infinite cyclic loop.
//!
//! This module works with such words directly: [`mon_reduce`] rewrites a
//! word to a contraction fixpoint, [`mon_equal`] decides equality of word
//! classes where an exact invariant exists and answers honestly otherwise,
//! [`mon_extend`] extends product-preserving letter data to all words, and
//! [`star_projection_check`] reports how faithfully word classes project
//! onto the ambient arrows at one base point.
//!
//! Two carrier families are supported, mirroring [`crate::models::Model`]:
//! finite subsets of a [`FiniteGroupoid`] and the symbolic window set of a
//! model.  For bundle windows the sum of the letter values is a complete
//! class invariant whenever window sums cannot wrap around the fiber
//! modulus; [`safe_regime_at`] names that condition precisely.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::germ::Germ1D;
use crate::groupoid::FiniteGroupoid;
use crate::holonomy::{carrying_edge, compose_map_germs, identity_germ, is_identity_germ};
use crate::models::{ChartComplexModel, Model, QuotientBundleModel};
use crate::rat::Rat;

/// Rejection reasons for word and carrier data.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MonError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("arrow `{0}` is outside the carrier")]
    NotInCarrier(String),
    #[error("the carrier is missing the identity of `{0}`")]
    MissingIdentity(String),
    #[error("the carrier does not contain the inverse of `{0}`")]
    NotInverseClosed(String),
    #[error("letter {index} does not compose with the word so far")]
    NotComposable { index: usize },
    #[error("letter {t} lies outside the window over {x}")]
    LetterOutsideWindow { x: Rat, t: Rat },
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("{x} is outside the chart transversal")]
    OutsideTransversal { x: Rat },
    #[error("the words are based at different points")]
    BaseMismatch,
    #[error("the word family does not match the carrier")]
    FamilyMismatch,
    #[error("no image assigned for carrier arrow `{0}`")]
    UnassignedLetter(String),
    #[error("image `{0}` is not an arrow of the target")]
    UnknownImage(String),
    #[error("the images force two different objects under `{0}`")]
    InconsistentObjectImage(String),
    #[error("the data does not preserve the product of `{first}` and `{second}`")]
    NotPregroupoidMorphism { first: String, second: String },
    #[error("search budget exhausted at depth {depth}")]
    DepthExceeded { depth: u32 },
}

/// Verdict of a word-class comparison.
///
/// `Distinct` is only ever produced from a genuine class invariant, so it
/// is always sound; `Unknown` records that the bounded search gave out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonEquality {
    Equal,
    Distinct,
    Unknown,
}

impl std::fmt::Display for MonEquality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MonEquality::Equal => write!(f, "equal"),
            MonEquality::Distinct => write!(f, "distinct"),
            MonEquality::Unknown => write!(f, "unknown"),
        }
    }
}

/// An ordered word of carrier arrows out of one base point.
///
/// Letters compose left to right.  The `reduced` flag records that the
/// word is a [`mon_reduce`] fixpoint; deserialized words default to
/// unreduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MonodromyWord {
    /// A word of arrow ids in a finite carrier, starting at `base`.
    Finite {
        base: String,
        letters: Vec<String>,
        #[serde(default)]
        reduced: bool,
    },
    /// A word of window values over the single base point `base`.
    Bundle {
        base: Rat,
        letters: Vec<Rat>,
        #[serde(default)]
        reduced: bool,
    },
    /// A word of edge transports leaving `chart` at `base`.
    Chart {
        chart: String,
        base: Rat,
        letters: Vec<String>,
        #[serde(default)]
        reduced: bool,
    },
}

impl MonodromyWord {
    pub fn finite(base: &str, letters: &[&str]) -> MonodromyWord {
        MonodromyWord::Finite {
            base: base.to_string(),
            letters: letters.iter().map(|s| s.to_string()).collect(),
            reduced: false,
        }
    }

    pub fn bundle(base: Rat, letters: Vec<Rat>) -> MonodromyWord {
        MonodromyWord::Bundle {
            base,
            letters,
            reduced: false,
        }
    }

    pub fn chart(chart: &str, base: Rat, letters: &[&str]) -> MonodromyWord {
        MonodromyWord::Chart {
            chart: chart.to_string(),
            base,
            letters: letters.iter().map(|s| s.to_string()).collect(),
            reduced: false,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            MonodromyWord::Finite { letters, .. } => letters.len(),
            MonodromyWord::Bundle { letters, .. } => letters.len(),
            MonodromyWord::Chart { letters, .. } => letters.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_reduced(&self) -> bool {
        match self {
            MonodromyWord::Finite { reduced, .. } => *reduced,
            MonodromyWord::Bundle { reduced, .. } => *reduced,
            MonodromyWord::Chart { reduced, .. } => *reduced,
        }
    }

    /// Whether two words have the same base and the same letters, ignoring
    /// the reduction flag.
    pub fn same_letters(&self, other: &MonodromyWord) -> bool {
        match (self, other) {
            (
                MonodromyWord::Finite { base: a, letters: u, .. },
                MonodromyWord::Finite { base: b, letters: v, .. },
            ) => a == b && u == v,
            (
                MonodromyWord::Bundle { base: a, letters: u, .. },
                MonodromyWord::Bundle { base: b, letters: v, .. },
            ) => a == b && u == v,
            (
                MonodromyWord::Chart { chart: ca, base: a, letters: u, .. },
                MonodromyWord::Chart { chart: cb, base: b, letters: v, .. },
            ) => ca == cb && a == b && u == v,
            _ => false,
        }
    }

    fn same_base(&self, other: &MonodromyWord) -> Result<bool, MonError> {
        match (self, other) {
            (MonodromyWord::Finite { base: a, .. }, MonodromyWord::Finite { base: b, .. }) => {
                Ok(a == b)
            }
            (MonodromyWord::Bundle { base: a, .. }, MonodromyWord::Bundle { base: b, .. }) => {
                Ok(a == b)
            }
            (
                MonodromyWord::Chart { chart: ca, base: a, .. },
                MonodromyWord::Chart { chart: cb, base: b, .. },
            ) => Ok(ca == cb && a == b),
            _ => Err(MonError::FamilyMismatch),
        }
    }
}

/// A carrier with a partial product: identities and inverses inside, the
/// product of two members defined exactly when the ambient composite is
/// again a member.
#[derive(Clone)]
pub enum Pregroupoid {
    /// A finite inverse-closed subset of a finite groupoid's arrows.
    Finite {
        groupoid: FiniteGroupoid,
        carrier: BTreeSet<String>,
    },
    /// The symbolic window set of a model.
    Window { model: Model },
}

impl std::fmt::Debug for Pregroupoid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Pregroupoid::Finite { carrier, .. } => f
                .debug_struct("Pregroupoid::Finite")
                .field("carrier", carrier)
                .finish_non_exhaustive(),
            Pregroupoid::Window { model } => f
                .debug_struct("Pregroupoid::Window")
                .field("family", &model.family())
                .finish(),
        }
    }
}

impl Pregroupoid {
    /// A finite carrier; rejects sets that miss an identity or an inverse.
    pub fn finite(
        groupoid: FiniteGroupoid,
        carrier: BTreeSet<String>,
    ) -> Result<Pregroupoid, MonError> {
        for id in &carrier {
            if groupoid.arrow(id).is_none() {
                return Err(MonError::UnknownArrow(id.clone()));
            }
        }
        for object in groupoid.objects() {
            let id = groupoid
                .identity_of(object)
                .ok_or_else(|| MonError::UnknownObject(object.clone()))?;
            if !carrier.contains(&id) {
                return Err(MonError::MissingIdentity(object.clone()));
            }
        }
        for id in &carrier {
            let inv = groupoid
                .inverse(id)
                .ok_or_else(|| MonError::UnknownArrow(id.clone()))?;
            if !carrier.contains(&inv) {
                return Err(MonError::NotInverseClosed(id.clone()));
            }
        }
        Ok(Pregroupoid::Finite { groupoid, carrier })
    }

    /// The full arrow set of a finite groupoid as a carrier.
    pub fn full(groupoid: FiniteGroupoid) -> Pregroupoid {
        let carrier = groupoid.arrows().iter().map(|a| a.id.clone()).collect();
        Pregroupoid::Finite { groupoid, carrier }
    }

    /// The window set of a model as a symbolic carrier.
    pub fn window(model: Model) -> Pregroupoid {
        Pregroupoid::Window { model }
    }

    pub fn groupoid(&self) -> Option<&FiniteGroupoid> {
        match self {
            Pregroupoid::Finite { groupoid, .. } => Some(groupoid),
            Pregroupoid::Window { .. } => None,
        }
    }

    pub fn carrier(&self) -> Option<&BTreeSet<String>> {
        match self {
            Pregroupoid::Finite { carrier, .. } => Some(carrier),
            Pregroupoid::Window { .. } => None,
        }
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            Pregroupoid::Window { model } => Some(model),
            Pregroupoid::Finite { .. } => None,
        }
    }

    /// Checks that a word is made of carrier letters chained head to tail.
    pub fn validate(&self, word: &MonodromyWord) -> Result<(), MonError> {
        match (self, word) {
            (Pregroupoid::Finite { groupoid, carrier }, MonodromyWord::Finite { base, letters, .. }) => {
                if !groupoid.objects().iter().any(|o| o == base) {
                    return Err(MonError::UnknownObject(base.clone()));
                }
                let mut at = base.clone();
                for (index, id) in letters.iter().enumerate() {
                    let arrow = groupoid
                        .arrow(id)
                        .ok_or_else(|| MonError::UnknownArrow(id.clone()))?;
                    if !carrier.contains(id) {
                        return Err(MonError::NotInCarrier(id.clone()));
                    }
                    if arrow.src != at {
                        return Err(MonError::NotComposable { index });
                    }
                    at = arrow.dst.clone();
                }
                Ok(())
            }
            (Pregroupoid::Window { model }, MonodromyWord::Bundle { base, letters, .. }) => {
                let m = model.as_bundle().ok_or(MonError::FamilyMismatch)?;
                let (lo, hi) = m.window_at(base);
                for t in letters {
                    if !(&lo < t && t < &hi) {
                        return Err(MonError::LetterOutsideWindow {
                            x: base.clone(),
                            t: t.clone(),
                        });
                    }
                }
                Ok(())
            }
            (Pregroupoid::Window { model }, MonodromyWord::Chart { chart, base, letters, .. }) => {
                let m = model.as_chart_complex().ok_or(MonError::FamilyMismatch)?;
                chart_stops(m, chart, base, letters).map(|_| ())
            }
            _ => Err(MonError::FamilyMismatch),
        }
    }
}

/// The points a chart word passes through: `stops[i]` is where letter `i`
/// departs, and the final entry is where the word lands.
fn chart_stops(
    m: &ChartComplexModel,
    chart: &str,
    base: &Rat,
    letters: &[String],
) -> Result<Vec<(String, Rat)>, MonError> {
    let c = m
        .chart(chart)
        .ok_or_else(|| MonError::UnknownChart(chart.to_string()))?;
    if !c.transversal.contains(base) {
        return Err(MonError::OutsideTransversal { x: base.clone() });
    }
    let mut stops = vec![(chart.to_string(), base.clone())];
    for (index, id) in letters.iter().enumerate() {
        let edge = m
            .edge(id)
            .ok_or_else(|| MonError::UnknownEdge(id.clone()))?;
        let (at_chart, at) = stops.last().expect("stops start nonempty").clone();
        if edge.src != at_chart {
            return Err(MonError::NotComposable { index });
        }
        let next = edge
            .map
            .eval(&at)
            .ok_or(MonError::NotComposable { index })?;
        stops.push((edge.dst.clone(), next));
    }
    Ok(stops)
}

/// An ambient arrow, the image of a word under the canonical projection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AmbientArrow {
    Finite { arrow: String },
    /// The arrow class over `x`, named by its canonical representative.
    Bundle { x: Rat, rep: Rat },
    Chart { src: String, dst: String, germ: Box<Germ1D> },
}

/// The ambient composite of the whole word.
pub fn ambient_product(pre: &Pregroupoid, word: &MonodromyWord) -> Result<AmbientArrow, MonError> {
    pre.validate(word)?;
    match (pre, word) {
        (Pregroupoid::Finite { groupoid, .. }, MonodromyWord::Finite { base, letters, .. }) => {
            let mut acc = groupoid
                .identity_of(base)
                .ok_or_else(|| MonError::UnknownObject(base.clone()))?;
            for (index, id) in letters.iter().enumerate() {
                acc = groupoid
                    .compose(&acc, id)
                    .ok_or(MonError::NotComposable { index })?;
            }
            Ok(AmbientArrow::Finite { arrow: acc })
        }
        (Pregroupoid::Window { model }, MonodromyWord::Bundle { base, letters, .. }) => {
            let m = model.as_bundle().ok_or(MonError::FamilyMismatch)?;
            let sum = letters
                .iter()
                .fold(Rat::zero(), |acc, t| acc + t.clone());
            Ok(AmbientArrow::Bundle {
                x: base.clone(),
                rep: m.canonical_rep(base, &sum),
            })
        }
        (Pregroupoid::Window { model }, MonodromyWord::Chart { chart, base, letters, .. }) => {
            let m = model.as_chart_complex().ok_or(MonError::FamilyMismatch)?;
            let stops = chart_stops(m, chart, base, letters)?;
            let mut germ = identity_germ(base);
            for (index, id) in letters.iter().enumerate() {
                let edge = m.edge(id).expect("validated edge");
                let at = &stops[index].1;
                let step = Germ1D::of(edge.map.as_function(), at)
                    .ok_or(MonError::NotComposable { index })?;
                germ = compose_map_germs(&step, &germ);
            }
            let dst = stops.last().expect("stops nonempty").0.clone();
            Ok(AmbientArrow::Chart {
                src: chart.clone(),
                dst,
                germ: Box::new(germ),
            })
        }
        _ => Err(MonError::FamilyMismatch),
    }
}

/// The exact sum of a bundle word's letter values, the translation total.
/// Not defined for the other families.
pub fn germ_sum(word: &MonodromyWord) -> Option<Rat> {
    match word {
        MonodromyWord::Bundle { letters, .. } => Some(
            letters
                .iter()
                .fold(Rat::zero(), |acc, t| acc + t.clone()),
        ),
        _ => None,
    }
}

/// Whether window sums over `x` can never wrap around the fiber modulus.
///
/// Over a line fiber every contraction is plain addition.  Over a circle
/// fiber of circumference `n` with window `(lo, hi)`, two window values
/// sum into `(2lo, 2hi)`, and a nonzero multiple of `n` fits between that
/// range and the window exactly when `n < 2hi - lo` or `n < hi - 2lo`.
/// When neither holds, every defined contraction preserves the exact sum,
/// and the translation total is a complete word-class invariant.
pub fn safe_regime_at(m: &QuotientBundleModel, x: &Rat) -> bool {
    let nu = m.modulus_at(x);
    if !nu.is_positive() {
        return true;
    }
    let (lo, hi) = m.window_at(x);
    let spread_hi = &(&hi + &hi) - &lo;
    let spread_lo = &hi - &(&lo + &lo);
    spread_hi <= nu && spread_lo <= nu
}

/// The first point where [`safe_regime_at`] fails, or `None` when window
/// sums are wrap-free everywhere.
pub fn wraparound_point(m: &QuotientBundleModel) -> Option<Rat> {
    let n = m.profile().as_function().clone();
    let two = Rat::int(2);
    let d1 = n.sub(&m.window_hi().scale(&two).sub(m.window_lo()));
    let d2 = n.sub(&m.window_hi().sub(&m.window_lo().scale(&two)));
    let mut candidates: BTreeSet<Rat> = BTreeSet::new();
    for f in [&n, &d1, &d2] {
        candidates.extend(f.interior_breakpoints());
        for piece in f.pieces() {
            if let Some(root) = piece.affine().solve(&Rat::zero()) {
                candidates.insert(root);
            }
        }
    }
    let xs: Vec<Rat> = candidates.into_iter().collect();
    let mut probes: Vec<Rat> = Vec::new();
    if xs.is_empty() {
        probes.push(Rat::zero());
    } else {
        probes.push(xs[0].clone() - Rat::one());
        for pair in xs.windows(2) {
            probes.push(Rat::midpoint(&pair[0], &pair[1]));
        }
        probes.push(xs[xs.len() - 1].clone() + Rat::one());
        probes.extend(xs);
    }
    probes.sort();
    probes.into_iter().find(|x| !safe_regime_at(m, x))
}

/// Two window values over `x` whose product is defined but wraps around
/// the modulus, so their exact sum is not the product's representative.
fn wraparound_pair(m: &QuotientBundleModel, x: &Rat) -> Option<(Rat, Rat)> {
    let nu = m.modulus_at(x);
    if !nu.is_positive() {
        return None;
    }
    let (lo, hi) = m.window_at(x);
    if !(lo.is_negative() && hi.is_positive()) {
        return None;
    }
    let two_lo = &lo + &lo;
    let two_hi = &hi + &hi;
    // A sum just past the top of the window that re-enters from below.
    let a = hi.clone().max(&nu + &lo).max(two_lo.clone());
    let b = (&nu + &hi).min(two_hi.clone());
    if a < b {
        let s = Rat::midpoint(&a, &b);
        let half = s / Rat::int(2);
        return Some((half.clone(), half));
    }
    // A sum just past the bottom that re-enters from above.
    let a = two_lo.max(&lo - &nu);
    let b = lo.clone().min(&hi - &nu).min(two_hi);
    if a < b {
        let s = Rat::midpoint(&a, &b);
        let half = s / Rat::int(2);
        return Some((half.clone(), half));
    }
    None
}

/// Rewrites a word to a contraction fixpoint: identity letters are
/// deleted and the leftmost adjacent pair whose product is defined in the
/// carrier is merged, repeatedly, until neither move applies.
pub fn mon_reduce(pre: &Pregroupoid, word: &MonodromyWord) -> Result<MonodromyWord, MonError> {
    pre.validate(word)?;
    match (pre, word) {
        (Pregroupoid::Finite { groupoid, carrier }, MonodromyWord::Finite { base, letters, .. }) => {
            let mut ls = letters.clone();
            loop {
                if let Some(i) = ls.iter().position(|id| groupoid.is_identity(id)) {
                    ls.remove(i);
                    continue;
                }
                let merged = (0..ls.len().saturating_sub(1)).find_map(|i| {
                    finite_pair_product(groupoid, carrier, &ls[i], &ls[i + 1])
                        .map(|w| (i, w))
                });
                match merged {
                    Some((i, w)) => {
                        ls[i] = w;
                        ls.remove(i + 1);
                    }
                    None => break,
                }
            }
            Ok(MonodromyWord::Finite {
                base: base.clone(),
                letters: ls,
                reduced: true,
            })
        }
        (Pregroupoid::Window { model }, MonodromyWord::Bundle { base, letters, .. }) => {
            let m = model.as_bundle().ok_or(MonError::FamilyMismatch)?;
            let mut ls = letters.clone();
            loop {
                if let Some(i) = ls.iter().position(|t| m.is_identity_arrow(base, t)) {
                    ls.remove(i);
                    continue;
                }
                let merged = (0..ls.len().saturating_sub(1)).find_map(|i| {
                    m.reduced_into_window(base, &(ls[i].clone() + ls[i + 1].clone()))
                        .map(|w| (i, w))
                });
                match merged {
                    Some((i, w)) => {
                        ls[i] = w;
                        ls.remove(i + 1);
                    }
                    None => break,
                }
            }
            Ok(MonodromyWord::Bundle {
                base: base.clone(),
                letters: ls,
                reduced: true,
            })
        }
        (Pregroupoid::Window { model }, MonodromyWord::Chart { chart, base, letters, .. }) => {
            let m = model.as_chart_complex().ok_or(MonError::FamilyMismatch)?;
            let mut ls = letters.clone();
            loop {
                let stops = chart_stops(m, chart, base, &ls)?;
                if let Some(i) = (0..ls.len()).find(|&i| chart_letter_is_identity(m, &ls[i], &stops[i].1)) {
                    ls.remove(i);
                    continue;
                }
                let merged = (0..ls.len().saturating_sub(1)).find_map(|i| {
                    chart_pair_product(m, &ls[i], &ls[i + 1], &stops[i].1).map(|w| (i, w))
                });
                match merged {
                    Some((i, w)) => {
                        ls[i] = w;
                        ls.remove(i + 1);
                    }
                    None => break,
                }
            }
            Ok(MonodromyWord::Chart {
                chart: chart.clone(),
                base: base.clone(),
                letters: ls,
                reduced: true,
            })
        }
        _ => Err(MonError::FamilyMismatch),
    }
}

/// The carrier product of two finite letters, when defined.
fn finite_pair_product(
    g: &FiniteGroupoid,
    carrier: &BTreeSet<String>,
    a: &str,
    b: &str,
) -> Option<String> {
    g.compose(a, b).filter(|c| carrier.contains(c))
}

fn chart_letter_is_identity(m: &ChartComplexModel, id: &str, at: &Rat) -> bool {
    let edge = match m.edge(id) {
        Some(e) => e,
        None => return false,
    };
    edge.src == edge.dst
        && Germ1D::of(edge.map.as_function(), at)
            .map(|g| is_identity_germ(&g))
            .unwrap_or(false)
}

/// The carrier product of two chart letters departing at `at`: the edge
/// carrying the composed transport germ, when one exists.
fn chart_pair_product(m: &ChartComplexModel, a: &str, b: &str, at: &Rat) -> Option<String> {
    let ea = m.edge(a)?;
    let eb = m.edge(b)?;
    if ea.dst != eb.src {
        return None;
    }
    let ga = Germ1D::of(ea.map.as_function(), at)?;
    let mid = ga.value.clone()?;
    let gb = Germ1D::of(eb.map.as_function(), &mid)?;
    let composite = compose_map_germs(&gb, &ga);
    carrying_edge(m, &ea.src, &eb.dst, &composite, at)
}

/// Decides whether two words name the same class of the presented
/// groupoid, searching at most `depth` rewrite layers where no exact
/// invariant applies.
///
/// `Distinct` comes only from a difference in a genuine invariant: the
/// ambient composite, or — over a wrap-free bundle point — the exact
/// translation total.  When invariants agree and the bounded search finds
/// no rewrite path, the verdict is `Unknown`.
pub fn mon_equal(
    pre: &Pregroupoid,
    a: &MonodromyWord,
    b: &MonodromyWord,
    depth: u32,
) -> Result<MonEquality, MonError> {
    pre.validate(a)?;
    pre.validate(b)?;
    if !a.same_base(b)? {
        return Err(MonError::BaseMismatch);
    }
    let ra = mon_reduce(pre, a)?;
    let rb = mon_reduce(pre, b)?;
    if ra.same_letters(&rb) {
        return Ok(MonEquality::Equal);
    }
    if ambient_product(pre, &ra)? != ambient_product(pre, &rb)? {
        return Ok(MonEquality::Distinct);
    }
    match (pre, &ra, &rb) {
        (Pregroupoid::Window { model }, MonodromyWord::Bundle { base, .. }, _) => {
            let m = model.as_bundle().ok_or(MonError::FamilyMismatch)?;
            if safe_regime_at(m, base) {
                return Ok(if germ_sum(&ra) == germ_sum(&rb) {
                    MonEquality::Equal
                } else {
                    MonEquality::Distinct
                });
            }
            Ok(bundle_contraction_meet(m, &ra, &rb))
        }
        (Pregroupoid::Finite { groupoid, carrier }, _, _) => {
            Ok(finite_search(groupoid, carrier, &ra, &rb, depth))
        }
        (Pregroupoid::Window { model }, MonodromyWord::Chart { .. }, _) => {
            let m = model.as_chart_complex().ok_or(MonError::FamilyMismatch)?;
            Ok(chart_search(m, &ra, &rb, depth))
        }
        _ => Err(MonError::FamilyMismatch),
    }
}

/// Meets the full contraction closures of two bundle words.  Contractions
/// only shrink words, so the closures are finite and no depth bound is
/// needed; expansions over a dense value set cannot be enumerated, which
/// keeps this one-sided and the failure verdict `Unknown`.
fn bundle_contraction_meet(
    m: &QuotientBundleModel,
    a: &MonodromyWord,
    b: &MonodromyWord,
) -> MonEquality {
    let (base, la) = match a {
        MonodromyWord::Bundle { base, letters, .. } => (base, letters.clone()),
        _ => return MonEquality::Unknown,
    };
    let lb = match b {
        MonodromyWord::Bundle { letters, .. } => letters.clone(),
        _ => return MonEquality::Unknown,
    };
    let closure = |start: Vec<Rat>| -> BTreeSet<Vec<Rat>> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            for i in 0..w.len() {
                if m.is_identity_arrow(base, &w[i]) {
                    let mut next = w.clone();
                    next.remove(i);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
                if i + 1 < w.len() {
                    if let Some(c) =
                        m.reduced_into_window(base, &(w[i].clone() + w[i + 1].clone()))
                    {
                        let mut next = w.clone();
                        next[i] = c;
                        next.remove(i + 1);
                        if seen.insert(next.clone()) {
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        seen
    };
    let ca = closure(la);
    let cb = closure(lb);
    if ca.intersection(&cb).next().is_some() {
        MonEquality::Equal
    } else {
        MonEquality::Unknown
    }
}

/// All products realized inside a finite carrier, keyed by the composite.
fn expansion_table(
    g: &FiniteGroupoid,
    carrier: &BTreeSet<String>,
) -> BTreeMap<String, Vec<(String, String)>> {
    let mut table: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    for u in carrier {
        for v in carrier {
            if let Some(w) = finite_pair_product(g, carrier, u, v) {
                table.entry(w).or_default().push((u.clone(), v.clone()));
            }
        }
    }
    table
}

/// Bidirectional search over the rewrite graph of a finite carrier:
/// contractions, identity deletions, and expansions of a letter into a
/// carrier pair, capped a little above the longer input.
fn finite_search(
    g: &FiniteGroupoid,
    carrier: &BTreeSet<String>,
    a: &MonodromyWord,
    b: &MonodromyWord,
    depth: u32,
) -> MonEquality {
    let la = match a {
        MonodromyWord::Finite { letters, .. } => letters.clone(),
        _ => return MonEquality::Unknown,
    };
    let lb = match b {
        MonodromyWord::Finite { letters, .. } => letters.clone(),
        _ => return MonEquality::Unknown,
    };
    let cap = la.len().max(lb.len()) + 2;
    let budget = 200_000usize;
    let table = expansion_table(g, carrier);
    let moves = |w: &Vec<String>| -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for i in 0..w.len() {
            if g.is_identity(&w[i]) {
                let mut next = w.clone();
                next.remove(i);
                out.push(next);
            }
            if i + 1 < w.len() {
                if let Some(c) = finite_pair_product(g, carrier, &w[i], &w[i + 1]) {
                    let mut next = w.clone();
                    next[i] = c;
                    next.remove(i + 1);
                    out.push(next);
                }
            }
            if w.len() < cap {
                if let Some(pairs) = table.get(&w[i]) {
                    for (u, v) in pairs {
                        let mut next = w.clone();
                        next[i] = u.clone();
                        next.insert(i + 1, v.clone());
                        out.push(next);
                    }
                }
            }
        }
        out
    };
    bidirectional_meet(la, lb, moves, depth, budget)
}

/// Bidirectional search over the rewrite graph of chart words sharing a
/// base: contractions through a carrying edge, identity-letter deletions,
/// and expansions of a letter into an edge pair with the same germ.
fn chart_search(
    m: &ChartComplexModel,
    a: &MonodromyWord,
    b: &MonodromyWord,
    depth: u32,
) -> MonEquality {
    let (chart, base, la) = match a {
        MonodromyWord::Chart { chart, base, letters, .. } => (chart.clone(), base.clone(), letters.clone()),
        _ => return MonEquality::Unknown,
    };
    let lb = match b {
        MonodromyWord::Chart { letters, .. } => letters.clone(),
        _ => return MonEquality::Unknown,
    };
    let cap = la.len().max(lb.len()) + 2;
    let budget = 50_000usize;
    let moves = |w: &Vec<String>| -> Vec<Vec<String>> {
        let stops = match chart_stops(m, &chart, &base, w) {
            Ok(s) => s,
            Err(_) => return Vec::new(),
        };
        let mut out = Vec::new();
        for i in 0..w.len() {
            if chart_letter_is_identity(m, &w[i], &stops[i].1) {
                let mut next = w.clone();
                next.remove(i);
                out.push(next);
            }
            if i + 1 < w.len() {
                if let Some(c) = chart_pair_product(m, &w[i], &w[i + 1], &stops[i].1) {
                    let mut next = w.clone();
                    next[i] = c;
                    next.remove(i + 1);
                    out.push(next);
                }
            }
            if w.len() < cap {
                for (u, v) in chart_letter_expansions(m, &w[i], &stops[i].1) {
                    let mut next = w.clone();
                    next[i] = u;
                    next.insert(i + 1, v);
                    out.push(next);
                }
            }
        }
        out
    };
    bidirectional_meet(la, lb, moves, depth, budget)
}

/// Edge pairs whose composed transport germ at `at` is the germ of `id`.
fn chart_letter_expansions(m: &ChartComplexModel, id: &str, at: &Rat) -> Vec<(String, String)> {
    let target = match m.edge(id) {
        Some(e) => e,
        None => return Vec::new(),
    };
    let target_germ = match Germ1D::of(target.map.as_function(), at) {
        Some(g) => g,
        None => return Vec::new(),
    };
    let mut out = Vec::new();
    for ea in m.edges() {
        if ea.src != target.src {
            continue;
        }
        let ga = match Germ1D::of(ea.map.as_function(), at) {
            Some(g) => g,
            None => continue,
        };
        let mid = match ga.value.clone() {
            Some(v) => v,
            None => continue,
        };
        for eb in m.edges() {
            if eb.src != ea.dst || eb.dst != target.dst {
                continue;
            }
            let gb = match Germ1D::of(eb.map.as_function(), &mid) {
                Some(g) => g,
                None => continue,
            };
            if compose_map_germs(&gb, &ga) == target_germ {
                out.push((ea.id.clone(), eb.id.clone()));
            }
        }
    }
    out
}

/// Alternating breadth-first expansion from both words until the explored
/// sets meet, the layers run out, or the node budget is spent.
fn bidirectional_meet<L, F>(
    start_a: Vec<L>,
    start_b: Vec<L>,
    moves: F,
    depth: u32,
    budget: usize,
) -> MonEquality
where
    L: Clone + Ord,
    F: Fn(&Vec<L>) -> Vec<Vec<L>>,
{
    let mut seen_a = BTreeSet::from([start_a.clone()]);
    let mut seen_b = BTreeSet::from([start_b.clone()]);
    if seen_a.intersection(&seen_b).next().is_some() {
        return MonEquality::Equal;
    }
    let mut frontier_a = vec![start_a];
    let mut frontier_b = vec![start_b];
    let mut nodes = 0usize;
    for _ in 0..depth {
        if frontier_a.is_empty() && frontier_b.is_empty() {
            break;
        }
        let from_a = !frontier_a.is_empty()
            && (frontier_b.is_empty() || frontier_a.len() <= frontier_b.len());
        let (seen_here, seen_there, frontier) = if from_a {
            (&mut seen_a, &seen_b, &mut frontier_a)
        } else {
            (&mut seen_b, &seen_a, &mut frontier_b)
        };
        let mut next = Vec::new();
        for w in frontier.drain(..) {
            for n in moves(&w) {
                if seen_here.insert(n.clone()) {
                    if seen_there.contains(&n) {
                        return MonEquality::Equal;
                    }
                    nodes += 1;
                    if nodes > budget {
                        return MonEquality::Unknown;
                    }
                    next.push(n);
                }
            }
        }
        *frontier = next;
    }
    MonEquality::Unknown
}

/// Letter-level morphism data out of a carrier.
#[derive(Clone)]
pub enum MonLocalData {
    /// The identity data into the ambient groupoid; the extension is the
    /// canonical projection of word classes onto ambient arrows.
    Inclusion,
    /// Arrow images in a finite target groupoid.
    FiniteArrows {
        target: FiniteGroupoid,
        arrows: BTreeMap<String, String>,
    },
    /// The fiberwise unwinding of a bundle window: `t` over `x` is sent to
    /// the pair `(x, t)` with plain addition, forgetting the modulus.
    CoverLift,
}

/// The image of one word under an extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum ExtensionImage {
    Ambient { arrow: AmbientArrow },
    Finite { arrow: String },
    /// An arrow of the unwound bundle: a base point and an exact shift.
    Cover { x: Rat, shift: Rat },
}

/// A product-preserving extension of letter data to every word.
///
/// The extension is unique once the letter images are fixed: the image of
/// a word is the composite of its letter images, and words linked by a
/// contraction get equal images because the data preserves every defined
/// product.
pub struct MonExtension {
    data: MonLocalData,
    objects: BTreeMap<String, String>,
}

impl std::fmt::Debug for MonExtension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let data = match &self.data {
            MonLocalData::Inclusion => "Inclusion",
            MonLocalData::FiniteArrows { .. } => "FiniteArrows",
            MonLocalData::CoverLift => "CoverLift",
        };
        f.debug_struct("MonExtension")
            .field("data", &data)
            .field("objects", &self.objects)
            .finish()
    }
}

impl MonExtension {
    /// The object images forced by the letter data, for finite targets.
    pub fn object_image(&self, object: &str) -> Option<&String> {
        self.objects.get(object)
    }

    /// The image of a validated word: the composite of its letter images.
    pub fn apply(
        &self,
        pre: &Pregroupoid,
        word: &MonodromyWord,
    ) -> Result<ExtensionImage, MonError> {
        pre.validate(word)?;
        match &self.data {
            MonLocalData::Inclusion => Ok(ExtensionImage::Ambient {
                arrow: ambient_product(pre, word)?,
            }),
            MonLocalData::FiniteArrows { target, arrows } => {
                let (base, letters) = match word {
                    MonodromyWord::Finite { base, letters, .. } => (base, letters),
                    _ => return Err(MonError::FamilyMismatch),
                };
                let start = self
                    .objects
                    .get(base)
                    .ok_or_else(|| MonError::UnknownObject(base.clone()))?;
                let mut acc = target
                    .identity_of(start)
                    .ok_or_else(|| MonError::UnknownObject(start.clone()))?;
                for (index, id) in letters.iter().enumerate() {
                    let image = arrows
                        .get(id)
                        .ok_or_else(|| MonError::UnassignedLetter(id.clone()))?;
                    acc = target
                        .compose(&acc, image)
                        .ok_or(MonError::NotComposable { index })?;
                }
                Ok(ExtensionImage::Finite { arrow: acc })
            }
            MonLocalData::CoverLift => match word {
                MonodromyWord::Bundle { base, .. } => Ok(ExtensionImage::Cover {
                    x: base.clone(),
                    shift: germ_sum(word).expect("bundle words have a translation total"),
                }),
                _ => Err(MonError::FamilyMismatch),
            },
        }
    }
}

/// Extends letter data to all words after verifying that it preserves
/// every defined carrier product — exhaustively on a finite carrier,
/// symbolically for the bundle cover lift.
pub fn mon_extend(pre: &Pregroupoid, data: &MonLocalData) -> Result<MonExtension, MonError> {
    match (pre, data) {
        (_, MonLocalData::Inclusion) => Ok(MonExtension {
            data: data.clone(),
            objects: BTreeMap::new(),
        }),
        (Pregroupoid::Finite { groupoid, carrier }, MonLocalData::FiniteArrows { target, arrows }) => {
            let mut objects: BTreeMap<String, String> = BTreeMap::new();
            for id in carrier {
                let image_id = arrows
                    .get(id)
                    .ok_or_else(|| MonError::UnassignedLetter(id.clone()))?;
                let image = target
                    .arrow(image_id)
                    .ok_or_else(|| MonError::UnknownImage(image_id.clone()))?;
                let arrow = groupoid.arrow(id).expect("carrier arrows exist");
                for (object, forced) in [(&arrow.src, &image.src), (&arrow.dst, &image.dst)] {
                    match objects.get(object) {
                        None => {
                            objects.insert(object.clone(), forced.clone());
                        }
                        Some(prior) if prior == forced => {}
                        Some(_) => {
                            return Err(MonError::InconsistentObjectImage(object.clone()));
                        }
                    }
                }
            }
            for u in carrier {
                for v in carrier {
                    let w = match finite_pair_product(groupoid, carrier, u, v) {
                        Some(w) => w,
                        None => continue,
                    };
                    let fu = &arrows[u];
                    let fv = &arrows[v];
                    let fw = &arrows[&w];
                    if target.compose(fu, fv).as_deref() != Some(fw.as_str()) {
                        return Err(MonError::NotPregroupoidMorphism {
                            first: u.clone(),
                            second: v.clone(),
                        });
                    }
                }
            }
            Ok(MonExtension {
                data: data.clone(),
                objects,
            })
        }
        (Pregroupoid::Window { model }, MonLocalData::CoverLift) => {
            let m = model.as_bundle().ok_or(MonError::FamilyMismatch)?;
            if let Some(x) = wraparound_point(m) {
                let (t, u) = wraparound_pair(m, &x)
                    .expect("a wrap-capable point admits a wrapping pair");
                return Err(MonError::NotPregroupoidMorphism {
                    first: format!("q({x}, {t})"),
                    second: format!("q({x}, {u})"),
                });
            }
            Ok(MonExtension {
                data: data.clone(),
                objects: BTreeMap::new(),
            })
        }
        _ => Err(MonError::FamilyMismatch),
    }
}

/// Where a star check is anchored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StarBase {
    Finite { object: String },
    Bundle { x: Rat },
    Chart { chart: String, x: Rat },
}

/// Evidence about the canonical projection on one star.
///
/// `star_reached` counts the ambient star arrows realized by carrier
/// words; `identity_fiber_classes` counts pairwise-distinct word classes
/// found over the identity arrow, with `undecided_pairs` recording the
/// comparisons the engine could not settle.  The projection is reported
/// bijective only when the star was covered, the identity fiber collapsed
/// to one class, and nothing was left undecided.
#[derive(Debug, Clone, Serialize)]
pub struct StarReport {
    pub depth: u32,
    pub star_sampled: u64,
    pub star_reached: u64,
    pub surjective: bool,
    pub identity_fiber_classes: u64,
    pub undecided_pairs: u64,
    pub bijective_on_sample: bool,
    pub fiber_witnesses: Vec<MonodromyWord>,
}

/// Reports how the word classes at `base` project onto the ambient star.
pub fn star_projection_check(
    pre: &Pregroupoid,
    base: &StarBase,
    depth: u32,
) -> Result<StarReport, MonError> {
    match (pre, base) {
        (Pregroupoid::Finite { groupoid, carrier }, StarBase::Finite { object }) => {
            finite_star_check(pre, groupoid, carrier, object, depth)
        }
        (Pregroupoid::Window { model }, StarBase::Bundle { x }) => {
            let m = model.as_bundle().ok_or(MonError::FamilyMismatch)?;
            bundle_star_check(pre, m, x, depth)
        }
        (Pregroupoid::Window { model }, StarBase::Chart { chart, x }) => {
            let m = model.as_chart_complex().ok_or(MonError::FamilyMismatch)?;
            chart_star_check(pre, m, chart, x, depth)
        }
        _ => Err(MonError::FamilyMismatch),
    }
}

fn finite_star_check(
    pre: &Pregroupoid,
    g: &FiniteGroupoid,
    carrier: &BTreeSet<String>,
    object: &str,
    depth: u32,
) -> Result<StarReport, MonError> {
    let identity = g
        .identity_of(object)
        .ok_or_else(|| MonError::UnknownObject(object.to_string()))?;
    let star: BTreeSet<String> = g.star(object).iter().map(|a| a.id.clone()).collect();

    // Arrows realized by carrier words: saturate right multiplication.
    let mut reached = BTreeSet::from([identity.clone()]);
    let mut saturated = false;
    for _ in 0..depth.max(1) {
        let mut grown = reached.clone();
        for r in &reached {
            for u in carrier {
                if let Some(c) = g.compose(r, u) {
                    grown.insert(c);
                }
            }
        }
        if grown.len() == reached.len() {
            saturated = true;
            break;
        }
        reached = grown;
    }
    if !saturated {
        return Err(MonError::DepthExceeded { depth });
    }
    let surjective = star.iter().all(|a| reached.contains(a));

    // Words landing on the identity, up to a short length.
    let max_len = (depth as usize).min(3);
    let mut loops: Vec<Vec<String>> = Vec::new();
    let mut frontier: Vec<(Vec<String>, String)> = vec![(Vec::new(), identity.clone())];
    loops.push(Vec::new());
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, acc) in &frontier {
            for u in carrier {
                if let Some(c) = g.compose(acc, u) {
                    let mut w = word.clone();
                    w.push(u.clone());
                    if c == identity {
                        loops.push(w.clone());
                    }
                    next.push((w, c));
                }
            }
        }
        frontier = next;
        if frontier.len() > 50_000 {
            return Err(MonError::DepthExceeded { depth });
        }
    }
    let words: Vec<MonodromyWord> = loops
        .into_iter()
        .map(|letters| MonodromyWord::Finite {
            base: object.to_string(),
            letters,
            reduced: false,
        })
        .collect();
    let (classes, undecided) = classify_fiber(pre, &words, depth)?;
    let fiber = classes.len() as u64;
    Ok(StarReport {
        depth,
        star_sampled: star.len() as u64,
        star_reached: reached.len() as u64,
        surjective,
        identity_fiber_classes: fiber,
        undecided_pairs: undecided,
        bijective_on_sample: surjective && fiber == 1 && undecided == 0,
        fiber_witnesses: classes,
    })
}

fn bundle_star_check(
    pre: &Pregroupoid,
    m: &QuotientBundleModel,
    x: &Rat,
    depth: u32,
) -> Result<StarReport, MonError> {
    let nu = m.modulus_at(x);
    let (lo, hi) = m.window_at(x);
    let theta = hi.clone().min(-lo.clone());

    // A grid across the star: the full circle, or a few window spans.
    let samples: Vec<Rat> = if nu.is_positive() {
        (0..8).map(|j| Rat::new(j, 8) * nu.clone()).collect()
    } else {
        let span = if theta.is_positive() {
            theta.clone()
        } else {
            Rat::one()
        };
        (-4..=4)
            .map(|j| Rat::new(j, 2) * span.clone())
            .collect()
    };
    let reached = samples
        .iter()
        .filter(|t| t.is_zero() || crate::holonomy::factor_count(m, x, t).is_some())
        .count() as u64;
    let surjective = reached == samples.len() as u64;

    // Winding words over the identity: k net turns around the fiber.
    let mut words: Vec<MonodromyWord> = Vec::new();
    if nu.is_positive() && theta.is_positive() {
        let folds = (nu.clone() / theta.clone()).floor_i64() + 1;
        let step = nu.clone() / Rat::int(folds);
        for k in -3i64..=3 {
            let letter = if k < 0 { -step.clone() } else { step.clone() };
            let letters = vec![letter; (folds * k.abs()) as usize];
            words.push(MonodromyWord::Bundle {
                base: x.clone(),
                letters,
                reduced: false,
            });
        }
    } else if theta.is_positive() {
        let t = &theta / &Rat::int(2);
        let s = &theta / &Rat::int(4);
        words.push(MonodromyWord::bundle(x.clone(), vec![]));
        words.push(MonodromyWord::bundle(x.clone(), vec![t.clone(), -t.clone()]));
        words.push(MonodromyWord::bundle(
            x.clone(),
            vec![t.clone(), -s.clone(), -(&t - &s)],
        ));
    } else {
        words.push(MonodromyWord::bundle(x.clone(), vec![]));
    }
    let (classes, undecided) = classify_fiber(pre, &words, depth)?;
    let fiber = classes.len() as u64;
    Ok(StarReport {
        depth,
        star_sampled: samples.len() as u64,
        star_reached: reached,
        surjective,
        identity_fiber_classes: fiber,
        undecided_pairs: undecided,
        bijective_on_sample: surjective && fiber == 1 && undecided == 0,
        fiber_witnesses: classes,
    })
}

fn chart_star_check(
    pre: &Pregroupoid,
    m: &ChartComplexModel,
    chart: &str,
    x: &Rat,
    depth: u32,
) -> Result<StarReport, MonError> {
    let c = m
        .chart(chart)
        .ok_or_else(|| MonError::UnknownChart(chart.to_string()))?;
    if !c.transversal.contains(x) {
        return Err(MonError::OutsideTransversal { x: x.clone() });
    }

    // Walk the edge words; an ambient arrow is a landing chart, a landing
    // point, and the composite transport germ.
    let mut arrows: HashSet<(String, Rat, Germ1D)> =
        HashSet::from([(chart.to_string(), x.clone(), identity_germ(x))]);
    let mut loops: Vec<Vec<String>> = vec![Vec::new()];
    let mut frontier: Vec<(Vec<String>, String, Rat, Germ1D)> =
        vec![(Vec::new(), chart.to_string(), x.clone(), identity_germ(x))];
    let max_len = (depth as usize).min(4);
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, at_chart, at, germ) in &frontier {
            for edge in m.edges() {
                if &edge.src != at_chart {
                    continue;
                }
                let step = match Germ1D::of(edge.map.as_function(), at) {
                    Some(g) => g,
                    None => continue,
                };
                let landing = match step.value.clone() {
                    Some(v) => v,
                    None => continue,
                };
                let composite = compose_map_germs(&step, germ);
                let mut w = word.clone();
                w.push(edge.id.clone());
                arrows.insert((edge.dst.clone(), landing.clone(), composite.clone()));
                if edge.dst == chart && is_identity_germ(&composite) {
                    loops.push(w.clone());
                }
                next.push((w, edge.dst.clone(), landing, composite));
            }
        }
        frontier = next;
        if frontier.len() > 10_000 {
            return Err(MonError::DepthExceeded { depth });
        }
    }
    let words: Vec<MonodromyWord> = loops
        .into_iter()
        .map(|letters| MonodromyWord::Chart {
            chart: chart.to_string(),
            base: x.clone(),
            letters,
            reduced: false,
        })
        .collect();
    let (classes, undecided) = classify_fiber(pre, &words, depth)?;
    let fiber = classes.len() as u64;
    let reached = arrows.len() as u64;
    Ok(StarReport {
        depth,
        star_sampled: reached,
        star_reached: reached,
        surjective: true,
        identity_fiber_classes: fiber,
        undecided_pairs: undecided,
        bijective_on_sample: fiber == 1 && undecided == 0,
        fiber_witnesses: classes,
    })
}

/// Greedily buckets words into pairwise-distinct classes.  A word whose
/// comparison with every representative stays unknown is left out and
/// counted, so the class count is a certified lower bound.
fn classify_fiber(
    pre: &Pregroupoid,
    words: &[MonodromyWord],
    depth: u32,
) -> Result<(Vec<MonodromyWord>, u64), MonError> {
    let mut reps: Vec<MonodromyWord> = Vec::new();
    let mut undecided = 0u64;
    for w in words {
        let mut verdict = None;
        for r in &reps {
            match mon_equal(pre, w, r, depth)? {
                MonEquality::Equal => {
                    verdict = Some(true);
                    break;
                }
                MonEquality::Distinct => {}
                MonEquality::Unknown => {
                    verdict = Some(false);
                    undecided += 1;
                    break;
                }
            }
        }
        match verdict {
            Some(_) => {}
            None => {
                if reps.len() < 16 {
                    reps.push(w.clone());
                }
            }
        }
    }
    Ok((reps, undecided))
}

/// The word classes of a finite carrier at `base`, by brute force:
/// every composable word up to `max_len` letters, merged along single
/// contractions and identity deletions.  Small enough carriers get the
/// exact class decomposition of the presented groupoid's bounded part.
pub fn congruence_classes(
    pre: &Pregroupoid,
    base: &str,
    max_len: u32,
) -> Result<Vec<Vec<MonodromyWord>>, MonError> {
    let (g, carrier) = match pre {
        Pregroupoid::Finite { groupoid, carrier } => (groupoid, carrier),
        Pregroupoid::Window { .. } => return Err(MonError::FamilyMismatch),
    };
    if !g.objects().iter().any(|o| o == base) {
        return Err(MonError::UnknownObject(base.to_string()));
    }

    let mut words: Vec<Vec<String>> = vec![Vec::new()];
    let mut ends: Vec<String> = vec![base.to_string()];
    let mut index: BTreeMap<Vec<String>, usize> = BTreeMap::from([(Vec::new(), 0)]);
    let mut level: Vec<usize> = vec![0];
    for _ in 0..max_len {
        let mut next_level = Vec::new();
        for &i in &level {
            let end = ends[i].clone();
            let word = words[i].clone();
            for u in carrier {
                let arrow = g.arrow(u).expect("carrier arrows exist");
                if arrow.src != end {
                    continue;
                }
                let mut w = word.clone();
                w.push(u.clone());
                if index.contains_key(&w) {
                    continue;
                }
                let id = words.len();
                index.insert(w.clone(), id);
                words.push(w);
                ends.push(arrow.dst.clone());
                next_level.push(id);
            }
        }
        level = next_level;
        if words.len() > 250_000 {
            return Err(MonError::DepthExceeded { depth: max_len });
        }
    }

    let mut uf = UnionFind::new(words.len());
    for (i, w) in words.iter().enumerate() {
        for p in 0..w.len() {
            if g.is_identity(&w[p]) {
                let mut shorter = w.clone();
                shorter.remove(p);
                uf.union(i, index[&shorter]);
            }
            if p + 1 < w.len() {
                if let Some(c) = finite_pair_product(g, carrier, &w[p], &w[p + 1]) {
                    let mut shorter = w.clone();
                    shorter[p] = c;
                    shorter.remove(p + 1);
                    uf.union(i, index[&shorter]);
                }
            }
        }
    }

    let mut buckets: BTreeMap<usize, Vec<MonodromyWord>> = BTreeMap::new();
    for (i, w) in words.iter().enumerate() {
        buckets
            .entry(uf.find(i))
            .or_default()
            .push(MonodromyWord::Finite {
                base: base.to_string(),
                letters: w.clone(),
                reduced: false,
            });
    }
    Ok(buckets.into_values().collect())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::SmoothnessClass;
    use crate::interval::OpenSet1D;
    use crate::models::ModulusProfile;
    use crate::pl::{Affine, PLFunction};
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn p1_model() -> QuotientBundleModel {
        QuotientBundleModel::pradines_1()
    }

    fn p1() -> Pregroupoid {
        Pregroupoid::window(Model::QuotientBundle(p1_model()))
    }

    /// Modulus one everywhere, window `(-1/2, 1/2)`: wide enough for a
    /// two-letter sum to wrap around the fiber.
    fn wide_model() -> QuotientBundleModel {
        let profile = ModulusProfile::new(PLFunction::constant(OpenSet1D::line(), Rat::one()))
            .unwrap();
        let width = PLFunction::constant(OpenSet1D::line(), rat(1, 2));
        QuotientBundleModel::symmetric(profile, width, SmoothnessClass::C0).unwrap()
    }

    fn wide() -> Pregroupoid {
        Pregroupoid::window(Model::QuotientBundle(wide_model()))
    }

    fn mobius() -> Pregroupoid {
        Pregroupoid::window(Model::ChartComplex(ChartComplexModel::mobius()))
    }

    fn c4_full() -> Pregroupoid {
        Pregroupoid::full(FiniteGroupoid::cyclic_group(4))
    }

    /// The cyclic group of order four with only the identity and the two
    /// generators in the carrier: `r1 · r1 = r2` falls outside.
    fn c4_thin() -> Pregroupoid {
        let carrier = ["r0", "r1", "r3"].iter().map(|s| s.to_string()).collect();
        Pregroupoid::finite(FiniteGroupoid::cyclic_group(4), carrier).unwrap()
    }

    fn pair2() -> FiniteGroupoid {
        FiniteGroupoid::pair_groupoid(&["a", "b"])
    }

    fn bword(x: Rat, ts: &[Rat]) -> MonodromyWord {
        MonodromyWord::bundle(x, ts.to_vec())
    }

    fn letters_of(w: &MonodromyWord) -> Vec<Rat> {
        match w {
            MonodromyWord::Bundle { letters, .. } => letters.clone(),
            _ => panic!("expected a bundle word"),
        }
    }

    #[test]
    fn carriers_must_hold_every_identity() {
        let carrier = ["r1", "r3"].iter().map(|s| s.to_string()).collect();
        let err = Pregroupoid::finite(FiniteGroupoid::cyclic_group(4), carrier).unwrap_err();
        assert_eq!(err, MonError::MissingIdentity("*".into()));
    }

    #[test]
    fn carriers_must_be_inverse_closed() {
        let carrier = ["r0", "r1"].iter().map(|s| s.to_string()).collect();
        let err = Pregroupoid::finite(FiniteGroupoid::cyclic_group(4), carrier).unwrap_err();
        assert_eq!(err, MonError::NotInverseClosed("r1".into()));
    }

    #[test]
    fn carriers_reject_unknown_arrows() {
        let carrier = ["r0", "bogus"].iter().map(|s| s.to_string()).collect();
        let err = Pregroupoid::finite(FiniteGroupoid::cyclic_group(4), carrier).unwrap_err();
        assert_eq!(err, MonError::UnknownArrow("bogus".into()));
    }

    #[test]
    fn words_must_chain_head_to_tail() {
        let pre = Pregroupoid::full(pair2());
        let w = MonodromyWord::finite("a", &["p:a:b", "p:a:b"]);
        assert_eq!(pre.validate(&w), Err(MonError::NotComposable { index: 1 }));
        let w = MonodromyWord::finite("b", &["p:a:b"]);
        assert_eq!(pre.validate(&w), Err(MonError::NotComposable { index: 0 }));
        let w = MonodromyWord::finite("a", &["p:a:b", "p:b:a"]);
        assert_eq!(pre.validate(&w), Ok(()));
    }

    #[test]
    fn window_letters_stay_inside_the_window() {
        let pre = p1();
        let w = bword(Rat::one(), &[rat(1, 4)]);
        assert_eq!(
            pre.validate(&w),
            Err(MonError::LetterOutsideWindow {
                x: Rat::one(),
                t: rat(1, 4),
            })
        );
        assert_eq!(pre.validate(&bword(Rat::one(), &[rat(3, 16)])), Ok(()));
    }

    #[test]
    fn chart_letters_follow_the_transversal() {
        let pre = mobius();
        let w = MonodromyWord::chart("c0", Rat::zero(), &["flip-c0-c1", "straight-c0-c1"]);
        assert_eq!(pre.validate(&w), Err(MonError::NotComposable { index: 1 }));
        let w = MonodromyWord::chart("nowhere", Rat::zero(), &[]);
        assert_eq!(pre.validate(&w), Err(MonError::UnknownChart("nowhere".into())));
        let w = MonodromyWord::chart("c0", Rat::int(2), &[]);
        assert_eq!(
            pre.validate(&w),
            Err(MonError::OutsideTransversal { x: Rat::int(2) })
        );
        let w = MonodromyWord::chart("c0", Rat::zero(), &["flip-c0-c1", "flip-c1-c0"]);
        assert_eq!(pre.validate(&w), Ok(()));
    }

    #[test]
    fn reduce_cancels_inverse_pairs() {
        let pre = c4_full();
        let w = mon_reduce(&pre, &MonodromyWord::finite("*", &["r1", "r3"])).unwrap();
        assert!(w.is_empty());
        assert!(w.is_reduced());

        let pre = p1();
        let w = mon_reduce(&pre, &bword(Rat::one(), &[rat(1, 8), rat(-1, 8)])).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn reduce_contracts_sums_that_stay_in_the_window() {
        let pre = p1();
        let w = mon_reduce(&pre, &bword(Rat::one(), &[rat(1, 8), rat(1, 16)])).unwrap();
        assert_eq!(letters_of(&w), vec![rat(3, 16)]);
    }

    #[test]
    fn reduce_keeps_wrapping_sums_apart() {
        let pre = p1();
        let w = mon_reduce(&pre, &bword(Rat::one(), &[rat(1, 8), rat(1, 8)])).unwrap();
        assert_eq!(letters_of(&w), vec![rat(1, 8), rat(1, 8)]);
        assert!(w.is_reduced());
    }

    #[test]
    fn reduce_strips_identity_letters() {
        let pre = p1();
        let w = mon_reduce(&pre, &bword(Rat::one(), &[Rat::zero(), rat(1, 8)])).unwrap();
        assert_eq!(letters_of(&w), vec![rat(1, 8)]);

        let pre = c4_full();
        let w = mon_reduce(&pre, &MonodromyWord::finite("*", &["r0", "r1", "r0"])).unwrap();
        assert_eq!(
            w,
            MonodromyWord::Finite {
                base: "*".into(),
                letters: vec!["r1".into()],
                reduced: true,
            }
        );
    }

    #[test]
    fn reduce_chains_across_contractions() {
        let pre = c4_full();
        let w = mon_reduce(&pre, &MonodromyWord::finite("*", &["r1", "r1", "r2"])).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn reduce_collapses_chart_round_trips() {
        let pre = mobius();
        let w = MonodromyWord::chart("c0", Rat::zero(), &["flip-c0-c1", "flip-c1-c0"]);
        assert!(mon_reduce(&pre, &w).unwrap().is_empty());

        let twist = MonodromyWord::chart("c0", Rat::zero(), &["straight-c0-c1", "flip-c1-c0"]);
        assert_eq!(mon_reduce(&pre, &twist).unwrap().len(), 2);
    }

    #[test]
    fn ambient_products_fold_the_letters() {
        let pre = c4_full();
        let w = MonodromyWord::finite("*", &["r1", "r2"]);
        assert_eq!(
            ambient_product(&pre, &w).unwrap(),
            AmbientArrow::Finite { arrow: "r3".into() }
        );

        let pre = p1();
        let m = p1_model();
        let w = bword(Rat::one(), &vec![rat(1, 8); 12]);
        assert_eq!(
            ambient_product(&pre, &w).unwrap(),
            AmbientArrow::Bundle {
                x: Rat::one(),
                rep: m.canonical_rep(&Rat::one(), &rat(1, 2)),
            }
        );
    }

    #[test]
    fn ambient_chart_products_compose_the_germs() {
        let pre = mobius();
        let w = MonodromyWord::chart("c0", Rat::zero(), &["straight-c0-c1", "flip-c1-c0"]);
        let flip = Affine::new(-Rat::one(), Rat::zero());
        assert_eq!(
            ambient_product(&pre, &w).unwrap(),
            AmbientArrow::Chart {
                src: "c0".into(),
                dst: "c0".into(),
                germ: Box::new(Germ1D {
                    base: Rat::zero(),
                    value: Some(Rat::zero()),
                    left: Some(flip.clone()),
                    right: Some(flip),
                }),
            }
        );
    }

    #[test]
    fn translation_totals_sum_letter_values() {
        let w = bword(Rat::one(), &[rat(1, 8), rat(1, 16)]);
        assert_eq!(germ_sum(&w), Some(rat(3, 16)));
        assert_eq!(germ_sum(&MonodromyWord::finite("*", &["r1"])), None);
    }

    #[test]
    fn safe_regime_holds_for_narrow_windows() {
        let m = p1_model();
        assert!(safe_regime_at(&m, &Rat::zero()));
        assert!(safe_regime_at(&m, &Rat::one()));
        assert!(safe_regime_at(&m, &rat(-1, 1)));
        assert_eq!(wraparound_point(&m), None);
    }

    #[test]
    fn wraparound_points_are_found_on_wide_windows() {
        let m = wide_model();
        let x = wraparound_point(&m).expect("a wide window wraps somewhere");
        assert!(!safe_regime_at(&m, &x));
    }

    #[test]
    fn equal_requires_a_common_base() {
        let pre = p1();
        let a = bword(Rat::zero(), &[rat(1, 8)]);
        let b = bword(Rat::one(), &[rat(1, 8)]);
        assert_eq!(mon_equal(&pre, &a, &b, 8), Err(MonError::BaseMismatch));
    }

    #[test]
    fn equal_recognizes_contraction_rearrangements() {
        let pre = p1();
        let a = bword(Rat::one(), &[rat(1, 8), rat(1, 16)]);
        let b = bword(Rat::one(), &[rat(3, 16)]);
        assert_eq!(mon_equal(&pre, &a, &b, 8).unwrap(), MonEquality::Equal);
        let c = bword(Rat::one(), &[rat(1, 16), rat(1, 8)]);
        assert_eq!(mon_equal(&pre, &a, &c, 8).unwrap(), MonEquality::Equal);
    }

    #[test]
    fn equal_separates_ambient_classes() {
        let pre = p1();
        let a = bword(Rat::one(), &[rat(1, 8)]);
        let b = bword(Rat::one(), &[rat(1, 16)]);
        assert_eq!(mon_equal(&pre, &a, &b, 8).unwrap(), MonEquality::Distinct);
    }

    #[test]
    fn winding_words_differ_from_the_empty_word() {
        let pre = p1();
        let winding = bword(Rat::zero(), &vec![rat(1, 8); 8]);
        let empty = bword(Rat::zero(), &[]);
        assert_eq!(
            ambient_product(&pre, &winding).unwrap(),
            ambient_product(&pre, &empty).unwrap()
        );
        assert_eq!(
            mon_equal(&pre, &winding, &empty, 8).unwrap(),
            MonEquality::Distinct
        );
    }

    #[test]
    fn translation_totals_decide_over_line_fibers() {
        let pre = p1();
        let a = bword(rat(-1, 1), &[rat(1, 8)]);
        let b = bword(rat(-1, 1), &[rat(1, 16), rat(1, 16)]);
        assert_eq!(mon_equal(&pre, &a, &b, 8).unwrap(), MonEquality::Equal);
        let c = bword(rat(-1, 1), &[rat(1, 8), rat(-1, 8)]);
        let empty = bword(rat(-1, 1), &[]);
        assert_eq!(mon_equal(&pre, &c, &empty, 8).unwrap(), MonEquality::Equal);
    }

    #[test]
    fn wide_windows_leave_honest_unknowns() {
        let pre = wide();
        // Equal in the presented groupoid (split 1/4 = 1/8 + 1/8 and
        // regroup), but no contraction path exists and the wrapping
        // window forfeits the translation-total invariant.
        let a = bword(Rat::zero(), &[rat(1, 4), rat(1, 4)]);
        let b = bword(Rat::zero(), &[rat(3, 8), rat(1, 8)]);
        assert_eq!(
            ambient_product(&pre, &a).unwrap(),
            ambient_product(&pre, &b).unwrap()
        );
        assert_eq!(mon_equal(&pre, &a, &b, 8).unwrap(), MonEquality::Unknown);

        // A wrapping contraction is still found when one exists.
        let c = bword(Rat::zero(), &[rat(3, 8), rat(3, 8)]);
        let d = bword(Rat::zero(), &[rat(-1, 4)]);
        assert_eq!(mon_equal(&pre, &c, &d, 8).unwrap(), MonEquality::Equal);
    }

    #[test]
    fn covering_words_over_a_finite_carrier_stay_unknown() {
        let pre = c4_thin();
        let a = MonodromyWord::finite("*", &["r1", "r1"]);
        let b = MonodromyWord::finite("*", &["r3", "r3"]);
        assert_eq!(
            ambient_product(&pre, &a).unwrap(),
            ambient_product(&pre, &b).unwrap()
        );
        assert_eq!(mon_equal(&pre, &a, &b, 16).unwrap(), MonEquality::Unknown);

        let c = MonodromyWord::finite("*", &["r1", "r3"]);
        let empty = MonodromyWord::finite("*", &[]);
        assert_eq!(mon_equal(&pre, &c, &empty, 16).unwrap(), MonEquality::Equal);
    }

    #[test]
    fn full_carriers_contract_everything() {
        let pre = c4_full();
        let a = MonodromyWord::finite("*", &["r1", "r1"]);
        let b = MonodromyWord::finite("*", &["r2"]);
        assert_eq!(mon_equal(&pre, &a, &b, 8).unwrap(), MonEquality::Equal);
        let c = MonodromyWord::finite("*", &["r1", "r2", "r1"]);
        let d = MonodromyWord::finite("*", &["r0"]);
        assert_eq!(mon_equal(&pre, &c, &d, 8).unwrap(), MonEquality::Equal);
    }

    #[test]
    fn equal_is_symmetric_on_fixtures() {
        let pre = p1();
        let pairs = [
            (
                bword(Rat::one(), &[rat(1, 8), rat(1, 16)]),
                bword(Rat::one(), &[rat(3, 16)]),
            ),
            (
                bword(Rat::one(), &[rat(1, 8)]),
                bword(Rat::one(), &[rat(1, 16)]),
            ),
            (bword(Rat::zero(), &vec![rat(1, 8); 8]), bword(Rat::zero(), &[])),
        ];
        for (a, b) in &pairs {
            assert_eq!(
                mon_equal(&pre, a, b, 8).unwrap(),
                mon_equal(&pre, b, a, 8).unwrap()
            );
        }
    }

    #[test]
    fn inclusion_extends_to_the_canonical_projection() {
        let pre = c4_full();
        let ext = mon_extend(&pre, &MonLocalData::Inclusion).unwrap();
        let w = MonodromyWord::finite("*", &["r1", "r2"]);
        assert_eq!(
            ext.apply(&pre, &w).unwrap(),
            ExtensionImage::Ambient {
                arrow: AmbientArrow::Finite { arrow: "r3".into() },
            }
        );

        let pre = p1();
        let ext = mon_extend(&pre, &MonLocalData::Inclusion).unwrap();
        let winding = bword(Rat::one(), &vec![rat(1, 8); 8]);
        let empty = bword(Rat::one(), &[]);
        // The projection forgets the winding.
        assert_eq!(
            ext.apply(&pre, &winding).unwrap(),
            ext.apply(&pre, &empty).unwrap()
        );
    }

    #[test]
    fn cover_lift_unwinds_circle_fibers() {
        let pre = p1();
        let ext = mon_extend(&pre, &MonLocalData::CoverLift).unwrap();
        let mut images = Vec::new();
        for k in -3i64..=3 {
            let letter = if k < 0 { rat(-1, 8) } else { rat(1, 8) };
            let w = bword(Rat::one(), &vec![letter; (8 * k.abs()) as usize]);
            let image = ext.apply(&pre, &w).unwrap();
            assert_eq!(
                image,
                ExtensionImage::Cover {
                    x: Rat::one(),
                    shift: Rat::int(k),
                }
            );
            images.push(image);
        }
        images.dedup();
        assert_eq!(images.len(), 7);
    }

    #[test]
    fn cover_lift_rejects_wrapping_windows() {
        let pre = wide();
        match mon_extend(&pre, &MonLocalData::CoverLift).unwrap_err() {
            MonError::NotPregroupoidMorphism { first, second } => {
                assert!(first.starts_with("q("));
                assert_eq!(first, second);
            }
            other => panic!("expected a morphism failure, got {other:?}"),
        }
    }

    #[test]
    fn finite_data_must_cover_the_carrier() {
        let pre = c4_full();
        let arrows: BTreeMap<String, String> = [("r0", "r0"), ("r1", "r1"), ("r3", "r1")]
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let data = MonLocalData::FiniteArrows {
            target: FiniteGroupoid::cyclic_group(2),
            arrows,
        };
        assert_eq!(
            mon_extend(&pre, &data).unwrap_err(),
            MonError::UnassignedLetter("r2".into())
        );
    }

    #[test]
    fn finite_data_respects_objects() {
        let g = pair2();
        let pre = Pregroupoid::full(g.clone());
        let mut arrows: BTreeMap<String, String> = g
            .arrows()
            .iter()
            .map(|a| (a.id.clone(), a.id.clone()))
            .collect();
        arrows.insert("p:b:b".into(), "p:a:a".into());
        let data = MonLocalData::FiniteArrows { target: g, arrows };
        assert_eq!(
            mon_extend(&pre, &data).unwrap_err(),
            MonError::InconsistentObjectImage("b".into())
        );
    }

    #[test]
    fn finite_data_must_preserve_products() {
        let pre = c4_full();
        let arrows: BTreeMap<String, String> =
            [("r0", "r0"), ("r1", "r1"), ("r2", "r1"), ("r3", "r0")]
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect();
        let data = MonLocalData::FiniteArrows {
            target: FiniteGroupoid::cyclic_group(2),
            arrows,
        };
        assert_eq!(
            mon_extend(&pre, &data).unwrap_err(),
            MonError::NotPregroupoidMorphism {
                first: "r1".into(),
                second: "r1".into(),
            }
        );
    }

    #[test]
    fn mod_two_data_extends() {
        let pre = c4_full();
        let arrows: BTreeMap<String, String> =
            [("r0", "r0"), ("r1", "r1"), ("r2", "r0"), ("r3", "r1")]
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect();
        let data = MonLocalData::FiniteArrows {
            target: FiniteGroupoid::cyclic_group(2),
            arrows,
        };
        let ext = mon_extend(&pre, &data).unwrap();
        assert_eq!(ext.object_image("*"), Some(&"*".to_string()));
        let w = MonodromyWord::finite("*", &["r1", "r1"]);
        assert_eq!(
            ext.apply(&pre, &w).unwrap(),
            ExtensionImage::Finite { arrow: "r0".into() }
        );
        let w = MonodromyWord::finite("*", &["r1", "r2"]);
        assert_eq!(
            ext.apply(&pre, &w).unwrap(),
            ExtensionImage::Finite { arrow: "r1".into() }
        );
    }

    #[test]
    fn full_carriers_project_bijectively() {
        let pre = c4_full();
        let report =
            star_projection_check(&pre, &StarBase::Finite { object: "*".into() }, 8).unwrap();
        assert_eq!(report.star_sampled, 4);
        assert_eq!(report.star_reached, 4);
        assert!(report.surjective);
        assert_eq!(report.identity_fiber_classes, 1);
        assert_eq!(report.undecided_pairs, 0);
        assert!(report.bijective_on_sample);
    }

    #[test]
    fn line_fibers_project_bijectively() {
        let pre = p1();
        let report =
            star_projection_check(&pre, &StarBase::Bundle { x: rat(-1, 1) }, 8).unwrap();
        assert!(report.surjective);
        assert_eq!(report.identity_fiber_classes, 1);
        assert_eq!(report.undecided_pairs, 0);
        assert!(report.bijective_on_sample);
    }

    #[test]
    fn circle_fibers_carry_integer_winding() {
        let pre = p1();
        let report =
            star_projection_check(&pre, &StarBase::Bundle { x: Rat::one() }, 8).unwrap();
        assert_eq!(report.star_sampled, 8);
        assert_eq!(report.star_reached, 8);
        assert!(report.surjective);
        assert_eq!(report.identity_fiber_classes, 7);
        assert_eq!(report.undecided_pairs, 0);
        assert!(!report.bijective_on_sample);
        assert_eq!(report.fiber_witnesses.len(), 7);
    }

    #[test]
    fn collapsed_windows_lose_surjectivity() {
        let m = p1_model().with_collapsed_window(Rat::zero()).unwrap();
        let pre = Pregroupoid::window(Model::QuotientBundle(m));
        let report =
            star_projection_check(&pre, &StarBase::Bundle { x: Rat::one() }, 8).unwrap();
        assert_eq!(report.star_reached, 1);
        assert!(!report.surjective);
        assert_eq!(report.identity_fiber_classes, 1);
        assert!(!report.bijective_on_sample);
    }

    #[test]
    fn chart_stars_report_honest_fibers() {
        let pre = mobius();
        let report = star_projection_check(
            &pre,
            &StarBase::Chart {
                chart: "c0".into(),
                x: Rat::zero(),
            },
            4,
        )
        .unwrap();
        assert!(report.star_reached >= 4);
        assert_eq!(report.identity_fiber_classes, 1);
        assert!(report.undecided_pairs >= 1);
        assert!(!report.bijective_on_sample);
    }

    #[test]
    fn star_checks_validate_their_base() {
        let pre = c4_full();
        assert_eq!(
            star_projection_check(&pre, &StarBase::Finite { object: "z".into() }, 4)
                .unwrap_err(),
            MonError::UnknownObject("z".into())
        );
        let pre = mobius();
        assert_eq!(
            star_projection_check(
                &pre,
                &StarBase::Chart {
                    chart: "c9".into(),
                    x: Rat::zero(),
                },
                4,
            )
            .unwrap_err(),
            MonError::UnknownChart("c9".into())
        );
        assert_eq!(
            star_projection_check(
                &pre,
                &StarBase::Chart {
                    chart: "c0".into(),
                    x: Rat::int(2),
                },
                4,
            )
            .unwrap_err(),
            MonError::OutsideTransversal { x: Rat::int(2) }
        );
    }

    #[test]
    fn bounded_congruence_matches_the_search() {
        // Full carrier: every word contracts to a single arrow.
        let pre = c4_full();
        let classes = congruence_classes(&pre, "*", 3).unwrap();
        assert_eq!(classes.len(), 4);

        // Thin carrier: classes are ranked by the net generator count,
        // and the bounded search agrees with the brute-force classes on
        // every pair of short words.
        let pre = c4_thin();
        let classes = congruence_classes(&pre, "*", 3).unwrap();
        assert_eq!(classes.len(), 7);
        let mut class_of: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        for (i, class) in classes.iter().enumerate() {
            for w in class {
                if let MonodromyWord::Finite { letters, .. } = w {
                    class_of.insert(letters.clone(), i);
                }
            }
        }
        let words: Vec<MonodromyWord> = class_of
            .keys()
            .filter(|ls| ls.len() <= 2)
            .map(|ls| MonodromyWord::Finite {
                base: "*".into(),
                letters: ls.clone(),
                reduced: false,
            })
            .collect();
        for a in &words {
            for b in &words {
                let verdict = mon_equal(&pre, a, b, 32).unwrap();
                let same = match (a, b) {
                    (
                        MonodromyWord::Finite { letters: la, .. },
                        MonodromyWord::Finite { letters: lb, .. },
                    ) => class_of[la] == class_of[lb],
                    _ => unreachable!(),
                };
                let ambient_same =
                    ambient_product(&pre, a).unwrap() == ambient_product(&pre, b).unwrap();
                let expected = if same {
                    MonEquality::Equal
                } else if ambient_same {
                    MonEquality::Unknown
                } else {
                    MonEquality::Distinct
                };
                assert_eq!(verdict, expected, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn congruence_classes_need_a_finite_carrier() {
        assert_eq!(
            congruence_classes(&p1(), "*", 2).unwrap_err(),
            MonError::FamilyMismatch
        );
    }

    proptest! {
        /// Reduction never moves a word off its ambient arrow.
        #[test]
        fn prop_reduce_preserves_the_ambient_product(
            xi in 0usize..3,
            raw in proptest::collection::vec(-3i64..=3, 0..6),
        ) {
            let xs = [rat(-1, 1), Rat::zero(), Rat::one()];
            let x = xs[xi].clone();
            let pre = p1();
            let w = bword(x, &raw.iter().map(|i| rat(*i, 16)).collect::<Vec<_>>());
            let r = mon_reduce(&pre, &w).unwrap();
            prop_assert_eq!(
                ambient_product(&pre, &w).unwrap(),
                ambient_product(&pre, &r).unwrap()
            );
        }

        /// Reduction is a fixpoint: reducing twice changes nothing.
        #[test]
        fn prop_reduce_is_a_fixpoint(
            xi in 0usize..3,
            raw in proptest::collection::vec(-3i64..=3, 0..6),
        ) {
            let xs = [rat(-1, 1), Rat::zero(), Rat::one()];
            let x = xs[xi].clone();
            let pre = p1();
            let w = bword(x, &raw.iter().map(|i| rat(*i, 16)).collect::<Vec<_>>());
            let once = mon_reduce(&pre, &w).unwrap();
            let twice = mon_reduce(&pre, &once).unwrap();
            prop_assert!(once.same_letters(&twice));
        }

        /// The comparison never depends on the order of its arguments.
        #[test]
        fn prop_equal_is_symmetric(
            xi in 0usize..3,
            raw_a in proptest::collection::vec(-3i64..=3, 0..5),
            raw_b in proptest::collection::vec(-3i64..=3, 0..5),
        ) {
            let xs = [rat(-1, 1), Rat::zero(), Rat::one()];
            let x = xs[xi].clone();
            let pre = p1();
            let a = bword(x.clone(), &raw_a.iter().map(|i| rat(*i, 16)).collect::<Vec<_>>());
            let b = bword(x, &raw_b.iter().map(|i| rat(*i, 16)).collect::<Vec<_>>());
            prop_assert_eq!(
                mon_equal(&pre, &a, &b, 8).unwrap(),
                mon_equal(&pre, &b, &a, 8).unwrap()
            );
        }

        /// Words judged equal share every invariant; words judged
        /// distinct differ in one.
        #[test]
        fn prop_verdicts_track_the_invariants(
            xi in 0usize..3,
            raw_a in proptest::collection::vec(-3i64..=3, 0..5),
            raw_b in proptest::collection::vec(-3i64..=3, 0..5),
        ) {
            let xs = [rat(-1, 1), Rat::zero(), Rat::one()];
            let x = xs[xi].clone();
            let pre = p1();
            let a = bword(x.clone(), &raw_a.iter().map(|i| rat(*i, 16)).collect::<Vec<_>>());
            let b = bword(x, &raw_b.iter().map(|i| rat(*i, 16)).collect::<Vec<_>>());
            let ambient_same =
                ambient_product(&pre, &a).unwrap() == ambient_product(&pre, &b).unwrap();
            let totals_same = germ_sum(&a) == germ_sum(&b);
            match mon_equal(&pre, &a, &b, 8).unwrap() {
                MonEquality::Equal => {
                    prop_assert!(ambient_same);
                    prop_assert!(totals_same);
                }
                MonEquality::Distinct => {
                    prop_assert!(!ambient_same || !totals_same);
                }
                MonEquality::Unknown => {}
            }
        }

        /// Finite reduction also respects the ambient product.
        #[test]
        fn prop_finite_reduce_preserves_the_product(
            raw in proptest::collection::vec(0usize..4, 0..6),
        ) {
            let pre = c4_full();
            let letters: Vec<String> = raw.iter().map(|i| format!("r{i}")).collect();
            let w = MonodromyWord::Finite {
                base: "*".into(),
                letters,
                reduced: false,
            };
            let r = mon_reduce(&pre, &w).unwrap();
            prop_assert_eq!(
                ambient_product(&pre, &w).unwrap(),
                ambient_product(&pre, &r).unwrap()
            );
            prop_assert!(r.len() <= 1);
        }
    }
}
