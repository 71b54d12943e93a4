//! Germs of section words, their composition groupoid, and holonomy.
//!
//! A section word names an arrow-valued map; near a base point it is fully
//! described by a small exact datum: the germ of its cached product together
//! with the germ of the modulus (quotient bundles), or the germ of the
//! composed partial map with its chart endpoints (chart complexes). Germs
//! compose and invert like arrows; evaluating the word at the base point is
//! the *final map* onto the model's own arrows.
//!
//! Germs over identity arrows that stay inside the window sheet form the
//! identity ideal `J0`; quotienting by it yields holonomy classes. This
//! module decides germ equality and `J0` membership exactly, classifies the
//! holonomy kernel over a point (trivial, free cyclic, or finite cyclic,
//! with a generating witness), maps window elements to classes through a
//! word (`chart_map`) with the accompanying transition computation, decides
//! whether the window generates all arrows, decides extendibility from the
//! kernels, audits the normality laws on seeded random data, and lifts
//! finite groupoid morphisms through window-generated covers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::germ::{Germ1D, SmoothnessClass};
use crate::groupoid::{FiniteGroupoid, GroupoidMorphism, MorphismDefect};
use crate::interval::OpenSet1D;
use crate::models::{
    AxiomWitness, ChartComplexModel, Model, Obstruction, QuotientBundleModel, WRepresentative,
};
use crate::pl::{Affine, PLFunction};
use crate::rat::Rat;
use crate::sections::{AdmissibleSection, ArrowValue, ProductCache, SectionError, SectionWord};

/// Why a germ-level operation could not produce an answer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HolError {
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error("the word's domain misses {0}, so it has no germ there")]
    OutsideDomain(Rat),
    #[error("germs do not chain: the first ends at {expected}, the next sits at {got}")]
    NotComposable { expected: Rat, got: Rat },
    #[error("bundle germs and chart germs cannot be combined")]
    FamilyMismatch,
    #[error("the classes sit at different source points and cannot be compared")]
    SourceMismatch,
    #[error("the fiber window degenerates beside {x}; holonomy is undefined there")]
    WindowCollapse { x: Rat },
    #[error("no chart transversal contains {0}")]
    NoChartAt(Rat),
    #[error("unknown chart {0:?}")]
    UnknownChart(String),
    #[error("chart {chart:?} has no identity edge germ at {x}")]
    NoIdentityEdge { chart: String, x: Rat },
    #[error("the element leaves every admissible overlap near {x}")]
    OutOfOverlap { x: Rat },
    #[error("classification did not stabilize within word depth {depth}")]
    DepthExceeded { depth: u32 },
    #[error(
        "the self-gluing germs of chart {chart:?} at {at} do not close under \
         composition, so the complex does not present a groupoid there"
    )]
    SelfGermsNotClosed { chart: String, at: Rat },
}

/// The exact local datum of a word near its base point.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GermDatum {
    /// The cached fiber shift and the modulus, both as germs.
    Bundle { cache: Germ1D, modulus: Box<Germ1D> },
    /// The composed partial map between two charts, as a germ.
    Chart { src: String, dst: String, map: Germ1D },
}

/// A section word together with its germ at a base point.
///
/// Two values name the same germ exactly when [`same_germ`] says so; the
/// word is kept as a certificate, not as the identity of the germ.
#[derive(Debug, Clone, Serialize)]
pub struct GermClass {
    word: SectionWord,
    base: Rat,
    datum: GermDatum,
}

impl GermClass {
    /// The germ of `word` at `base`.
    pub fn of(model: &Model, word: &SectionWord, base: &Rat) -> Result<GermClass, HolError> {
        if !word.domain().contains(base) {
            return Err(HolError::OutsideDomain(base.clone()));
        }
        let datum = match (model, word.cache()) {
            (Model::QuotientBundle(m), ProductCache::Bundle { f }) => {
                let cache =
                    Germ1D::of(f, base).ok_or_else(|| HolError::OutsideDomain(base.clone()))?;
                let modulus = Germ1D::of(m.profile().as_function(), base)
                    .expect("the modulus is defined on the whole line");
                GermDatum::Bundle {
                    cache,
                    modulus: Box::new(modulus),
                }
            }
            (Model::ChartComplex(_), ProductCache::Chart { src, dst, map }) => {
                let germ = Germ1D::of(map.as_function(), base)
                    .ok_or_else(|| HolError::OutsideDomain(base.clone()))?;
                GermDatum::Chart {
                    src: src.clone(),
                    dst: dst.clone(),
                    map: germ,
                }
            }
            _ => return Err(HolError::FamilyMismatch),
        };
        Ok(GermClass {
            word: word.clone(),
            base: base.clone(),
            datum,
        })
    }

    /// The identity germ at `base`: the zero cache for bundles, the germ of
    /// an identity edge for chart complexes (through the first chart whose
    /// transversal contains `base`).
    pub fn identity_at(model: &Model, base: &Rat) -> Result<GermClass, HolError> {
        match model {
            Model::QuotientBundle(_) => {
                let word = SectionWord::identity(OpenSet1D::line())?;
                GermClass::of(model, &word, base)
            }
            Model::ChartComplex(m) => {
                let chart = m
                    .charts()
                    .iter()
                    .find(|c| c.transversal.contains(base))
                    .map(|c| c.id.clone())
                    .ok_or_else(|| HolError::NoChartAt(base.clone()))?;
                GermClass::chart_identity_at(model, &chart, base)
            }
        }
    }

    /// The identity germ at `base` seen in a specific chart: the germ of a
    /// self-edge whose map is the identity near `base`.
    pub fn chart_identity_at(model: &Model, chart: &str, base: &Rat) -> Result<GermClass, HolError> {
        let m = model.as_chart_complex().ok_or(HolError::FamilyMismatch)?;
        for e in m.edges() {
            if e.src != chart || e.dst != chart {
                continue;
            }
            if let Some(g) = Germ1D::of(e.map.as_function(), base) {
                if is_identity_germ(&g) {
                    let section = AdmissibleSection::through_edge_germ(m, &e.id, base)?;
                    let word = SectionWord::from_section(section);
                    return GermClass::of(model, &word, base);
                }
            }
        }
        Err(HolError::NoIdentityEdge {
            chart: chart.to_owned(),
            x: base.clone(),
        })
    }

    pub fn word(&self) -> &SectionWord {
        &self.word
    }

    pub fn base(&self) -> &Rat {
        &self.base
    }

    pub fn datum(&self) -> &GermDatum {
        &self.datum
    }

    /// Where the word's base map sends the base point: the base itself for
    /// bundles, the composed map's value for chart complexes.
    pub fn target(&self) -> Rat {
        match &self.datum {
            GermDatum::Bundle { .. } => self.base.clone(),
            GermDatum::Chart { map, .. } => {
                map.value.clone().expect("chart germs carry a value")
            }
        }
    }
}

/// The germ of the product word `a · b`, defined when `b` sits where `a`'s
/// base map lands (and in the chart `a` ends in).
pub fn germ_compose(model: &Model, a: &GermClass, b: &GermClass) -> Result<GermClass, HolError> {
    match (&a.datum, &b.datum) {
        (GermDatum::Bundle { .. }, GermDatum::Bundle { .. }) => {}
        (GermDatum::Chart { .. }, GermDatum::Chart { .. }) => {}
        _ => return Err(HolError::FamilyMismatch),
    }
    let expected = a.target();
    if b.base != expected {
        return Err(HolError::NotComposable {
            expected,
            got: b.base.clone(),
        });
    }
    let word = a.word.product(&b.word)?;
    GermClass::of(model, &word, &a.base)
}

/// The germ of the inverse word, based where `a` lands.
pub fn germ_inverse(model: &Model, a: &GermClass) -> Result<GermClass, HolError> {
    let word = a.word.inverse();
    GermClass::of(model, &word, &a.target())
}

/// Evaluates the germ's word at its base point, landing in the model's own
/// arrows.
pub fn final_map(a: &GermClass) -> Result<ArrowValue, HolError> {
    Ok(a.word.eval(&a.base)?)
}

/// Germ equality: the words agree as arrow-valued maps on a neighborhood of
/// the (shared) base point.
///
/// For bundles that means the cache difference is one integer multiple of
/// the modulus on each side (and vanishes where the modulus vanishes); for
/// chart complexes it is equality of the composed map germs with matching
/// endpoints.
pub fn same_germ(a: &GermClass, b: &GermClass) -> bool {
    if a.base != b.base {
        return false;
    }
    match (&a.datum, &b.datum) {
        (
            GermDatum::Bundle {
                cache: ca,
                modulus: na,
            },
            GermDatum::Bundle {
                cache: cb,
                modulus: nb,
            },
        ) => na == nb && caches_name_one_germ(ca, cb, na),
        (
            GermDatum::Chart {
                src: sa,
                dst: da,
                map: ma,
            },
            GermDatum::Chart {
                src: sb,
                dst: db,
                map: mb,
            },
        ) => sa == sb && da == db && ma == mb,
        _ => false,
    }
}

fn caches_name_one_germ(ca: &Germ1D, cb: &Germ1D, n: &Germ1D) -> bool {
    let base = &ca.base;
    let d = ca.sub(cb);
    let nu = n.value.clone().expect("the modulus is defined everywhere");
    let dv = d.value.clone().expect("cache germs are two-sided");
    let point_ok = if nu.is_positive() {
        (dv / nu).is_integer()
    } else {
        dv.is_zero()
    };
    point_ok
        && side_is_modulus_multiple(d.left.as_ref(), n.left.as_ref(), base)
        && side_is_modulus_multiple(d.right.as_ref(), n.right.as_ref(), base)
}

/// Whether the one-sided difference `d` equals `k · n` for a single integer
/// `k` (with `d ≡ 0` required where `n ≡ 0`).
fn side_is_modulus_multiple(d: Option<&Affine>, n: Option<&Affine>, base: &Rat) -> bool {
    let (Some(d), Some(n)) = (d, n) else {
        return false;
    };
    let lam = n.eval(base);
    let k = if !lam.is_zero() {
        &d.eval(base) / &lam
    } else if !n.slope.is_zero() {
        if !d.eval(base).is_zero() {
            return false;
        }
        &d.slope / &n.slope
    } else {
        return d.slope.is_zero() && d.eval(base).is_zero();
    };
    k.is_integer() && n.scale(&k) == *d
}

/// Positive evidence for (or against) membership in the identity ideal.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum J0Witness {
    /// A windowed representative of the cache germ exists.
    Representative { rep: Box<WRepresentative> },
    /// The word's value is not an identity arrow.
    NotIdentityArrow { value: ArrowValue },
    /// The cache germ admits no windowed representative.
    Obstructed { obstruction: Obstruction },
    /// The composed map germ is carried by an edge of the complex.
    MatchesEdge { edge: String },
    /// No edge with the word's endpoints carries the composed map germ.
    NoEdgeMatch { at: Rat },
}

/// The answer to an identity-ideal membership query, with its evidence.
#[derive(Debug, Clone, Serialize)]
pub struct J0Verdict {
    pub holds: bool,
    pub witness: J0Witness,
}

/// Membership in `J0`: the word evaluates to the identity arrow at the base
/// point *and* its germ is the germ of a section into the window sheet.
pub fn in_j0(model: &Model, a: &GermClass) -> Result<J0Verdict, HolError> {
    match (model, &a.datum) {
        (Model::QuotientBundle(m), GermDatum::Bundle { cache, .. }) => {
            let value = cache.value.clone().expect("cache germs are two-sided");
            if !m.is_identity_arrow(&a.base, &value) {
                return Ok(J0Verdict {
                    holds: false,
                    witness: J0Witness::NotIdentityArrow {
                        value: ArrowValue::Bundle {
                            x: a.base.clone(),
                            t: value,
                        },
                    },
                });
            }
            let f = a.word.cache_function().expect("bundle words carry a cache");
            match m.w_representative(f, &a.base) {
                Ok(rep) => Ok(J0Verdict {
                    holds: true,
                    witness: J0Witness::Representative { rep: Box::new(rep) },
                }),
                Err(obstruction) => Ok(J0Verdict {
                    holds: false,
                    witness: J0Witness::Obstructed { obstruction },
                }),
            }
        }
        (Model::ChartComplex(m), GermDatum::Chart { src, dst, map }) => {
            let value = map.value.clone().expect("chart germs carry a value");
            if src != dst || value != a.base {
                return Ok(J0Verdict {
                    holds: false,
                    witness: J0Witness::NotIdentityArrow {
                        value: ArrowValue::Chart {
                            src: src.clone(),
                            dst: dst.clone(),
                            x: a.base.clone(),
                            y: value,
                        },
                    },
                });
            }
            match carrying_edge(m, src, dst, map, &a.base) {
                Some(edge) => Ok(J0Verdict {
                    holds: true,
                    witness: J0Witness::MatchesEdge { edge },
                }),
                None => Ok(J0Verdict {
                    holds: false,
                    witness: J0Witness::NoEdgeMatch { at: a.base.clone() },
                }),
            }
        }
        _ => Err(HolError::FamilyMismatch),
    }
}

pub(crate) fn carrying_edge(
    m: &ChartComplexModel,
    src: &str,
    dst: &str,
    germ: &Germ1D,
    at: &Rat,
) -> Option<String> {
    m.edges()
        .iter()
        .find(|e| {
            e.src == src
                && e.dst == dst
                && Germ1D::of(e.map.as_function(), at).as_ref() == Some(germ)
        })
        .map(|e| e.id.clone())
}

/// A holonomy class: a germ up to the identity ideal.
#[derive(Debug, Clone, Serialize)]
pub struct HolClass {
    repr: GermClass,
}

impl HolClass {
    pub fn new(repr: GermClass) -> HolClass {
        HolClass { repr }
    }

    pub fn representative(&self) -> &GermClass {
        &self.repr
    }

    pub fn base(&self) -> &Rat {
        self.repr.base()
    }
}

/// Whether two classes over the same source point are equal: their targets
/// agree and the difference germ lies in `J0`.
pub fn hol_equal(model: &Model, a: &HolClass, b: &HolClass) -> Result<bool, HolError> {
    let (ga, gb) = (&a.repr, &b.repr);
    if ga.base != gb.base {
        return Err(HolError::SourceMismatch);
    }
    match (&ga.datum, &gb.datum) {
        (GermDatum::Bundle { .. }, GermDatum::Bundle { .. }) => {}
        (
            GermDatum::Chart {
                src: sa, dst: da, ..
            },
            GermDatum::Chart {
                src: sb, dst: db, ..
            },
        ) => {
            if sa != sb {
                return Err(HolError::SourceMismatch);
            }
            if da != db || ga.target() != gb.target() {
                return Ok(false);
            }
        }
        _ => return Err(HolError::FamilyMismatch),
    }
    let difference = germ_compose(model, ga, &germ_inverse(model, gb)?)?;
    Ok(in_j0(model, &difference)?.holds)
}

/// The isomorphism type of a holonomy kernel over one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    Trivial,
    FreeCyclic,
    Cyclic { order: u64 },
    /// A finite group listed by exhaustive loop enumeration but not cyclic.
    FiniteListed { order: u64 },
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::Trivial => write!(f, "trivial"),
            KernelKind::FreeCyclic => write!(f, "Z"),
            KernelKind::Cyclic { order } => write!(f, "Z/{order}"),
            KernelKind::FiniteListed { order } => write!(f, "finite of order {order}"),
        }
    }
}

/// The holonomy kernel over a point, with a generating (or witnessing)
/// class when one can be materialized as a word.
#[derive(Debug, Clone, Serialize)]
pub struct KernelDescriptor {
    pub at: Rat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    pub kind: KernelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<HolClass>,
}

/// Classifies the holonomy kernel over `x`.
///
/// Bundles are decided exactly from the modulus germ; chart complexes are
/// decided by loop enumeration up to `depth` edges (the first chart whose
/// transversal contains `x` hosts the loops).
pub fn kernel_at(model: &Model, x: &Rat, depth: u32) -> Result<KernelDescriptor, HolError> {
    match model {
        Model::QuotientBundle(m) => bundle_kernel(model, m, x),
        Model::ChartComplex(m) => {
            let chart = m
                .charts()
                .iter()
                .find(|c| c.transversal.contains(x))
                .map(|c| c.id.clone())
                .ok_or_else(|| HolError::NoChartAt(x.clone()))?;
            chart_kernel(model, m, &chart, x, depth)
        }
    }
}

/// Like [`kernel_at`], but with the hosting chart chosen by the caller.
pub fn kernel_at_chart(
    model: &Model,
    chart: &str,
    x: &Rat,
    depth: u32,
) -> Result<KernelDescriptor, HolError> {
    let m = model.as_chart_complex().ok_or(HolError::FamilyMismatch)?;
    let c = m
        .chart(chart)
        .ok_or_else(|| HolError::UnknownChart(chart.to_owned()))?;
    if !c.transversal.contains(x) {
        return Err(HolError::OutsideDomain(x.clone()));
    }
    chart_kernel(model, m, chart, x, depth)
}

/// The exact bundle classification.
///
/// Write `ν = n(x)`, `λ` for the left limit of the modulus and `η_l`, `η_r`
/// for its one-sided slopes at `x` (the right side always carries the point
/// value). Identity-arrow germs have a single complete value invariant —
/// the left cache limit inside `νℤ`, read modulo `λℤ` — together with, in
/// the differentiable class, one slope defect. That yields:
///
/// * `ν = 0`: only the zero class — trivial.
/// * `ν > 0`, `λ = 0`: the value invariant ranges over `νℤ` — free cyclic.
/// * `ν > 0`, `λ > 0`: the value invariant lives in `ℤ/p` with
///   `p = lcm(λ, ν)/ν`; in class `C0` that is everything, while in class
///   `C1` a nonzero slope defect (`ν·η_l ≠ λ·η_r`) unrolls the torsion into
///   a free cyclic group.
///
/// The generator in every nontrivial case is the constant word carrying the
/// total shift `ν` split into enough in-window factors.
fn bundle_kernel(
    model: &Model,
    m: &QuotientBundleModel,
    x: &Rat,
) -> Result<KernelDescriptor, HolError> {
    let lo = Germ1D::of(m.window_lo(), x).expect("the window is defined on the whole line");
    let hi = Germ1D::of(m.window_hi(), x).expect("the window is defined on the whole line");
    let window_side_ok = |l: Option<Rat>, h: Option<Rat>| {
        matches!((l, h), (Some(l), Some(h)) if l.is_negative() && h.is_positive())
    };
    if !window_side_ok(lo.left_limit(), hi.left_limit())
        || !window_side_ok(lo.right_limit(), hi.right_limit())
    {
        return Err(HolError::WindowCollapse { x: x.clone() });
    }

    let n = Germ1D::of(m.profile().as_function(), x).expect("the modulus is total");
    let nu = n.value.clone().expect("the modulus is total");
    let kind = if nu.is_zero() {
        KernelKind::Trivial
    } else {
        let left = n.left.clone().expect("the modulus is total");
        let right = n.right.clone().expect("the modulus is total");
        let lam = left.eval(x);
        if lam.is_zero() {
            KernelKind::FreeCyclic
        } else {
            let p = Rat::lattice_lcm(&lam, &nu) / nu.clone();
            debug_assert!(p.is_integer() && p.is_positive());
            let order = p.floor_i64() as u64;
            let torsion = if order == 1 {
                KernelKind::Trivial
            } else {
                KernelKind::Cyclic { order }
            };
            match m.smoothness() {
                SmoothnessClass::C0 => torsion,
                SmoothnessClass::C1 => {
                    if &nu * &left.slope == &lam * &right.slope {
                        torsion
                    } else {
                        KernelKind::FreeCyclic
                    }
                }
            }
        }
    };
    let generator = match kind {
        KernelKind::Trivial => GermClass::identity_at(model, x)?,
        _ => winding_word_germ(model, m, x, &nu)?,
    };
    Ok(KernelDescriptor {
        at: x.clone(),
        chart: None,
        kind,
        generator: Some(HolClass::new(generator)),
    })
}

/// The word that carries the constant total shift `ν` across the fiber at
/// `x` in the fewest in-window constant factors.
fn winding_word_germ(
    model: &Model,
    m: &QuotientBundleModel,
    x: &Rat,
    nu: &Rat,
) -> Result<GermClass, HolError> {
    let (lo, hi) = m.window_at(x);
    let theta = hi.min(-&lo);
    debug_assert!(theta.is_positive());
    let folds = (nu / &theta).floor_i64() + 1;
    let step = nu / &Rat::int(folds);
    let comp = m
        .constant_section_region(&step)
        .component_of(x)
        .cloned()
        .ok_or_else(|| HolError::WindowCollapse { x: x.clone() })?;
    let domain = OpenSet1D::interval(comp);
    let section =
        AdmissibleSection::cache(domain.clone(), &PLFunction::constant(domain, step))?;
    let word = SectionWord::from_section(section).pow(folds as u32)?;
    GermClass::of(model, &word, x)
}

/// Loop enumeration for chart complexes: breadth-first over composable edge
/// paths out of `(chart, x)`, keeping the exact composite map germ per
/// state, then quotienting the loops by the self-gluing germs.
fn chart_kernel(
    model: &Model,
    m: &ChartComplexModel,
    chart: &str,
    x: &Rat,
    depth: u32,
) -> Result<KernelDescriptor, HolError> {
    // The germs of self-edges fixing x are exactly the identity classes; the
    // quotient is well defined only when they form a group.
    let mut idle: Vec<Germ1D> = m
        .edges()
        .iter()
        .filter(|e| e.src == chart && e.dst == chart)
        .filter_map(|e| Germ1D::of(e.map.as_function(), x))
        .filter(|g| g.value.as_ref() == Some(x) && g.left.is_some() && g.right.is_some())
        .collect();
    let id_germ = identity_germ(x);
    if !idle.contains(&id_germ) {
        idle.push(id_germ.clone());
    }
    for a in &idle {
        let inv = invert_map_germ(a);
        if !idle.contains(&inv) {
            return Err(HolError::SelfGermsNotClosed {
                chart: chart.to_owned(),
                at: x.clone(),
            });
        }
        for b in &idle {
            let c = compose_map_germs(b, a);
            if !idle.contains(&c) {
                return Err(HolError::SelfGermsNotClosed {
                    chart: chart.to_owned(),
                    at: x.clone(),
                });
            }
        }
    }

    // Path states: (current chart, composite germ at x). The empty path is a
    // loop with the identity germ and no word.
    let mut visited: Vec<(String, Germ1D)> = vec![(chart.to_owned(), id_germ.clone())];
    let mut loops: Vec<(Germ1D, Option<SectionWord>)> = vec![(id_germ.clone(), None)];
    let mut frontier: Vec<(String, Germ1D, Option<SectionWord>)> =
        vec![(chart.to_owned(), id_germ, None)];
    let mut exhausted = false;
    for _ in 0..depth {
        let mut next = Vec::new();
        for (at_chart, germ, word) in &frontier {
            let v = germ.value.clone().expect("path germs carry a value");
            for e in m.edges() {
                if &e.src != at_chart {
                    continue;
                }
                let Some(edge_germ) = Germ1D::of(e.map.as_function(), &v) else {
                    continue;
                };
                if edge_germ.value.is_none()
                    || edge_germ.left.is_none()
                    || edge_germ.right.is_none()
                {
                    continue;
                }
                let new_germ = compose_map_germs(&edge_germ, germ);
                let edge_word =
                    SectionWord::from_section(AdmissibleSection::through_edge_germ(m, &e.id, &v)?);
                let new_word = match word {
                    None => edge_word,
                    Some(w) => w.product(&edge_word)?,
                };
                if e.dst == chart
                    && new_germ.value.as_ref() == Some(x)
                    && !loops.iter().any(|(g, _)| g == &new_germ)
                {
                    loops.push((new_germ.clone(), Some(new_word.clone())));
                }
                let state = (e.dst.clone(), new_germ);
                if !visited.contains(&state) {
                    visited.push(state.clone());
                    next.push((state.0, state.1, Some(new_word)));
                }
            }
        }
        if next.is_empty() {
            exhausted = true;
            break;
        }
        frontier = next;
    }
    if !exhausted {
        return Err(HolError::DepthExceeded { depth });
    }

    // Quotient the loop germs by the idle group.
    let same_class = |g: &Germ1D, h: &Germ1D| {
        let d = compose_map_germs(&invert_map_germ(h), g);
        is_identity_germ(&d) || idle.contains(&d)
    };
    let mut reps: Vec<(Germ1D, Option<SectionWord>)> = Vec::new();
    for (g, w) in &loops {
        if !reps.iter().any(|(r, _)| same_class(g, r)) {
            reps.push((g.clone(), w.clone()));
        }
    }

    let order = reps.len();
    let class_of = |g: &Germ1D| reps.iter().position(|(r, _)| same_class(g, r));
    let mut table = vec![vec![0usize; order]; order];
    for i in 0..order {
        for j in 0..order {
            let prod = compose_map_germs(&reps[j].0, &reps[i].0);
            table[i][j] = class_of(&prod).ok_or(HolError::DepthExceeded { depth })?;
        }
    }
    let identity_idx = class_of(&identity_germ(x)).expect("the identity loop is always present");
    let cyclic_generator = (0..order).find(|&c| {
        let mut seen = BTreeSet::new();
        let mut cur = identity_idx;
        for _ in 0..order {
            cur = table[cur][c];
            seen.insert(cur);
        }
        seen.len() == order
    });

    let kind = if order == 1 {
        KernelKind::Trivial
    } else {
        match cyclic_generator {
            Some(_) => KernelKind::Cyclic {
                order: order as u64,
            },
            None => KernelKind::FiniteListed {
                order: order as u64,
            },
        }
    };
    let generator_word = match kind {
        KernelKind::Trivial => None,
        _ => {
            let c = cyclic_generator
                .filter(|&c| c != identity_idx)
                .or_else(|| (0..order).find(|&i| i != identity_idx));
            c.and_then(|i| reps[i].1.clone())
        }
    };
    let generator = match (&kind, generator_word) {
        (KernelKind::Trivial, _) => GermClass::chart_identity_at(model, chart, x)
            .ok()
            .map(HolClass::new),
        (_, Some(word)) => Some(HolClass::new(GermClass::of(model, &word, x)?)),
        (_, None) => None,
    };
    Ok(KernelDescriptor {
        at: x.clone(),
        chart: Some(chart.to_owned()),
        kind,
        generator,
    })
}

pub(crate) fn identity_germ(base: &Rat) -> Germ1D {
    Germ1D {
        base: base.clone(),
        value: Some(base.clone()),
        left: Some(Affine::identity()),
        right: Some(Affine::identity()),
    }
}

pub(crate) fn is_identity_germ(g: &Germ1D) -> bool {
    g.value.as_ref() == Some(&g.base)
        && g.left.as_ref() == Some(&Affine::identity())
        && g.right.as_ref() == Some(&Affine::identity())
}

/// The germ at `inner`'s base of `outer ∘ inner`, where `inner` lands at
/// `outer`'s base. Sides are routed by the sign of `inner`'s one-sided
/// slopes (an orientation-reversing side crosses over).
pub(crate) fn compose_map_germs(outer: &Germ1D, inner: &Germ1D) -> Germ1D {
    debug_assert_eq!(inner.value.as_ref(), Some(&outer.base));
    let left = inner.left.as_ref().map(|il| {
        let o = if il.slope.is_positive() {
            outer.left.as_ref()
        } else {
            outer.right.as_ref()
        };
        o.expect("homeomorphism germs are two-sided").compose(il)
    });
    let right = inner.right.as_ref().map(|ir| {
        let o = if ir.slope.is_positive() {
            outer.right.as_ref()
        } else {
            outer.left.as_ref()
        };
        o.expect("homeomorphism germs are two-sided").compose(ir)
    });
    Germ1D {
        base: inner.base.clone(),
        value: outer.value.clone(),
        left,
        right,
    }
}

/// The germ of the inverse map, based where `g` lands.
pub(crate) fn invert_map_germ(g: &Germ1D) -> Germ1D {
    let base = g.value.clone().expect("map germs carry a value");
    let gl = g.left.as_ref().expect("map germs are two-sided");
    let gr = g.right.as_ref().expect("map germs are two-sided");
    let inv = |a: &Affine| a.invert().expect("homeomorphism germs have nonzero slope");
    let (left, right) = if gr.slope.is_positive() {
        (inv(gl), inv(gr))
    } else {
        (inv(gr), inv(gl))
    };
    Germ1D {
        base,
        value: Some(g.base.clone()),
        left: Some(left),
        right: Some(right),
    }
}

/// A window element: an arrow named by window data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WElement {
    /// The class of `(x, t)` in a quotient bundle, `t` in the window set.
    Bundle { x: Rat, t: Rat },
    /// The arrow of `edge` at `x` in a chart complex.
    Chart { edge: String, x: Rat },
}

/// The chart map through the word `f`: sends a window element `w` to the
/// class of `f · σ_w`, where `σ_w` is the canonical admissible section
/// through `w`. The result does not depend on the choice of `σ_w`.
pub fn chart_map(model: &Model, f: &SectionWord, w: &WElement) -> Result<HolClass, HolError> {
    match (model, w) {
        (Model::QuotientBundle(m), WElement::Bundle { x, t }) => {
            let sw = AdmissibleSection::through_window_arrow(m, x, t)?;
            let word = f.product(&SectionWord::from_section(sw))?;
            Ok(HolClass::new(GermClass::of(model, &word, x)?))
        }
        (Model::ChartComplex(m), WElement::Chart { edge, x }) => {
            let sw = AdmissibleSection::through_edge_germ(m, edge, x)?;
            let base_map = f.transport_map().ok_or(HolError::FamilyMismatch)?;
            let x0 = base_map
                .invert()
                .eval(x)
                .ok_or_else(|| HolError::OutOfOverlap { x: x.clone() })?;
            let word = f.product(&SectionWord::from_section(sw))?;
            Ok(HolClass::new(GermClass::of(model, &word, &x0)?))
        }
        _ => Err(HolError::FamilyMismatch),
    }
}

/// The transition between the chart maps of `f` and `g`: the window element
/// `w'` with `χ_f(w') = χ_g(w)`, computed as left multiplication of `w` by
/// the section `f⁻¹ · g`.
pub fn chart_transition(
    model: &Model,
    f: &SectionWord,
    g: &SectionWord,
    w: &WElement,
) -> Result<WElement, HolError> {
    match (model, w) {
        (Model::QuotientBundle(m), WElement::Bundle { x, t }) => {
            let t0 = m
                .reduced_into_window(x, t)
                .ok_or_else(|| HolError::OutOfOverlap { x: x.clone() })?;
            let h = f.inverse().product(g)?;
            let shift = h
                .cache_function()
                .expect("bundle words carry a cache")
                .eval(x)
                .ok_or_else(|| HolError::OutOfOverlap { x: x.clone() })?;
            let moved = &t0 + &shift;
            let reduced = m
                .reduced_into_window(x, &moved)
                .ok_or_else(|| HolError::OutOfOverlap { x: x.clone() })?;
            Ok(WElement::Bundle {
                x: x.clone(),
                t: reduced,
            })
        }
        (Model::ChartComplex(m), WElement::Chart { edge, x }) => {
            let e = m
                .edge(edge)
                .ok_or_else(|| SectionError::UnknownEdge(edge.to_owned()))
                .map_err(HolError::from)?;
            let sw = SectionWord::from_section(AdmissibleSection::through_edge_germ(m, edge, x)?);
            let g_map = g.transport_map().ok_or(HolError::FamilyMismatch)?;
            let f_map = f.transport_map().ok_or(HolError::FamilyMismatch)?;
            let x0 = g_map
                .invert()
                .eval(x)
                .ok_or_else(|| HolError::OutOfOverlap { x: x.clone() })?;
            let y = f_map
                .eval(&x0)
                .ok_or_else(|| HolError::OutOfOverlap { x: x0.clone() })?;
            let word = f.inverse().product(g)?.product(&sw)?;
            let germ = GermClass::of(model, &word, &y)?;
            let GermDatum::Chart { dst, map, .. } = &germ.datum else {
                return Err(HolError::FamilyMismatch);
            };
            debug_assert_eq!(dst, &e.dst);
            let (_, f_dst) = f.chart_endpoints().ok_or(HolError::FamilyMismatch)?;
            match carrying_edge(m, f_dst, &e.dst, map, &y) {
                Some(edge) => Ok(WElement::Chart { edge, x: y }),
                None => Err(HolError::OutOfOverlap { x: y }),
            }
        }
        _ => Err(HolError::FamilyMismatch),
    }
}

/// Positive or negative evidence for window generation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenerationEvidence {
    /// A demonstration arrow factored into in-window constants.
    FiberFactorization { x: Rat, t: Rat, factors: u64 },
    /// Every chart is reachable along edges.
    OrbitReach { charts: u64 },
    /// An arrow that no product of window elements reaches.
    WindowDegenerate { x: Rat, t: Rat },
    /// A chart no edge path reaches.
    UnreachableChart { chart: String },
}

/// The generation verdict with its evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub generates: bool,
    pub evidence: GenerationEvidence,
}

/// Whether window elements generate every arrow of the model.
///
/// Bundles are decided exactly (every fiber value must be a finite sum of
/// in-window values, which fails exactly where the window margin closes);
/// chart complexes reduce to orbit reachability. `bound` caps the breadth
/// of the chart search but is never allowed below the number of charts, so
/// the answer stays definitive.
pub fn generates(model: &Model, bound: u32) -> GenerationReport {
    match model {
        Model::QuotientBundle(m) => {
            let report = m.check_axioms();
            let verdict = report
                .verdict("G5")
                .expect("bundle reports always include G5");
            if verdict.holds {
                let (x, t) = (Rat::one(), Rat::one());
                let factors = factor_count(m, &x, &t)
                    .expect("a generating window has positive margin everywhere");
                GenerationReport {
                    generates: true,
                    evidence: GenerationEvidence::FiberFactorization { x, t, factors },
                }
            } else {
                let (x, t) = match &verdict.witness {
                    Some(AxiomWitness::UngeneratedArrow { x, t }) => (x.clone(), t.clone()),
                    _ => (Rat::zero(), Rat::zero()),
                };
                GenerationReport {
                    generates: false,
                    evidence: GenerationEvidence::WindowDegenerate { x, t },
                }
            }
        }
        Model::ChartComplex(m) => {
            let charts: Vec<&str> = m.charts().iter().map(|c| c.id.as_str()).collect();
            let mut reached: BTreeSet<&str> = BTreeSet::new();
            if let Some(first) = charts.first() {
                reached.insert(first);
            }
            let levels = (bound as usize).max(charts.len());
            for _ in 0..levels {
                let mut grew = false;
                for e in m.edges() {
                    if reached.contains(e.src.as_str()) && reached.insert(e.dst.as_str()) {
                        grew = true;
                    }
                    if reached.contains(e.dst.as_str()) && reached.insert(e.src.as_str()) {
                        grew = true;
                    }
                }
                if !grew {
                    break;
                }
            }
            match charts.iter().find(|c| !reached.contains(*c)) {
                None => GenerationReport {
                    generates: true,
                    evidence: GenerationEvidence::OrbitReach {
                        charts: charts.len() as u64,
                    },
                },
                Some(stranded) => GenerationReport {
                    generates: false,
                    evidence: GenerationEvidence::UnreachableChart {
                        chart: (*stranded).to_owned(),
                    },
                },
            }
        }
    }
}

/// How many in-window constant factors the arrow `(x, t)` needs, or `None`
/// where the window margin closes.
pub fn factor_count(m: &QuotientBundleModel, x: &Rat, t: &Rat) -> Option<u64> {
    let (lo, hi) = m.window_at(x);
    let theta = hi.min(-&lo);
    if !theta.is_positive() {
        return None;
    }
    if t.is_zero() {
        return Some(1);
    }
    Some((&t.abs() / &theta).floor_i64() as u64 + 1)
}

/// The extendibility verdict: whether every holonomy kernel collapses, so
/// the window sheet's structure extends to all arrows.
#[derive(Debug, Clone, Serialize)]
pub struct ExtendibilityReport {
    pub extendible: bool,
    /// The kernels at every site that can carry one (modulus and window
    /// breakpoints for bundles, chart basepoints for complexes).
    pub sites: Vec<KernelDescriptor>,
    /// A nontrivial kernel class when not extendible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<HolClass>,
}

/// Decides extendibility by sweeping the kernel classification over every
/// site where it can be nontrivial. Bundles are exact (away from modulus
/// and window breakpoints the local data is affine and the kernel provably
/// collapses); chart complexes are checked at their basepoints up to
/// `depth`.
pub fn is_extendible(model: &Model, depth: u32) -> Result<ExtendibilityReport, HolError> {
    let mut sites = Vec::new();
    let mut obstruction: Option<HolClass> = None;
    match model {
        Model::QuotientBundle(m) => {
            let mut xs: BTreeSet<Rat> = BTreeSet::new();
            xs.extend(m.profile().as_function().interior_breakpoints());
            xs.extend(m.window_lo().interior_breakpoints());
            xs.extend(m.window_hi().interior_breakpoints());
            for x in &xs {
                let k = bundle_kernel(model, m, x)?;
                if k.kind != KernelKind::Trivial && obstruction.is_none() {
                    obstruction = k.generator.clone();
                }
                sites.push(k);
            }
        }
        Model::ChartComplex(m) => {
            for c in m.charts() {
                let k = chart_kernel(model, m, &c.id, &c.basepoint, depth)?;
                if k.kind != KernelKind::Trivial && obstruction.is_none() {
                    obstruction = k.generator.clone();
                }
                sites.push(k);
            }
        }
    }
    Ok(ExtendibilityReport {
        extendible: obstruction.is_none(),
        sites,
        obstruction,
    })
}

/// One failed law instance found by [`normality_audit`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalityFailure {
    pub law: String,
    pub at: Rat,
}

/// The audit's tally; `failures` is expected to stay empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalityReport {
    pub samples: u32,
    pub seed: u64,
    pub failures: Vec<NormalityFailure>,
}

/// Stress-tests the two closure laws of the identity ideal on seeded random
/// data: for random `σ, ρ` in the ideal and a random windowed word `τ` at a
/// random base point, `ρ · σ⁻¹` and `τ · σ · τ⁻¹` must stay in the ideal.
pub fn normality_audit(model: &Model, samples: u32, seed: u64) -> Result<NormalityReport, HolError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..samples {
        match model {
            Model::QuotientBundle(m) => {
                bundle_normality_sample(model, m, &mut rng, &mut failures)?
            }
            Model::ChartComplex(m) => chart_normality_sample(model, m, &mut rng, &mut failures)?,
        }
    }
    Ok(NormalityReport {
        samples,
        seed,
        failures,
    })
}

fn bundle_normality_sample(
    model: &Model,
    m: &QuotientBundleModel,
    rng: &mut ChaCha8Rng,
    failures: &mut Vec<NormalityFailure>,
) -> Result<(), HolError> {
    let x0 = Rat::new(rng.gen_range(-24..=24), 4);
    let delta = Rat::new(1, 2);
    let theta = window_margin(m, &x0, &delta);
    if !theta.is_positive() {
        return Ok(());
    }
    let lo_x = &x0 - &delta;
    let hi_x = &x0 + &delta;
    let domain = OpenSet1D::open(lo_x.clone(), hi_x.clone());
    let span = &hi_x - &lo_x;

    // A cache through (x0, v) staying strictly within θ/2 + |v| of v on the
    // sampled span; affine in the differentiable class, a bent polyline
    // otherwise.
    let small_cache = |v: &Rat, rng: &mut ChaCha8Rng| -> PLFunction {
        let amp = Rat::new(rng.gen_range(-7..=7), 16) * theta.clone();
        match m.smoothness() {
            SmoothnessClass::C1 => {
                let slope = &amp / &span;
                let intercept = v - &(&slope * &x0);
                PLFunction::affine(domain.clone(), Affine::new(slope, intercept))
            }
            SmoothnessClass::C0 => {
                let amp2 = Rat::new(rng.gen_range(-7..=7), 16) * theta.clone();
                PLFunction::polyline(&[
                    (lo_x.clone(), v + &amp),
                    (x0.clone(), v.clone()),
                    (hi_x.clone(), v + &amp2),
                ])
                .expect("strictly increasing nodes")
            }
        }
    };
    let zero = Rat::zero();
    let sigma = small_cache(&zero, rng);
    let rho = small_cache(&zero, rng);
    let tau_value = Rat::new(rng.gen_range(-7..=7), 16) * theta.clone();
    let tau = small_cache(&tau_value, rng);

    let word = |f: &PLFunction| -> Result<GermClass, HolError> {
        let section = AdmissibleSection::cache(domain.clone(), f)?;
        GermClass::of(model, &SectionWord::from_section(section), &x0)
    };
    let sg = word(&sigma)?;
    let rg = word(&rho)?;
    let tg = word(&tau)?;

    let difference = germ_compose(model, &rg, &germ_inverse(model, &sg)?)?;
    if !in_j0(model, &difference)?.holds {
        failures.push(NormalityFailure {
            law: "difference".to_owned(),
            at: x0.clone(),
        });
    }
    let conjugated = germ_compose(
        model,
        &germ_compose(model, &tg, &sg)?,
        &germ_inverse(model, &tg)?,
    )?;
    if !in_j0(model, &conjugated)?.holds {
        failures.push(NormalityFailure {
            law: "conjugation".to_owned(),
            at: x0,
        });
    }
    Ok(())
}

fn chart_normality_sample(
    model: &Model,
    m: &ChartComplexModel,
    rng: &mut ChaCha8Rng,
    failures: &mut Vec<NormalityFailure>,
) -> Result<(), HolError> {
    let charts = m.charts();
    if charts.is_empty() {
        return Ok(());
    }
    let chart = &charts[rng.gen_range(0..charts.len())];
    let x0 = match (
        chart.transversal.lo.as_finite(),
        chart.transversal.hi.as_finite(),
    ) {
        (Some(lo), Some(hi)) => {
            let j = Rat::new(rng.gen_range(1..=7), 8);
            lo + &(&j * &(hi - lo))
        }
        _ => chart.basepoint.clone(),
    };

    let step = |at_chart: &str, at: &Rat, rng: &mut ChaCha8Rng| -> Option<SectionWord> {
        let options: Vec<&crate::models::Edge> = m
            .edges()
            .iter()
            .filter(|e| e.src == at_chart && e.map.domain().contains(at))
            .collect();
        if options.is_empty() {
            return None;
        }
        let e = options[rng.gen_range(0..options.len())];
        let section = AdmissibleSection::through_edge_germ(m, &e.id, at).ok()?;
        Some(SectionWord::from_section(section))
    };

    // τ: one or two random transports out of the sampled point.
    let Some(first) = step(&chart.id, &x0, rng) else {
        return Ok(());
    };
    let tau = if rng.gen_bool(0.5) {
        let (_, mid_chart) = first.chart_endpoints().expect("transport word");
        let mid_chart = mid_chart.to_owned();
        let mid = first
            .transport_map()
            .expect("transport word")
            .eval(&x0)
            .expect("x0 is in the word's domain");
        match step(&mid_chart, &mid, rng) {
            Some(second) => first.product(&second)?,
            None => first,
        }
    } else {
        first
    };
    let tau_germ = GermClass::of(model, &tau, &x0)?;
    let y0 = tau_germ.target();
    let (_, tau_dst) = tau.chart_endpoints().expect("transport word");
    let tau_dst = tau_dst.to_owned();

    // σ, ρ: edge round-trips at the landing point — identity germs realized
    // by two-letter words.
    let round_trip = |rng: &mut ChaCha8Rng| -> Result<Option<GermClass>, HolError> {
        let Some(out) = step(&tau_dst, &y0, rng) else {
            return Ok(None);
        };
        let word = out.product(&out.inverse())?;
        Ok(Some(GermClass::of(model, &word, &y0)?))
    };
    let Some(sg) = round_trip(rng)? else {
        return Ok(());
    };
    let Some(rg) = round_trip(rng)? else {
        return Ok(());
    };

    let difference = germ_compose(model, &rg, &germ_inverse(model, &sg)?)?;
    if !in_j0(model, &difference)?.holds {
        failures.push(NormalityFailure {
            law: "difference".to_owned(),
            at: y0.clone(),
        });
    }
    let conjugated = germ_compose(
        model,
        &germ_compose(model, &tau_germ, &sg)?,
        &germ_inverse(model, &tau_germ)?,
    )?;
    if !in_j0(model, &conjugated)?.holds {
        failures.push(NormalityFailure {
            law: "conjugation".to_owned(),
            at: x0,
        });
    }
    Ok(())
}

/// The exact minimum of the window margin `min(hi, -lo)` over the closed
/// span `[x0 - delta, x0 + delta]`.
fn window_margin(m: &QuotientBundleModel, x0: &Rat, delta: &Rat) -> Rat {
    let lo_x = x0 - delta;
    let hi_x = x0 + delta;
    let mut candidates = vec![lo_x.clone(), x0.clone(), hi_x.clone()];
    for f in [m.window_lo(), m.window_hi()] {
        candidates.extend(
            f.interior_breakpoints()
                .into_iter()
                .filter(|b| *b >= lo_x && *b <= hi_x),
        );
    }
    candidates
        .into_iter()
        .map(|c| {
            let (lo, hi) = m.window_at(&c);
            hi.min(-&lo)
        })
        .min()
        .expect("the candidate list is nonempty")
}

/// Why a finite lift could not be produced.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LiftError {
    #[error("the quotient map must fix objects, but {0:?} moves")]
    NotIdentityOnObjects(String),
    #[error("the quotient map assigns no image to arrow {0:?}")]
    UnassignedArrow(String),
    #[error("no embedding is given for window arrow {0:?}")]
    MissingImage(String),
    #[error("embedded image {0:?} does not exist in the target")]
    UnknownImage(String),
    #[error("embedded image of {arrow:?} has the wrong endpoints")]
    EndpointMismatch { arrow: String },
    #[error("window preimages do not generate: {missing:?} is not a product of them")]
    NotGenerating { missing: String },
    #[error("inconsistent generator data: arrow {arrow:?} receives both {first:?} and {second:?}")]
    RelationViolation {
        arrow: String,
        first: String,
        second: String,
    },
    #[error("the lifted map fails the morphism laws: {0}")]
    NotAMorphism(MorphismDefect),
}

/// Lifts `xi : a → (quotient)` through a window embedding into `h`.
///
/// Arrows of `a` whose `xi`-image lies in `window` are forced to the
/// embedded image; the assignment propagates through all compositions. The
/// lift exists exactly when those preimages generate `a` and the forced
/// data is consistent, and it is then unique.
pub fn lift_morphism(
    a: &FiniteGroupoid,
    h: &FiniteGroupoid,
    xi: &GroupoidMorphism,
    window: &BTreeSet<String>,
    embed: &BTreeMap<String, String>,
) -> Result<GroupoidMorphism, LiftError> {
    let mut object_map = BTreeMap::new();
    for o in a.objects() {
        match xi.object_map.get(o) {
            Some(img) if img == o => {}
            _ => return Err(LiftError::NotIdentityOnObjects(o.clone())),
        }
        object_map.insert(o.clone(), o.clone());
    }

    let mut assigned: BTreeMap<String, String> = BTreeMap::new();
    for ar in a.arrows() {
        let img = xi
            .arrow_map
            .get(&ar.id)
            .ok_or_else(|| LiftError::UnassignedArrow(ar.id.clone()))?;
        if !window.contains(img) {
            continue;
        }
        let target = embed
            .get(img)
            .ok_or_else(|| LiftError::MissingImage(img.clone()))?;
        let t = h
            .arrow(target)
            .ok_or_else(|| LiftError::UnknownImage(target.clone()))?;
        if t.src != ar.src || t.dst != ar.dst {
            return Err(LiftError::EndpointMismatch {
                arrow: ar.id.clone(),
            });
        }
        assigned.insert(ar.id.clone(), target.clone());
    }

    // Propagate through compositions to a fixpoint, checking consistency on
    // every composable pair along the way.
    loop {
        let mut grew = false;
        for p in a.arrows() {
            for q in a.arrows() {
                let Some(c) = a.compose(&p.id, &q.id) else {
                    continue;
                };
                let (Some(ip), Some(iq)) = (assigned.get(&p.id), assigned.get(&q.id)) else {
                    continue;
                };
                let img = h
                    .compose(ip, iq)
                    .expect("endpoint-checked images stay composable");
                match assigned.get(&c) {
                    Some(existing) if existing == &img => {}
                    Some(existing) => {
                        return Err(LiftError::RelationViolation {
                            arrow: c.clone(),
                            first: existing.clone(),
                            second: img,
                        });
                    }
                    None => {
                        assigned.insert(c.clone(), img);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }

    if let Some(ar) = a.arrows().iter().find(|ar| !assigned.contains_key(&ar.id)) {
        return Err(LiftError::NotGenerating {
            missing: ar.id.clone(),
        });
    }

    let lifted = GroupoidMorphism {
        object_map,
        arrow_map: assigned,
    };
    if let Some(defect) = lifted.audit(a, h).into_iter().next() {
        return Err(LiftError::NotAMorphism(defect));
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{Bound, Interval};
    use crate::models::{Chart, Edge, ModulusProfile, Side};
    use crate::pl::{PLMap, Piece};
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn p1() -> Model {
        Model::QuotientBundle(QuotientBundleModel::pradines_1())
    }

    fn p2(smoothness: SmoothnessClass) -> Model {
        Model::QuotientBundle(QuotientBundleModel::pradines_2(smoothness))
    }

    fn mobius() -> Model {
        Model::ChartComplex(ChartComplexModel::mobius())
    }

    /// A bundle whose modulus halves across 0: left limit 2, value 1.
    fn halving_step() -> Model {
        let n = PLFunction::step(Rat::zero(), Rat::int(2), Rat::one());
        let profile = ModulusProfile::new(n).unwrap();
        let width = PLFunction::constant(OpenSet1D::line(), rat(1, 4));
        Model::QuotientBundle(
            QuotientBundleModel::symmetric(profile, width, SmoothnessClass::C0).unwrap(),
        )
    }

    /// A bundle whose modulus drops from 3/2 to 1 across 0.
    fn fractional_step() -> Model {
        let n = PLFunction::step(Rat::zero(), rat(3, 2), Rat::one());
        let profile = ModulusProfile::new(n).unwrap();
        let width = PLFunction::constant(OpenSet1D::line(), rat(1, 4));
        Model::QuotientBundle(
            QuotientBundleModel::symmetric(profile, width, SmoothnessClass::C0).unwrap(),
        )
    }

    /// A differentiable-class bundle whose modulus jumps 2 -> 1 at 0 with
    /// proportionally matched slopes, then flattens at 1/2 where the slopes
    /// detach.
    fn matched_slope_ramp() -> Model {
        let pieces = vec![
            Piece {
                from: Bound::NEG_INF,
                to: Bound::finite(Rat::zero()),
                slope: rat(-2, 1),
                intercept: rat(2, 1),
            },
            Piece {
                from: Bound::finite(Rat::zero()),
                to: Bound::finite(rat(1, 2)),
                slope: rat(-1, 1),
                intercept: rat(1, 1),
            },
            Piece {
                from: Bound::finite(rat(1, 2)),
                to: Bound::POS_INF,
                slope: Rat::zero(),
                intercept: rat(1, 2),
            },
        ];
        let n = PLFunction::new(OpenSet1D::line(), pieces).unwrap();
        let profile = ModulusProfile::new(n).unwrap();
        let width = PLFunction::constant(OpenSet1D::line(), rat(1, 8));
        Model::QuotientBundle(
            QuotientBundleModel::symmetric(profile, width, SmoothnessClass::C1).unwrap(),
        )
    }

    /// One chart over the whole line, glued to itself by unit translations.
    fn translation_complex() -> Model {
        let line = OpenSet1D::line();
        let charts = vec![Chart {
            id: "c0".into(),
            transversal: Interval::line(),
            basepoint: Rat::zero(),
        }];
        let shift = |id: &str, by: i64| Edge {
            id: id.into(),
            src: "c0".into(),
            dst: "c0".into(),
            map: PLMap::affine(line.clone(), Affine::new(Rat::one(), Rat::int(by))).unwrap(),
        };
        let edges = vec![
            Edge {
                id: "id-c0".into(),
                src: "c0".into(),
                dst: "c0".into(),
                map: PLMap::identity(line.clone()),
            },
            shift("up", 1),
            shift("down", -1),
        ];
        Model::ChartComplex(ChartComplexModel::new(charts, edges).unwrap())
    }

    /// One chart glued to itself by doubling and halving: the self-gluing
    /// germs at 0 do not close under composition.
    fn doubling_complex() -> Model {
        let line = OpenSet1D::line();
        let scale = |id: &str, num: i64, den: i64| Edge {
            id: id.into(),
            src: "c0".into(),
            dst: "c0".into(),
            map: PLMap::affine(line.clone(), Affine::new(rat(num, den), Rat::zero())).unwrap(),
        };
        let charts = vec![Chart {
            id: "c0".into(),
            transversal: Interval::line(),
            basepoint: Rat::zero(),
        }];
        let edges = vec![scale("id-c0", 1, 1), scale("double", 2, 1), scale("half", 1, 2)];
        Model::ChartComplex(ChartComplexModel::new(charts, edges).unwrap())
    }

    /// Two charts glued only by straight maps, with identities.
    fn straight_complex() -> Model {
        let tr = Interval::open(rat(-1, 1), rat(1, 1)).unwrap();
        let dom = OpenSet1D::interval(tr.clone());
        let chart = |id: &str| Chart {
            id: id.into(),
            transversal: tr.clone(),
            basepoint: Rat::zero(),
        };
        let straight = |id: &str, src: &str, dst: &str| Edge {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
            map: PLMap::identity(dom.clone()),
        };
        let charts = vec![chart("c0"), chart("c1")];
        let edges = vec![
            straight("id-c0", "c0", "c0"),
            straight("id-c1", "c1", "c1"),
            straight("straight-c0-c1", "c0", "c1"),
            straight("straight-c1-c0", "c1", "c0"),
        ];
        Model::ChartComplex(ChartComplexModel::new(charts, edges).unwrap())
    }

    fn s_word() -> SectionWord {
        let domain = OpenSet1D::line();
        let section =
            AdmissibleSection::cache(domain.clone(), &PLFunction::constant(domain, rat(1, 8)))
                .unwrap();
        SectionWord::from_section(section)
    }

    /// The word winding the fibers `k` whole turns: `8k` letters of the
    /// constant-1/8 section.
    fn s_pow(k: i64) -> SectionWord {
        if k == 0 {
            SectionWord::identity(OpenSet1D::line()).unwrap()
        } else if k > 0 {
            s_word().pow(8 * k as u32).unwrap()
        } else {
            s_word().inverse().pow(8 * (-k) as u32).unwrap()
        }
    }

    fn edge_word(m: &ChartComplexModel, edge: &str, at: &Rat) -> SectionWord {
        SectionWord::from_section(AdmissibleSection::through_edge_germ(m, edge, at).unwrap())
    }

    fn germ(model: &Model, word: &SectionWord, at: &Rat) -> GermClass {
        GermClass::of(model, word, at).unwrap()
    }

    fn class(model: &Model, word: &SectionWord, at: &Rat) -> HolClass {
        HolClass::new(germ(model, word, at))
    }

    /// An affine-cache word on `(-1/2, 1/2)` with slope `s/16` and
    /// intercept `i/32`.
    fn small_word(slope_num: i64, intercept_num: i64) -> SectionWord {
        let domain = OpenSet1D::open(rat(-1, 2), rat(1, 2));
        let a = Affine::new(rat(slope_num, 16), rat(intercept_num, 32));
        SectionWord::from_section(
            AdmissibleSection::cache(domain.clone(), &PLFunction::affine(domain, a)).unwrap(),
        )
    }

    #[test]
    fn composing_with_the_identity_fixes_the_germ() {
        let model = p1();
        let x = Rat::zero();
        let id = GermClass::identity_at(&model, &x).unwrap();
        let s = germ(&model, &s_word(), &x);
        let left = germ_compose(&model, &id, &s).unwrap();
        let right = germ_compose(&model, &s, &id).unwrap();
        assert!(same_germ(&left, &s));
        assert!(same_germ(&right, &s));
    }

    #[test]
    fn germ_composition_adds_fiber_shifts() {
        let model = p1();
        let x = Rat::zero();
        let four = germ(&model, &s_word().pow(4).unwrap(), &x);
        let five = germ(&model, &s_word().pow(5).unwrap(), &x);
        let nine = germ_compose(&model, &four, &five).unwrap();
        match nine.datum() {
            GermDatum::Bundle { cache, .. } => {
                assert_eq!(cache.value, Some(rat(9, 8)));
            }
            _ => panic!("expected a bundle germ"),
        }
    }

    #[test]
    fn inverse_word_cancels_to_the_identity_germ() {
        let model = p1();
        let x = Rat::zero();
        let a = germ(&model, &s_word().pow(3).unwrap(), &x);
        let inv = germ_inverse(&model, &a).unwrap();
        let product = germ_compose(&model, &a, &inv).unwrap();
        let id = GermClass::identity_at(&model, &x).unwrap();
        assert!(same_germ(&product, &id));
    }

    #[test]
    fn composition_requires_chained_base_points() {
        let model = p1();
        let a = germ(&model, &s_word(), &Rat::zero());
        let b = germ(&model, &s_word(), &Rat::one());
        assert!(!same_germ(&a, &b));
        assert_eq!(
            germ_compose(&model, &a, &b).unwrap_err(),
            HolError::NotComposable {
                expected: Rat::zero(),
                got: Rat::one(),
            }
        );
    }

    #[test]
    fn final_map_lands_on_the_models_arrows() {
        let model = p1();
        let Model::QuotientBundle(m) = &model else {
            unreachable!()
        };
        let x = Rat::zero();
        let id = GermClass::identity_at(&model, &x).unwrap();
        match final_map(&id).unwrap() {
            ArrowValue::Bundle { x, t } => {
                assert!(m.is_identity_arrow(&x, &t));
            }
            _ => panic!("expected a bundle arrow"),
        }
        let nine = germ(&model, &s_word().pow(9).unwrap(), &x);
        match final_map(&nine).unwrap() {
            ArrowValue::Bundle { x, t } => {
                assert_eq!((x.clone(), t.clone()), (Rat::zero(), rat(9, 8)));
                assert!(m.arrow_eq(&x, &t, &rat(1, 8)));
                assert!(!m.is_identity_arrow(&x, &t));
            }
            _ => panic!("expected a bundle arrow"),
        }
        let eight = germ(&model, &s_pow(1), &x);
        match final_map(&eight).unwrap() {
            ArrowValue::Bundle { x, t } => {
                assert_eq!(t, Rat::one());
                assert!(m.is_identity_arrow(&x, &t));
            }
            _ => panic!("expected a bundle arrow"),
        }
    }

    #[test]
    fn winding_once_is_not_in_the_identity_ideal() {
        let model = p1();
        let g = germ(&model, &s_pow(1), &Rat::zero());
        let verdict = in_j0(&model, &g).unwrap();
        assert!(!verdict.holds);
        match verdict.witness {
            J0Witness::Obstructed {
                obstruction:
                    Obstruction::ForcedValueMismatch {
                        side: Side::Left,
                        forced,
                        needed,
                    },
            } => {
                assert_eq!(forced, Rat::one());
                assert_eq!(needed, Rat::zero());
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn winding_is_absorbed_where_the_fibers_are_circles() {
        let model = p1();
        let g = germ(&model, &s_pow(1), &Rat::one());
        let verdict = in_j0(&model, &g).unwrap();
        assert!(verdict.holds);
        match verdict.witness {
            J0Witness::Representative { rep } => assert_eq!(rep.k, Rat::one()),
            w => panic!("unexpected witness {w:?}"),
        }
        let id = GermClass::identity_at(&model, &Rat::zero()).unwrap();
        assert!(in_j0(&model, &id).unwrap().holds);
    }

    #[test]
    fn a_nonidentity_value_blocks_ideal_membership() {
        let model = p1();
        let g = germ(&model, &s_word().pow(7).unwrap(), &Rat::zero());
        let verdict = in_j0(&model, &g).unwrap();
        assert!(!verdict.holds);
        match verdict.witness {
            J0Witness::NotIdentityArrow {
                value: ArrowValue::Bundle { x, t },
            } => {
                assert_eq!(x, Rat::zero());
                assert_eq!(t, rat(7, 8));
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn holonomy_distinguishes_windings_over_the_critical_point() {
        let model = p1();
        let x = Rat::zero();
        for j in -3i64..=3 {
            for k in -3i64..=3 {
                let a = class(&model, &s_pow(j), &x);
                let b = class(&model, &s_pow(k), &x);
                assert_eq!(hol_equal(&model, &a, &b).unwrap(), j == k, "j={j} k={k}");
            }
        }
        let over_circle = |k: i64| class(&model, &s_pow(k), &Rat::one());
        assert!(hol_equal(&model, &over_circle(1), &over_circle(0)).unwrap());
    }

    #[test]
    fn continuous_tent_representatives_collapse_the_windings() {
        let model = p2(SmoothnessClass::C0);
        let x = Rat::zero();
        let a = class(&model, &s_pow(1), &x);
        let b = class(&model, &s_pow(0), &x);
        assert!(hol_equal(&model, &a, &b).unwrap());
    }

    #[test]
    fn differentiable_matching_fails_on_the_tent() {
        let model = p2(SmoothnessClass::C1);
        let x = Rat::zero();
        let a = class(&model, &s_pow(1), &x);
        let b = class(&model, &s_pow(0), &x);
        assert!(!hol_equal(&model, &a, &b).unwrap());
        assert!(hol_equal(&model, &a, &a).unwrap());
    }

    #[test]
    fn holonomy_classes_need_a_common_source() {
        let model = p1();
        let a = class(&model, &s_pow(1), &Rat::zero());
        let b = class(&model, &s_pow(1), &Rat::one());
        assert_eq!(hol_equal(&model, &a, &b), Err(HolError::SourceMismatch));
    }

    #[test]
    fn winding_words_compose_additively() {
        let model = p1();
        let x = Rat::zero();
        for j in -2i64..=2 {
            for k in -2i64..=2 {
                let a = germ(&model, &s_pow(j), &x);
                let b = germ(&model, &s_pow(k), &x);
                let sum = germ_compose(&model, &a, &b).unwrap();
                assert!(same_germ(&sum, &germ(&model, &s_pow(j + k), &x)));
            }
        }
    }

    #[test]
    fn kernel_over_the_step_is_free_cyclic() {
        let model = p1();
        let k = kernel_at(&model, &Rat::zero(), 8).unwrap();
        assert_eq!(k.kind, KernelKind::FreeCyclic);
        assert_eq!(k.at, Rat::zero());
        assert_eq!(k.chart, None);
        let generator = k.generator.expect("a free kernel has a generator");
        assert_eq!(generator.representative().word().entries().len(), 5);
        let once = class(&model, &s_pow(1), &Rat::zero());
        assert!(hol_equal(&model, &generator, &once).unwrap());
        assert!(same_germ(
            generator.representative(),
            &germ(&model, &s_pow(1), &Rat::zero())
        ));
    }

    #[test]
    fn kernels_away_from_the_step_collapse() {
        let model = p1();
        for x in [rat(-1, 1), rat(1, 2), rat(3, 1)] {
            let k = kernel_at(&model, &x, 8).unwrap();
            assert_eq!(k.kind, KernelKind::Trivial, "at {x}");
        }
    }

    #[test]
    fn continuous_ramp_kernel_collapses() {
        let model = p2(SmoothnessClass::C0);
        let k = kernel_at(&model, &Rat::zero(), 8).unwrap();
        assert_eq!(k.kind, KernelKind::Trivial);
    }

    #[test]
    fn differentiable_ramp_kernel_is_free() {
        let model = p2(SmoothnessClass::C1);
        let k = kernel_at(&model, &Rat::zero(), 8).unwrap();
        assert_eq!(k.kind, KernelKind::FreeCyclic);
        let generator = k.generator.expect("a free kernel has a generator");
        let g2 = generator.representative().word().pow(2).unwrap();
        let squared = class(&model, &g2, &Rat::zero());
        assert!(!hol_equal(
            &model,
            &squared,
            &class(&model, &s_pow(0), &Rat::zero())
        )
        .unwrap());
    }

    #[test]
    fn halving_modulus_gives_a_two_torsion_kernel() {
        let model = halving_step();
        let k = kernel_at(&model, &Rat::zero(), 8).unwrap();
        assert_eq!(k.kind, KernelKind::Cyclic { order: 2 });
        let generator = k.generator.expect("a torsion kernel has a generator");
        assert!(!in_j0(&model, generator.representative()).unwrap().holds);
        let g2 = generator.representative().word().pow(2).unwrap();
        let squared = germ(&model, &g2, &Rat::zero());
        assert!(in_j0(&model, &squared).unwrap().holds);
        // The same pattern through the winding words directly.
        assert!(!in_j0(&model, &germ(&model, &s_pow(1), &Rat::zero()))
            .unwrap()
            .holds);
        assert!(in_j0(&model, &germ(&model, &s_pow(2), &Rat::zero()))
            .unwrap()
            .holds);
    }

    #[test]
    fn fractional_modulus_jump_gives_three_torsion() {
        let model = fractional_step();
        let k = kernel_at(&model, &Rat::zero(), 8).unwrap();
        assert_eq!(k.kind, KernelKind::Cyclic { order: 3 });
        let generator = k.generator.expect("a torsion kernel has a generator");
        for power in 1u32..=3 {
            let word = generator.representative().word().pow(power).unwrap();
            let verdict = in_j0(&model, &germ(&model, &word, &Rat::zero())).unwrap();
            assert_eq!(verdict.holds, power == 3, "power {power}");
        }
    }

    #[test]
    fn matched_slopes_keep_torsion_in_the_differentiable_class() {
        let model = matched_slope_ramp();
        let at_jump = kernel_at(&model, &Rat::zero(), 8).unwrap();
        assert_eq!(at_jump.kind, KernelKind::Cyclic { order: 2 });
        let smooth = kernel_at(&model, &rat(1, 4), 8).unwrap();
        assert_eq!(smooth.kind, KernelKind::Trivial);
        let detached = kernel_at(&model, &rat(1, 2), 8).unwrap();
        assert_eq!(detached.kind, KernelKind::FreeCyclic);
    }

    #[test]
    fn collapsed_window_makes_holonomy_undefined() {
        let m = QuotientBundleModel::pradines_1()
            .with_collapsed_window(Rat::one())
            .unwrap();
        let model = Model::QuotientBundle(m);
        assert_eq!(
            kernel_at(&model, &rat(2, 1), 8).unwrap_err(),
            HolError::WindowCollapse { x: rat(2, 1) }
        );
    }

    #[test]
    fn mobius_loop_kernel_is_two_torsion() {
        let model = mobius();
        let k = kernel_at(&model, &Rat::zero(), 4).unwrap();
        assert_eq!(k.chart.as_deref(), Some("c0"));
        assert_eq!(k.kind, KernelKind::Cyclic { order: 2 });
        let generator = k.generator.expect("the twist class has a word");
        match generator.representative().datum() {
            GermDatum::Chart { src, dst, map } => {
                assert_eq!((src.as_str(), dst.as_str()), ("c0", "c0"));
                let flip = Affine::new(rat(-1, 1), Rat::zero());
                assert_eq!(map.left.as_ref(), Some(&flip));
                assert_eq!(map.right.as_ref(), Some(&flip));
            }
            _ => panic!("expected a chart germ"),
        }
        let g2 = generator.representative().word().pow(2).unwrap();
        assert!(in_j0(&model, &germ(&model, &g2, &Rat::zero())).unwrap().holds);
        // Too small a word bound cannot certify completeness.
        assert_eq!(
            kernel_at(&model, &Rat::zero(), 2).unwrap_err(),
            HolError::DepthExceeded { depth: 2 }
        );
    }

    #[test]
    fn the_flip_loop_carries_the_mobius_twist() {
        let model = mobius();
        let Model::ChartComplex(m) = &model else {
            unreachable!()
        };
        let x = Rat::zero();
        let loop_word = edge_word(m, "straight-c0-c1", &x)
            .product(&edge_word(m, "flip-c1-c0", &x))
            .unwrap();
        let once = germ(&model, &loop_word, &x);
        let verdict = in_j0(&model, &once).unwrap();
        assert!(!verdict.holds);
        assert!(matches!(verdict.witness, J0Witness::NoEdgeMatch { .. }));
        let twice = germ(&model, &loop_word.pow(2).unwrap(), &x);
        let verdict = in_j0(&model, &twice).unwrap();
        assert!(verdict.holds);
        match verdict.witness {
            J0Witness::MatchesEdge { edge } => assert_eq!(edge, "id-c0"),
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn unbounded_translation_loops_exceed_any_depth() {
        let model = translation_complex();
        assert_eq!(
            kernel_at(&model, &Rat::zero(), 6).unwrap_err(),
            HolError::DepthExceeded { depth: 6 }
        );
    }

    #[test]
    fn inconsistent_self_gluings_are_rejected() {
        let model = doubling_complex();
        assert_eq!(
            kernel_at(&model, &Rat::zero(), 4).unwrap_err(),
            HolError::SelfGermsNotClosed {
                chart: "c0".into(),
                at: Rat::zero(),
            }
        );
    }

    #[test]
    fn chart_map_sends_window_arrows_to_their_classes() {
        let model = p1();
        let one = SectionWord::identity(OpenSet1D::line()).unwrap();
        let w = WElement::Bundle {
            x: rat(1, 2),
            t: rat(1, 8),
        };
        let image = chart_map(&model, &one, &w).unwrap();
        let expected = class(&model, &s_word(), &rat(1, 2));
        assert!(hol_equal(&model, &image, &expected).unwrap());
    }

    #[test]
    fn chart_map_is_independent_of_the_section() {
        let model = p1();
        let one = SectionWord::identity(OpenSet1D::line()).unwrap();
        let w = WElement::Bundle {
            x: rat(1, 2),
            t: rat(1, 8),
        };
        let image = chart_map(&model, &one, &w).unwrap();
        // A different admissible section through the same window arrow:
        // affine with slope 1/16 instead of constant.
        let domain = OpenSet1D::open(rat(1, 4), rat(3, 4));
        let tilted = Affine::new(rat(1, 16), rat(3, 32));
        assert_eq!(tilted.eval(&rat(1, 2)), rat(1, 8));
        let word = SectionWord::from_section(
            AdmissibleSection::cache(domain.clone(), &PLFunction::affine(domain, tilted)).unwrap(),
        );
        let other = class(&model, &word, &rat(1, 2));
        assert!(hol_equal(&model, &image, &other).unwrap());
    }

    #[test]
    fn chart_map_fixes_identity_arrows() {
        let model = p1();
        let one = SectionWord::identity(OpenSet1D::line()).unwrap();
        let w = WElement::Bundle {
            x: rat(1, 2),
            t: Rat::zero(),
        };
        let image = chart_map(&model, &one, &w).unwrap();
        let id = HolClass::new(GermClass::identity_at(&model, &rat(1, 2)).unwrap());
        assert!(hol_equal(&model, &image, &id).unwrap());
    }

    #[test]
    fn chart_map_transports_edges() {
        let model = mobius();
        let Model::ChartComplex(m) = &model else {
            unreachable!()
        };
        let x = Rat::zero();
        let f = edge_word(m, "id-c0", &x);
        let w = WElement::Chart {
            edge: "straight-c0-c1".into(),
            x: x.clone(),
        };
        let image = chart_map(&model, &f, &w).unwrap();
        let expected = class(&model, &edge_word(m, "straight-c0-c1", &x), &x);
        assert!(hol_equal(&model, &image, &expected).unwrap());
    }

    #[test]
    fn transition_shifts_by_the_connecting_word() {
        let model = p1();
        let one = SectionWord::identity(OpenSet1D::line()).unwrap();
        let w = WElement::Bundle {
            x: rat(1, 3),
            t: rat(1, 16),
        };
        let moved = chart_transition(&model, &one, &s_word(), &w).unwrap();
        assert_eq!(
            moved,
            WElement::Bundle {
                x: rat(1, 3),
                t: rat(3, 16),
            }
        );
        // The same word on both sides leaves every element in place.
        let fixed = chart_transition(&model, &s_word(), &s_word(), &w).unwrap();
        assert_eq!(fixed, w);
        // A whole winding wraps around the circle fiber, in both directions.
        let circle = WElement::Bundle {
            x: rat(1, 2),
            t: rat(1, 16),
        };
        let wrapped = chart_transition(&model, &one, &s_pow(1), &circle).unwrap();
        assert_eq!(
            wrapped,
            WElement::Bundle {
                x: rat(1, 2),
                t: rat(1, 16),
            }
        );
        let unwrapped = chart_transition(&model, &s_pow(1), &one, &circle).unwrap();
        assert_eq!(
            unwrapped,
            WElement::Bundle {
                x: rat(1, 2),
                t: rat(1, 16),
            }
        );
    }

    #[test]
    fn transition_grid_matches_the_direct_formula() {
        let model = p1();
        let Model::QuotientBundle(m) = &model else {
            unreachable!()
        };
        let one = SectionWord::identity(OpenSet1D::line()).unwrap();
        let s = s_word();
        for j in -4i64..=5 {
            let x = rat(j, 3);
            let t = rat(j, 48);
            let w = WElement::Bundle {
                x: x.clone(),
                t: t.clone(),
            };
            let moved = chart_transition(&model, &one, &s, &w).unwrap();
            let expected = m
                .reduced_into_window(&x, &(&t + &rat(1, 8)))
                .expect("the shifted value stays in the window");
            assert_eq!(
                moved,
                WElement::Bundle {
                    x: x.clone(),
                    t: expected,
                },
                "at {x}"
            );
        }
    }

    #[test]
    fn transition_fails_outside_the_window() {
        let model = p1();
        let one = SectionWord::identity(OpenSet1D::line()).unwrap();
        let w = WElement::Bundle {
            x: rat(-1, 1),
            t: rat(3, 16),
        };
        assert_eq!(
            chart_transition(&model, &one, &s_pow(1), &w),
            Err(HolError::OutOfOverlap { x: rat(-1, 1) })
        );
    }

    #[test]
    fn transition_relabels_edges_across_charts() {
        let model = mobius();
        let Model::ChartComplex(m) = &model else {
            unreachable!()
        };
        let x = Rat::zero();
        let f = edge_word(m, "id-c0", &x);
        let g = edge_word(m, "straight-c0-c1", &x);
        let w = WElement::Chart {
            edge: "id-c1".into(),
            x: x.clone(),
        };
        let moved = chart_transition(&model, &f, &g, &w).unwrap();
        assert_eq!(
            moved,
            WElement::Chart {
                edge: "straight-c0-c1".into(),
                x: Rat::zero(),
            }
        );
    }

    #[test]
    fn window_generates_the_line_bundle() {
        let report = generates(&p1(), 8);
        assert!(report.generates);
        assert_eq!(
            report.evidence,
            GenerationEvidence::FiberFactorization {
                x: Rat::one(),
                t: Rat::one(),
                factors: 5,
            }
        );
    }

    #[test]
    fn factor_counts_follow_the_window_margin() {
        let m = QuotientBundleModel::pradines_1();
        assert_eq!(factor_count(&m, &Rat::one(), &Rat::one()), Some(5));
        assert_eq!(factor_count(&m, &Rat::one(), &Rat::zero()), Some(1));
        assert_eq!(factor_count(&m, &Rat::one(), &rat(1, 5)), Some(1));
        assert_eq!(factor_count(&m, &Rat::one(), &rat(1, 4)), Some(2));
        assert_eq!(factor_count(&m, &Rat::one(), &rat(-1, 1)), Some(5));
        let collapsed = m.with_collapsed_window(Rat::zero()).unwrap();
        assert_eq!(factor_count(&collapsed, &Rat::one(), &rat(1, 8)), None);
    }

    #[test]
    fn window_generates_the_mobius_complex() {
        let report = generates(&mobius(), 8);
        assert!(report.generates);
        assert_eq!(
            report.evidence,
            GenerationEvidence::OrbitReach { charts: 2 }
        );
    }

    #[test]
    fn an_isolated_chart_blocks_generation() {
        let m = ChartComplexModel::mobius().with_isolated_chart().unwrap();
        let report = generates(&Model::ChartComplex(m), 8);
        assert!(!report.generates);
        assert_eq!(
            report.evidence,
            GenerationEvidence::UnreachableChart {
                chart: "isolated".into(),
            }
        );
    }

    #[test]
    fn collapsed_window_blocks_generation() {
        let m = QuotientBundleModel::pradines_1()
            .with_collapsed_window(Rat::zero())
            .unwrap();
        let report = generates(&Model::QuotientBundle(m), 8);
        assert!(!report.generates);
        assert!(matches!(
            report.evidence,
            GenerationEvidence::WindowDegenerate { .. }
        ));
    }

    #[test]
    fn the_step_obstructs_extendibility() {
        let model = p1();
        let report = is_extendible(&model, 8).unwrap();
        assert!(!report.extendible);
        assert_eq!(report.sites.len(), 1);
        assert_eq!(report.sites[0].at, Rat::zero());
        assert_eq!(report.sites[0].kind, KernelKind::FreeCyclic);
        let obstruction = report.obstruction.expect("a witness class");
        let once = class(&model, &s_pow(1), &Rat::zero());
        assert!(hol_equal(&model, &obstruction, &once).unwrap());
    }

    #[test]
    fn the_continuous_ramp_is_extendible() {
        let model = p2(SmoothnessClass::C0);
        let report = is_extendible(&model, 8).unwrap();
        assert!(report.extendible);
        assert!(report.obstruction.is_none());
        assert!(report.sites.iter().all(|s| s.kind == KernelKind::Trivial));
        // Extendibility shows up as winding collapse over the former
        // obstruction point.
        let id = class(&model, &s_pow(0), &Rat::zero());
        for k in 1i64..=3 {
            let wound = class(&model, &s_pow(k), &Rat::zero());
            assert!(hol_equal(&model, &wound, &id).unwrap(), "k={k}");
        }
    }

    #[test]
    fn the_differentiable_ramp_is_not_extendible() {
        let report = is_extendible(&p2(SmoothnessClass::C1), 8).unwrap();
        assert!(!report.extendible);
        assert_eq!(report.sites[0].kind, KernelKind::FreeCyclic);
    }

    #[test]
    fn the_mobius_complex_is_not_extendible() {
        let report = is_extendible(&mobius(), 8).unwrap();
        assert!(!report.extendible);
        assert_eq!(report.sites.len(), 2);
        assert!(report
            .sites
            .iter()
            .all(|s| s.kind == KernelKind::Cyclic { order: 2 }));
    }

    #[test]
    fn straight_gluings_alone_are_extendible() {
        let report = is_extendible(&straight_complex(), 8).unwrap();
        assert!(report.extendible);
        assert_eq!(report.sites.len(), 2);
        assert!(report.sites.iter().all(|s| s.kind == KernelKind::Trivial));
    }

    #[test]
    fn slope_detachment_sites_appear_in_the_survey() {
        let report = is_extendible(&matched_slope_ramp(), 8).unwrap();
        assert!(!report.extendible);
        let kinds: Vec<_> = report
            .sites
            .iter()
            .map(|s| (s.at.clone(), s.kind.clone()))
            .collect();
        assert_eq!(
            kinds,
            vec![
                (Rat::zero(), KernelKind::Cyclic { order: 2 }),
                (rat(1, 2), KernelKind::FreeCyclic),
            ]
        );
    }

    #[test]
    fn normality_audit_is_clean_on_the_line_bundle() {
        let report = normality_audit(&p1(), 200, 7).unwrap();
        assert_eq!(report.samples, 200);
        assert_eq!(report.seed, 7);
        assert!(report.failures.is_empty(), "{:?}", report.failures);
    }

    #[test]
    fn normality_audit_is_clean_in_the_differentiable_class() {
        let report = normality_audit(&p2(SmoothnessClass::C1), 100, 11).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
    }

    #[test]
    fn normality_audit_is_clean_on_the_mobius_complex() {
        let report = normality_audit(&mobius(), 100, 3).unwrap();
        assert!(report.failures.is_empty(), "{:?}", report.failures);
    }

    fn identity_morphism(g: &FiniteGroupoid) -> GroupoidMorphism {
        GroupoidMorphism {
            object_map: g.objects().iter().map(|o| (o.clone(), o.clone())).collect(),
            arrow_map: g
                .arrows()
                .iter()
                .map(|a| (a.id.clone(), a.id.clone()))
                .collect(),
        }
    }

    #[test]
    fn lifting_through_the_identity_recovers_the_map() {
        let a = FiniteGroupoid::cyclic_group(4);
        let xi = identity_morphism(&a);
        let window: BTreeSet<String> = a.arrows().iter().map(|ar| ar.id.clone()).collect();
        let embed: BTreeMap<String, String> =
            window.iter().map(|w| (w.clone(), w.clone())).collect();
        let lifted = lift_morphism(&a, &a, &xi, &window, &embed).unwrap();
        assert_eq!(lifted.arrow_map, xi.arrow_map);
        assert_eq!(lifted.object_map, xi.object_map);
    }

    #[test]
    fn lifting_resolves_the_mod_two_quotient() {
        let a = FiniteGroupoid::cyclic_group(4);
        let h = FiniteGroupoid::cyclic_group(2);
        let mut xi = identity_morphism(&a);
        xi.arrow_map = [("r0", "r0"), ("r1", "r1"), ("r2", "r0"), ("r3", "r1")]
            .into_iter()
            .map(|(k, v)| (k.to_owned(), v.to_owned()))
            .collect();
        let window: BTreeSet<String> = ["r0", "r1"].into_iter().map(str::to_owned).collect();
        let embed: BTreeMap<String, String> =
            window.iter().map(|w| (w.clone(), w.clone())).collect();
        let lifted = lift_morphism(&a, &h, &xi, &window, &embed).unwrap();
        assert_eq!(lifted.apply_arrow("r3").map(String::as_str), Some("r1"));
        assert_eq!(lifted.arrow_map, xi.arrow_map);
        // Of the two homomorphisms into the two-element group, only the
        // parity map extends the forced window data.
        let trivial: BTreeMap<String, String> = a
            .arrows()
            .iter()
            .map(|ar| (ar.id.clone(), "r0".to_owned()))
            .collect();
        assert_ne!(lifted.arrow_map, trivial);
    }

    #[test]
    fn inconsistent_window_data_is_rejected() {
        let a = FiniteGroupoid::cyclic_group(8);
        let h = FiniteGroupoid::cyclic_group(8);
        let mut xi = identity_morphism(&a);
        xi.arrow_map = (0..8)
            .map(|k| (format!("r{k}"), format!("r{}", k % 4)))
            .collect();
        let window: BTreeSet<String> = ["r0", "r1", "r3"].into_iter().map(str::to_owned).collect();
        let embed: BTreeMap<String, String> = [("r0", "r0"), ("r1", "r1"), ("r3", "r7")]
            .into_iter()
            .map(|(k, v)| (k.to_owned(), v.to_owned()))
            .collect();
        let err = lift_morphism(&a, &h, &xi, &window, &embed).unwrap_err();
        match err {
            LiftError::RelationViolation {
                arrow,
                first,
                second,
            } => {
                assert_eq!(arrow, "r3");
                assert_eq!(first, "r7");
                assert_eq!(second, "r3");
            }
            e => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn a_small_window_cannot_generate_the_lift() {
        let a = FiniteGroupoid::cyclic_group(4);
        let xi = identity_morphism(&a);
        let window: BTreeSet<String> = ["r0", "r2"].into_iter().map(str::to_owned).collect();
        let embed: BTreeMap<String, String> =
            window.iter().map(|w| (w.clone(), w.clone())).collect();
        let err = lift_morphism(&a, &a, &xi, &window, &embed).unwrap_err();
        assert_eq!(
            err,
            LiftError::NotGenerating {
                missing: "r1".into(),
            }
        );
    }

    proptest! {
        /// Germ composition is associative wherever both bracketings exist.
        #[test]
        fn prop_germ_composition_is_associative(
            s1 in -3i64..=3, i1 in -3i64..=3,
            s2 in -3i64..=3, i2 in -3i64..=3,
            s3 in -3i64..=3, i3 in -3i64..=3,
            xn in -3i64..=3,
        ) {
            let model = p1();
            let x = rat(xn, 8);
            let a = germ(&model, &small_word(s1, i1), &x);
            let b = germ(&model, &small_word(s2, i2), &x);
            let c = germ(&model, &small_word(s3, i3), &x);
            let left =
                germ_compose(&model, &germ_compose(&model, &a, &b).unwrap(), &c).unwrap();
            let right =
                germ_compose(&model, &a, &germ_compose(&model, &b, &c).unwrap()).unwrap();
            prop_assert!(same_germ(&left, &right));
        }

        /// The identity germ is neutral on both sides.
        #[test]
        fn prop_identity_germs_are_neutral(s in -3i64..=3, i in -3i64..=3, xn in -3i64..=3) {
            let model = p1();
            let x = rat(xn, 8);
            let a = germ(&model, &small_word(s, i), &x);
            let id = GermClass::identity_at(&model, &x).unwrap();
            prop_assert!(same_germ(&germ_compose(&model, &id, &a).unwrap(), &a));
            prop_assert!(same_germ(&germ_compose(&model, &a, &id).unwrap(), &a));
        }

        /// A germ composed with its inverse lands in the identity ideal.
        #[test]
        fn prop_inverses_land_in_the_identity_ideal(
            s in -3i64..=3, i in -3i64..=3, xn in -3i64..=3,
        ) {
            for model in [p1(), p2(SmoothnessClass::C1)] {
                let x = rat(xn, 8);
                let a = germ(&model, &small_word(s, i), &x);
                let cancelled =
                    germ_compose(&model, &a, &germ_inverse(&model, &a).unwrap()).unwrap();
                prop_assert!(in_j0(&model, &cancelled).unwrap().holds);
            }
        }

        /// Evaluating at the base point is multiplicative.
        #[test]
        fn prop_evaluation_is_multiplicative(
            s1 in -3i64..=3, i1 in -3i64..=3,
            s2 in -3i64..=3, i2 in -3i64..=3,
            xn in -3i64..=3,
        ) {
            let model = p1();
            let x = rat(xn, 8);
            let wa = small_word(s1, i1);
            let wb = small_word(s2, i2);
            let a = germ(&model, &wa, &x);
            let b = germ(&model, &wb, &x);
            let product = germ_compose(&model, &a, &b).unwrap();
            let ta = wa.cache_function().unwrap().eval(&x).unwrap();
            let tb = wb.cache_function().unwrap().eval(&x).unwrap();
            let value = final_map(&product).unwrap();
            prop_assert_eq!(value, ArrowValue::Bundle { x, t: &ta + &tb });
        }

        /// Multiplying by an ideal germ on either side fixes the class.
        #[test]
        fn prop_ideal_perturbations_preserve_the_class(
            s in -3i64..=3, i in -3i64..=3,
            ps in -3i64..=3,
            xn in -3i64..=3,
        ) {
            let model = p1();
            let x = rat(xn, 8);
            let word = small_word(s, i);
            // An affine cache vanishing at the base point stays windowed as
            // a germ, so its class is the identity.
            let domain = OpenSet1D::open(rat(-1, 2), rat(1, 2));
            let slope = rat(ps, 16);
            let pinned = Affine::new(slope.clone(), -&(&slope * &x));
            let rho = SectionWord::from_section(
                AdmissibleSection::cache(
                    domain.clone(),
                    &PLFunction::affine(domain, pinned),
                )
                .unwrap(),
            );
            prop_assert!(in_j0(&model, &germ(&model, &rho, &x)).unwrap().holds);
            let base = class(&model, &word, &x);
            let right = class(&model, &word.product(&rho).unwrap(), &x);
            let left = class(&model, &rho.product(&word).unwrap(), &x);
            prop_assert!(hol_equal(&model, &right, &base).unwrap());
            prop_assert!(hol_equal(&model, &left, &base).unwrap());
        }

        /// The chart map does not depend on which admissible section
        /// realizes the window arrow.
        #[test]
        fn prop_chart_map_ignores_the_section_slope(ps in -3i64..=3) {
            let model = p1();
            let one = SectionWord::identity(OpenSet1D::line()).unwrap();
            let w = WElement::Bundle { x: rat(1, 2), t: rat(1, 8) };
            let image = chart_map(&model, &one, &w).unwrap();
            let domain = OpenSet1D::open(rat(1, 4), rat(3, 4));
            let slope = rat(ps, 16);
            let through = Affine::new(
                slope.clone(),
                &rat(1, 8) - &(&slope * &rat(1, 2)),
            );
            let word = SectionWord::from_section(
                AdmissibleSection::cache(
                    domain.clone(),
                    &PLFunction::affine(domain, through),
                )
                .unwrap(),
            );
            let other = class(&model, &word, &rat(1, 2));
            prop_assert!(hol_equal(&model, &image, &other).unwrap());
        }

        /// The transition agrees with direct left multiplication by the
        /// connecting word's value.
        #[test]
        fn prop_transition_matches_left_multiplication(
            s1 in -3i64..=3, i1 in -3i64..=3,
            s2 in -3i64..=3, i2 in -3i64..=3,
            xn in -3i64..=3, tn in -7i64..=7,
        ) {
            let model = p1();
            let Model::QuotientBundle(m) = &model else { unreachable!() };
            let x = rat(xn, 8);
            let t = rat(tn, 32);
            let f = small_word(s1, i1);
            let g = small_word(s2, i2);
            let w = WElement::Bundle { x: x.clone(), t: t.clone() };
            let shift = &g.cache_function().unwrap().eval(&x).unwrap()
                - &f.cache_function().unwrap().eval(&x).unwrap();
            let reduced = m.reduced_into_window(&x, &t).expect("t is in the window");
            let expected = m.reduced_into_window(&x, &(&reduced + &shift));
            match chart_transition(&model, &f, &g, &w) {
                Ok(WElement::Bundle { x: xr, t: tr }) => {
                    prop_assert_eq!(xr, x);
                    prop_assert_eq!(Some(tr), expected);
                }
                Ok(other) => prop_assert!(false, "unexpected family {other:?}"),
                Err(HolError::OutOfOverlap { .. }) => prop_assert!(expected.is_none()),
                Err(e) => prop_assert!(false, "unexpected error {e:?}"),
            }
        }
    }
}
