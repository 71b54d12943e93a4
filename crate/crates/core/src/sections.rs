//! Admissible local sections and the inverse monoid they generate.
//!
//! A local section picks one arrow over each point of an open set `U`: in the
//! quotient-bundle family it is `x ↦ q(x, f(x))` for a PL cache `f` (so its
//! base map `βσ` is the identity), and in the chart family it is a transport
//! along one gluing edge (so `βσ` is the edge map itself). Sections multiply
//! by the Ehresmann rule `(στ)(x) = σ(x) · τ(βσ x)` and carry generalized
//! inverses `σ′(x) = σ((βσ)⁻¹ x)⁻¹`, which makes them an inverse monoid
//! rather than a group: `σσ′σ = σ` and `σ′σσ′ = σ′` hold, but `σσ′` is only
//! an identity over the image.
//!
//! Products are kept as *words* — ordered lists of the generating sections —
//! alongside a cached pointwise product. The word is the certificate that a
//! section was assembled from small admissible pieces; the cache is what
//! evaluation, germ-taking, and the local-procedure test consume. A word is a
//! *local procedure* at `x` when its cached product stays in the model's
//! window set near `x` up to fiber shifts, at the model's smoothness class —
//! this is the membership test that later feeds germ and holonomy
//! computations, and it is decided exactly by
//! [`QuotientBundleModel::w_representative`] on bundles and by germ matching
//! against edge maps on chart complexes.

use serde::Serialize;

use crate::germ::Germ1D;
use crate::interval::Interval;
use crate::interval::OpenSet1D;
use crate::models::{
    point_in_interval_not_in, ChartComplexModel, Model, Obstruction, QuotientBundleModel,
};
use crate::pl::{PLError, PLFunction, PLMap};
use crate::rat::Rat;

/// Why candidate section data fails admissibility, with a point where it
/// does.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum AdmissibilityIssue {
    #[error("section data is not defined near {x} inside the declared domain")]
    NotDefinedNear { x: Rat },
    #[error("the base map jumps at {x}, so it is not a homeomorphism")]
    JumpAt { x: Rat },
    #[error("the base map folds at {x}, so it is not injective")]
    FoldAt { x: Rat },
    #[error("the base map is constant near {x}, so it is not injective")]
    ConstantNear { x: Rat },
    #[error("two domain components share base-map images near {x}")]
    OverlappingImages { x: Rat },
}

/// Rejections raised while building or combining sections.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SectionError {
    #[error("the section domain is empty")]
    EmptyDomain,
    #[error(transparent)]
    NotAdmissible(#[from] AdmissibilityIssue),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("transports do not chain: the first ends in chart {0:?}, the next starts in chart {1:?}")]
    NotComposable(String, String),
    #[error("cannot combine bundle caches with chart transports in one word")]
    MixedFamilies,
    #[error("arrow ({x}, {t}) is not in the window set")]
    NotInWindow { x: Rat, t: Rat },
    #[error("no continuous window section passes through ({x}, {t}): the window admits the value at the point but not on a neighborhood")]
    NoSectionThrough { x: Rat, t: Rat },
    #[error("point {0} is outside the section domain")]
    OutsideDomain(Rat),
}

/// Why a word fails the local-procedure test (or cannot be tested).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ProcedureIssue {
    /// Bundle family: no window representative of the cached product exists
    /// near `at`.
    #[error("no window representative near {at}: {obstruction}")]
    NotRepresentable { at: Rat, obstruction: Obstruction },
    /// Chart family: near `at` the composed transport is not the germ of any
    /// edge with the same endpoints.
    #[error("the composed transport is not an edge germ at {at}")]
    NotAnEdgeGerm { at: Rat },
    #[error("the word and the model belong to different families")]
    FamilyMismatch,
    #[error("point {0} is outside the word domain")]
    OutsideDomain(Rat),
}

/// The data of one generating section.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectionData {
    /// Bundle family: `x ↦ q(x, f(x))`; the base map is the identity.
    Cache { f: PLFunction },
    /// Chart family: transport along `edge`, already restricted to the
    /// section domain. `reversed` marks a formally inverted edge.
    Transport {
        edge: String,
        reversed: bool,
        src: String,
        dst: String,
        map: PLMap,
    },
}

/// A single admissible local section: an open domain plus its data, with the
/// admissibility clauses checked at construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibleSection {
    domain: OpenSet1D,
    data: SectionData,
}

impl AdmissibleSection {
    /// A bundle-family section from a fiber cache; `f` must be defined on
    /// the whole domain.
    pub fn cache(domain: OpenSet1D, f: &PLFunction) -> Result<Self, SectionError> {
        if domain.is_empty() {
            return Err(SectionError::EmptyDomain);
        }
        defined_throughout(&domain, f)?;
        Ok(AdmissibleSection {
            data: SectionData::Cache {
                f: f.restrict(&domain),
            },
            domain,
        })
    }

    /// The identity section `x ↦ 1_x` of a bundle model on `domain`.
    pub fn identity(domain: OpenSet1D) -> Result<Self, SectionError> {
        let zero = PLFunction::constant(domain.clone(), Rat::zero());
        AdmissibleSection::cache(domain, &zero)
    }

    /// A chart-family section transporting along one edge, restricted to
    /// `restrict_to`.
    pub fn transport(
        model: &ChartComplexModel,
        edge: &str,
        restrict_to: &OpenSet1D,
    ) -> Result<Self, SectionError> {
        let e = model
            .edge(edge)
            .ok_or_else(|| SectionError::UnknownEdge(edge.to_owned()))?;
        let domain = e.map.domain().intersect(restrict_to);
        if domain.is_empty() {
            return Err(SectionError::EmptyDomain);
        }
        Ok(AdmissibleSection {
            data: SectionData::Transport {
                edge: e.id.clone(),
                reversed: false,
                src: e.src.clone(),
                dst: e.dst.clone(),
                map: restrict_map(&e.map, &domain),
            },
            domain,
        })
    }

    /// The constant window section through the bundle arrow `(x, t)`.
    ///
    /// The arrow must lie in the window set; the section is `y ↦ q(y, t₀)`
    /// for the reduced representative `t₀`, on the component around `x`
    /// where the window keeps admitting `t₀`. When the window admits the
    /// value at `x` but on no neighborhood (a stepped window edge), that is
    /// a genuine sectionability failure and is reported as such.
    pub fn through_window_arrow(
        model: &QuotientBundleModel,
        x: &Rat,
        t: &Rat,
    ) -> Result<Self, SectionError> {
        if !model.in_window_set(x, t) {
            return Err(SectionError::NotInWindow {
                x: x.clone(),
                t: t.clone(),
            });
        }
        let rep = model
            .reduced_into_window(x, t)
            .expect("window membership was just checked");
        let region = model.constant_section_region(&rep);
        let comp = region
            .component_of(x)
            .ok_or_else(|| SectionError::NoSectionThrough {
                x: x.clone(),
                t: rep.clone(),
            })?;
        let domain = OpenSet1D::interval(comp.clone());
        let constant = PLFunction::constant(domain.clone(), rep);
        AdmissibleSection::cache(domain, &constant)
    }

    /// The transport section through the germ of `edge` at `x`: the edge map
    /// restricted to its domain component around `x`.
    pub fn through_edge_germ(
        model: &ChartComplexModel,
        edge: &str,
        x: &Rat,
    ) -> Result<Self, SectionError> {
        let e = model
            .edge(edge)
            .ok_or_else(|| SectionError::UnknownEdge(edge.to_owned()))?;
        let comp = e
            .map
            .domain()
            .component_of(x)
            .ok_or_else(|| SectionError::OutsideDomain(x.clone()))?;
        AdmissibleSection::transport(model, edge, &OpenSet1D::interval(comp.clone()))
    }

    pub fn domain(&self) -> &OpenSet1D {
        &self.domain
    }

    pub fn data(&self) -> &SectionData {
        &self.data
    }

    /// The base map `βσ` as a partial homeomorphism.
    pub fn beta(&self) -> PLMap {
        match &self.data {
            SectionData::Cache { .. } => PLMap::identity(self.domain.clone()),
            SectionData::Transport { map, .. } => map.clone(),
        }
    }

    /// The generalized inverse section `σ′(x) = σ((βσ)⁻¹ x)⁻¹`.
    pub fn inverse(&self) -> AdmissibleSection {
        match &self.data {
            SectionData::Cache { f } => AdmissibleSection {
                domain: self.domain.clone(),
                data: SectionData::Cache { f: f.neg() },
            },
            SectionData::Transport {
                edge,
                reversed,
                src,
                dst,
                map,
            } => {
                let inv = map.invert();
                AdmissibleSection {
                    domain: inv.domain().clone(),
                    data: SectionData::Transport {
                        edge: edge.clone(),
                        reversed: !reversed,
                        src: dst.clone(),
                        dst: src.clone(),
                        map: inv,
                    },
                }
            }
        }
    }
}

/// Checks the admissibility clauses on a raw base-map candidate: it must be
/// defined on the whole domain and restrict there to a homeomorphism onto an
/// open image.
pub fn admissible_base_map(domain: &OpenSet1D, beta: &PLFunction) -> Result<(), AdmissibilityIssue> {
    if domain.is_empty() {
        return Ok(());
    }
    defined_throughout(domain, beta)?;
    match PLMap::new(beta.restrict(domain)) {
        Ok(_) => Ok(()),
        Err(PLError::Jump(x)) => Err(AdmissibilityIssue::JumpAt { x }),
        Err(PLError::Fold(x)) => Err(AdmissibilityIssue::FoldAt { x }),
        Err(PLError::ConstantPiece(x)) => Err(AdmissibilityIssue::ConstantNear { x }),
        Err(PLError::ImageOverlap(x)) => Err(AdmissibilityIssue::OverlappingImages { x }),
        // Restriction of a well-formed function cannot produce malformed
        // pieces; cover the variants anyway rather than panicking.
        Err(PLError::UncoveredDomain(x)) => Err(AdmissibilityIssue::NotDefinedNear { x }),
        Err(PLError::EmptyPiece(..)) | Err(PLError::OverlappingPieces(..)) => {
            Err(AdmissibilityIssue::NotDefinedNear {
                x: domain.intervals()[0].sample(),
            })
        }
    }
}

fn defined_throughout(domain: &OpenSet1D, f: &PLFunction) -> Result<(), AdmissibilityIssue> {
    for comp in domain.intervals() {
        if let Some(x) = point_in_interval_not_in(f.domain(), comp) {
            return Err(AdmissibilityIssue::NotDefinedNear { x });
        }
    }
    Ok(())
}

fn restrict_map(map: &PLMap, set: &OpenSet1D) -> PLMap {
    PLMap::new(map.as_function().restrict(set))
        .expect("a restriction of a partial homeomorphism is one")
}

/// The cached pointwise product of a word.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProductCache {
    /// Bundle: the word's arrow over `x` is `q(x, f(x))`.
    Bundle { f: PLFunction },
    /// Chart: the composed transport with its chart endpoints.
    Chart {
        src: String,
        dst: String,
        map: PLMap,
    },
}

/// One arrow value of a section, as reported by evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ArrowValue {
    Bundle { x: Rat, t: Rat },
    Chart { src: String, dst: String, x: Rat, y: Rat },
}

/// A product of admissible sections, kept as the generating word plus the
/// cached pointwise product on the composite domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionWord {
    entries: Vec<AdmissibleSection>,
    domain: OpenSet1D,
    cache: ProductCache,
}

impl SectionWord {
    /// The one-letter word.
    pub fn from_section(entry: AdmissibleSection) -> SectionWord {
        let domain = entry.domain.clone();
        let cache = match &entry.data {
            SectionData::Cache { f } => ProductCache::Bundle { f: f.clone() },
            SectionData::Transport { src, dst, map, .. } => ProductCache::Chart {
                src: src.clone(),
                dst: dst.clone(),
                map: map.clone(),
            },
        };
        SectionWord {
            entries: vec![entry],
            domain,
            cache,
        }
    }

    /// The identity word of a bundle model on `domain`.
    pub fn identity(domain: OpenSet1D) -> Result<SectionWord, SectionError> {
        Ok(SectionWord::from_section(AdmissibleSection::identity(
            domain,
        )?))
    }

    pub fn entries(&self) -> &[AdmissibleSection] {
        &self.entries
    }

    pub fn domain(&self) -> &OpenSet1D {
        &self.domain
    }

    pub fn cache(&self) -> &ProductCache {
        &self.cache
    }

    /// The cached fiber function, when this is a bundle word.
    pub fn cache_function(&self) -> Option<&PLFunction> {
        match &self.cache {
            ProductCache::Bundle { f } => Some(f),
            ProductCache::Chart { .. } => None,
        }
    }

    /// The composed transport, when this is a chart word.
    pub fn transport_map(&self) -> Option<&PLMap> {
        match &self.cache {
            ProductCache::Bundle { .. } => None,
            ProductCache::Chart { map, .. } => Some(map),
        }
    }

    /// Source and target charts, when this is a chart word.
    pub fn chart_endpoints(&self) -> Option<(&str, &str)> {
        match &self.cache {
            ProductCache::Bundle { .. } => None,
            ProductCache::Chart { src, dst, .. } => Some((src, dst)),
        }
    }

    /// The base map `βσ` of the cached product.
    pub fn beta(&self) -> PLMap {
        match &self.cache {
            ProductCache::Bundle { .. } => PLMap::identity(self.domain.clone()),
            ProductCache::Chart { map, .. } => map.clone(),
        }
    }

    /// The word's arrow over `x`.
    pub fn eval(&self, x: &Rat) -> Result<ArrowValue, SectionError> {
        match &self.cache {
            ProductCache::Bundle { f } => f
                .eval(x)
                .map(|t| ArrowValue::Bundle { x: x.clone(), t })
                .ok_or_else(|| SectionError::OutsideDomain(x.clone())),
            ProductCache::Chart { src, dst, map } => map
                .eval(x)
                .map(|y| ArrowValue::Chart {
                    src: src.clone(),
                    dst: dst.clone(),
                    x: x.clone(),
                    y,
                })
                .ok_or_else(|| SectionError::OutsideDomain(x.clone())),
        }
    }

    /// The Ehresmann product `(στ)(x) = σ(x) · τ(βσ x)`, on the domain
    /// `{x ∈ U_σ : βσ x ∈ U_τ}`.
    pub fn product(&self, other: &SectionWord) -> Result<SectionWord, SectionError> {
        let (domain, cache) = match (&self.cache, &other.cache) {
            (ProductCache::Bundle { f }, ProductCache::Bundle { f: g }) => {
                let sum = f.add(g);
                let domain = sum.domain().clone();
                if domain.is_empty() {
                    return Err(SectionError::EmptyDomain);
                }
                (domain, ProductCache::Bundle { f: sum })
            }
            (
                ProductCache::Chart { src, dst, map },
                ProductCache::Chart {
                    src: src2,
                    dst: dst2,
                    map: map2,
                },
            ) => {
                if dst != src2 {
                    return Err(SectionError::NotComposable(dst.clone(), src2.clone()));
                }
                let composed = map2.compose(map);
                let domain = composed.domain().clone();
                if domain.is_empty() {
                    return Err(SectionError::EmptyDomain);
                }
                (
                    domain,
                    ProductCache::Chart {
                        src: src.clone(),
                        dst: dst2.clone(),
                        map: composed,
                    },
                )
            }
            _ => return Err(SectionError::MixedFamilies),
        };
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(SectionWord {
            entries,
            domain,
            cache,
        })
    }

    /// The `k`-fold product of this word with itself.
    pub fn pow(&self, k: u32) -> Result<SectionWord, SectionError> {
        assert!(k >= 1, "pow needs a positive exponent");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// The generalized inverse word: entries reversed and inverted, cache
    /// inverted directly.
    pub fn inverse(&self) -> SectionWord {
        let entries: Vec<AdmissibleSection> =
            self.entries.iter().rev().map(|e| e.inverse()).collect();
        let (domain, cache) = match &self.cache {
            ProductCache::Bundle { f } => (self.domain.clone(), ProductCache::Bundle { f: f.neg() }),
            ProductCache::Chart { src, dst, map } => {
                let inv = map.invert();
                (
                    inv.domain().clone(),
                    ProductCache::Chart {
                        src: dst.clone(),
                        dst: src.clone(),
                        map: inv,
                    },
                )
            }
        };
        SectionWord {
            entries,
            domain,
            cache,
        }
    }

    /// The same word with the product data cut down to `set`.
    pub fn restrict(&self, set: &OpenSet1D) -> Result<SectionWord, SectionError> {
        let domain = self.domain.intersect(set);
        if domain.is_empty() {
            return Err(SectionError::EmptyDomain);
        }
        let cache = match &self.cache {
            ProductCache::Bundle { f } => ProductCache::Bundle {
                f: f.restrict(&domain),
            },
            ProductCache::Chart { src, dst, map } => ProductCache::Chart {
                src: src.clone(),
                dst: dst.clone(),
                map: restrict_map(map, &domain),
            },
        };
        Ok(SectionWord {
            entries: self.entries.clone(),
            domain,
            cache,
        })
    }

    /// Whether the cached product stays in the window set near `x` (up to
    /// fiber shifts, at the model's smoothness class).
    pub fn local_procedure_at(&self, model: &Model, x: &Rat) -> Result<(), ProcedureIssue> {
        if !self.domain.contains(x) {
            return Err(ProcedureIssue::OutsideDomain(x.clone()));
        }
        match (&self.cache, model) {
            (ProductCache::Bundle { f }, Model::QuotientBundle(m)) => m
                .w_representative(f, x)
                .map(|_| ())
                .map_err(|obstruction| ProcedureIssue::NotRepresentable {
                    at: x.clone(),
                    obstruction,
                }),
            (ProductCache::Chart { src, dst, map }, Model::ChartComplex(m)) => {
                let target = Germ1D::of(map.as_function(), x);
                let matched = m
                    .edges()
                    .iter()
                    .filter(|e| &e.src == src && &e.dst == dst)
                    .any(|e| {
                        target.is_some() && target == Germ1D::of(e.map.as_function(), x)
                    });
                if matched {
                    Ok(())
                } else {
                    Err(ProcedureIssue::NotAnEdgeGerm { at: x.clone() })
                }
            }
            _ => Err(ProcedureIssue::FamilyMismatch),
        }
    }

    /// The local-procedure test over the whole word domain.
    pub fn local_procedure(&self, model: &Model) -> Result<(), ProcedureIssue> {
        match (&self.cache, model) {
            (ProductCache::Bundle { f }, Model::QuotientBundle(m)) => m
                .representable_throughout(f, &self.domain)
                .map_err(|(at, obstruction)| ProcedureIssue::NotRepresentable {
                    at,
                    obstruction,
                }),
            (ProductCache::Chart { src, dst, map }, Model::ChartComplex(m)) => {
                let mut region = OpenSet1D::empty();
                for e in m.edges().iter().filter(|e| &e.src == src && &e.dst == dst) {
                    region = region.union(&equality_locus(map.as_function(), e.map.as_function()));
                }
                for comp in self.domain.intervals() {
                    if let Some(at) = point_in_interval_not_in(&region, comp) {
                        return Err(ProcedureIssue::NotAnEdgeGerm { at });
                    }
                }
                Ok(())
            }
            _ => Err(ProcedureIssue::FamilyMismatch),
        }
    }

    /// Runs the local-procedure test on each generating entry separately.
    ///
    /// Every entry can pass while the product fails — composing window
    /// sections can leave the window — so this is genuinely finer
    /// information than [`SectionWord::local_procedure`].
    pub fn entries_are_local_procedures(
        &self,
        model: &Model,
    ) -> Result<(), (usize, ProcedureIssue)> {
        for (i, entry) in self.entries.iter().enumerate() {
            SectionWord::from_section(entry.clone())
                .local_procedure(model)
                .map_err(|issue| (i, issue))?;
        }
        Ok(())
    }
}

/// The open set where `f` and `g` agree as functions.
fn equality_locus(f: &PLFunction, g: &PLFunction) -> OpenSet1D {
    let diff = f.sub(g);
    let mut ivs = Vec::new();
    for p in diff.pieces() {
        if p.affine().is_zero() {
            if let Some(iv) = Interval::new(p.from.clone(), p.to.clone()) {
                ivs.push(iv);
            }
        }
    }
    // Trim to the difference's domain: normalization can fuse equal pieces
    // across a puncture where neither function is defined.
    OpenSet1D::from_intervals(ivs).intersect(diff.domain())
}
