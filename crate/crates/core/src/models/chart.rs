//! Chart-complex models: local structure given by charts and gluing edges.
//!
//! A chart is an open transversal interval with a marked basepoint; an edge
//! carries points of one transversal into another through a partial PL
//! homeomorphism. Together the edges describe the window set of arrows the
//! model starts from, so the axioms specialize to graph-level statements:
//! identity edges must cover every transversal (G1), every edge must have a
//! reverse edge with the inverse map (G2), and the chart graph must be
//! connected for the edges to generate a single groupoid (G5). Openness of
//! composition and the existence of local sections (G3, G4) hold by
//! construction once the complex validates, because every edge map is a
//! homeomorphism between open subsets of the transversals.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::interval::{Interval, OpenSet1D};
use crate::pl::{Affine, PLMap};
use crate::rat::{rat, Rat};

use super::bundle::{point_in_interval_not_in, verdict};
use super::{AxiomReport, AxiomVerdict, AxiomWitness, ModelError};

/// One local chart: an open transversal with a marked basepoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub id: String,
    pub transversal: Interval,
    pub basepoint: Rat,
}

/// A directed gluing between two charts: a partial PL homeomorphism whose
/// domain lies in the source transversal and whose image lies in the target
/// transversal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub map: PLMap,
}

impl Edge {
    /// A self-edge whose map is the identity wherever it is defined.
    pub fn is_identity(&self) -> bool {
        self.src == self.dst
            && self
                .map
                .eq_as_functions(&PLMap::identity(self.map.domain().clone()))
    }
}

/// A finite complex of charts glued by edges.
///
/// Construction validates referential integrity (ids, containment of edge
/// maps in their transversals) but not the axioms; use
/// [`ChartComplexModel::check_axioms`] for those.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawComplex")]
pub struct ChartComplexModel {
    charts: Vec<Chart>,
    edges: Vec<Edge>,
}

#[derive(Deserialize)]
struct RawComplex {
    charts: Vec<Chart>,
    edges: Vec<Edge>,
}

impl TryFrom<RawComplex> for ChartComplexModel {
    type Error = ModelError;
    fn try_from(raw: RawComplex) -> Result<Self, ModelError> {
        ChartComplexModel::new(raw.charts, raw.edges)
    }
}

impl ChartComplexModel {
    pub fn new(charts: Vec<Chart>, edges: Vec<Edge>) -> Result<Self, ModelError> {
        let mut chart_ids = BTreeSet::new();
        for c in &charts {
            if !chart_ids.insert(c.id.as_str()) {
                return Err(ModelError::DuplicateId(c.id.clone()));
            }
        }
        let mut edge_ids = BTreeSet::new();
        for e in &edges {
            if !edge_ids.insert(e.id.as_str()) {
                return Err(ModelError::DuplicateId(e.id.clone()));
            }
        }
        for c in &charts {
            if !c.transversal.contains(&c.basepoint) {
                return Err(ModelError::BasepointOutside(c.id.clone()));
            }
        }
        for e in &edges {
            let chart_of = |id: &str| {
                charts
                    .iter()
                    .find(|c| c.id == id)
                    .ok_or_else(|| ModelError::UnknownChart {
                        edge: e.id.clone(),
                        chart: id.to_owned(),
                    })
            };
            let src = chart_of(&e.src)?;
            let dst = chart_of(&e.dst)?;
            if let Some(at) = escape_point(e.map.domain(), &src.transversal) {
                return Err(ModelError::EdgeOutsideTransversal {
                    edge: e.id.clone(),
                    at,
                });
            }
            if let Some(at) = escape_point(&e.map.image(), &dst.transversal) {
                return Err(ModelError::EdgeOutsideTransversal {
                    edge: e.id.clone(),
                    at,
                });
            }
        }
        Ok(ChartComplexModel { charts, edges })
    }

    /// Two charts over the interval `(-1, 1)`, glued both by the straight
    /// maps `y -> y` and the flipped maps `y -> -y` in both directions.
    ///
    /// Identifying each transversal point with its image along either gluing
    /// yields the familiar twisted band; the two incompatible gluings meet
    /// at the basepoint, where the complex picks up a two-element twist that
    /// downstream computations can detect.
    pub fn mobius() -> Self {
        let tr = Interval::open(rat(-1, 1), rat(1, 1)).expect("nonempty interval");
        let dom = OpenSet1D::interval(tr.clone());
        let chart = |id: &str| Chart {
            id: id.into(),
            transversal: tr.clone(),
            basepoint: Rat::zero(),
        };
        let edge = |id: &str, src: &str, dst: &str, map: PLMap| Edge {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
            map,
        };
        let straight = || PLMap::identity(dom.clone());
        let flip = || {
            PLMap::affine(dom.clone(), Affine::new(rat(-1, 1), Rat::zero()))
                .expect("nonzero slope")
        };
        ChartComplexModel::new(
            vec![chart("c0"), chart("c1")],
            vec![
                edge("id-c0", "c0", "c0", straight()),
                edge("id-c1", "c1", "c1", straight()),
                edge("straight-c0-c1", "c0", "c1", straight()),
                edge("straight-c1-c0", "c1", "c0", straight()),
                edge("flip-c0-c1", "c0", "c1", flip()),
                edge("flip-c1-c0", "c1", "c0", flip()),
            ],
        )
        .expect("built-in complex is valid")
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn chart(&self, id: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Drops the first identity edge (in edge order), stranding its chart's
    /// identities.
    pub fn without_first_identity_edge(&self) -> Result<Self, ModelError> {
        let mut edges = self.edges.clone();
        if let Some(pos) = edges.iter().position(Edge::is_identity) {
            edges.remove(pos);
        }
        ChartComplexModel::new(self.charts.clone(), edges)
    }

    /// Adds a chart `"isolated"` over `(-1, 1)` with its own identity edge
    /// but no gluing to the rest of the complex.
    pub fn with_isolated_chart(&self) -> Result<Self, ModelError> {
        let tr = Interval::open(rat(-1, 1), rat(1, 1)).expect("nonempty interval");
        let mut charts = self.charts.clone();
        charts.push(Chart {
            id: "isolated".into(),
            transversal: tr.clone(),
            basepoint: Rat::zero(),
        });
        let mut edges = self.edges.clone();
        edges.push(Edge {
            id: "id-isolated".into(),
            src: "isolated".into(),
            dst: "isolated".into(),
            map: PLMap::identity(OpenSet1D::interval(tr)),
        });
        ChartComplexModel::new(charts, edges)
    }

    /// Keeps only self-edges, severing every gluing between distinct charts.
    pub fn without_cross_edges(&self) -> Result<Self, ModelError> {
        let edges = self
            .edges
            .iter()
            .filter(|e| e.src == e.dst)
            .cloned()
            .collect();
        ChartComplexModel::new(self.charts.clone(), edges)
    }

    pub fn check_axioms(&self) -> AxiomReport {
        AxiomReport {
            axioms: vec![self.g1(), self.g2(), self.g3(), self.g4(), self.g5()],
        }
    }

    /// The open set of transversal points at which some self-edge of `chart`
    /// restricts to the identity.
    fn identity_region(&self, chart: &str) -> OpenSet1D {
        let mut region = OpenSet1D::empty();
        for e in self
            .edges
            .iter()
            .filter(|e| e.src == chart && e.dst == chart)
        {
            region = region.union(&identity_locus(&e.map));
        }
        region
    }

    fn g1(&self) -> AxiomVerdict {
        for c in &self.charts {
            if let Some(x) = point_in_interval_not_in(&self.identity_region(&c.id), &c.transversal)
            {
                return verdict(
                    "G1",
                    false,
                    Some(AxiomWitness::IdentityEdgeMissing {
                        chart: c.id.clone(),
                        x,
                    }),
                    None,
                    "no self-edge is the identity near this transversal point",
                );
            }
        }
        verdict(
            "G1",
            true,
            None,
            None,
            "identity edges cover every transversal",
        )
    }

    fn g2(&self) -> AxiomVerdict {
        for e in &self.edges {
            let inv = e.map.invert();
            let has_reverse = self
                .edges
                .iter()
                .any(|f| f.src == e.dst && f.dst == e.src && f.map.eq_as_functions(&inv));
            if !has_reverse {
                return verdict(
                    "G2",
                    false,
                    Some(AxiomWitness::InverseEdgeMissing { edge: e.id.clone() }),
                    None,
                    "no reverse edge carries the inverse map",
                );
            }
        }
        verdict(
            "G2",
            true,
            None,
            None,
            "every edge has a reverse edge carrying the inverse map",
        )
    }

    fn g3(&self) -> AxiomVerdict {
        verdict(
            "G3",
            true,
            None,
            None,
            "edge maps are homeomorphisms between open sets, so composability \
             is controlled by open domains and images",
        )
    }

    fn g4(&self) -> AxiomVerdict {
        verdict(
            "G4",
            true,
            None,
            None,
            "restricting an edge map near a point is an admissible local \
             section through any of its germs",
        )
    }

    fn g5(&self) -> AxiomVerdict {
        let Some(root) = self.charts.first() else {
            return verdict("G5", true, None, None, "no charts to connect");
        };
        let mut reached: BTreeSet<&str> = BTreeSet::new();
        let mut queue: VecDeque<&str> = VecDeque::new();
        reached.insert(root.id.as_str());
        queue.push_back(root.id.as_str());
        while let Some(here) = queue.pop_front() {
            for e in &self.edges {
                for (a, b) in [(&e.src, &e.dst), (&e.dst, &e.src)] {
                    if a.as_str() == here && reached.insert(b.as_str()) {
                        queue.push_back(b.as_str());
                    }
                }
            }
        }
        match self
            .charts
            .iter()
            .find(|c| !reached.contains(c.id.as_str()))
        {
            Some(stranded) => verdict(
                "G5",
                false,
                Some(AxiomWitness::UnreachableChart {
                    chart: stranded.id.clone(),
                }),
                None,
                "the chart graph must be connected for the edges to generate \
                 a single groupoid",
            ),
            None => verdict(
                "G5",
                true,
                None,
                None,
                &format!("every chart is reachable from {:?}", root.id),
            ),
        }
    }
}

/// The open set where `map` is the identity.
///
/// Pieces are intersected with the domain because normalization can fuse two
/// equal-slope pieces across a puncture: the fused span then overstates where
/// the map is actually defined.
fn identity_locus(map: &PLMap) -> OpenSet1D {
    let mut ivs = Vec::new();
    for p in map.as_function().pieces() {
        if p.affine() == Affine::identity() {
            if let Some(iv) = Interval::new(p.from.clone(), p.to.clone()) {
                ivs.push(iv);
            }
        }
    }
    OpenSet1D::from_intervals(ivs).intersect(map.domain())
}

/// A point of `set` outside the open interval `within`, if one exists.
fn escape_point(set: &OpenSet1D, within: &Interval) -> Option<Rat> {
    for iv in set.intervals() {
        if iv.lo < within.lo {
            if let Some(b) = within.lo.as_finite() {
                // `b` itself escapes when `iv` straddles it; otherwise all of
                // `iv` sits at or below `b`.
                return Some(if iv.contains(b) { b.clone() } else { iv.sample() });
            }
        }
        if iv.hi > within.hi {
            if let Some(b) = within.hi.as_finite() {
                return Some(if iv.contains(b) { b.clone() } else { iv.sample() });
            }
        }
    }
    None
}
