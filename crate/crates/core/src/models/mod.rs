//! The two built-in model families and their axiom checker.
//!
//! A *model* is a locally structured groupoid presented exactly: either a
//! quotient bundle of line groups over the rational line (a modulus profile
//! `n` and a fiber window), or a complex of charts glued by partial PL
//! homeomorphisms. Both support the same five structural axioms, checked
//! symbolically with witnesses:
//!
//! * **G1** — every identity lies in the window set `W`;
//! * **G2** — `W` is closed under inversion;
//! * **G3** — the composable-difference set over `W` is open;
//! * **G4** — every element of `W` admits a continuous admissible local
//!   section through it;
//! * **G5** — `W` generates the whole groupoid.

mod bundle;
mod chart;

pub use bundle::{
    ModulusProfile, Obstruction, QuotientBundleModel, Side, StarKind, WRepresentative,
};
pub(crate) use bundle::point_in_interval_not_in;
pub use chart::{Chart, ChartComplexModel, Edge};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rat::Rat;

/// Rejection reasons for structurally invalid model data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("modulus profile is negative at {0}")]
    NegativeModulus(Rat),
    #[error("{0} must be defined on the whole line")]
    NotGlobal(&'static str),
    #[error("fiber window is wider than the modulus at {0} (quotient chart not injective)")]
    WindowWiderThanModulus(Rat),
    #[error("a quotient bundle needs exactly one of \"width\" or \"window\"")]
    WindowSpec,
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("edge {edge:?} references unknown chart {chart:?}")]
    UnknownChart { edge: String, chart: String },
    #[error("basepoint of chart {0:?} lies outside its transversal")]
    BasepointOutside(String),
    #[error("edge {edge:?} leaves its transversals near {at}")]
    EdgeOutsideTransversal { edge: String, at: Rat },
}

/// One axiom's verdict, with a counterexample when it fails and a positive
/// certificate where one is meaningful.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub axiom: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<AxiomWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<AxiomWitness>,
    pub note: String,
}

/// Concrete evidence attached to an axiom verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxiomWitness {
    /// G1 (bundle): the identity at `x` is not in the window set.
    IdentityOutsideWindow { x: Rat },
    /// G2 (bundle): the class of `(x, t)` is in `W` but its inverse is not.
    InverseEscapesWindow { x: Rat, t: Rat },
    /// G3 (bundle): near base point `x`, pair differences equal to `d`
    /// (reachable through shift `k`) are in `W` at `x` but not on one side.
    PairDifferenceNotOpen { x: Rat, d: Rat, k: Rat },
    /// G4 (bundle): no continuous admissible section through `(x, t)`.
    UnsectionableElement { x: Rat, t: Rat },
    /// G5 (bundle): the arrow `(x, t)` is not a product of window elements.
    UngeneratedArrow { x: Rat, t: Rat },
    /// G5 (bundle): `(x, t)` factors into `factors` window elements.
    GenerationCertificate { x: Rat, t: Rat, factors: u64 },
    /// G1 (chart): no identity edge covers `x` in this chart.
    IdentityEdgeMissing { chart: String, x: Rat },
    /// G2 (chart): this edge has no formal inverse in the complex.
    InverseEdgeMissing { edge: String },
    /// G5 (chart): this chart cannot be reached from the others.
    UnreachableChart { chart: String },
}

/// The five verdicts together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axioms: Vec<AxiomVerdict>,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.axioms.iter().all(|a| a.holds)
    }

    pub fn verdict(&self, axiom: &str) -> Option<&AxiomVerdict> {
        self.axioms.iter().find(|a| a.axiom == axiom)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.axioms
            .iter()
            .filter(|a| !a.holds)
            .map(|a| a.axiom.as_str())
            .collect()
    }
}

/// A model of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Model {
    #[serde(rename = "quotient_bundle")]
    QuotientBundle(QuotientBundleModel),
    #[serde(rename = "chart_complex")]
    ChartComplex(ChartComplexModel),
}

impl Model {
    pub fn family(&self) -> &'static str {
        match self {
            Model::QuotientBundle(_) => "quotient_bundle",
            Model::ChartComplex(_) => "chart_complex",
        }
    }

    pub fn check_axioms(&self) -> AxiomReport {
        match self {
            Model::QuotientBundle(m) => m.check_axioms(),
            Model::ChartComplex(m) => m.check_axioms(),
        }
    }

    pub fn as_bundle(&self) -> Option<&QuotientBundleModel> {
        match self {
            Model::QuotientBundle(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_chart_complex(&self) -> Option<&ChartComplexModel> {
        match self {
            Model::ChartComplex(m) => Some(m),
            _ => None,
        }
    }
}

/// Named structural mutations used to probe the axiom checker. Each targets
/// one axiom of one family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelMutation {
    /// Bundle: replace the window by the asymmetric `(-1/8, 1/4)` — breaks G2.
    BrokenSymmetry,
    /// Chart: delete the first chart's identity edge — breaks G1.
    MissingIdentities,
    /// Bundle: collapse the window to zero width on `x >= 0` — breaks G1
    /// (and, downstream, G5: nothing is left to generate with there).
    ZeroWidth,
    /// Chart: add a chart connected to nothing (it keeps its identity
    /// edge) — breaks G5.
    IsolatedChart,
    /// Chart: delete every edge between distinct charts — breaks G5.
    NonGeneratingW,
}

impl ModelMutation {
    pub const ALL: [ModelMutation; 5] = [
        ModelMutation::BrokenSymmetry,
        ModelMutation::MissingIdentities,
        ModelMutation::ZeroWidth,
        ModelMutation::IsolatedChart,
        ModelMutation::NonGeneratingW,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelMutation::BrokenSymmetry => "broken-symmetry",
            ModelMutation::MissingIdentities => "missing-identities",
            ModelMutation::ZeroWidth => "zero-width",
            ModelMutation::IsolatedChart => "isolated-chart",
            ModelMutation::NonGeneratingW => "non-generating-w",
        }
    }

    /// The axiom this mutation is designed to break.
    pub fn target_axiom(self) -> &'static str {
        match self {
            ModelMutation::BrokenSymmetry => "G2",
            ModelMutation::MissingIdentities => "G1",
            ModelMutation::ZeroWidth => "G1",
            ModelMutation::IsolatedChart => "G5",
            ModelMutation::NonGeneratingW => "G5",
        }
    }

    pub fn apply(self, model: &Model) -> Result<Model, MutationError> {
        match (self, model) {
            (ModelMutation::BrokenSymmetry, Model::QuotientBundle(m)) => {
                Ok(Model::QuotientBundle(m.with_constant_window(
                    Rat::new(-1, 8),
                    Rat::new(1, 4),
                )?))
            }
            (ModelMutation::ZeroWidth, Model::QuotientBundle(m)) => {
                Ok(Model::QuotientBundle(m.with_collapsed_window(Rat::zero())?))
            }
            (ModelMutation::MissingIdentities, Model::ChartComplex(m)) => {
                Ok(Model::ChartComplex(m.without_first_identity_edge()?))
            }
            (ModelMutation::IsolatedChart, Model::ChartComplex(m)) => {
                Ok(Model::ChartComplex(m.with_isolated_chart()?))
            }
            (ModelMutation::NonGeneratingW, Model::ChartComplex(m)) => {
                Ok(Model::ChartComplex(m.without_cross_edges()?))
            }
            _ => Err(MutationError::FamilyMismatch {
                mutation: self.name(),
                family: model.family(),
            }),
        }
    }
}

impl fmt::Display for ModelMutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelMutation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ModelMutation::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ModelMutation::ALL.iter().map(|m| m.name()).collect();
                format!("unknown mutation {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MutationError {
    #[error("mutation {mutation:?} does not apply to family {family:?}")]
    FamilyMismatch {
        mutation: &'static str,
        family: &'static str,
    },
    #[error(transparent)]
    Rebuild(#[from] ModelError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutation_names_round_trip() {
        for m in ModelMutation::ALL {
            assert_eq!(m.name().parse::<ModelMutation>(), Ok(m));
        }
        assert!("wat".parse::<ModelMutation>().is_err());
    }

    #[test]
    fn mutations_respect_families() {
        let bundle = Model::QuotientBundle(QuotientBundleModel::pradines_1());
        let chart = Model::ChartComplex(ChartComplexModel::mobius());
        assert!(ModelMutation::BrokenSymmetry.apply(&bundle).is_ok());
        assert!(ModelMutation::BrokenSymmetry.apply(&chart).is_err());
        assert!(ModelMutation::IsolatedChart.apply(&chart).is_ok());
        assert!(ModelMutation::IsolatedChart.apply(&bundle).is_err());
    }

    #[test]
    fn model_json_has_family_tag() {
        let m = Model::QuotientBundle(QuotientBundleModel::pradines_1());
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.starts_with(r#"{"family":"quotient_bundle""#));
        let back: Model = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        let c = Model::ChartComplex(ChartComplexModel::mobius());
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.starts_with(r#"{"family":"chart_complex""#));
        let back: Model = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
