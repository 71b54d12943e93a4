//! Exact computation in holonomy and monodromy groupoids of locally
//! topological/Lie groupoid data on the rational line.
//!
//! Everything is symbolic: base points, windows, and sections are
//! piecewise-linear objects over arbitrary-precision rationals, so every
//! verdict (germ equality, kernel classification, axiom audits, …) is an
//! exact decision, not a numeric approximation.

pub mod germ;
pub mod holonomy;
pub mod groupoid;
pub mod interval;
pub mod models;
pub mod monodromy;
pub mod pl;
pub mod rat;
pub mod report;
pub mod sections;
pub mod suite;

pub use germ::{Germ1D, SmoothnessClass};
pub use groupoid::{
    quotient, Arrow, FiniteGroupoid, GroupoidDefect, GroupoidMorphism, MorphismDefect,
    NormalSubgroupoid, NormalityError,
};
pub use holonomy::{
    chart_map, chart_transition, factor_count, generates, germ_compose, germ_inverse, hol_equal,
    in_j0, is_extendible, kernel_at, kernel_at_chart, lift_morphism, normality_audit, final_map,
    same_germ, ExtendibilityReport, GenerationEvidence, GenerationReport, GermClass, GermDatum,
    HolClass, HolError, J0Verdict, J0Witness, KernelDescriptor, KernelKind, LiftError,
    NormalityFailure, NormalityReport, WElement,
};
pub use interval::{Bound, Interval, OpenSet1D};
pub use monodromy::{
    ambient_product, congruence_classes, germ_sum, mon_equal, mon_extend, mon_reduce,
    safe_regime_at, star_projection_check, wraparound_point, AmbientArrow, ExtensionImage,
    MonEquality, MonError, MonExtension, MonLocalData, MonodromyWord, Pregroupoid, StarBase,
    StarReport,
};
pub use models::{
    AxiomReport, AxiomVerdict, AxiomWitness, Chart, ChartComplexModel, Edge, Model, ModelError,
    ModelMutation, ModulusProfile, MutationError, Obstruction, QuotientBundleModel, Side,
    StarKind, WRepresentative,
};
pub use pl::{Affine, PLFunction, PLMap, Piece};
pub use rat::Rat;
pub use report::{fingerprint_bytes, model_fingerprint, Report, ENGINE_VERSION};
pub use sections::{
    admissible_base_map, AdmissibilityIssue, AdmissibleSection, ArrowValue, ProcedureIssue,
    ProductCache, SectionData, SectionError, SectionWord,
};
pub use suite::{
    axiom_mutation_check, inverse_monoid_check, kernel_profile_check, mobius_kernel_check,
    monodromy_extension_check, normality_check, run_suite, smoothness_dichotomy_check,
    star_membership_check, transition_check, window_obstruction_check, CheckOutcome,
    SuiteOutcome,
};
