//! Rips complexes over finite metric spaces with computable geodesic
//! estimates and numerical checks of the comparison inequalities.

pub mod cache;
pub mod complex;
pub mod constants;
pub mod corpus;
pub mod fixed;
pub mod geodesic;
pub mod lemma;

pub use complex::{build_relative_rips, build_rips, build_scaled_rips, ComplexKind, MetricSimplicialComplex, MAX_CLIQUE};
pub use constants::{boundary_detour_ratio, derive_dimension_constants, Derivation, DimensionConstants, MAX_CONSTANT_DIM};
pub use geodesic::{
    geodesic_lower, geodesic_lower_sets, geodesic_upper, geodesic_upper_from, geodesic_upper_sets,
    geodesic_upper_to_set, NodeKey, Subdivision, DEFAULT_LEVEL, MAX_LEVEL,
};
pub use lemma::{verify_lemma, verify_lemma_family, Lemma, LemmaParams, LemmaReport, LemmaStatus, Offender};
