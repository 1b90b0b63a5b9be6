//! Exact computation with free-group endomorphisms on finite covers of a
//! rose: Stallings foldings, mod-q homology cover towers, integral homology
//! representations with surjectivity certificates, lower-central-series
//! arithmetic, Whitehead graphs, and ribbon-surface intersection forms.

pub mod covers;
pub mod error;
pub mod homology;
pub mod matrix;
pub mod nilpotent;
pub mod stallings;
pub mod surfaces;
pub mod whitehead;
pub mod word;

pub use covers::{
    is_fully_characteristic_verbal, separate_word, BasedCover, CoverTower, FiniteQuotient,
    InducedKind, InducedMap, Separation, DEFAULT_MAX_VERTICES,
};
pub use error::{Error, Result};
pub use homology::{
    cycle_class, deck_matrix, equivariance_check, find_nonsurjectivity_certificate,
    is_epi_on_homology, lift_matrix, Certificate, HomologyRep, SearchConfig, SearchGoal,
};
pub use matrix::{smith_normal_form, IntMatrix, SmithNormalForm};
pub use nilpotent::{
    acts_trivially_on_lcs_quotient, basic_commutators, congruent_mod_lcs, counterexample_alpha,
    counterexample_endomorphism, is_epi_on_nilpotent_quotient, magnus, question_witness,
    TruncatedSeries, WitnessReport,
};
pub use stallings::{complete_to_cover, graph_from_generators, is_surjective, LabeledGraph};
pub use surfaces::{
    disjointness_search, preserves_intersection_form, ribbon_family, DisjointnessVerdict,
    ElevationSet, FormPreservationReport, RibbonCover, RoseRibbon,
};
pub use whitehead::{
    connectivity_report, is_connected_no_cut_vertex, is_separable_certified_negative,
    whitehead_graph, whitehead_reduce, ConnectivityReport, WhiteheadGraph, WhiteheadReduction,
};
pub use word::{Endomorphism, Word};
