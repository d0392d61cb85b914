//! Structural graph analysis: separators, tree decompositions, separability
//! profiles and spectral expansion estimates.

pub mod profile;
pub mod separator;
pub mod spectral;
pub mod treewidth;

#[cfg(test)]
pub(crate) mod test_graphs;

pub use profile::{separability_profile, ProfileConfig, SeparabilityProfile};
pub use separator::{
    exact_separator, heuristic_separator, validate_separation, Separation, SeparationViolation,
    SeparatorConfig, SeparatorStrategy,
};
pub use spectral::{cheeger_estimate, CheegerEstimate};
pub use treewidth::{
    best_treewidth_upper, exact_treewidth, heuristic_treewidth_upper, EliminationHeuristic, treewidth_lower_bound, validate_tree_decomposition,
    DecompositionViolation, TreeDecomposition,
};
