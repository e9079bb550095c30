//! Topology-only analysis: paths, blocking conditions, vertex-disjoint paths
//! and measurement selection.

mod selection;
mod structure;

pub use selection::{
    is_feasible_selection, select_nodes, select_nodes_with, SelectionOptions, SelectionOutcome,
    DEFAULT_SELECTION_BUDGET,
};
pub use structure::{
    check_generalized_invariance, check_immersion_invariance, derived_conditions, path_exists_avoiding, to_dot,
    vertex_disjoint_paths, InvarianceQuery, StructuralGraph,
};
