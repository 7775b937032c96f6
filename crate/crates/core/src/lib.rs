//! Explicit-state model checking for hierarchical component-interaction
//! automata.
//!
//! Models are trees: primitive automata at the leaves, compositions with
//! feasible-label filters at the internal nodes. The crate provides the
//! CoIn language front end, two interchangeable on-the-fly successor
//! generators (recursive and LCA-precomputed), CI-LTL verification through
//! never-claim products, ample-set partial-order reduction, and a parallel
//! exploration engine.

pub mod compose;
pub mod explore;
pub mod feasible;
pub mod hierarchy;
pub mod label;
pub mod lang;
pub mod ltl;
pub mod por;
pub mod succgen;
pub mod testgen;

pub use feasible::{feasible, intersect, FeasibleMode, FeasibleSpec};
pub use hierarchy::{initial_state, GlobalState, HierarchyTree, LeafIdx, NodeId};
pub use label::{ActionId, ActionInterner, ComponentId, Endpoint, Label, LabelKind, LabelSet};
pub use lang::{elaborate, parse_claim, parse_formula, parse_model, ParseError};
