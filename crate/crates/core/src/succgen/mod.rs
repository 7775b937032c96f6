//! On-the-fly successor generation.
//!
//! Two interchangeable algorithms produce, for any global state, exactly
//! the outgoing transitions of the composed system: [`recursive`] combines
//! child transition lists bottom-up at every call, [`lca`] answers from
//! tables built once by [`tables::precompute`]. Both return the same
//! ordered list; the brute-force composition in [`crate::compose`] is the
//! oracle for that contract.

pub mod lca;
pub mod recursive;
pub mod tables;

pub use lca::LcaGen;
pub use recursive::RecursiveGen;
pub use tables::{precompute, PrecomputedTables};

use crate::feasible::feasible;
use crate::hierarchy::{GlobalState, HierarchyTree, LeafIdx, NodeId};
use crate::label::{Label, LabelKind};

/// Which successor algorithm to run.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Algorithm {
    Recursive,
    #[default]
    Lca,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algorithm::Recursive => write!(f, "recursive"),
            Algorithm::Lca => write!(f, "lca"),
        }
    }
}

/// How a transition of the composed system came about.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TransitionKind {
    /// A single leaf moved; the label is its own.
    Inherited { leaf: LeafIdx },
    /// Two leaves synchronized; the merge happened at their LCA.
    Sync { sender: LeafIdx, receiver: LeafIdx, lca: NodeId },
}

/// One outgoing transition of a global state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transition {
    pub label: Label,
    pub kind: TransitionKind,
    pub successor: GlobalState,
}

pub(crate) fn sort_transitions(out: &mut [Transition]) {
    out.sort_by(|a, b| (a.label, &a.successor).cmp(&(b.label, &b.successor)));
}

/// A per-worker successor generator. Recursive generators carry reusable
/// scratch buffers, so each worker owns one; the shared tree and tables
/// are only read.
pub enum Generator<'t> {
    Recursive(RecursiveGen<'t>),
    Lca(LcaGen<'t>),
}

impl<'t> Generator<'t> {
    pub fn new(
        tree: &'t HierarchyTree,
        tables: &'t PrecomputedTables,
        algorithm: Algorithm,
    ) -> Self {
        match algorithm {
            Algorithm::Recursive => Generator::Recursive(RecursiveGen::new(tree)),
            Algorithm::Lca => Generator::Lca(LcaGen::new(tree, tables)),
        }
    }

    pub fn successors(&mut self, state: &GlobalState) -> Vec<Transition> {
        match self {
            Generator::Recursive(g) => g.successors(state),
            Generator::Lca(g) => g.successors(state),
        }
    }
}

/// Convenience entry point for the recursive algorithm.
pub fn successors_recursive(tree: &HierarchyTree, state: &GlobalState) -> Vec<Transition> {
    RecursiveGen::new(tree).successors(state)
}

/// Convenience entry point for the LCA algorithm.
pub fn successors_lca(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    state: &GlobalState,
) -> Vec<Transition> {
    LcaGen::new(tree, tables).successors(state)
}

/// Decides whether a specific label is enabled at a state without
/// generating the full successor list. Agrees with membership of the label
/// in the successor set; used for `en(l)` atom evaluation.
pub fn is_label_enabled(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    state: &GlobalState,
    label: &Label,
) -> bool {
    match label.kind() {
        LabelKind::Output | LabelKind::Input => {
            // Open labels only ever appear inherited from their one owner.
            let owner = label.sender.component().or_else(|| label.receiver.component());
            let Some(leaf) = owner.and_then(|c| tree.leaf_by_component(c)) else {
                return false;
            };
            has_local(tree, state, leaf, label) && feasible(tables.up_filter(leaf), label)
        }
        LabelKind::Internal => {
            let m = label.sender.component().unwrap();
            let n = label.receiver.component().unwrap();
            if m == n {
                // A leaf's own internal label, inherited up the whole path.
                let Some(leaf) = tree.leaf_by_component(m) else { return false };
                has_local(tree, state, leaf, label)
                    && feasible(tables.up_filter(leaf), label)
            } else {
                // A synchronization label formed at the owners' LCA.
                let (Some(li), Some(lj)) =
                    (tree.leaf_by_component(m), tree.leaf_by_component(n))
                else {
                    return false;
                };
                let out_half = Label::output(m, label.action);
                let in_half = Label::input(label.action, n);
                if !has_local(tree, state, li, &out_half) || !has_local(tree, state, lj, &in_half) {
                    return false;
                }
                let meet = tables.lca(li, lj);
                feasible(tables.to_lca_filter(li, meet, tree), &out_half)
                    && feasible(tables.to_lca_filter(lj, meet, tree), &in_half)
                    && feasible(tables.from_lca_filter(meet), label)
            }
        }
    }
}

fn has_local(tree: &HierarchyTree, state: &GlobalState, leaf: LeafIdx, label: &Label) -> bool {
    tree.leaf(leaf).outgoing[state.local(leaf) as usize]
        .iter()
        .any(|(l, _)| l == label)
}
