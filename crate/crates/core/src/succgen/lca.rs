//! The LCA successor algorithm. All feasibility questions were resolved
//! during the initialization phase, so generating the successors of a
//! state is a scan of the leaves' current-state transitions: inherited
//! moves carry a precomputed yes/no, synchronizations a precomputed
//! candidate list in which only the partner's local state is checked.

use crate::hierarchy::{GlobalState, HierarchyTree, LeafIdx};
use crate::succgen::tables::PrecomputedTables;
use crate::succgen::{sort_transitions, Transition, TransitionKind};

pub struct LcaGen<'t> {
    tree: &'t HierarchyTree,
    tables: &'t PrecomputedTables,
}

impl<'t> LcaGen<'t> {
    pub fn new(tree: &'t HierarchyTree, tables: &'t PrecomputedTables) -> Self {
        LcaGen { tree, tables }
    }

    pub fn tables(&self) -> &'t PrecomputedTables {
        self.tables
    }

    /// Visits every enabled move without materializing successors; the
    /// allocation-free core shared by [`Self::successors`] and the
    /// exploration engine.
    pub fn for_each_move(&self, state: &GlobalState, mut visit: impl FnMut(RawMove)) {
        debug_assert_eq!(state.len(), self.tree.leaf_count());
        for (i, prim) in self.tree.leaves.iter().enumerate() {
            let leaf = LeafIdx(i as u32);
            let local_state = state.local(leaf);
            let local = &prim.outgoing[local_state as usize];

            for (k, (l, t)) in local.iter().enumerate() {
                if self.tables.inherited_ok(leaf, local_state, k) {
                    visit(RawMove { label: *l, leaf, target: *t, partner: None, lca: None });
                }
                for cand in self.tables.sync_candidates(leaf, local_state, k) {
                    if state.local(cand.partner) == cand.partner_state {
                        visit(RawMove {
                            label: cand.label,
                            leaf,
                            target: *t,
                            partner: Some((cand.partner, cand.partner_target)),
                            lca: Some(cand.lca),
                        });
                    }
                }
            }
        }
    }

    pub fn successors(&mut self, state: &GlobalState) -> Vec<Transition> {
        let mut out = Vec::new();
        self.for_each_move(state, |mv| {
            let (kind, successor) = match mv.partner {
                None => (
                    TransitionKind::Inherited { leaf: mv.leaf },
                    state.with_local(mv.leaf, mv.target),
                ),
                Some((partner, pt)) => (
                    TransitionKind::Sync {
                        sender: mv.leaf,
                        receiver: partner,
                        lca: mv.lca.unwrap(),
                    },
                    state.with_two(mv.leaf, mv.target, partner, pt),
                ),
            };
            out.push(Transition { label: mv.label, kind, successor });
        });
        sort_transitions(&mut out);
        out
    }
}

/// One enabled move, by leaf targets only.
#[derive(Clone, Copy, Debug)]
pub struct RawMove {
    pub label: crate::label::Label,
    pub leaf: LeafIdx,
    pub target: u16,
    /// The receiving side of a synchronization.
    pub partner: Option<(LeafIdx, u16)>,
    pub lca: Option<crate::hierarchy::NodeId>,
}
