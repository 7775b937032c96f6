//! The recursive successor algorithm: obtain the children's transitions,
//! combine them under the node's composition parameter, repeat up to the
//! root. Scratch buffers live in a per-worker arena so steady-state calls
//! allocate nothing.

use crate::feasible::feasible;
use crate::hierarchy::{GlobalState, HierarchyTree, LeafIdx, NodeId, NodeKind};
use crate::label::{Label, LabelKind};
use crate::succgen::{sort_transitions, Transition, TransitionKind};

#[derive(Clone, Copy, Debug)]
struct SyncPart {
    receiver: LeafIdx,
    target: u16,
    lca: NodeId,
}

/// A candidate move bubbling up the tree: one leaf move, or a merged pair.
#[derive(Clone, Copy, Debug)]
struct RecMove {
    label: Label,
    leaf: LeafIdx,
    target: u16,
    sync: Option<SyncPart>,
}

pub struct RecursiveGen<'t> {
    tree: &'t HierarchyTree,
    post_order: Vec<NodeId>,
    /// Per-node move buffers, reused across calls.
    bufs: Vec<Vec<RecMove>>,
    /// Returned child buffers waiting for reuse.
    free: Vec<Vec<RecMove>>,
}

impl<'t> RecursiveGen<'t> {
    pub fn new(tree: &'t HierarchyTree) -> Self {
        RecursiveGen {
            tree,
            post_order: tree.post_order(),
            bufs: vec![Vec::new(); tree.nodes.len()],
            free: Vec::new(),
        }
    }

    pub fn successors(&mut self, state: &GlobalState) -> Vec<Transition> {
        debug_assert_eq!(state.len(), self.tree.leaf_count());

        for idx in 0..self.post_order.len() {
            let node = self.post_order[idx];
            let mut buf = self.free.pop().unwrap_or_default();
            buf.clear();

            match &self.tree.node(node).kind {
                NodeKind::Leaf { leaf } => {
                    let prim = self.tree.leaf(*leaf);
                    for (l, t) in &prim.outgoing[state.local(*leaf) as usize] {
                        buf.push(RecMove { label: *l, leaf: *leaf, target: *t, sync: None });
                    }
                }
                NodeKind::Internal { children, spec } => {
                    let mut child_bufs = Vec::with_capacity(children.len());
                    for &c in children {
                        child_bufs.push(std::mem::take(&mut self.bufs[c.0 as usize]));
                    }

                    // Inherited: any child moves alone, label unchanged.
                    for cb in &child_bufs {
                        for m in cb {
                            if feasible(spec, &m.label) {
                                buf.push(*m);
                            }
                        }
                    }

                    // Synchronization between two distinct children.
                    for (x, cbx) in child_bufs.iter().enumerate() {
                        for mo in cbx.iter().filter(|m| m.label.kind() == LabelKind::Output) {
                            debug_assert!(mo.sync.is_none(), "open labels are single-leaf moves");
                            for (y, cby) in child_bufs.iter().enumerate() {
                                if x == y {
                                    continue;
                                }
                                for mi in cby.iter().filter(|m| {
                                    m.label.kind() == LabelKind::Input
                                        && m.label.action == mo.label.action
                                }) {
                                    let merged = Label::merge(&mo.label, &mi.label)
                                        .expect("complementary opens merge");
                                    if feasible(spec, &merged) {
                                        buf.push(RecMove {
                                            label: merged,
                                            leaf: mo.leaf,
                                            target: mo.target,
                                            sync: Some(SyncPart {
                                                receiver: mi.leaf,
                                                target: mi.target,
                                                lca: node,
                                            }),
                                        });
                                    }
                                }
                            }
                        }
                    }

                    for cb in child_bufs {
                        self.free.push(cb);
                    }
                }
            }
            self.bufs[node.0 as usize] = buf;
        }

        let root_buf = std::mem::take(&mut self.bufs[self.tree.root.0 as usize]);
        let mut out = Vec::with_capacity(root_buf.len());
        for m in &root_buf {
            let (kind, successor) = match m.sync {
                None => (
                    TransitionKind::Inherited { leaf: m.leaf },
                    state.with_local(m.leaf, m.target),
                ),
                Some(sp) => (
                    TransitionKind::Sync { sender: m.leaf, receiver: sp.receiver, lca: sp.lca },
                    state.with_two(m.leaf, m.target, sp.receiver, sp.target),
                ),
            };
            out.push(Transition { label: m.label, kind, successor });
        }
        self.free.push(root_buf);

        sort_transitions(&mut out);
        out
    }
}
