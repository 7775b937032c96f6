//! Textbook bottom-up composition of the hierarchy into an explicit LTS.
//!
//! Every internal node composes its children: each child may move alone
//! (the label is inherited), or exactly two distinct children move together
//! when complementary open labels `(m,a,-)` and `(-,a,n)` merge into
//! `(m,a,n)`. Candidates are filtered by the node's feasible-label spec, at
//! every level. States are discovered by reachable exploration only.
//!
//! This generator is deliberately simple; it serves as the oracle that the
//! on-the-fly algorithms in [`crate::succgen`] are checked against.

use std::collections::HashMap;

use thiserror::Error;

use crate::feasible::feasible;
use crate::hierarchy::{GlobalState, HierarchyTree, NodeId, NodeKind};
use crate::label::{Label, LabelKind};

/// Default cap on the product of leaf state counts.
pub const DEFAULT_COMPOSE_BOUND: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("state space bound exceeded: product of leaf state counts {actual} > {bound}")]
    BoundExceeded { actual: u64, bound: u64 },
}

/// A fully materialized labelled transition system over global states.
#[derive(Clone, Debug)]
pub struct ExplicitLts {
    pub states: Vec<GlobalState>,
    pub initial: usize,
    /// Per-state `(label, target index)` lists, sorted by `(label, target state)`.
    pub transitions: Vec<Vec<(Label, usize)>>,
}

impl ExplicitLts {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(|t| t.len()).sum()
    }

    /// Successors of one state as `(label, target state)` pairs, in the
    /// stored (sorted) order.
    pub fn successors_of(&self, state: &GlobalState) -> Option<Vec<(Label, GlobalState)>> {
        let idx = self.states.iter().position(|s| s == state)?;
        Some(
            self.transitions[idx]
                .iter()
                .map(|(l, t)| (*l, self.states[*t].clone()))
                .collect(),
        )
    }
}

/// Intermediate LTS of one subtree; states are vectors of local states of
/// the leaves under that subtree, in leaf-index order.
struct SubLts {
    states: Vec<Vec<u16>>,
    initial: usize,
    transitions: Vec<Vec<(Label, usize)>>,
}

pub fn brute_force_compose(tree: &HierarchyTree) -> Result<ExplicitLts, ComposeError> {
    brute_force_compose_bounded(tree, DEFAULT_COMPOSE_BOUND)
}

pub fn brute_force_compose_bounded(
    tree: &HierarchyTree,
    bound: u64,
) -> Result<ExplicitLts, ComposeError> {
    let product = tree.state_space_bound();
    if product > bound {
        return Err(ComposeError::BoundExceeded { actual: product, bound });
    }

    let sub = compose_node(tree, tree.root);
    let mut states: Vec<GlobalState> = sub.states.into_iter().map(GlobalState::new).collect();

    // Canonical order: sort states, remap indices, then sort each
    // transition list by (label, target state).
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&a, &b| states[a].cmp(&states[b]));
    let mut rank = vec![0usize; states.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let mut sorted_states = Vec::with_capacity(states.len());
    let mut sorted_trans = vec![Vec::new(); states.len()];
    for &old in &order {
        sorted_states.push(states[old].clone());
    }
    for (old, list) in sub.transitions.into_iter().enumerate() {
        let mut mapped: Vec<(Label, usize)> =
            list.into_iter().map(|(l, t)| (l, rank[t])).collect();
        mapped.sort_by(|a, b| (a.0, &sorted_states[a.1]).cmp(&(b.0, &sorted_states[b.1])));
        sorted_trans[rank[old]] = mapped;
    }
    states = sorted_states;

    Ok(ExplicitLts { initial: rank[sub.initial], states, transitions: sorted_trans })
}

fn compose_node(tree: &HierarchyTree, node: NodeId) -> SubLts {
    match &tree.node(node).kind {
        NodeKind::Leaf { leaf } => {
            let prim = tree.leaf(*leaf);
            // Restrict to states reachable from init; a local state that is
            // unreachable alone cannot be reached in any composition either.
            let mut map: HashMap<u16, usize> = HashMap::new();
            let mut states: Vec<Vec<u16>> = Vec::new();
            let mut frontier = vec![prim.init];
            map.insert(prim.init, 0);
            states.push(vec![prim.init]);
            while let Some(s) = frontier.pop() {
                for (_, t) in &prim.outgoing[s as usize] {
                    if !map.contains_key(t) {
                        map.insert(*t, states.len());
                        states.push(vec![*t]);
                        frontier.push(*t);
                    }
                }
            }
            let transitions = states
                .iter()
                .map(|sv| {
                    let s = sv[0];
                    // BFS above visited every target of a reachable source.
                    prim.outgoing[s as usize].iter().map(|(l, t)| (*l, map[t])).collect()
                })
                .collect();
            SubLts { initial: 0, states, transitions }
        }
        NodeKind::Internal { children, spec } => {
            let parts: Vec<SubLts> = children.iter().map(|&c| compose_node(tree, c)).collect();

            let initial: Vec<usize> = parts.iter().map(|p| p.initial).collect();
            let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut states: Vec<Vec<usize>> = Vec::new();
            let mut transitions: Vec<Vec<(Label, usize)>> = Vec::new();
            index.insert(initial.clone(), 0);
            states.push(initial);
            let mut next = 0usize;

            while next < states.len() {
                let current = states[next].clone();
                let mut out: Vec<(Label, Vec<usize>)> = Vec::new();

                // One child moves alone; the label is inherited.
                for (i, part) in parts.iter().enumerate() {
                    for (l, t) in &part.transitions[current[i]] {
                        if feasible(spec, l) {
                            let mut succ = current.clone();
                            succ[i] = *t;
                            out.push((*l, succ));
                        }
                    }
                }

                // Two distinct children synchronize on complementary opens.
                for (i, pi) in parts.iter().enumerate() {
                    for (lo, ti) in &pi.transitions[current[i]] {
                        if lo.kind() != LabelKind::Output {
                            continue;
                        }
                        for (j, pj) in parts.iter().enumerate() {
                            if i == j {
                                continue;
                            }
                            for (li, tj) in &pj.transitions[current[j]] {
                                let Some(merged) = Label::merge(lo, li) else { continue };
                                if feasible(spec, &merged) {
                                    let mut succ = current.clone();
                                    succ[i] = *ti;
                                    succ[j] = *tj;
                                    out.push((merged, succ));
                                }
                            }
                        }
                    }
                }

                let mut resolved = Vec::with_capacity(out.len());
                for (l, succ) in out {
                    let id = *index.entry(succ.clone()).or_insert_with(|| {
                        states.push(succ);
                        states.len() - 1
                    });
                    resolved.push((l, id));
                }
                transitions.push(resolved);
                next += 1;
            }

            // Flatten child state vectors into this subtree's leaf vector.
            let flat: Vec<Vec<u16>> = states
                .iter()
                .map(|cs| {
                    cs.iter()
                        .enumerate()
                        .flat_map(|(i, &si)| parts[i].states[si].iter().copied())
                        .collect()
                })
                .collect();

            SubLts { initial: 0, states: flat, transitions }
        }
    }
}
