//! The hierarchy tree: primitive automata at the leaves, compositions with
//! feasible-label specs at the internal nodes, one designated root.

use crate::feasible::FeasibleSpec;
use crate::label::{ActionInterner, ComponentId, Label, LabelKind};

/// Index into [`HierarchyTree::nodes`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

/// Index into [`HierarchyTree::leaves`], assigned 0..n-1 in left-to-right
/// tree order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LeafIdx(pub u32);

/// A primitive component automaton: a finite transition system whose
/// transitions carry interaction labels.
#[derive(Clone, Debug)]
pub struct PrimitiveAutomaton {
    pub name: String,
    pub component_id: ComponentId,
    pub state_names: Vec<String>,
    pub init: u16,
    /// Per-state outgoing transitions, sorted by `(label, target)` and
    /// deduplicated, so iteration order is reproducible.
    pub outgoing: Vec<Vec<(Label, u16)>>,
}

impl PrimitiveAutomaton {
    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    /// All labels appearing on any transition of this automaton.
    pub fn alphabet(&self) -> impl Iterator<Item = &Label> {
        self.outgoing.iter().flatten().map(|(l, _)| l)
    }

    /// Output actions anywhere in the alphabet (state-independent).
    pub fn output_actions(&self) -> Vec<crate::label::ActionId> {
        let mut v: Vec<_> = self
            .alphabet()
            .filter(|l| l.kind() == LabelKind::Output)
            .map(|l| l.action)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Input actions anywhere in the alphabet (state-independent).
    pub fn input_actions(&self) -> Vec<crate::label::ActionId> {
        let mut v: Vec<_> = self
            .alphabet()
            .filter(|l| l.kind() == LabelKind::Input)
            .map(|l| l.action)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug)]
pub enum NodeKind {
    /// Composition node with its feasible-label spec.
    Internal { children: Vec<NodeId>, spec: FeasibleSpec },
    Leaf { leaf: LeafIdx },
}

#[derive(Clone, Debug)]
pub struct HierarchyNode {
    pub name: String,
    pub parent: Option<NodeId>,
    pub depth: u32,
    pub kind: NodeKind,
}

/// The elaborated model. Immutable after construction; shared read-only
/// across workers.
#[derive(Clone, Debug)]
pub struct HierarchyTree {
    pub nodes: Vec<HierarchyNode>,
    pub root: NodeId,
    pub leaves: Vec<PrimitiveAutomaton>,
    /// Hierarchy node of each leaf, indexed by [`LeafIdx`].
    pub leaf_nodes: Vec<NodeId>,
    pub actions: ActionInterner,
}

impl HierarchyTree {
    pub fn node(&self, id: NodeId) -> &HierarchyNode {
        &self.nodes[id.0 as usize]
    }

    pub fn leaf(&self, idx: LeafIdx) -> &PrimitiveAutomaton {
        &self.leaves[idx.0 as usize]
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Spec of an internal node; leaves have none.
    pub fn spec(&self, id: NodeId) -> Option<&FeasibleSpec> {
        match &self.node(id).kind {
            NodeKind::Internal { spec, .. } => Some(spec),
            NodeKind::Leaf { .. } => None,
        }
    }

    /// Leaf index owning the given component id, if any.
    pub fn leaf_by_component(&self, id: ComponentId) -> Option<LeafIdx> {
        self.leaves
            .iter()
            .position(|p| p.component_id == id)
            .map(|i| LeafIdx(i as u32))
    }

    /// Internal node ids in post-order (children before parents).
    pub fn post_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                order.push(id);
                continue;
            }
            stack.push((id, true));
            if let NodeKind::Internal { children, .. } = &self.node(id).kind {
                for &c in children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    /// Product of leaf state counts, saturating at `u64::MAX`.
    pub fn state_space_bound(&self) -> u64 {
        self.leaves
            .iter()
            .fold(1u64, |acc, p| acc.saturating_mul(p.state_count() as u64))
    }
}

/// A global state: one local state index per leaf, in leaf-index order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GlobalState {
    locals: Box<[u16]>,
}

impl GlobalState {
    pub fn new(locals: Vec<u16>) -> Self {
        GlobalState { locals: locals.into_boxed_slice() }
    }

    pub fn local(&self, leaf: LeafIdx) -> u16 {
        self.locals[leaf.0 as usize]
    }

    pub fn locals(&self) -> &[u16] {
        &self.locals
    }

    pub fn len(&self) -> usize {
        self.locals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locals.is_empty()
    }

    /// Copy with one leaf moved to a new local state.
    pub fn with_local(&self, leaf: LeafIdx, target: u16) -> GlobalState {
        let mut locals = self.locals.clone();
        locals[leaf.0 as usize] = target;
        GlobalState { locals }
    }

    /// Copy with two leaves moved simultaneously (a synchronization step).
    pub fn with_two(&self, a: LeafIdx, ta: u16, b: LeafIdx, tb: u16) -> GlobalState {
        debug_assert_ne!(a, b);
        let mut locals = self.locals.clone();
        locals[a.0 as usize] = ta;
        locals[b.0 as usize] = tb;
        GlobalState { locals }
    }
}

impl std::fmt::Display for GlobalState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.locals.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// The designated initial state: every leaf in its `init` local state.
pub fn initial_state(tree: &HierarchyTree) -> GlobalState {
    GlobalState::new(tree.leaves.iter().map(|p| p.init).collect())
}

/// Renders a global state with the leaves' own state names, e.g. `(q0,p0)`.
pub struct StateDisplay<'a> {
    pub tree: &'a HierarchyTree,
    pub state: &'a GlobalState,
}

impl std::fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.state.locals().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.tree.leaves[i].state_names[*s as usize])?;
        }
        write!(f, ")")
    }
}
