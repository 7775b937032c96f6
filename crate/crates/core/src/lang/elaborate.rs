//! Elaboration: turns a validated [`SourceModel`] into the semantic
//! [`HierarchyTree`], interning action names and assigning leaf indices in
//! left-to-right tree order.

use std::collections::HashMap;

use crate::feasible::FeasibleSpec;
use crate::hierarchy::{HierarchyNode, HierarchyTree, LeafIdx, NodeId, NodeKind, PrimitiveAutomaton};
use crate::label::{ActionInterner, ComponentId, Endpoint, Label, LabelSet};
use crate::lang::ast::{FilterKind, PrimitiveDecl, RawEndpoint, RawLabel, SourceModel};

pub fn elaborate(model: &SourceModel) -> HierarchyTree {
    let mut actions = ActionInterner::new();
    let mut nodes: Vec<HierarchyNode> = Vec::new();
    let mut leaves: Vec<PrimitiveAutomaton> = Vec::new();
    let mut leaf_nodes: Vec<NodeId> = Vec::new();

    // Depth-first from the system root, children in declaration order.
    let root = build_node(
        &model.system,
        None,
        0,
        model,
        &mut actions,
        &mut nodes,
        &mut leaves,
        &mut leaf_nodes,
    );

    HierarchyTree { nodes, root, leaves, leaf_nodes, actions }
}

#[allow(clippy::too_many_arguments)]
fn build_node(
    name: &str,
    parent: Option<NodeId>,
    depth: u32,
    model: &SourceModel,
    actions: &mut ActionInterner,
    nodes: &mut Vec<HierarchyNode>,
    leaves: &mut Vec<PrimitiveAutomaton>,
    leaf_nodes: &mut Vec<NodeId>,
) -> NodeId {
    let id = NodeId(nodes.len() as u32);
    // Reserve the slot so children receive correct parent ids.
    nodes.push(HierarchyNode {
        name: name.to_string(),
        parent,
        depth,
        kind: NodeKind::Leaf { leaf: LeafIdx(0) },
    });

    if let Some(c) = model.composite(name) {
        let children: Vec<NodeId> = c
            .children
            .iter()
            .map(|child| {
                build_node(child, Some(id), depth + 1, model, actions, nodes, leaves, leaf_nodes)
            })
            .collect();
        let spec = match &c.filter {
            None => FeasibleSpec::allow_all(),
            Some((kind, labels)) => {
                let set: LabelSet =
                    labels.iter().map(|l| intern_label(l, actions)).collect();
                match kind {
                    FilterKind::RestrictL => FeasibleSpec::restrict(set),
                    FilterKind::OnlyL => FeasibleSpec::only(set),
                }
            }
        };
        nodes[id.0 as usize].kind = NodeKind::Internal { children, spec };
    } else {
        let decl = model.automaton(name).expect("validated model resolves every name");
        let leaf = LeafIdx(leaves.len() as u32);
        leaves.push(elaborate_primitive(decl, actions));
        leaf_nodes.push(id);
        nodes[id.0 as usize].kind = NodeKind::Leaf { leaf };
    }
    id
}

fn elaborate_primitive(decl: &PrimitiveDecl, actions: &mut ActionInterner) -> PrimitiveAutomaton {
    let index: HashMap<&str, u16> = decl
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as u16))
        .collect();

    let mut outgoing: Vec<Vec<(Label, u16)>> = vec![Vec::new(); decl.states.len()];
    for t in &decl.trans {
        let from = index[t.from.as_str()];
        let to = index[t.to.as_str()];
        outgoing[from as usize].push((intern_label(&t.label, actions), to));
    }
    for list in &mut outgoing {
        list.sort_unstable();
        list.dedup();
    }

    PrimitiveAutomaton {
        name: decl.name.clone(),
        component_id: ComponentId(decl.component_id),
        state_names: decl.states.clone(),
        init: index[decl.init.as_str()],
        outgoing,
    }
}

fn intern_label(raw: &RawLabel, actions: &mut ActionInterner) -> Label {
    let end = |e: &RawEndpoint| match e {
        RawEndpoint::Open => Endpoint::Open,
        RawEndpoint::Id(n) => Endpoint::Component(ComponentId(*n)),
    };
    Label::new(end(&raw.sender), actions.intern(&raw.action), end(&raw.receiver))
}
