//! The initialization phase of the LCA algorithm: pairwise lowest common
//! ancestors, per-path feasible-set intersections, and static
//! synchronization partners. Everything here is derived from the tree
//! alone and never touches states.

use crate::feasible::{intersect, FeasibleSpec};
use crate::hierarchy::{HierarchyTree, LeafIdx, NodeId, NodeKind};
use crate::label::{ActionId, Label};

#[derive(Clone, Debug, PartialEq)]
pub struct PrecomputedTables {
    leaf_count: usize,
    /// `lca[i * leaf_count + j]`, `i != j`; symmetric.
    lca: Vec<NodeId>,
    /// Per leaf, prefix intersections walking up from its parent:
    /// `prefix[t]` covers the first `t` nodes of the path. `prefix[0]` is
    /// allow-all, the last entry covers the whole path including the root.
    path_prefix: Vec<Vec<FeasibleSpec>>,
    /// Full-path intersection per leaf (equals its last path prefix).
    up_filter: Vec<FeasibleSpec>,
    /// Per internal node: its own spec intersected with all ancestors'.
    from_lca: Vec<FeasibleSpec>,
    /// Per leaf, sorted by action: leaves owning a complementary open input
    /// for this leaf's open output on that action.
    out_partners: Vec<Vec<(ActionId, Vec<LeafIdx>)>>,
    /// Mirror image for the input side.
    in_partners: Vec<Vec<(ActionId, Vec<LeafIdx>)>>,
    /// `inherited_ok[leaf][state][k]`: the k-th outgoing transition of the
    /// local state passes the full-path filter. Membership queries during
    /// generation resolve in these precomputed answers.
    inherited_ok: Vec<Vec<Vec<bool>>>,
    /// `sync_cands[leaf][state][k]`: all statically feasible partner
    /// transitions for the k-th outgoing transition (when it is an open
    /// output); only the partner's current local state remains to check.
    sync_cands: Vec<Vec<Vec<Vec<SyncCand>>>>,
}

/// A statically validated synchronization candidate: the open halves pass
/// their partial paths and the merged label passes from the meet point up.
#[derive(Clone, Debug, PartialEq)]
pub struct SyncCand {
    pub partner: LeafIdx,
    pub partner_state: u16,
    pub partner_target: u16,
    pub label: Label,
    pub lca: NodeId,
}

impl PrecomputedTables {
    /// Lowest common ancestor of two distinct leaves.
    pub fn lca(&self, i: LeafIdx, j: LeafIdx) -> NodeId {
        debug_assert_ne!(i, j);
        self.lca[i.0 as usize * self.leaf_count + j.0 as usize]
    }

    /// Intersection of all specs on the path from the leaf's parent up to
    /// and including the root; decides inherited transitions.
    pub fn up_filter(&self, leaf: LeafIdx) -> &FeasibleSpec {
        &self.up_filter[leaf.0 as usize]
    }

    /// Intersection of the specs strictly between the leaf and `node`
    /// (exclusive of both). `node` must lie on the leaf's root path.
    pub fn to_lca_filter(&self, leaf: LeafIdx, node: NodeId, tree: &HierarchyTree) -> &FeasibleSpec {
        let parent_depth = match tree.node(tree.leaf_nodes[leaf.0 as usize]).parent {
            Some(p) => tree.node(p).depth,
            None => return &self.path_prefix[leaf.0 as usize][0],
        };
        let t = (parent_depth - tree.node(node).depth) as usize;
        &self.path_prefix[leaf.0 as usize][t]
    }

    /// Intersection of the node's spec with all its ancestors'; decides the
    /// merged label of a synchronization formed at the node.
    pub fn from_lca_filter(&self, node: NodeId) -> &FeasibleSpec {
        &self.from_lca[node.0 as usize]
    }

    /// Leaves possessing an open input on `action`, the static sync
    /// candidates for an open output of `leaf`.
    pub fn output_partners(&self, leaf: LeafIdx, action: ActionId) -> &[LeafIdx] {
        lookup_partners(&self.out_partners[leaf.0 as usize], action)
    }

    /// Leaves possessing an open output on `action`.
    pub fn input_partners(&self, leaf: LeafIdx, action: ActionId) -> &[LeafIdx] {
        lookup_partners(&self.in_partners[leaf.0 as usize], action)
    }

    /// Whether the k-th outgoing transition of the leaf's local state is
    /// inheritable all the way to the root.
    pub fn inherited_ok(&self, leaf: LeafIdx, state: u16, k: usize) -> bool {
        self.inherited_ok[leaf.0 as usize][state as usize][k]
    }

    /// Statically feasible synchronization candidates of the k-th outgoing
    /// transition of the leaf's local state (empty unless an open output).
    pub fn sync_candidates(&self, leaf: LeafIdx, state: u16, k: usize) -> &[SyncCand] {
        &self.sync_cands[leaf.0 as usize][state as usize][k]
    }

    /// Approximate heap footprint of all tables, for overhead accounting.
    pub fn approx_bytes(&self) -> usize {
        let spec_bytes = |s: &FeasibleSpec| s.approx_bytes();
        let mut total = self.lca.capacity() * std::mem::size_of::<NodeId>();
        for p in &self.path_prefix {
            total += p.iter().map(spec_bytes).sum::<usize>();
        }
        total += self.up_filter.iter().map(spec_bytes).sum::<usize>();
        total += self.from_lca.iter().map(spec_bytes).sum::<usize>();
        for side in [&self.out_partners, &self.in_partners] {
            for per_leaf in side.iter() {
                total += per_leaf
                    .iter()
                    .map(|(_, v)| {
                        std::mem::size_of::<(ActionId, Vec<LeafIdx>)>()
                            + v.capacity() * std::mem::size_of::<LeafIdx>()
                    })
                    .sum::<usize>();
            }
        }
        for per_leaf in &self.inherited_ok {
            for per_state in per_leaf {
                total += 24 + per_state.capacity();
            }
        }
        for per_leaf in &self.sync_cands {
            for per_state in per_leaf {
                for per_trans in per_state {
                    total += 24 + per_trans.capacity() * std::mem::size_of::<SyncCand>();
                }
            }
        }
        total
    }
}

fn lookup_partners(per_leaf: &[(ActionId, Vec<LeafIdx>)], action: ActionId) -> &[LeafIdx] {
    match per_leaf.binary_search_by_key(&action, |(a, _)| *a) {
        Ok(pos) => &per_leaf[pos].1,
        Err(_) => &[],
    }
}

/// Runs the initialization phase once for a tree.
pub fn precompute(tree: &HierarchyTree) -> PrecomputedTables {
    let n = tree.leaf_count();

    // Pairwise LCAs by walking the shallower node up; fine at this scale.
    let mut lca = vec![tree.root; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let node = lca_of(tree, tree.leaf_nodes[i], tree.leaf_nodes[j]);
            lca[i * n + j] = node;
            lca[j * n + i] = node;
        }
    }

    // Path prefixes and full-path filters.
    let mut path_prefix = Vec::with_capacity(n);
    let mut up_filter = Vec::with_capacity(n);
    for i in 0..n {
        let mut prefix = vec![FeasibleSpec::allow_all()];
        let mut walk = tree.node(tree.leaf_nodes[i]).parent;
        while let Some(p) = walk {
            let spec = tree.spec(p).expect("parents are internal nodes");
            prefix.push(intersect(prefix.last().unwrap(), spec));
            walk = tree.node(p).parent;
        }
        up_filter.push(prefix.last().unwrap().clone());
        path_prefix.push(prefix);
    }

    // Top-down: node spec intersected with everything above it.
    let mut from_lca = vec![FeasibleSpec::allow_all(); tree.nodes.len()];
    let mut order: Vec<NodeId> = tree.post_order();
    order.reverse(); // parents before children
    for id in order {
        if let NodeKind::Internal { spec, .. } = &tree.node(id).kind {
            let own = match tree.node(id).parent {
                Some(p) => intersect(&from_lca[p.0 as usize], spec),
                None => spec.clone(),
            };
            from_lca[id.0 as usize] = own;
        }
    }

    // Static partners from leaf alphabets only.
    let inputs: Vec<Vec<ActionId>> = tree.leaves.iter().map(|p| p.input_actions()).collect();
    let outputs: Vec<Vec<ActionId>> = tree.leaves.iter().map(|p| p.output_actions()).collect();
    let mut out_partners = Vec::with_capacity(n);
    let mut in_partners = Vec::with_capacity(n);
    for i in 0..n {
        let mut out_row: Vec<(ActionId, Vec<LeafIdx>)> = outputs[i]
            .iter()
            .map(|&a| {
                let js = (0..n)
                    .filter(|&j| j != i && inputs[j].binary_search(&a).is_ok())
                    .map(|j| LeafIdx(j as u32))
                    .collect();
                (a, js)
            })
            .collect();
        out_row.sort_by_key(|(a, _)| *a);
        out_partners.push(out_row);

        let mut in_row: Vec<(ActionId, Vec<LeafIdx>)> = inputs[i]
            .iter()
            .map(|&a| {
                let js = (0..n)
                    .filter(|&j| j != i && outputs[j].binary_search(&a).is_ok())
                    .map(|j| LeafIdx(j as u32))
                    .collect();
                (a, js)
            })
            .collect();
        in_row.sort_by_key(|(a, _)| *a);
        in_partners.push(in_row);
    }

    let mut tables = PrecomputedTables {
        leaf_count: n,
        lca,
        path_prefix,
        up_filter,
        from_lca,
        out_partners,
        in_partners,
        inherited_ok: Vec::new(),
        sync_cands: Vec::new(),
    };
    resolve_transition_queries(tree, &mut tables);
    tables
}

/// Answers every per-transition feasibility question once, so generation
/// never consults the label sets again.
fn resolve_transition_queries(tree: &HierarchyTree, tables: &mut PrecomputedTables) {
    use crate::feasible::feasible;
    use crate::label::LabelKind;

    let n = tree.leaf_count();
    let mut inherited_ok = Vec::with_capacity(n);
    let mut sync_cands = Vec::with_capacity(n);

    for i in 0..n {
        let leaf = LeafIdx(i as u32);
        let prim = tree.leaf(leaf);
        let mut ok_per_state = Vec::with_capacity(prim.state_count());
        let mut cands_per_state = Vec::with_capacity(prim.state_count());

        for outgoing in &prim.outgoing {
            let ok: Vec<bool> = outgoing
                .iter()
                .map(|(l, _)| feasible(&tables.up_filter[i], l))
                .collect();

            let cands: Vec<Vec<SyncCand>> = outgoing
                .iter()
                .map(|(l, _)| {
                    if l.kind() != LabelKind::Output {
                        return Vec::new();
                    }
                    let mut list = Vec::new();
                    for &j in lookup_partners(&tables.out_partners[i], l.action) {
                        let meet = tables.lca(leaf, j);
                        let to_i = tables.to_lca_filter(leaf, meet, tree);
                        if !feasible(to_i, l) {
                            continue;
                        }
                        let partner = tree.leaf(j);
                        for (sj, partner_out) in partner.outgoing.iter().enumerate() {
                            for (lj, tj) in partner_out {
                                let Some(merged) = Label::merge(l, lj) else { continue };
                                if feasible(tables.to_lca_filter(j, meet, tree), lj)
                                    && feasible(&tables.from_lca[meet.0 as usize], &merged)
                                {
                                    list.push(SyncCand {
                                        partner: j,
                                        partner_state: sj as u16,
                                        partner_target: *tj,
                                        label: merged,
                                        lca: meet,
                                    });
                                }
                            }
                        }
                    }
                    list
                })
                .collect();

            ok_per_state.push(ok);
            cands_per_state.push(cands);
        }
        inherited_ok.push(ok_per_state);
        sync_cands.push(cands_per_state);
    }

    tables.inherited_ok = inherited_ok;
    tables.sync_cands = sync_cands;
}

fn lca_of(tree: &HierarchyTree, a: NodeId, b: NodeId) -> NodeId {
    let mut x = a;
    let mut y = b;
    while tree.node(x).depth > tree.node(y).depth {
        x = tree.node(x).parent.expect("deeper node has a parent");
    }
    while tree.node(y).depth > tree.node(x).depth {
        y = tree.node(y).parent.expect("deeper node has a parent");
    }
    while x != y {
        x = tree.node(x).parent.expect("distinct nodes at equal depth have parents");
        y = tree.node(y).parent.expect("distinct nodes at equal depth have parents");
    }
    x
}
