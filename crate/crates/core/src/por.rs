//! Ample-set partial-order reduction with locality heuristics and a
//! topological-sort cycle proviso.
//!
//! A leaf qualifies for reduction at a state when its behaviour is fully
//! local by static structure (only internal labels at its current local
//! state, no synchronization partner anywhere) and the property cannot
//! observe it. The engine additionally gates ample moves on a strictly
//! increasing local-state rank, so reduced edges can never close a cycle
//! by themselves; [`proviso_pass`] remains as the safety net that
//! re-expands any residual all-reduced cycles.
//!
//! Reduction preserves verdicts for properties that cannot distinguish
//! runs differing only in where fully-local steps are interleaved.
//! [`por_admissible`] checks a formula for that syntactically; outside the
//! fragment the engine falls back to full expansion.

use crate::feasible::feasible;
use crate::hierarchy::{GlobalState, HierarchyTree, LeafIdx};
use crate::label::{Label, LabelKind};
use crate::ltl::formula::Atom;
use crate::ltl::nnf::Nnf;
use crate::ltl::AtomKind;
use crate::succgen::{successors_lca, PrecomputedTables, Transition, TransitionKind};

/// Static dependence data shared by all ample queries for one
/// (model, property) pair.
#[derive(Clone, Debug)]
pub struct StaticDependence {
    /// Per leaf: every leaf it can ever synchronize with, i.e. some open
    /// label of one complements an open label of the other and the merged
    /// label survives the filters above their LCA. Symmetric.
    pub sync_capable: Vec<Vec<LeafIdx>>,
    /// Per leaf: whether the property's atoms can observe it.
    pub visible: Vec<bool>,
}

impl StaticDependence {
    pub fn is_sync_capable(&self, leaf: LeafIdx) -> bool {
        !self.sync_capable[leaf.0 as usize].is_empty()
    }
}

/// Computes the static dependence structure once per (tree, atoms).
pub fn static_dependence(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    atoms: &[Atom],
) -> StaticDependence {
    let n = tree.leaf_count();
    let mut sync_capable: Vec<Vec<LeafIdx>> = vec![Vec::new(); n];

    for i in 0..n {
        let leaf = LeafIdx(i as u32);
        let prim = tree.leaf(leaf);
        for action in prim.output_actions() {
            for &j in tables.output_partners(leaf, action) {
                let merged = Label::new(
                    crate::label::Endpoint::Component(prim.component_id),
                    action,
                    crate::label::Endpoint::Component(tree.leaf(j).component_id),
                );
                let meet = tables.lca(leaf, j);
                if feasible(tables.from_lca_filter(meet), &merged) {
                    push_unique(&mut sync_capable[i], j);
                    push_unique(&mut sync_capable[j.0 as usize], leaf);
                }
            }
        }
    }

    let mut visible = vec![false; n];
    for atom in atoms {
        for endpoint in [&atom.label.sender, &atom.label.receiver] {
            if let Some(c) = endpoint.component() {
                if let Some(leaf) = tree.leaf_by_component(c) {
                    visible[leaf.0 as usize] = true;
                }
            }
        }
        // Enabledness of a label can flip whenever any leaf sharing its
        // action name moves; include them all.
        if atom.kind == AtomKind::En {
            for (i, prim) in tree.leaves.iter().enumerate() {
                if prim.alphabet().any(|l| l.action == atom.label.action) {
                    visible[i] = true;
                }
            }
        }
    }

    StaticDependence { sync_capable, visible }
}

fn push_unique(v: &mut Vec<LeafIdx>, x: LeafIdx) {
    if !v.contains(&x) {
        v.push(x);
    }
}

/// The enabled transitions of leaf `k` at `state`: its current-state
/// internal moves that pass the full-path filter.
fn leaf_enabled(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    state: &GlobalState,
    leaf: LeafIdx,
) -> Vec<Transition> {
    tree.leaf(leaf).outgoing[state.local(leaf) as usize]
        .iter()
        .filter(|(l, _)| feasible(tables.up_filter(leaf), l))
        .map(|(l, t)| Transition {
            label: *l,
            kind: TransitionKind::Inherited { leaf },
            successor: state.with_local(leaf, *t),
        })
        .collect()
}

fn leaf_qualifies(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    dep: &StaticDependence,
    state: &GlobalState,
    leaf: LeafIdx,
) -> Option<Vec<Transition>> {
    // C2: the property must not observe this leaf.
    if dep.visible[leaf.0 as usize] {
        return None;
    }
    // C1 (static): fully local behaviour, meaning only internal labels at the
    // current local state, and no synchronization capability anywhere.
    if dep.is_sync_capable(leaf) {
        return None;
    }
    let local = &tree.leaf(leaf).outgoing[state.local(leaf) as usize];
    if local.iter().any(|(l, _)| l.kind() != LabelKind::Internal) {
        return None;
    }
    // C0: at least one genuinely enabled transition.
    let enabled = leaf_enabled(tree, tables, state, leaf);
    if enabled.is_empty() {
        None
    } else {
        Some(enabled)
    }
}

/// Ample set at a state: the enabled transitions of the smallest
/// qualifying leaf, or the full successor list when no leaf qualifies.
pub fn ample(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    dep: &StaticDependence,
    state: &GlobalState,
) -> Vec<Transition> {
    for i in 0..tree.leaf_count() {
        if let Some(ts) = leaf_qualifies(tree, tables, dep, state, LeafIdx(i as u32)) {
            return ts;
        }
    }
    successors_lca(tree, tables, state)
}

/// The expansion the engine actually uses: the qualifying leaf is further
/// required to move strictly up its local state order, so every reduced
/// edge increases a rank and reduced-only cycles cannot form. Returns
/// `None` when the state must be fully expanded.
pub fn reduced_expansion(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    dep: &StaticDependence,
    state: &GlobalState,
) -> Option<Vec<Transition>> {
    for i in 0..tree.leaf_count() {
        let leaf = LeafIdx(i as u32);
        if let Some(ts) = leaf_qualifies(tree, tables, dep, state, leaf) {
            let current = state.local(leaf);
            if ts.iter().all(|t| t.successor.local(leaf) > current) {
                return Some(ts);
            }
        }
    }
    None
}

/// Reverse-topological elimination over a reduced graph. States whose
/// every outgoing reduced edge leads to an eliminated or fully expanded
/// state are eliminated in turn; whatever remains lies on a cycle of
/// ample-reduced states and must be re-expanded.
///
/// `edges[s]` are the explored out-edges of state `s`; `fully_expanded[s]`
/// marks states whose full successor set was taken. Returns the states to
/// re-expand, in ascending order.
pub fn proviso_pass(edges: &[Vec<usize>], fully_expanded: &[bool]) -> Vec<usize> {
    let n = edges.len();
    debug_assert_eq!(fully_expanded.len(), n);

    let mut removed: Vec<bool> = fully_expanded.to_vec();
    // Live out-degree: edges to not-yet-removed states.
    let mut live: Vec<usize> = (0..n)
        .map(|s| edges[s].iter().filter(|&&t| !removed[t]).count())
        .collect();

    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, outs) in edges.iter().enumerate() {
        for &t in outs {
            reverse[t].push(s);
        }
    }

    let mut queue: Vec<usize> =
        (0..n).filter(|&s| !removed[s] && live[s] == 0).collect();
    while let Some(s) = queue.pop() {
        if removed[s] {
            continue;
        }
        removed[s] = true;
        for &p in &reverse[s] {
            if !removed[p] {
                live[p] -= 1;
                if live[p] == 0 {
                    queue.push(p);
                }
            }
        }
    }

    (0..n).filter(|&s| !removed[s]).collect()
}

/// Reduced product exploration for a property: negates nothing (callers
/// pass the already-negated claim), reduces the model component under the
/// formula's visibility constraints, and alternates exploration with
/// proviso passes until every cycle of the reduced graph carries a fully
/// expanded state. Properties outside the admissible fragment fall back to
/// full expansion, so the verification verdict is always preserved.
pub fn explore_reduced(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    claim: &crate::ltl::BuchiAutomaton,
    formula: &crate::ltl::CiLtlFormula,
    opts: &crate::explore::ExploreOptions,
) -> crate::explore::ProductGraph {
    let mut actions = tree.actions.clone();
    let admissible = por_admissible(
        &crate::ltl::nnf(formula, &mut actions),
        &crate::ltl::negate(formula, &mut actions),
    );
    let atoms: Vec<Atom> = formula
        .atoms()
        .into_iter()
        .map(|a| crate::ltl::formula::resolve_atom(a, &mut actions))
        .collect();
    let options = crate::explore::ExploreOptions { por: admissible, ..opts.clone() };
    crate::explore::build_product_graph(tree, tables, claim, &atoms, &options)
}

// ---------------------------------------------------------------------------
// Property admissibility
// ---------------------------------------------------------------------------

/// How a subformula behaves at an "idle" position: a step of a reduced
/// (fully local, unobserved) leaf, where every property `act` atom is
/// false and every property `en` atom keeps the value it has at the next
/// observable position.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Idle {
    /// True at every idle position.
    True,
    /// False at every idle position.
    False,
    /// Equal to its value at the position closing the idle block.
    Stable,
    Unknown,
}

struct Attrs {
    robust: bool,
    idle: Idle,
    /// Truth at corresponding visible positions is preserved across
    /// idle-block changes.
    vis_ok: bool,
    /// Once true, true at every later position (G-rooted shapes).
    suffix_closed: bool,
}

/// Whether reduction is allowed to reorder invisible steps around this
/// property without changing its verdict. Checked on the formula and its
/// negation; `X` is never admissible.
pub fn por_admissible(f: &Nnf, negated: &Nnf) -> bool {
    !f.contains_next() && analyze(f).robust && analyze(negated).robust
}

fn analyze(f: &Nnf) -> Attrs {
    match f {
        Nnf::True => Attrs { robust: true, idle: Idle::True, vis_ok: true, suffix_closed: true },
        Nnf::False => Attrs { robust: true, idle: Idle::False, vis_ok: true, suffix_closed: true },
        Nnf::Lit(lit) => {
            let (robust, idle) = match lit.atom.kind {
                AtomKind::En => (true, Idle::Stable),
                AtomKind::Act if lit.positive => (false, Idle::False),
                AtomKind::Act => (false, Idle::True),
            };
            Attrs { robust, idle, vis_ok: true, suffix_closed: false }
        }
        Nnf::And(a, b) => {
            let (x, y) = (analyze(a), analyze(b));
            Attrs {
                robust: x.robust && y.robust,
                idle: idle_and(x.idle, y.idle),
                vis_ok: x.vis_ok && y.vis_ok,
                suffix_closed: x.suffix_closed && y.suffix_closed,
            }
        }
        Nnf::Or(a, b) => {
            let (x, y) = (analyze(a), analyze(b));
            Attrs {
                robust: x.robust && y.robust,
                idle: idle_or(x.idle, y.idle),
                vis_ok: x.vis_ok && y.vis_ok,
                suffix_closed: x.suffix_closed && y.suffix_closed,
            }
        }
        Nnf::Next(_) => {
            Attrs { robust: false, idle: Idle::Unknown, vis_ok: false, suffix_closed: false }
        }
        Nnf::Finally(g) => {
            let x = analyze(g);
            let robust = (x.vis_ok && matches!(x.idle, Idle::False | Idle::Stable))
                || (x.robust && x.suffix_closed);
            let idle = match x.idle {
                Idle::True => Idle::True,
                Idle::False | Idle::Stable => Idle::Stable,
                Idle::Unknown => Idle::Unknown,
            };
            Attrs { robust, idle, vis_ok: robust, suffix_closed: false }
        }
        Nnf::Globally(g) => {
            let x = analyze(g);
            let robust = x.vis_ok && matches!(x.idle, Idle::True | Idle::Stable);
            let idle = match x.idle {
                Idle::True | Idle::Stable => Idle::Stable,
                Idle::False => Idle::False,
                Idle::Unknown => Idle::Unknown,
            };
            Attrs { robust, idle, vis_ok: robust, suffix_closed: true }
        }
        Nnf::Until(a, b) => {
            let (x, y) = (analyze(a), analyze(b));
            let robust = x.vis_ok
                && y.vis_ok
                && matches!(x.idle, Idle::True | Idle::Stable)
                && matches!(y.idle, Idle::False | Idle::Stable);
            let idle = match (x.idle, y.idle) {
                (_, Idle::True) => Idle::True,
                (Idle::True, Idle::False | Idle::Stable) => Idle::Stable,
                _ => Idle::Unknown,
            };
            Attrs { robust, idle, vis_ok: robust, suffix_closed: false }
        }
        Nnf::Release(a, b) => {
            let (x, y) = (analyze(a), analyze(b));
            let robust = x.vis_ok
                && y.vis_ok
                && matches!(y.idle, Idle::True | Idle::Stable)
                && matches!(x.idle, Idle::False | Idle::Stable);
            let idle = match (x.idle, y.idle) {
                (_, Idle::False) => Idle::False,
                (Idle::False, Idle::True) => Idle::Stable,
                _ => Idle::Unknown,
            };
            Attrs { robust, idle, vis_ok: robust, suffix_closed: false }
        }
    }
}

fn idle_and(a: Idle, b: Idle) -> Idle {
    use Idle::*;
    match (a, b) {
        (False, _) | (_, False) => False,
        (True, True) => True,
        (True | Stable, True | Stable) => Stable,
        _ => Unknown,
    }
}

fn idle_or(a: Idle, b: Idle) -> Idle {
    use Idle::*;
    match (a, b) {
        (True, _) | (_, True) => True,
        (False, False) => False,
        (False | Stable, False | Stable) => Stable,
        _ => Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::ActionInterner;
    use crate::lang::parse_formula;
    use crate::ltl::nnf::{negate, nnf};

    fn admissible(text: &str) -> bool {
        let f = parse_formula(text).unwrap();
        let mut actions = ActionInterner::new();
        let pos = nnf(&f, &mut actions);
        let neg = negate(&f, &mut actions);
        por_admissible(&pos, &neg)
    }

    #[test]
    fn response_and_recurrence_patterns_are_admissible() {
        assert!(admissible("true"));
        assert!(admissible("G true"));
        assert!(admissible("F act(1,a,2)"));
        assert!(admissible("G !act(1,a,2)"));
        assert!(admissible("G (act(1,a,2) -> F act(2,b,1))"));
        assert!(admissible("G F act(1,a,2)"));
        assert!(admissible("F G !act(1,a,2)"));
        assert!(admissible("G (en(1,a,2) -> F act(1,a,2))"));
        assert!(admissible("en(1,a,2) U en(2,b,1)"));
        assert!(admissible("G (act(1,a,2) -> G !act(2,b,1))"));
    }

    #[test]
    fn step_sensitive_patterns_are_rejected() {
        assert!(!admissible("X act(1,a,2)"));
        assert!(!admissible("act(1,a,2)"));
        assert!(!admissible("!act(1,a,2)"));
        assert!(!admissible("act(1,a,2) U act(2,b,1)"));
        assert!(!admissible("G act(1,a,2)"));
    }
}
