//! The successor-generation contract: the brute-force bottom-up
//! composition is checked against an independent flat-product enumeration
//! on two-level models, and both on-the-fly algorithms must then agree
//! with it on every reachable state of every corpus model.

use std::collections::{BTreeMap, BTreeSet};

use coin_core::compose::{brute_force_compose, brute_force_compose_bounded, ComposeError};
use coin_core::hierarchy::{GlobalState, HierarchyTree, NodeKind};
use coin_core::label::{Label, LabelKind};
use coin_core::lang::{elaborate, parse_model};
use coin_core::succgen::{precompute, successors_lca, successors_recursive};
use coin_core::testgen::{random_model, RandomModelCfg, DEMO_MODEL, NESTED_SHAPE_MODEL};
use coin_core::{feasible, initial_state};

fn tree_of(text: &str) -> HierarchyTree {
    elaborate(&parse_model(text).unwrap())
}

/// Renders `(label, successor)` pairs against state/action names so
/// expected values can be written down literally.
fn rendered_successors(tree: &HierarchyTree, pairs: &[(Label, GlobalState)]) -> Vec<String> {
    pairs
        .iter()
        .map(|(l, s)| {
            format!(
                "{} -> {}",
                coin_core::label::LabelDisplay { label: l, actions: &tree.actions },
                coin_core::hierarchy::StateDisplay { tree, state: s }
            )
        })
        .collect()
}

/// Independent oracle for the special case of two primitives under a
/// single composite: a direct flat-product enumeration straight from the
/// composition definition, sharing no code with `compose`.
fn two_level_product(tree: &HierarchyTree) -> BTreeMap<GlobalState, BTreeSet<(Label, GlobalState)>> {
    let NodeKind::Internal { children, spec } = &tree.node(tree.root).kind else {
        panic!("two-level oracle needs a composite root");
    };
    assert_eq!(children.len(), 2, "two-level oracle handles exactly two leaves");
    let a = &tree.leaves[0];
    let b = &tree.leaves[1];

    let mut graph: BTreeMap<GlobalState, BTreeSet<(Label, GlobalState)>> = BTreeMap::new();
    let mut frontier = vec![initial_state(tree)];
    while let Some(s) = frontier.pop() {
        if graph.contains_key(&s) {
            continue;
        }
        let (sa, sb) = (s.locals()[0], s.locals()[1]);
        let mut out = BTreeSet::new();

        for (l, t) in &a.outgoing[sa as usize] {
            if feasible(spec, l) {
                out.insert((*l, GlobalState::new(vec![*t, sb])));
            }
        }
        for (l, t) in &b.outgoing[sb as usize] {
            if feasible(spec, l) {
                out.insert((*l, GlobalState::new(vec![sa, *t])));
            }
        }
        // Synchronization in both directions.
        for (la, ta) in &a.outgoing[sa as usize] {
            for (lb, tb) in &b.outgoing[sb as usize] {
                let merged = match (la.kind(), lb.kind()) {
                    (LabelKind::Output, LabelKind::Input) => Label::merge(la, lb),
                    (LabelKind::Input, LabelKind::Output) => Label::merge(lb, la),
                    _ => None,
                };
                if let Some(m) = merged {
                    if feasible(spec, &m) {
                        out.insert((m, GlobalState::new(vec![*ta, *tb])));
                    }
                }
            }
        }

        for (_, succ) in &out {
            if !graph.contains_key(succ) {
                frontier.push(succ.clone());
            }
        }
        graph.insert(s, out);
    }
    graph
}

#[test]
fn demo_model_composition_matches_hand_enumeration() {
    let tree = tree_of(DEMO_MODEL);
    let lts = brute_force_compose(&tree).unwrap();

    assert_eq!(lts.state_count(), 3);
    assert_eq!(lts.transition_count(), 9);

    let by_state = |locals: &[u16]| {
        let s = GlobalState::new(locals.to_vec());
        rendered_successors(&tree, &lts.successors_of(&s).unwrap())
    };
    // (q0,p0): both B self-loops and the synchronized a-step.
    assert_eq!(
        by_state(&[0, 0]),
        vec!["(-,a,2) -> (q0,p0)", "(1,a,2) -> (q1,p0)", "(2,c,-) -> (q0,p0)"]
    );
    // (q1,p0): B self-loops plus A's internal b-step.
    assert_eq!(
        by_state(&[1, 0]),
        vec!["(-,a,2) -> (q1,p0)", "(1,b,1) -> (q2,p0)", "(2,c,-) -> (q1,p0)"]
    );
    // (q2,p0): B self-loops plus the synchronized c-step; the bare input
    // (-,c,1) stays blocked by the restriction.
    assert_eq!(
        by_state(&[2, 0]),
        vec!["(-,a,2) -> (q2,p0)", "(2,c,-) -> (q2,p0)", "(2,c,1) -> (q0,p0)"]
    );
}

#[test]
fn demo_model_agrees_with_flat_product_oracle() {
    let tree = tree_of(DEMO_MODEL);
    let lts = brute_force_compose(&tree).unwrap();
    let flat = two_level_product(&tree);

    assert_eq!(lts.state_count(), flat.len());
    for (state, expected) in &flat {
        let got: BTreeSet<(Label, GlobalState)> =
            lts.successors_of(state).unwrap().into_iter().collect();
        assert_eq!(&got, expected, "state {state}");
    }
}

#[test]
fn whitelist_variant_keeps_states_drops_selfloops() {
    let text = DEMO_MODEL.replace(
        "restrictL (1, a, -), (-, c, 1);",
        "onlyL (1, a, 2), (2, c, 1), (1, b, 1);",
    );
    let tree = tree_of(&text);
    let lts = brute_force_compose(&tree).unwrap();
    let flat = two_level_product(&tree);

    assert_eq!(lts.state_count(), 3);
    assert_eq!(lts.transition_count(), 3);
    for (state, expected) in &flat {
        let got: BTreeSet<(Label, GlobalState)> =
            lts.successors_of(state).unwrap().into_iter().collect();
        assert_eq!(&got, expected, "state {state}");
    }
}

#[test]
fn random_two_level_models_agree_with_flat_product() {
    let cfg = RandomModelCfg { max_leaves: 2, max_depth: 1, ..RandomModelCfg::default() };
    let mut checked = 0;
    for seed in 0..60 {
        let tree = tree_of(&random_model(seed, &cfg));
        if tree.leaf_count() != 2 {
            continue;
        }
        checked += 1;
        let lts = brute_force_compose(&tree).unwrap();
        let flat = two_level_product(&tree);
        assert_eq!(lts.state_count(), flat.len(), "seed {seed}");
        for (state, expected) in &flat {
            let got: BTreeSet<(Label, GlobalState)> =
                lts.successors_of(state).unwrap().into_iter().collect();
            assert_eq!(&got, expected, "seed {seed}, state {state}");
        }
    }
    assert!(checked >= 20, "only {checked} two-leaf models generated");
}

#[test]
fn single_leaf_composition_is_the_primitive() {
    let tree = tree_of("automaton A (1) { state s0, s1; init s0; trans s0 -> s1 (1, t, 1), s1 -> s0 (1, t, 1); } system A;");
    let lts = brute_force_compose(&tree).unwrap();
    assert_eq!(lts.state_count(), 2);
    assert_eq!(lts.transition_count(), 2);
}

#[test]
fn bound_is_enforced() {
    let tree = tree_of(DEMO_MODEL);
    assert!(matches!(
        brute_force_compose_bounded(&tree, 2),
        Err(ComposeError::BoundExceeded { actual: 3, bound: 2 })
    ));
}

/// The central equivalence: for every reachable state of every corpus
/// model, both on-the-fly generators return exactly the brute-force
/// successor set, in identical order.
#[test]
fn successor_algorithms_match_brute_force_on_corpus() {
    let mut models = vec![DEMO_MODEL.to_string(), NESTED_SHAPE_MODEL.to_string()];
    for seed in 0..50 {
        models.push(random_model(seed, &RandomModelCfg::default()));
    }

    for (i, text) in models.iter().enumerate() {
        let tree = tree_of(text);
        let tables = precompute(&tree);
        let lts = brute_force_compose(&tree).unwrap();

        for state in &lts.states {
            let expected: Vec<(Label, GlobalState)> = lts.successors_of(state).unwrap();
            let rec = successors_recursive(&tree, state);
            let lca = successors_lca(&tree, &tables, state);

            assert_eq!(rec, lca, "model {i}: algorithms disagree at {state}");
            let got: Vec<(Label, GlobalState)> =
                rec.iter().map(|t| (t.label, t.successor.clone())).collect();
            assert_eq!(got, expected, "model {i}: oracle disagrees at {state}");
        }
    }
}

#[test]
fn repeated_calls_return_identical_lists() {
    let tree = tree_of(DEMO_MODEL);
    let tables = precompute(&tree);
    let init = initial_state(&tree);
    assert_eq!(successors_lca(&tree, &tables, &init), successors_lca(&tree, &tables, &init));
    assert_eq!(successors_recursive(&tree, &init), successors_recursive(&tree, &init));

    // A reused generator with warm scratch buffers answers identically too.
    let mut gen = coin_core::succgen::RecursiveGen::new(&tree);
    let first = gen.successors(&init);
    let second = gen.successors(&init);
    assert_eq!(first, second);
}

#[test]
fn sync_transitions_carry_their_meet_point() {
    use coin_core::succgen::TransitionKind;
    let tree = tree_of(DEMO_MODEL);
    let tables = precompute(&tree);
    let init = initial_state(&tree);
    let succs = successors_lca(&tree, &tables, &init);
    let sync: Vec<_> = succs
        .iter()
        .filter_map(|t| match t.kind {
            TransitionKind::Sync { sender, receiver, lca } => Some((sender, receiver, lca)),
            _ => None,
        })
        .collect();
    assert_eq!(sync.len(), 1);
    let (sender, receiver, lca) = sync[0];
    assert_eq!(tables.lca(sender, receiver), lca);
    assert_eq!(lca, tree.root);
}
