//! The initialization phase: LCA queries, path filters, static partners.

use coin_core::feasible::FeasibleSpec;
use coin_core::hierarchy::LeafIdx;
use coin_core::label::LabelSet;
use coin_core::lang::{elaborate, parse_model};
use coin_core::succgen::precompute;
use coin_core::testgen::{DEMO_MODEL, NESTED_SHAPE_MODEL};

#[test]
fn nested_shape_lca_queries() {
    let tree = elaborate(&parse_model(NESTED_SHAPE_MODEL).unwrap());
    let tables = precompute(&tree);

    let leaf = |name: &str| {
        LeafIdx(tree.leaves.iter().position(|p| p.name == name).unwrap() as u32)
    };
    let node_name = |id: coin_core::NodeId| tree.node(id).name.as_str();

    assert_eq!(node_name(tables.lca(leaf("Si"), leaf("Sj"))), "C2");
    assert_eq!(node_name(tables.lca(leaf("Sj"), leaf("Si"))), "C2");
    assert_eq!(node_name(tables.lca(leaf("Si"), leaf("S3"))), "C3");
    assert_eq!(node_name(tables.lca(leaf("S1"), leaf("S4"))), "root");
    assert_eq!(node_name(tables.lca(leaf("Sj"), leaf("S6"))), "C4");
    assert_eq!(node_name(tables.lca(leaf("S1"), leaf("S6"))), "root");
}

#[test]
fn demo_model_path_filters() {
    let tree = elaborate(&parse_model(DEMO_MODEL).unwrap());
    let tables = precompute(&tree);
    let root_spec = tree.spec(tree.root).unwrap().clone();

    // Both leaves sit directly under the root: the full-path filter is the
    // root's restriction, the partial path up to the root is empty.
    for leaf in [LeafIdx(0), LeafIdx(1)] {
        assert_eq!(tables.up_filter(leaf), &root_spec);
        assert_eq!(
            tables.to_lca_filter(leaf, tree.root, &tree),
            &FeasibleSpec::restrict(LabelSet::empty())
        );
    }
    assert_eq!(tables.from_lca_filter(tree.root), &root_spec);
}

#[test]
fn demo_model_static_partners() {
    let tree = elaborate(&parse_model(DEMO_MODEL).unwrap());
    let tables = precompute(&tree);
    let a_action = tree.actions.lookup("a").unwrap();
    let c_action = tree.actions.lookup("c").unwrap();

    // A outputs `a`, B inputs it; B outputs `c`, A inputs it.
    assert_eq!(tables.output_partners(LeafIdx(0), a_action), &[LeafIdx(1)]);
    assert_eq!(tables.output_partners(LeafIdx(1), c_action), &[LeafIdx(0)]);
    assert_eq!(tables.input_partners(LeafIdx(1), a_action), &[LeafIdx(0)]);
    assert!(tables.output_partners(LeafIdx(0), c_action).is_empty());
}

#[test]
fn precompute_is_state_independent_and_reproducible() {
    let tree = elaborate(&parse_model(NESTED_SHAPE_MODEL).unwrap());
    let once = precompute(&tree);
    // Interleave arbitrary use, then recompute: tables never change.
    let _ = coin_core::compose::brute_force_compose(&tree).unwrap();
    let twice = precompute(&tree);
    assert_eq!(once, twice);
    assert!(once.approx_bytes() > 0);
}
