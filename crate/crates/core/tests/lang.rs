//! Front-end behaviour: parsing, validation, canonical printing,
//! elaboration.

use coin_core::hierarchy::NodeKind;
use coin_core::lang::{elaborate, parse_formula, parse_model, to_coin_text, ParseError};
use coin_core::ltl::CiLtlFormula;
use coin_core::testgen::{random_model, RandomModelCfg, DEMO_MODEL, NESTED_SHAPE_MODEL};
use coin_core::{initial_state, FeasibleMode};

#[test]
fn parses_demo_model_structure() {
    let m = parse_model(DEMO_MODEL).unwrap();
    assert_eq!(m.automata.len(), 2);
    assert_eq!(m.composites.len(), 1);
    assert_eq!(m.system, "C");

    let a = m.automaton("A").unwrap();
    assert_eq!(a.component_id, 1);
    assert_eq!(a.states.len(), 3);
    assert_eq!(a.trans.len(), 3);

    let b = m.automaton("B").unwrap();
    assert_eq!(b.component_id, 2);
    assert_eq!(b.states.len(), 1);
    assert_eq!(b.trans.len(), 2);

    let c = m.composite("C").unwrap();
    assert_eq!(c.children, vec!["A".to_string(), "B".to_string()]);
    let (kind, labels) = c.filter.as_ref().unwrap();
    assert_eq!(*kind, coin_core::lang::ast::FilterKind::RestrictL);
    assert_eq!(labels.len(), 2);
}

#[test]
fn parses_minimal_model() {
    let m = parse_model("automaton A (1) { state s; init s; trans; } system A;").unwrap();
    assert_eq!(m.automata.len(), 1);
    assert!(m.automata[0].trans.is_empty());
    assert_eq!(m.system, "A");
}

#[test]
fn missing_system_is_reported() {
    let text = DEMO_MODEL.replace("system C;", "");
    let err = parse_model(&text).unwrap_err();
    assert!(err.to_string().contains("missing system declaration"), "{err}");
}

#[test]
fn located_errors_on_mutations() {
    // Deleted token, duplicated id, undeclared references: always an
    // error with a position, never a panic.
    let cases = [
        DEMO_MODEL.replace("init q0;", ""),                    // missing section
        DEMO_MODEL.replace("(2)", "(1)"),                      // duplicate component id
        DEMO_MODEL.replace("A, B;", "A, B, D;"),               // undeclared child
        DEMO_MODEL.replace("q0 -> q1", "q0 -> zz"),            // undeclared state
        DEMO_MODEL.replace("system C;", "system D;"),          // unknown root
        DEMO_MODEL.replace("(1, a, -)", "(-, a, -)"),          // two open endpoints
        DEMO_MODEL.replace("(1, a, -)", "(2, a, -)"),          // foreign component id
        DEMO_MODEL.replace("restrictL (1, a, -)", "restrictL (-, a, -)"),
        DEMO_MODEL.replace("state q0, q1, q2;", "state q0, q0, q2;"),
        "automaton A (1) { state s; init s; trans; }".to_string(), // no system
        DEMO_MODEL.replace("}", ""),                           // unbalanced braces
    ];
    for (i, text) in cases.iter().enumerate() {
        match parse_model(text) {
            Err(e) => {
                let loc = e.loc();
                assert!(loc.line >= 1 && loc.col >= 1, "case {i}: location missing");
            }
            Ok(_) => panic!("case {i} unexpectedly parsed"),
        }
    }
}

#[test]
fn rejects_unreachable_and_reused_declarations() {
    // An automaton not reachable from the root.
    let text = "automaton A (1) { state s; init s; trans; }\n\
                automaton B (2) { state s; init s; trans; }\n\
                system A;";
    assert!(matches!(parse_model(text), Err(ParseError::Invalid { .. })));

    // A child used by two parents.
    let text = "automaton A (1) { state s; init s; trans; }\n\
                composite C1 { A; }\n\
                composite C2 { A; }\n\
                composite R { C1, C2; }\n\
                system R;";
    let err = parse_model(text).unwrap_err();
    assert!(err.to_string().contains("used by both"), "{err}");
}

#[test]
fn pretty_print_reparse_is_a_fixpoint() {
    let mut models = vec![DEMO_MODEL.to_string(), NESTED_SHAPE_MODEL.to_string()];
    for seed in 0..30 {
        models.push(random_model(seed, &RandomModelCfg::default()));
    }
    for text in &models {
        let once = parse_model(text).unwrap();
        let printed = to_coin_text(&once);
        let twice = parse_model(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        assert_eq!(once, twice, "re-parse changed the model:\n{printed}");
        assert_eq!(printed, to_coin_text(&twice));
    }
}

#[test]
fn elaborates_demo_model() {
    let m = parse_model(DEMO_MODEL).unwrap();
    let tree = elaborate(&m);
    assert_eq!(tree.leaf_count(), 2);
    assert_eq!(tree.leaves[0].name, "A");
    assert_eq!(tree.leaves[1].name, "B");
    let NodeKind::Internal { children, spec } = &tree.node(tree.root).kind else {
        panic!("root must be the composite");
    };
    assert_eq!(children.len(), 2);
    assert_eq!(spec.mode, FeasibleMode::AllowAllExcept);
    assert_eq!(spec.labels.len(), 2);
    assert_eq!(initial_state(&tree).locals(), &[0, 0]);
}

#[test]
fn elaborates_single_primitive_as_root_leaf() {
    let m = parse_model("automaton A (1) { state s; init s; trans; } system A;").unwrap();
    let tree = elaborate(&m);
    assert_eq!(tree.leaf_count(), 1);
    assert!(matches!(tree.node(tree.root).kind, NodeKind::Leaf { .. }));
    assert_eq!(initial_state(&tree).locals(), &[0]);
}

#[test]
fn elaborates_nested_shape() {
    let m = parse_model(NESTED_SHAPE_MODEL).unwrap();
    let tree = elaborate(&m);
    assert_eq!(tree.leaf_count(), 6);
    let internal =
        tree.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Internal { .. })).count();
    assert_eq!(internal, 4);
    // Left-to-right leaf order.
    let names: Vec<&str> = tree.leaves.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, ["S1", "Si", "S3", "S4", "Sj", "S6"]);
    assert_eq!(initial_state(&tree).locals().len(), 6);
}

#[test]
fn elaboration_preserves_counts_on_random_models() {
    for seed in 0..30 {
        let text = random_model(seed, &RandomModelCfg::default());
        let m = parse_model(&text).unwrap();
        let tree = elaborate(&m);
        assert_eq!(tree.leaf_count(), m.automata.len());
        let declared: usize = m.automata.iter().map(|a| a.trans.len()).sum();
        let elaborated: usize = tree
            .leaves
            .iter()
            .map(|p| p.outgoing.iter().map(|o| o.len()).sum::<usize>())
            .sum();
        // Duplicate declarations collapse; nothing else may be lost.
        assert!(elaborated <= declared);
        let mut seen = std::collections::HashSet::new();
        for a in &m.automata {
            for t in &a.trans {
                seen.insert((a.name.clone(), t.from.clone(), t.to.clone(), t.label.clone()));
            }
        }
        assert_eq!(elaborated, seen.len());
    }
}

#[test]
fn parses_formulas() {
    let f = parse_formula("G (act(1,b,1) -> F act(2,c,1))").unwrap();
    let CiLtlFormula::Globally(inner) = f else { panic!("expected G") };
    let CiLtlFormula::Implies(lhs, rhs) = *inner else { panic!("expected ->") };
    assert!(matches!(*lhs, CiLtlFormula::Atom(_)));
    assert!(matches!(*rhs, CiLtlFormula::Finally(_)));

    let f = parse_formula("F en(1,a,2)").unwrap();
    let CiLtlFormula::Finally(inner) = f else { panic!("expected F") };
    assert!(matches!(*inner, CiLtlFormula::Atom(ref a) if a.kind == coin_core::ltl::AtomKind::En));

    assert!(parse_formula("true").is_ok());
    assert!(parse_formula("act(1,a,2) U (en(2,b,2) R false)").is_ok());
}

#[test]
fn formula_errors() {
    let err = parse_formula("G (act(1,b,1)").unwrap_err();
    assert!(err.to_string().contains("unbalanced parenthesis"), "{err}");
    assert!(parse_formula("act(-,a,-)").is_err());
    assert!(parse_formula("act(1,a,2) &&").is_err());
    assert!(parse_formula("").is_err());
}

#[test]
fn formula_precedence() {
    // -> binds loosest and associates right; prefix ops bind tightest.
    let f = parse_formula("!act(1,a,1) && en(1,b,1) -> act(1,a,1) -> false").unwrap();
    let CiLtlFormula::Implies(lhs, rhs) = f else { panic!("expected top-level ->") };
    assert!(matches!(*lhs, CiLtlFormula::And(_, _)));
    assert!(matches!(*rhs, CiLtlFormula::Implies(_, _)));

    // U is left-associative and tighter than &&.
    let f = parse_formula("act(1,a,1) U act(1,b,1) U act(1,c,1) && false").unwrap();
    let CiLtlFormula::And(lhs, _) = f else { panic!("expected top-level &&") };
    let CiLtlFormula::Until(inner, _) = *lhs else { panic!("expected U chain") };
    assert!(matches!(*inner, CiLtlFormula::Until(_, _)));
}
