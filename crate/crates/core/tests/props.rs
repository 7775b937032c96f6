//! Property tests for the feasibility algebra and state encodings.

use coin_core::label::{ActionId, ComponentId, Label, LabelSet};
use coin_core::{feasible, intersect, FeasibleMode, FeasibleSpec};
use proptest::prelude::*;

/// A small closed label universe: endpoints from {-, 1, 2, 3}, actions
/// from {0, 1}.
fn any_label() -> impl Strategy<Value = Label> {
    (0u32..4, 0u32..2, 0u32..4)
        .prop_filter("at most one open endpoint", |(m, _, n)| !(*m == 0 && *n == 0))
        .prop_map(|(m, a, n)| {
            let end = |v: u32| {
                if v == 0 {
                    coin_core::Endpoint::Open
                } else {
                    coin_core::Endpoint::Component(ComponentId(v))
                }
            };
            Label::new(end(m), ActionId(a), end(n))
        })
}

fn any_spec() -> impl Strategy<Value = FeasibleSpec> {
    (any::<bool>(), proptest::collection::vec(any_label(), 0..5)).prop_map(|(only, labels)| {
        let set = LabelSet::from_labels(labels);
        FeasibleSpec {
            mode: if only { FeasibleMode::AllowOnly } else { FeasibleMode::AllowAllExcept },
            labels: set,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn intersect_is_feasibility_conjunction(a in any_spec(), b in any_spec(), l in any_label()) {
        let both = intersect(&a, &b);
        prop_assert_eq!(feasible(&both, &l), feasible(&a, &l) && feasible(&b, &l));
    }

    #[test]
    fn intersect_commutes_extensionally(a in any_spec(), b in any_spec(), l in any_label()) {
        prop_assert_eq!(feasible(&intersect(&a, &b), &l), feasible(&intersect(&b, &a), &l));
    }

    #[test]
    fn intersect_associates_extensionally(
        a in any_spec(), b in any_spec(), c in any_spec(), l in any_label()
    ) {
        let left = intersect(&intersect(&a, &b), &c);
        let right = intersect(&a, &intersect(&b, &c));
        prop_assert_eq!(feasible(&left, &l), feasible(&right, &l));
    }

    #[test]
    fn allow_all_is_the_identity(a in any_spec(), l in any_label()) {
        let with_unit = intersect(&FeasibleSpec::allow_all(), &a);
        prop_assert_eq!(feasible(&with_unit, &l), feasible(&a, &l));
    }

    #[test]
    fn state_codec_round_trips(locals in proptest::collection::vec(0u16..7, 1..10)) {
        // A synthetic tree with one leaf per entry, sized to fit it.
        let mut text = String::new();
        for (i, &v) in locals.iter().enumerate() {
            let id = i + 1;
            let states: Vec<String> = (0..=v.max(1)).map(|s| format!("s{s}")).collect();
            text.push_str(&format!(
                "automaton P{id} ({id}) {{ state {}; init s0; trans; }}\n",
                states.join(", ")
            ));
        }
        let children: Vec<String> = (1..=locals.len()).map(|i| format!("P{i}")).collect();
        text.push_str(&format!("composite R {{ {}; }}\nsystem R;\n", children.join(", ")));
        let tree = coin_core::elaborate(&coin_core::parse_model(&text).unwrap());
        let codec = coin_core::explore::codec::StateCodec::for_tree(&tree);
        let state = coin_core::GlobalState::new(locals);
        prop_assert_eq!(codec.decode(&codec.encode(&state)), state);
    }
}
