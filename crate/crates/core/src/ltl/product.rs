//! Synchronous product of the model with a never-claim. The claim moves on
//! every model step; a deadlocked model state keeps stepping through the
//! distinguished stutter step, so every maximal run is infinite.

use crate::hierarchy::{GlobalState, HierarchyTree};
use crate::label::Label;
use crate::ltl::buchi::BuchiAutomaton;
use crate::ltl::formula::{Atom, AtomKind};
use crate::succgen::{is_label_enabled, Generator, PrecomputedTables, Transition};

/// A state of the product system.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProductState {
    pub model: GlobalState,
    pub claim: u32,
}

/// The model half of one product step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepLabel {
    /// A real model transition.
    Real(Transition),
    /// The stutter step at a deadlocked model state.
    Stutter,
}

impl StepLabel {
    pub fn label(&self) -> Option<&Label> {
        match self {
            StepLabel::Real(t) => Some(&t.label),
            StepLabel::Stutter => None,
        }
    }
}

/// One product successor: the step taken, the state reached, and whether
/// that state is accepting.
#[derive(Clone, PartialEq, Debug)]
pub struct ProductStep {
    pub step: StepLabel,
    pub state: ProductState,
    pub accepting: bool,
}

/// The sorted labels of a state's full successor set; the context for
/// `en(l)` atoms.
#[derive(Clone, Debug, Default)]
pub struct EnabledSet {
    labels: Vec<Label>,
}

impl EnabledSet {
    pub fn from_transitions(transitions: &[Transition]) -> Self {
        let mut labels: Vec<Label> = transitions.iter().map(|t| t.label).collect();
        labels.sort_unstable();
        labels.dedup();
        EnabledSet { labels }
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.labels.binary_search(l).is_ok()
    }
}

/// Atom semantics on a step: `act(l)` holds when the step performs exactly
/// `l` (never on stutter), `en(l)` when `l` is enabled in the source state.
pub fn eval_atom(atom: &Atom, step: &StepLabel, enabled: &EnabledSet) -> bool {
    match atom.kind {
        AtomKind::Act => step.label() == Some(&atom.label),
        AtomKind::En => enabled.contains(&atom.label),
    }
}

/// All product successors of `p`: each model step (stutter if none) paired
/// with each claim edge whose guard the step satisfies.
pub fn product_successors(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    gen: &mut Generator,
    claim: &BuchiAutomaton,
    p: &ProductState,
) -> Vec<ProductStep> {
    let successors = gen.successors(&p.model);
    product_successors_from(tree, tables, claim, p, &successors, successors.is_empty())
}

/// Product steps when the model half's transitions are already known.
/// `deadlocked` marks a genuinely successor-free model state (the list may
/// also be a reduced subset, which is not a deadlock).
pub fn product_successors_from(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    claim: &BuchiAutomaton,
    p: &ProductState,
    model_steps: &[Transition],
    deadlocked: bool,
) -> Vec<ProductStep> {
    let mut out = Vec::new();
    // en() must see exact model-level enabledness even when model_steps is
    // a reduced subset.
    let mut enabled = |l: &Label| is_label_enabled(tree, tables, &p.model, l);

    let mut push_steps = |step_label: Option<&Transition>, out: &mut Vec<ProductStep>| {
        let act = step_label.map(|t| &t.label);
        for edge in &claim.edges[p.claim as usize] {
            if edge.guard.eval(act.copied().as_ref(), &mut enabled) {
                let model = match step_label {
                    Some(t) => t.successor.clone(),
                    None => p.model.clone(),
                };
                out.push(ProductStep {
                    step: match step_label {
                        Some(t) => StepLabel::Real(t.clone()),
                        None => StepLabel::Stutter,
                    },
                    state: ProductState { model, claim: edge.target as u32 },
                    accepting: claim.accepting[edge.target],
                });
            }
        }
    };

    if deadlocked {
        push_steps(None, &mut out);
    } else {
        for t in model_steps {
            push_steps(Some(t), &mut out);
        }
    }
    out
}

/// Replays a lasso counterexample step by step and checks that the cycle
/// returns to its first product state and contains an accepting state.
pub fn replay_lasso(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    gen: &mut Generator,
    claim: &BuchiAutomaton,
    initial: &ProductState,
    stem: &[ProductStep],
    cycle: &[ProductStep],
) -> Result<(), String> {
    if cycle.is_empty() {
        return Err("empty cycle".to_string());
    }
    let mut current = initial.clone();
    for (i, step) in stem.iter().chain(cycle.iter()).enumerate() {
        let options = product_successors(tree, tables, gen, claim, &current);
        let Some(found) = options.iter().find(|s| s.state == step.state && s.step == step.step)
        else {
            return Err(format!("step {i} does not replay from {:?}", current));
        };
        if found.accepting != step.accepting {
            return Err(format!("step {i} disagrees on the accepting flag"));
        }
        current = step.state.clone();
    }
    let cycle_start = match stem.last() {
        Some(s) => &s.state,
        None => initial,
    };
    if &current != cycle_start {
        return Err("cycle does not return to its first state".to_string());
    }
    if !cycle.iter().any(|s| s.accepting) {
        return Err("cycle contains no accepting state".to_string());
    }
    Ok(())
}
