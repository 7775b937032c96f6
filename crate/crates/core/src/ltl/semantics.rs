//! Direct CI-LTL semantics on lasso-shaped runs.
//!
//! This evaluator works straight off the formula syntax by fixpoint
//! iteration over the finitely many positions of a lasso word. It shares
//! nothing with the negation-normal-form, tableau or product code, which
//! makes it the independent reference those paths are tested against.

use crate::label::{ActionInterner, Endpoint, Label};
use crate::ltl::buchi::BuchiAutomaton;
use crate::ltl::formula::{AtomKind, CiLtlFormula, RawAtom};
use crate::lang::ast::RawEndpoint;

/// One position of a run: the label performed by the step leaving it (none
/// for a stutter step) and the labels enabled in its state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Letter {
    pub act: Option<Label>,
    /// Sorted, deduplicated.
    pub enabled: Vec<Label>,
}

impl Letter {
    pub fn new(act: Option<Label>, mut enabled: Vec<Label>) -> Self {
        enabled.sort_unstable();
        enabled.dedup();
        Letter { act, enabled }
    }

    fn has_enabled(&self, l: &Label) -> bool {
        self.enabled.binary_search(l).is_ok()
    }
}

/// An infinite word presented as a stem plus a repeated cycle:
/// `letters[0..loop_start)` then `letters[loop_start..]` forever.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LassoWord {
    pub letters: Vec<Letter>,
    pub loop_start: usize,
}

impl LassoWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn succ(&self, pos: usize) -> usize {
        if pos + 1 < self.letters.len() {
            pos + 1
        } else {
            self.loop_start
        }
    }
}

/// Whether the infinite run described by `word` satisfies `f`.
///
/// Atom labels resolve by looking the action name up in `actions`; unknown
/// actions denote interactions the model never performs, so those atoms
/// are false.
pub fn holds_on_lasso(f: &CiLtlFormula, word: &LassoWord, actions: &ActionInterner) -> bool {
    assert!(!word.is_empty() && word.loop_start < word.letters.len());
    eval_positions(f, word, actions)[0]
}

fn atom_label(atom: &RawAtom, actions: &ActionInterner) -> Option<Label> {
    let action = actions.lookup(&atom.label.action)?;
    let end = |e: &RawEndpoint| match e {
        RawEndpoint::Open => Endpoint::Open,
        RawEndpoint::Id(n) => Endpoint::Component(crate::label::ComponentId(*n)),
    };
    Some(Label::new(end(&atom.label.sender), action, end(&atom.label.receiver)))
}

fn eval_positions(f: &CiLtlFormula, word: &LassoWord, actions: &ActionInterner) -> Vec<bool> {
    use CiLtlFormula as F;
    let n = word.letters.len();
    match f {
        F::True => vec![true; n],
        F::False => vec![false; n],
        F::Atom(a) => {
            let label = atom_label(a, actions);
            word.letters
                .iter()
                .map(|letter| match (&label, a.kind) {
                    (None, _) => false,
                    (Some(l), AtomKind::Act) => letter.act.as_ref() == Some(l),
                    (Some(l), AtomKind::En) => letter.has_enabled(l),
                })
                .collect()
        }
        F::Not(g) => {
            let mut v = eval_positions(g, word, actions);
            v.iter_mut().for_each(|b| *b = !*b);
            v
        }
        F::And(a, b) => zip_with(f2(a, b, word, actions), |x, y| x && y),
        F::Or(a, b) => zip_with(f2(a, b, word, actions), |x, y| x || y),
        F::Implies(a, b) => zip_with(f2(a, b, word, actions), |x, y| !x || y),
        F::Next(g) => {
            let vg = eval_positions(g, word, actions);
            (0..n).map(|p| vg[word.succ(p)]).collect()
        }
        // Least fixpoints: start from false and grow.
        F::Finally(g) => {
            let vg = eval_positions(g, word, actions);
            fixpoint(word, false, |v, p| vg[p] || v[word.succ(p)])
        }
        F::Until(a, b) => {
            let va = eval_positions(a, word, actions);
            let vb = eval_positions(b, word, actions);
            fixpoint(word, false, |v, p| vb[p] || (va[p] && v[word.succ(p)]))
        }
        // Greatest fixpoints: start from true and shrink.
        F::Globally(g) => {
            let vg = eval_positions(g, word, actions);
            fixpoint(word, true, |v, p| vg[p] && v[word.succ(p)])
        }
        F::Release(a, b) => {
            let va = eval_positions(a, word, actions);
            let vb = eval_positions(b, word, actions);
            fixpoint(word, true, |v, p| vb[p] && (va[p] || v[word.succ(p)]))
        }
    }
}

fn f2<'a>(
    a: &'a CiLtlFormula,
    b: &'a CiLtlFormula,
    word: &LassoWord,
    actions: &ActionInterner,
) -> (Vec<bool>, Vec<bool>) {
    (eval_positions(a, word, actions), eval_positions(b, word, actions))
}

fn zip_with((a, b): (Vec<bool>, Vec<bool>), op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

fn fixpoint(
    word: &LassoWord,
    start: bool,
    step: impl Fn(&[bool], usize) -> bool,
) -> Vec<bool> {
    let n = word.letters.len();
    let mut v = vec![start; n];
    loop {
        let mut changed = false;
        // Sweep backwards so information propagates along the chain fast.
        for p in (0..n).rev() {
            let new = step(&v, p);
            if new != v[p] {
                v[p] = new;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// Whether a claim automaton accepts the lasso word: is there a run over
/// the word's letters that visits an accepting claim state infinitely
/// often? Decided on the finite graph of (position, claim state) pairs.
pub fn claim_accepts_lasso(claim: &BuchiAutomaton, word: &LassoWord) -> bool {
    assert!(!word.is_empty() && word.loop_start < word.letters.len());
    let n = word.letters.len();
    let q = claim.state_count();
    let enc = |pos: usize, state: usize| pos * q + state;

    let succs = |node: usize| {
        let (pos, state) = (node / q, node % q);
        let letter = &word.letters[pos];
        let next_pos = word.succ(pos);
        claim.edges[state]
            .iter()
            .filter(|e| {
                e.guard
                    .eval(letter.act.as_ref(), &mut |l: &Label| letter.has_enabled(l))
            })
            .map(move |e| enc(next_pos, e.target))
            .collect::<Vec<_>>()
    };

    // Reachable product nodes.
    let start = enc(0, claim.initial);
    let mut reachable = vec![false; n * q];
    let mut stack = vec![start];
    reachable[start] = true;
    while let Some(node) = stack.pop() {
        for s in succs(node) {
            if !reachable[s] {
                reachable[s] = true;
                stack.push(s);
            }
        }
    }

    // An accepting node on a cycle: reachable from its own successors.
    for node in 0..n * q {
        if !reachable[node] || !claim.accepting[node % q] {
            continue;
        }
        let mut seen = vec![false; n * q];
        let mut stack: Vec<usize> = succs(node).into_iter().filter(|&s| reachable[s]).collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(cur) = stack.pop() {
            if cur == node {
                return true;
            }
            for s in succs(cur) {
                if reachable[s] && !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
            }
        }
    }
    false
}
