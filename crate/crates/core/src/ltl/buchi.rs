//! Never-claim construction: classic on-the-fly tableau translation from
//! NNF formulas to Büchi automata with edge guards, plus the textual
//! never-claim block format.
//!
//! The tableau covers each node by splitting temporal operators into
//! "now" and "next" obligations; nodes with equal obligations merge. One
//! generalized accepting set arises per Until/Finally subformula; a
//! counter product degeneralizes when there are two or more.

use std::collections::BTreeSet;

use crate::label::{ActionInterner, Endpoint, Label};
use crate::lang::parser::{RawClaim, RawGuard};
use crate::lang::ParseError;
use crate::ltl::formula::{resolve_label, Atom, AtomKind};
use crate::ltl::nnf::{Literal, Nnf};

/// A guard in disjunctive normal form. No disjuncts means `false`; a
/// disjunct with no literals means `true`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Guard {
    pub disjuncts: Vec<Vec<Literal>>,
}

impl Guard {
    pub fn always() -> Self {
        Guard { disjuncts: vec![vec![]] }
    }

    pub fn is_true(&self) -> bool {
        self.disjuncts.iter().any(|c| c.is_empty())
    }

    pub fn is_false(&self) -> bool {
        self.disjuncts.is_empty()
    }

    /// Evaluates against one step: the label performed (if any) and an
    /// enabledness oracle for the source state.
    pub fn eval(&self, act: Option<&Label>, enabled: &mut dyn FnMut(&Label) -> bool) -> bool {
        self.disjuncts.iter().any(|conj| {
            conj.iter().all(|lit| {
                let value = match lit.atom.kind {
                    AtomKind::Act => act == Some(&lit.atom.label),
                    AtomKind::En => enabled(&lit.atom.label),
                };
                value == lit.positive
            })
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BuchiEdge {
    pub guard: Guard,
    pub target: usize,
}

/// A never-claim: Büchi automaton over step guards. The model violates a
/// property exactly when the product with the property's negated claim has
/// a reachable accepting cycle.
#[derive(Clone, PartialEq, Debug)]
pub struct BuchiAutomaton {
    pub state_names: Vec<String>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// Outgoing edges per state.
    pub edges: Vec<Vec<BuchiEdge>>,
}

impl BuchiAutomaton {
    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn accepting_count(&self) -> usize {
        self.accepting.iter().filter(|a| **a).count()
    }
}

// ---------------------------------------------------------------------------
// Tableau construction
// ---------------------------------------------------------------------------

/// Interned subformula arena; sets of obligations are sets of ids.
struct Arena {
    subs: Vec<Nnf>,
}

impl Arena {
    fn intern(&mut self, f: &Nnf) -> u32 {
        if let Some(pos) = self.subs.iter().position(|s| s == f) {
            return pos as u32;
        }
        self.subs.push(f.clone());
        (self.subs.len() - 1) as u32
    }

    fn get(&self, id: u32) -> &Nnf {
        &self.subs[id as usize]
    }
}

const INIT_INCOMING: usize = usize::MAX;

#[derive(Clone)]
struct TableauNode {
    new: BTreeSet<u32>,
    old: BTreeSet<u32>,
    next: BTreeSet<u32>,
    incoming: BTreeSet<usize>,
}

struct Tableau {
    arena: Arena,
    /// Finished nodes, identified by (old, next).
    done: Vec<TableauNode>,
}

impl Tableau {
    fn expand(&mut self, mut node: TableauNode) {
        let Some(&f_id) = node.new.iter().next() else {
            // Fully processed: merge with an equivalent node or emit.
            if let Some(existing) = self
                .done
                .iter_mut()
                .find(|d| d.old == node.old && d.next == node.next)
            {
                existing.incoming.extend(node.incoming.iter().copied());
                return;
            }
            let id = self.done.len();
            let successor_new = node.next.clone();
            self.done.push(node);
            let succ = TableauNode {
                new: successor_new,
                old: BTreeSet::new(),
                next: BTreeSet::new(),
                incoming: [id].into_iter().collect(),
            };
            self.expand(succ);
            return;
        };

        node.new.remove(&f_id);
        let f = self.arena.get(f_id).clone();
        match f {
            Nnf::False => {} // contradiction: drop this node
            Nnf::True => {
                node.old.insert(f_id);
                self.expand(node);
            }
            Nnf::Lit(lit) => {
                let contradicts = node.old.iter().any(|&o| {
                    matches!(self.arena.get(o), Nnf::Lit(other) if *other == lit.negated())
                });
                if !contradicts {
                    node.old.insert(f_id);
                    self.expand(node);
                }
            }
            Nnf::And(a, b) => {
                let (ia, ib) = (self.arena.intern(&a), self.arena.intern(&b));
                for i in [ia, ib] {
                    if !node.old.contains(&i) {
                        node.new.insert(i);
                    }
                }
                node.old.insert(f_id);
                self.expand(node);
            }
            Nnf::Or(a, b) => {
                let (ia, ib) = (self.arena.intern(&a), self.arena.intern(&b));
                node.old.insert(f_id);
                let mut left = node.clone();
                if !left.old.contains(&ia) {
                    left.new.insert(ia);
                }
                self.expand(left);
                let mut right = node;
                if !right.old.contains(&ib) {
                    right.new.insert(ib);
                }
                self.expand(right);
            }
            Nnf::Next(g) => {
                let ig = self.arena.intern(&g);
                node.old.insert(f_id);
                node.next.insert(ig);
                self.expand(node);
            }
            // a U b  ==  b || (a && X(a U b))
            Nnf::Until(a, b) => {
                let (ia, ib) = (self.arena.intern(&a), self.arena.intern(&b));
                node.old.insert(f_id);
                let mut wait = node.clone();
                if !wait.old.contains(&ia) {
                    wait.new.insert(ia);
                }
                wait.next.insert(f_id);
                self.expand(wait);
                let mut now = node;
                if !now.old.contains(&ib) {
                    now.new.insert(ib);
                }
                self.expand(now);
            }
            // a R b  ==  (a && b) || (b && X(a R b))
            Nnf::Release(a, b) => {
                let (ia, ib) = (self.arena.intern(&a), self.arena.intern(&b));
                node.old.insert(f_id);
                let mut both = node.clone();
                for i in [ia, ib] {
                    if !both.old.contains(&i) {
                        both.new.insert(i);
                    }
                }
                self.expand(both);
                let mut wait = node;
                if !wait.old.contains(&ib) {
                    wait.new.insert(ib);
                }
                wait.next.insert(f_id);
                self.expand(wait);
            }
            // F g  ==  g || X(F g)
            Nnf::Finally(g) => {
                let ig = self.arena.intern(&g);
                node.old.insert(f_id);
                let mut wait = node.clone();
                wait.next.insert(f_id);
                self.expand(wait);
                let mut now = node;
                if !now.old.contains(&ig) {
                    now.new.insert(ig);
                }
                self.expand(now);
            }
            // G g  ==  g && X(G g)
            Nnf::Globally(g) => {
                let ig = self.arena.intern(&g);
                node.old.insert(f_id);
                if !node.old.contains(&ig) {
                    node.new.insert(ig);
                }
                node.next.insert(f_id);
                self.expand(node);
            }
        }
    }
}

/// Translates an NNF formula into a Büchi never-claim.
pub fn to_buchi(f: &Nnf) -> BuchiAutomaton {
    let mut tableau = Tableau { arena: Arena { subs: Vec::new() }, done: Vec::new() };
    let root = tableau.arena.intern(f);
    tableau.expand(TableauNode {
        new: [root].into_iter().collect(),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
        incoming: [INIT_INCOMING].into_iter().collect(),
    });

    let arena = &tableau.arena;
    let nodes = &tableau.done;

    // Generalized accepting sets: one per Until/Finally subformula.
    let mut accept_sets: Vec<Vec<bool>> = Vec::new();
    for (id, sub) in arena.subs.iter().enumerate() {
        let rhs = match sub {
            Nnf::Until(_, b) => (**b).clone(),
            Nnf::Finally(g) => (**g).clone(),
            _ => continue,
        };
        let rhs_id = arena.subs.iter().position(|s| s == &rhs).map(|p| p as u32);
        let set = nodes
            .iter()
            .map(|n| {
                !n.old.contains(&(id as u32))
                    || rhs_id.is_some_and(|r| n.old.contains(&r))
            })
            .collect();
        accept_sets.push(set);
    }

    // Guard into a node: conjunction of its literals.
    let node_guard = |n: &TableauNode| -> Vec<Literal> {
        n.old
            .iter()
            .filter_map(|&id| match arena.get(id) {
                Nnf::Lit(l) => Some(*l),
                _ => None,
            })
            .collect()
    };

    // Edge-labelled automaton with a fresh initial state. Tableau state i
    // becomes automaton state i + 1.
    let raw_count = nodes.len() + 1;
    let mut raw_edges: Vec<Vec<BuchiEdge>> = vec![Vec::new(); raw_count];
    for (i, n) in nodes.iter().enumerate() {
        let guard = Guard { disjuncts: vec![node_guard(n)] };
        for &src in &n.incoming {
            let s = if src == INIT_INCOMING { 0 } else { src + 1 };
            raw_edges[s].push(BuchiEdge { guard: guard.clone(), target: i + 1 });
        }
    }

    let k = accept_sets.len();
    let in_set = |set: usize, state: usize| state > 0 && accept_sets[set][state - 1];

    let (count, initial, accepting, edges) = if k <= 1 {
        let accepting: Vec<bool> = (0..raw_count)
            .map(|s| if k == 0 { true } else { in_set(0, s) })
            .collect();
        (raw_count, 0usize, accepting, raw_edges)
    } else {
        // Counter product: leave counter i when the current state is in
        // accepting set i; accept in set 0 at counter 0.
        let count = raw_count * k;
        let enc = |state: usize, counter: usize| state * k + counter;
        let mut edges: Vec<Vec<BuchiEdge>> = vec![Vec::new(); count];
        for state in 0..raw_count {
            for counter in 0..k {
                let next_counter =
                    if in_set(counter, state) { (counter + 1) % k } else { counter };
                for e in &raw_edges[state] {
                    edges[enc(state, counter)].push(BuchiEdge {
                        guard: e.guard.clone(),
                        target: enc(e.target, next_counter),
                    });
                }
            }
        }
        let accepting: Vec<bool> =
            (0..count).map(|s| s % k == 0 && in_set(0, s / k)).collect();
        (count, enc(0, 0), accepting, edges)
    };

    prune_unreachable(count, initial, accepting, edges)
}

fn prune_unreachable(
    count: usize,
    initial: usize,
    accepting: Vec<bool>,
    edges: Vec<Vec<BuchiEdge>>,
) -> BuchiAutomaton {
    let mut keep = vec![false; count];
    let mut stack = vec![initial];
    keep[initial] = true;
    while let Some(s) = stack.pop() {
        for e in &edges[s] {
            if !keep[e.target] {
                keep[e.target] = true;
                stack.push(e.target);
            }
        }
    }

    let mut remap = vec![usize::MAX; count];
    let mut next = 0usize;
    for (s, &k) in keep.iter().enumerate() {
        if k {
            remap[s] = next;
            next += 1;
        }
    }

    let mut new_edges: Vec<Vec<BuchiEdge>> = vec![Vec::new(); next];
    let mut new_accepting = vec![false; next];
    for s in 0..count {
        if !keep[s] {
            continue;
        }
        new_accepting[remap[s]] = accepting[s];
        new_edges[remap[s]] = edges[s]
            .iter()
            .map(|e| BuchiEdge { guard: e.guard.clone(), target: remap[e.target] })
            .collect();
    }

    // A claim without edges accepts nothing; do not advertise accepting
    // states that can never recur.
    let has_edges = new_edges.iter().any(|e| !e.is_empty());
    if !has_edges {
        new_accepting.iter_mut().for_each(|a| *a = false);
    }

    BuchiAutomaton {
        state_names: (0..next).map(|i| format!("s{i}")).collect(),
        initial: remap[initial],
        accepting: new_accepting,
        edges: new_edges,
    }
}

// ---------------------------------------------------------------------------
// Textual never-claim block
// ---------------------------------------------------------------------------

/// Renders the claim in the block format understood by
/// [`crate::lang::parse_claim`]:
///
/// ```text
/// never {
///     state s0, s1;
///     init s0;
///     accept s1;
///     trans
///         s0 -> s0 [true],
///         s0 -> s1 [!act(1,b,1)];
/// }
/// ```
pub fn to_never_claim(b: &BuchiAutomaton, actions: &ActionInterner) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "never {{").unwrap();
    writeln!(out, "    state {};", b.state_names.join(", ")).unwrap();
    writeln!(out, "    init {};", b.state_names[b.initial]).unwrap();
    let acc: Vec<&str> = b
        .accepting
        .iter()
        .enumerate()
        .filter(|(_, a)| **a)
        .map(|(i, _)| b.state_names[i].as_str())
        .collect();
    if acc.is_empty() {
        writeln!(out, "    accept;").unwrap();
    } else {
        writeln!(out, "    accept {};", acc.join(", ")).unwrap();
    }
    let total_edges: usize = b.edges.iter().map(|e| e.len()).sum();
    if total_edges == 0 {
        writeln!(out, "    trans;").unwrap();
    } else {
        writeln!(out, "    trans").unwrap();
        let mut emitted = 0usize;
        for (s, list) in b.edges.iter().enumerate() {
            for e in list {
                emitted += 1;
                let sep = if emitted == total_edges { ";" } else { "," };
                writeln!(
                    out,
                    "        {} -> {} [{}]{}",
                    b.state_names[s],
                    b.state_names[e.target],
                    guard_text(&e.guard, actions),
                    sep
                )
                .unwrap();
            }
        }
    }
    writeln!(out, "}}").unwrap();
    out
}

fn guard_text(g: &Guard, actions: &ActionInterner) -> String {
    if g.is_false() {
        return "false".to_string();
    }
    if g.is_true() {
        return "true".to_string();
    }
    let lit_text = |lit: &Literal| {
        let end = |e: &Endpoint| match e {
            Endpoint::Open => "-".to_string(),
            Endpoint::Component(c) => c.0.to_string(),
        };
        format!(
            "{}{}({},{},{})",
            if lit.positive { "" } else { "!" },
            match lit.atom.kind {
                AtomKind::Act => "act",
                AtomKind::En => "en",
            },
            end(&lit.atom.label.sender),
            actions.name(lit.atom.label.action),
            end(&lit.atom.label.receiver),
        )
    };
    g.disjuncts
        .iter()
        .map(|conj| {
            if conj.is_empty() {
                "true".to_string()
            } else {
                conj.iter().map(lit_text).collect::<Vec<_>>().join(" && ")
            }
        })
        .collect::<Vec<_>>()
        .join(" || ")
}

/// Resolves a parsed never-claim block against a model's action interner.
pub fn claim_from_raw(
    raw: &RawClaim,
    actions: &mut ActionInterner,
) -> Result<BuchiAutomaton, ParseError> {
    let index_of = |name: &str| raw.states.iter().position(|s| s == name).unwrap();
    let mut edges: Vec<Vec<BuchiEdge>> = vec![Vec::new(); raw.states.len()];
    for (from, to, guard) in &raw.edges {
        edges[index_of(from)].push(BuchiEdge {
            guard: resolve_guard(guard, actions),
            target: index_of(to),
        });
    }
    let mut accepting = vec![false; raw.states.len()];
    for a in &raw.accepting {
        accepting[index_of(a)] = true;
    }
    Ok(BuchiAutomaton {
        state_names: raw.states.clone(),
        initial: index_of(&raw.init),
        accepting,
        edges,
    })
}

fn resolve_guard(raw: &RawGuard, actions: &mut ActionInterner) -> Guard {
    Guard {
        disjuncts: raw
            .iter()
            .map(|conj| {
                conj.iter()
                    .map(|lit| Literal {
                        positive: lit.positive,
                        atom: Atom { kind: lit.kind, label: resolve_label(&lit.label, actions) },
                    })
                    .collect()
            })
            .collect(),
    }
}
