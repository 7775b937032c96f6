//! CI-LTL formulas: linear temporal logic over interaction atoms.
//!
//! Atoms speak about steps of a run: `act(m,a,n)` holds when the step
//! performs exactly that interaction, `en(m,a,n)` when the interaction is
//! enabled in the current state.

use crate::label::{ActionInterner, Endpoint, Label};
use crate::lang::ast::{RawEndpoint, RawLabel};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum AtomKind {
    /// The step performs the label.
    Act,
    /// The label is enabled in the current state.
    En,
}

/// An atom over an uninterned label, as parsed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RawAtom {
    pub kind: AtomKind,
    pub label: RawLabel,
}

/// Formula over raw atoms. `True`/`False` are literals of the grammar.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CiLtlFormula {
    True,
    False,
    Atom(RawAtom),
    Not(Box<CiLtlFormula>),
    And(Box<CiLtlFormula>, Box<CiLtlFormula>),
    Or(Box<CiLtlFormula>, Box<CiLtlFormula>),
    Implies(Box<CiLtlFormula>, Box<CiLtlFormula>),
    Next(Box<CiLtlFormula>),
    Finally(Box<CiLtlFormula>),
    Globally(Box<CiLtlFormula>),
    Until(Box<CiLtlFormula>, Box<CiLtlFormula>),
    Release(Box<CiLtlFormula>, Box<CiLtlFormula>),
}

impl CiLtlFormula {
    // Constructor family mirroring the operators; not the `Not` trait.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: CiLtlFormula) -> Self {
        CiLtlFormula::Not(Box::new(f))
    }

    pub fn and(a: CiLtlFormula, b: CiLtlFormula) -> Self {
        CiLtlFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: CiLtlFormula, b: CiLtlFormula) -> Self {
        CiLtlFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: CiLtlFormula, b: CiLtlFormula) -> Self {
        CiLtlFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: CiLtlFormula) -> Self {
        CiLtlFormula::Next(Box::new(f))
    }

    pub fn finally(f: CiLtlFormula) -> Self {
        CiLtlFormula::Finally(Box::new(f))
    }

    pub fn globally(f: CiLtlFormula) -> Self {
        CiLtlFormula::Globally(Box::new(f))
    }

    pub fn until(a: CiLtlFormula, b: CiLtlFormula) -> Self {
        CiLtlFormula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: CiLtlFormula, b: CiLtlFormula) -> Self {
        CiLtlFormula::Release(Box::new(a), Box::new(b))
    }

    pub fn atom(kind: AtomKind, sender: RawEndpoint, action: &str, receiver: RawEndpoint) -> Self {
        CiLtlFormula::Atom(RawAtom {
            kind,
            label: RawLabel { sender, action: action.to_string(), receiver },
        })
    }

    /// All atoms of the formula, in syntactic order.
    pub fn atoms(&self) -> Vec<&RawAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a RawAtom>) {
        match self {
            CiLtlFormula::True | CiLtlFormula::False => {}
            CiLtlFormula::Atom(a) => out.push(a),
            CiLtlFormula::Not(f)
            | CiLtlFormula::Next(f)
            | CiLtlFormula::Finally(f)
            | CiLtlFormula::Globally(f) => f.collect_atoms(out),
            CiLtlFormula::And(a, b)
            | CiLtlFormula::Or(a, b)
            | CiLtlFormula::Implies(a, b)
            | CiLtlFormula::Until(a, b)
            | CiLtlFormula::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn contains_next(&self) -> bool {
        match self {
            CiLtlFormula::True | CiLtlFormula::False | CiLtlFormula::Atom(_) => false,
            CiLtlFormula::Next(_) => true,
            CiLtlFormula::Not(f) | CiLtlFormula::Finally(f) | CiLtlFormula::Globally(f) => {
                f.contains_next()
            }
            CiLtlFormula::And(a, b)
            | CiLtlFormula::Or(a, b)
            | CiLtlFormula::Implies(a, b)
            | CiLtlFormula::Until(a, b)
            | CiLtlFormula::Release(a, b) => a.contains_next() || b.contains_next(),
        }
    }
}

impl std::fmt::Display for CiLtlFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CiLtlFormula::True => write!(f, "true"),
            CiLtlFormula::False => write!(f, "false"),
            CiLtlFormula::Atom(a) => {
                let name = match a.kind {
                    AtomKind::Act => "act",
                    AtomKind::En => "en",
                };
                write!(
                    f,
                    "{name}({},{},{})",
                    a.label.sender, a.label.action, a.label.receiver
                )
            }
            CiLtlFormula::Not(g) => write!(f, "!({g})"),
            CiLtlFormula::And(a, b) => write!(f, "({a} && {b})"),
            CiLtlFormula::Or(a, b) => write!(f, "({a} || {b})"),
            CiLtlFormula::Implies(a, b) => write!(f, "({a} -> {b})"),
            CiLtlFormula::Next(g) => write!(f, "X ({g})"),
            CiLtlFormula::Finally(g) => write!(f, "F ({g})"),
            CiLtlFormula::Globally(g) => write!(f, "G ({g})"),
            CiLtlFormula::Until(a, b) => write!(f, "({a} U {b})"),
            CiLtlFormula::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

/// An atom with its label resolved against a model's action interner.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Atom {
    pub kind: AtomKind,
    pub label: Label,
}

/// Interns the raw label of an atom. Actions unknown to the model get fresh
/// ids, so their atoms are simply never satisfied by any model transition.
pub fn resolve_atom(atom: &RawAtom, actions: &mut ActionInterner) -> Atom {
    Atom { kind: atom.kind, label: resolve_label(&atom.label, actions) }
}

pub fn resolve_label(raw: &RawLabel, actions: &mut ActionInterner) -> Label {
    let end = |e: &RawEndpoint| match e {
        RawEndpoint::Open => Endpoint::Open,
        RawEndpoint::Id(n) => Endpoint::Component(crate::label::ComponentId(*n)),
    };
    Label::new(end(&raw.sender), actions.intern(&raw.action), end(&raw.receiver))
}
