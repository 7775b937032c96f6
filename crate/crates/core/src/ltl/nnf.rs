//! Negation normal form: negations pushed to the atoms, implication
//! eliminated, using the usual dualities (X self-dual, U/R dual, F/G dual).

use crate::label::ActionInterner;
use crate::ltl::formula::{resolve_atom, Atom, CiLtlFormula};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn negated(&self) -> Literal {
        Literal { positive: !self.positive, atom: self.atom }
    }
}

/// A formula in negation normal form over resolved atoms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Nnf {
    True,
    False,
    Lit(Literal),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Next(Box<Nnf>),
    Until(Box<Nnf>, Box<Nnf>),
    Release(Box<Nnf>, Box<Nnf>),
    Finally(Box<Nnf>),
    Globally(Box<Nnf>),
}

/// Translates `f` to NNF, interning atom actions as a side effect.
pub fn nnf(f: &CiLtlFormula, actions: &mut ActionInterner) -> Nnf {
    convert(f, false, actions)
}

/// NNF of the negation of `f`; the form fed to the never-claim translation.
pub fn negate(f: &CiLtlFormula, actions: &mut ActionInterner) -> Nnf {
    convert(f, true, actions)
}

fn convert(f: &CiLtlFormula, neg: bool, actions: &mut ActionInterner) -> Nnf {
    use CiLtlFormula as F;
    match f {
        F::True => {
            if neg {
                Nnf::False
            } else {
                Nnf::True
            }
        }
        F::False => {
            if neg {
                Nnf::True
            } else {
                Nnf::False
            }
        }
        F::Atom(a) => Nnf::Lit(Literal { positive: !neg, atom: resolve_atom(a, actions) }),
        F::Not(g) => convert(g, !neg, actions),
        F::And(a, b) => {
            let (la, lb) = (convert(a, neg, actions), convert(b, neg, actions));
            if neg {
                Nnf::Or(Box::new(la), Box::new(lb))
            } else {
                Nnf::And(Box::new(la), Box::new(lb))
            }
        }
        F::Or(a, b) => {
            let (la, lb) = (convert(a, neg, actions), convert(b, neg, actions));
            if neg {
                Nnf::And(Box::new(la), Box::new(lb))
            } else {
                Nnf::Or(Box::new(la), Box::new(lb))
            }
        }
        // a -> b  ==  !a || b
        F::Implies(a, b) => {
            let (la, lb) = (convert(a, !neg, actions), convert(b, neg, actions));
            if neg {
                Nnf::And(Box::new(la), Box::new(lb))
            } else {
                Nnf::Or(Box::new(la), Box::new(lb))
            }
        }
        F::Next(g) => Nnf::Next(Box::new(convert(g, neg, actions))),
        F::Until(a, b) => {
            let (la, lb) = (convert(a, neg, actions), convert(b, neg, actions));
            if neg {
                Nnf::Release(Box::new(la), Box::new(lb))
            } else {
                Nnf::Until(Box::new(la), Box::new(lb))
            }
        }
        F::Release(a, b) => {
            let (la, lb) = (convert(a, neg, actions), convert(b, neg, actions));
            if neg {
                Nnf::Until(Box::new(la), Box::new(lb))
            } else {
                Nnf::Release(Box::new(la), Box::new(lb))
            }
        }
        F::Finally(g) => {
            let lg = convert(g, neg, actions);
            if neg {
                Nnf::Globally(Box::new(lg))
            } else {
                Nnf::Finally(Box::new(lg))
            }
        }
        F::Globally(g) => {
            let lg = convert(g, neg, actions);
            if neg {
                Nnf::Finally(Box::new(lg))
            } else {
                Nnf::Globally(Box::new(lg))
            }
        }
    }
}

impl Nnf {
    /// Renders back to formula syntax, keeping the NNF shape. Action names
    /// come from the interner that resolved the atoms.
    pub fn to_formula(&self, actions: &ActionInterner) -> CiLtlFormula {
        use crate::label::Endpoint;
        use crate::lang::ast::{RawEndpoint, RawLabel};
        use CiLtlFormula as F;
        let raw_end = |e: &Endpoint| match e {
            Endpoint::Open => RawEndpoint::Open,
            Endpoint::Component(c) => RawEndpoint::Id(c.0),
        };
        match self {
            Nnf::True => F::True,
            Nnf::False => F::False,
            Nnf::Lit(l) => {
                let atom = F::Atom(crate::ltl::formula::RawAtom {
                    kind: l.atom.kind,
                    label: RawLabel {
                        sender: raw_end(&l.atom.label.sender),
                        action: actions.name(l.atom.label.action).to_string(),
                        receiver: raw_end(&l.atom.label.receiver),
                    },
                });
                if l.positive {
                    atom
                } else {
                    F::not(atom)
                }
            }
            Nnf::And(a, b) => F::and(a.to_formula(actions), b.to_formula(actions)),
            Nnf::Or(a, b) => F::or(a.to_formula(actions), b.to_formula(actions)),
            Nnf::Next(g) => F::next(g.to_formula(actions)),
            Nnf::Until(a, b) => F::until(a.to_formula(actions), b.to_formula(actions)),
            Nnf::Release(a, b) => F::release(a.to_formula(actions), b.to_formula(actions)),
            Nnf::Finally(g) => F::finally(g.to_formula(actions)),
            Nnf::Globally(g) => F::globally(g.to_formula(actions)),
        }
    }

    /// All literals of the formula, in syntactic order.
    pub fn literals(&self) -> Vec<&Literal> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a Literal>) {
        match self {
            Nnf::True | Nnf::False => {}
            Nnf::Lit(l) => out.push(l),
            Nnf::Next(f) | Nnf::Finally(f) | Nnf::Globally(f) => f.collect(out),
            Nnf::And(a, b) | Nnf::Or(a, b) | Nnf::Until(a, b) | Nnf::Release(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    pub fn contains_next(&self) -> bool {
        match self {
            Nnf::True | Nnf::False | Nnf::Lit(_) => false,
            Nnf::Next(_) => true,
            Nnf::Finally(f) | Nnf::Globally(f) => f.contains_next(),
            Nnf::And(a, b) | Nnf::Or(a, b) | Nnf::Until(a, b) | Nnf::Release(a, b) => {
                a.contains_next() || b.contains_next()
            }
        }
    }
}
