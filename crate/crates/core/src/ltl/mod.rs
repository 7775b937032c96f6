//! The CI-LTL property pipeline: formulas, negation normal form, Büchi
//! never-claims, the synchronous product with the model, and a direct
//! lasso semantics used as the reference in tests.

pub mod buchi;
pub mod formula;
pub mod nnf;
pub mod product;
pub mod semantics;

pub use buchi::{claim_from_raw, to_buchi, to_never_claim, BuchiAutomaton, BuchiEdge, Guard};
pub use formula::{Atom, AtomKind, CiLtlFormula, RawAtom};
pub use nnf::{negate, nnf, Literal, Nnf};
pub use product::{
    eval_atom, product_successors, product_successors_from, replay_lasso, EnabledSet,
    ProductState, ProductStep, StepLabel,
};
pub use semantics::{claim_accepts_lasso, holds_on_lasso, LassoWord, Letter};
