//! Feasible-label sets: the composition parameter attached to every
//! internal node of the hierarchy.
//!
//! A spec is either a blacklist (`restrictL`: everything outside the set is
//! allowed) or a whitelist (`onlyL`: only the listed labels are allowed).
//! Intersections stay symbolic so that label-set blowup along deep paths is
//! bounded by the total size of the written filters.

use crate::label::{Label, LabelSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FeasibleMode {
    /// `restrictL`: the set lists disallowed labels.
    AllowAllExcept,
    /// `onlyL`: the set lists allowed labels.
    AllowOnly,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FeasibleSpec {
    pub mode: FeasibleMode,
    pub labels: LabelSet,
}

impl FeasibleSpec {
    /// The neutral element: an empty blacklist allows every label.
    pub fn allow_all() -> Self {
        FeasibleSpec { mode: FeasibleMode::AllowAllExcept, labels: LabelSet::empty() }
    }

    pub fn restrict(labels: LabelSet) -> Self {
        FeasibleSpec { mode: FeasibleMode::AllowAllExcept, labels }
    }

    pub fn only(labels: LabelSet) -> Self {
        FeasibleSpec { mode: FeasibleMode::AllowOnly, labels }
    }

    pub fn approx_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.labels.approx_bytes()
    }
}

/// Whether `l` passes the spec: outside the blacklist, or inside the whitelist.
pub fn feasible(spec: &FeasibleSpec, l: &Label) -> bool {
    match spec.mode {
        FeasibleMode::AllowAllExcept => !spec.labels.contains(l),
        FeasibleMode::AllowOnly => spec.labels.contains(l),
    }
}

/// Conjunction of two specs: `feasible(intersect(a, b), l)` holds exactly when
/// both `feasible(a, l)` and `feasible(b, l)` do.
pub fn intersect(a: &FeasibleSpec, b: &FeasibleSpec) -> FeasibleSpec {
    use FeasibleMode::*;
    match (a.mode, b.mode) {
        (AllowAllExcept, AllowAllExcept) => FeasibleSpec::restrict(a.labels.union(&b.labels)),
        (AllowOnly, AllowOnly) => FeasibleSpec::only(a.labels.intersection(&b.labels)),
        (AllowOnly, AllowAllExcept) => FeasibleSpec::only(a.labels.difference(&b.labels)),
        (AllowAllExcept, AllowOnly) => FeasibleSpec::only(b.labels.difference(&a.labels)),
    }
}
