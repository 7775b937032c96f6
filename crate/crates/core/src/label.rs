//! Interaction labels: triples of sender, action and receiver.
//!
//! A label `(m, a, n)` describes one interaction: component `m` sends
//! action `a` to component `n`. Either endpoint (but not both) may be
//! open (`-`), which leaves the label waiting for a partner.

use std::fmt;

/// Identifier of a primitive component. Always ≥ 1 in source models.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ComponentId(pub u32);

/// Dense index of an interned action name.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ActionId(pub u32);

/// One side of a label: a concrete component or the open marker `-`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Endpoint {
    Open,
    Component(ComponentId),
}

impl Endpoint {
    pub fn is_open(&self) -> bool {
        matches!(self, Endpoint::Open)
    }

    pub fn component(&self) -> Option<ComponentId> {
        match self {
            Endpoint::Open => None,
            Endpoint::Component(c) => Some(*c),
        }
    }
}

/// Classification of a label by which endpoints are open.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LabelKind {
    /// `(-, a, n)`: waiting for a sender.
    Input,
    /// `(m, a, -)`: waiting for a receiver.
    Output,
    /// `(m, a, n)`: both endpoints concrete.
    Internal,
}

/// An interaction triple `(sender, action, receiver)`.
///
/// At most one endpoint is open; `Label::new` rejects the both-open case.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Label {
    pub sender: Endpoint,
    pub action: ActionId,
    pub receiver: Endpoint,
}

impl Label {
    /// Builds a label, panicking if both endpoints are open. Callers that
    /// handle untrusted input (the parser) must check before constructing.
    pub fn new(sender: Endpoint, action: ActionId, receiver: Endpoint) -> Self {
        assert!(
            !(sender.is_open() && receiver.is_open()),
            "label may have at most one open endpoint"
        );
        Label { sender, action, receiver }
    }

    pub fn internal(id: ComponentId, action: ActionId) -> Self {
        Label::new(Endpoint::Component(id), action, Endpoint::Component(id))
    }

    pub fn output(sender: ComponentId, action: ActionId) -> Self {
        Label::new(Endpoint::Component(sender), action, Endpoint::Open)
    }

    pub fn input(action: ActionId, receiver: ComponentId) -> Self {
        Label::new(Endpoint::Open, action, Endpoint::Component(receiver))
    }

    pub fn kind(&self) -> LabelKind {
        if self.receiver.is_open() {
            LabelKind::Output
        } else if self.sender.is_open() {
            LabelKind::Input
        } else {
            LabelKind::Internal
        }
    }

    /// Merges an output `(m, a, -)` with an input `(-, a, n)` into `(m, a, n)`.
    /// Returns `None` when the labels are not complementary.
    pub fn merge(output: &Label, input: &Label) -> Option<Label> {
        if output.kind() != LabelKind::Output
            || input.kind() != LabelKind::Input
            || output.action != input.action
        {
            return None;
        }
        Some(Label::new(output.sender, output.action, input.receiver))
    }
}

/// Maps action names to dense [`ActionId`]s and back.
#[derive(Clone, Debug, Default)]
pub struct ActionInterner {
    names: Vec<String>,
}

impl ActionInterner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> ActionId {
        if let Some(pos) = self.names.iter().position(|n| n == name) {
            return ActionId(pos as u32);
        }
        self.names.push(name.to_string());
        ActionId((self.names.len() - 1) as u32)
    }

    pub fn lookup(&self, name: &str) -> Option<ActionId> {
        self.names.iter().position(|n| n == name).map(|p| ActionId(p as u32))
    }

    pub fn name(&self, id: ActionId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Renders a label as `(m,a,n)` given the interner that owns its action name.
pub struct LabelDisplay<'a> {
    pub label: &'a Label,
    pub actions: &'a ActionInterner,
}

impl fmt::Display for LabelDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = |e: &Endpoint| match e {
            Endpoint::Open => "-".to_string(),
            Endpoint::Component(c) => c.0.to_string(),
        };
        write!(
            f,
            "({},{},{})",
            end(&self.label.sender),
            self.actions.name(self.label.action),
            end(&self.label.receiver)
        )
    }
}

/// A sorted, duplicate-free set of labels with binary-search membership.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LabelSet {
    labels: Vec<Label>,
}

impl LabelSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_labels(mut labels: Vec<Label>) -> Self {
        labels.sort_unstable();
        labels.dedup();
        LabelSet { labels }
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.labels.binary_search(l).is_ok()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Label> {
        self.labels.iter()
    }

    pub fn union(&self, other: &LabelSet) -> LabelSet {
        let mut merged = Vec::with_capacity(self.labels.len() + other.labels.len());
        merged.extend_from_slice(&self.labels);
        merged.extend_from_slice(&other.labels);
        LabelSet::from_labels(merged)
    }

    pub fn intersection(&self, other: &LabelSet) -> LabelSet {
        let labels = self.labels.iter().filter(|l| other.contains(l)).copied().collect();
        LabelSet { labels }
    }

    pub fn difference(&self, other: &LabelSet) -> LabelSet {
        let labels = self.labels.iter().filter(|l| !other.contains(l)).copied().collect();
        LabelSet { labels }
    }

    /// Approximate heap footprint, used for precomputation overhead accounting.
    pub fn approx_bytes(&self) -> usize {
        self.labels.capacity() * std::mem::size_of::<Label>()
    }
}

impl FromIterator<Label> for LabelSet {
    fn from_iter<I: IntoIterator<Item = Label>>(iter: I) -> Self {
        LabelSet::from_labels(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(id: u32) -> ActionId {
        ActionId(id)
    }

    #[test]
    fn classification_is_total() {
        let c1 = ComponentId(1);
        let c2 = ComponentId(2);
        assert_eq!(Label::output(c1, a(0)).kind(), LabelKind::Output);
        assert_eq!(Label::input(a(0), c2).kind(), LabelKind::Input);
        assert_eq!(Label::internal(c1, a(0)).kind(), LabelKind::Internal);
        assert_eq!(
            Label::new(Endpoint::Component(c1), a(0), Endpoint::Component(c2)).kind(),
            LabelKind::Internal
        );
    }

    #[test]
    #[should_panic(expected = "at most one open endpoint")]
    fn both_open_rejected() {
        let _ = Label::new(Endpoint::Open, a(0), Endpoint::Open);
    }

    #[test]
    fn merge_combines_complementary_opens() {
        let out = Label::output(ComponentId(1), a(3));
        let inp = Label::input(a(3), ComponentId(2));
        let merged = Label::merge(&out, &inp).unwrap();
        assert_eq!(merged.sender, Endpoint::Component(ComponentId(1)));
        assert_eq!(merged.receiver, Endpoint::Component(ComponentId(2)));
        assert_eq!(merged.kind(), LabelKind::Internal);

        // wrong action or wrong direction does not merge
        assert!(Label::merge(&out, &Label::input(a(4), ComponentId(2))).is_none());
        assert!(Label::merge(&inp, &out).is_none());
    }

    #[test]
    fn interner_is_stable() {
        let mut i = ActionInterner::new();
        let x = i.intern("send");
        let y = i.intern("recv");
        assert_eq!(i.intern("send"), x);
        assert_ne!(x, y);
        assert_eq!(i.name(x), "send");
        assert_eq!(i.lookup("recv"), Some(y));
        assert_eq!(i.lookup("nope"), None);
    }

    #[test]
    fn label_set_ops() {
        let l1 = Label::output(ComponentId(1), a(0));
        let l2 = Label::input(a(1), ComponentId(1));
        let l3 = Label::internal(ComponentId(2), a(0));
        let s = LabelSet::from_labels(vec![l2, l1, l1]);
        assert_eq!(s.len(), 2);
        assert!(s.contains(&l1) && s.contains(&l2) && !s.contains(&l3));

        let t = LabelSet::from_labels(vec![l2, l3]);
        assert_eq!(s.union(&t).len(), 3);
        assert_eq!(s.intersection(&t).len(), 1);
        assert_eq!(s.difference(&t).len(), 1);
    }
}
