//! Source-level model representation and validation.

use std::collections::{HashMap, HashSet};

use crate::lang::lexer::Loc;
use crate::lang::ParseError;

/// An endpoint as written: a component id or the open marker `-`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum RawEndpoint {
    Open,
    Id(u32),
}

impl std::fmt::Display for RawEndpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RawEndpoint::Open => write!(f, "-"),
            RawEndpoint::Id(n) => write!(f, "{n}"),
        }
    }
}

/// A label as written, before action interning.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RawLabel {
    pub sender: RawEndpoint,
    pub action: String,
    pub receiver: RawEndpoint,
}

impl std::fmt::Display for RawLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.sender, self.action, self.receiver)
    }
}

#[derive(Clone, Debug)]
pub struct TransDecl {
    pub from: String,
    pub to: String,
    pub label: RawLabel,
    pub loc: Loc,
}

#[derive(Clone, Debug)]
pub struct PrimitiveDecl {
    pub name: String,
    pub component_id: u32,
    pub states: Vec<String>,
    pub init: String,
    pub trans: Vec<TransDecl>,
    pub loc: Loc,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FilterKind {
    RestrictL,
    OnlyL,
}

#[derive(Clone, Debug)]
pub struct CompositeDecl {
    pub name: String,
    pub children: Vec<String>,
    /// `None` means no filter clause: all candidate labels are allowed.
    pub filter: Option<(FilterKind, Vec<RawLabel>)>,
    pub loc: Loc,
}

/// A parsed and validated model, declaration order preserved.
#[derive(Clone, Debug)]
pub struct SourceModel {
    pub automata: Vec<PrimitiveDecl>,
    pub composites: Vec<CompositeDecl>,
    pub system: String,
    pub system_loc: Loc,
}

impl PartialEq for SourceModel {
    fn eq(&self, other: &Self) -> bool {
        // Structural equality ignoring source locations.
        fn label_eq(a: &RawLabel, b: &RawLabel) -> bool {
            a == b
        }
        self.system == other.system
            && self.automata.len() == other.automata.len()
            && self.composites.len() == other.composites.len()
            && self.automata.iter().zip(&other.automata).all(|(x, y)| {
                x.name == y.name
                    && x.component_id == y.component_id
                    && x.states == y.states
                    && x.init == y.init
                    && x.trans.len() == y.trans.len()
                    && x.trans.iter().zip(&y.trans).all(|(s, t)| {
                        s.from == t.from && s.to == t.to && label_eq(&s.label, &t.label)
                    })
            })
            && self.composites.iter().zip(&other.composites).all(|(x, y)| {
                x.name == y.name
                    && x.children == y.children
                    && match (&x.filter, &y.filter) {
                        (None, None) => true,
                        (Some((ka, la)), Some((kb, lb))) => ka == kb && la == lb,
                        _ => false,
                    }
            })
    }
}

impl SourceModel {
    pub fn automaton(&self, name: &str) -> Option<&PrimitiveDecl> {
        self.automata.iter().find(|a| a.name == name)
    }

    pub fn composite(&self, name: &str) -> Option<&CompositeDecl> {
        self.composites.iter().find(|c| c.name == name)
    }
}

fn err(loc: Loc, message: impl Into<String>) -> ParseError {
    ParseError::Invalid { message: message.into(), loc }
}

/// Checks every structural invariant of a freshly parsed model.
pub fn validate(model: &SourceModel) -> Result<(), ParseError> {
    // Unique declaration names across automata and composites.
    let mut names: HashMap<&str, Loc> = HashMap::new();
    for a in &model.automata {
        if names.insert(&a.name, a.loc).is_some() {
            return Err(err(a.loc, format!("duplicate declaration of '{}'", a.name)));
        }
    }
    for c in &model.composites {
        if names.insert(&c.name, c.loc).is_some() {
            return Err(err(c.loc, format!("duplicate declaration of '{}'", c.name)));
        }
    }

    // Unique component ids.
    let mut ids: HashMap<u32, &str> = HashMap::new();
    for a in &model.automata {
        if a.component_id == 0 {
            return Err(err(a.loc, format!("component id of '{}' must be >= 1", a.name)));
        }
        if let Some(prev) = ids.insert(a.component_id, &a.name) {
            return Err(err(
                a.loc,
                format!(
                    "duplicate component id {} (used by '{}' and '{}')",
                    a.component_id, prev, a.name
                ),
            ));
        }
    }

    // Per-automaton checks.
    for a in &model.automata {
        let state_set: HashSet<&str> = a.states.iter().map(|s| s.as_str()).collect();
        if state_set.len() != a.states.len() {
            return Err(err(a.loc, format!("duplicate state name in '{}'", a.name)));
        }
        if !state_set.contains(a.init.as_str()) {
            return Err(err(
                a.loc,
                format!("init state '{}' of '{}' is not declared", a.init, a.name),
            ));
        }
        for t in &a.trans {
            for s in [&t.from, &t.to] {
                if !state_set.contains(s.as_str()) {
                    return Err(err(
                        t.loc,
                        format!("transition of '{}' uses undeclared state '{}'", a.name, s),
                    ));
                }
            }
            check_label_endpoints(&t.label, a, t.loc)?;
        }
    }

    // Composite filter labels: at most one open endpoint.
    for c in &model.composites {
        if c.children.is_empty() {
            return Err(err(c.loc, format!("composite '{}' has no children", c.name)));
        }
        if let Some((_, labels)) = &c.filter {
            for l in labels {
                if l.sender == RawEndpoint::Open && l.receiver == RawEndpoint::Open {
                    return Err(err(
                        c.loc,
                        format!("filter label {l} of '{}' has two open endpoints", c.name),
                    ));
                }
            }
        }
        for child in &c.children {
            if !names.contains_key(child.as_str()) {
                return Err(err(
                    c.loc,
                    format!("composite '{}' references undeclared '{}'", c.name, child),
                ));
            }
        }
    }

    // System root resolves.
    if !names.contains_key(model.system.as_str()) {
        return Err(err(
            model.system_loc,
            format!("system declaration references undeclared '{}'", model.system),
        ));
    }

    // The reference graph is a tree: every declaration used at most once,
    // no cycles, everything reachable from the system root.
    let mut used_by: HashMap<&str, &str> = HashMap::new();
    for c in &model.composites {
        for child in &c.children {
            if let Some(prev) = used_by.insert(child, &c.name) {
                return Err(err(
                    c.loc,
                    format!("'{child}' is used by both '{prev}' and '{}'", c.name),
                ));
            }
        }
    }
    if let Some(parent) = used_by.get(model.system.as_str()) {
        return Err(err(
            model.system_loc,
            format!("system root '{}' may not be a child of '{parent}'", model.system),
        ));
    }

    let mut reachable: HashSet<&str> = HashSet::new();
    let mut stack = vec![model.system.as_str()];
    while let Some(n) = stack.pop() {
        if !reachable.insert(n) {
            // Revisiting a node means the children lists form a cycle.
            return Err(err(model.system_loc, format!("hierarchy contains a cycle through '{n}'")));
        }
        if let Some(c) = model.composite(n) {
            for child in &c.children {
                stack.push(child);
            }
        }
    }
    for a in &model.automata {
        if !reachable.contains(a.name.as_str()) {
            return Err(err(
                a.loc,
                format!("automaton '{}' is not reachable from the system root", a.name),
            ));
        }
    }
    for c in &model.composites {
        if !reachable.contains(c.name.as_str()) {
            return Err(err(
                c.loc,
                format!("composite '{}' is not reachable from the system root", c.name),
            ));
        }
    }

    Ok(())
}

/// Every concrete endpoint of a primitive's label must name the declaring
/// automaton itself; sender/receiver attribution is then unambiguous.
fn check_label_endpoints(l: &RawLabel, a: &PrimitiveDecl, loc: Loc) -> Result<(), ParseError> {
    if l.sender == RawEndpoint::Open && l.receiver == RawEndpoint::Open {
        return Err(err(loc, format!("label {l} has two open endpoints")));
    }
    for e in [&l.sender, &l.receiver] {
        if let RawEndpoint::Id(id) = e {
            if *id != a.component_id {
                return Err(err(
                    loc,
                    format!(
                        "label {l} of '{}' names component {id}, expected its own id {}",
                        a.name, a.component_id
                    ),
                ));
            }
        }
    }
    Ok(())
}
