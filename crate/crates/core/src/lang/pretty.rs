//! Canonical printer for source models. Re-parsing the printed form yields
//! a structurally identical model.

use crate::lang::ast::{FilterKind, SourceModel};
use std::fmt::Write;

pub fn to_coin_text(model: &SourceModel) -> String {
    let mut out = String::new();
    for a in &model.automata {
        writeln!(out, "automaton {} ({}) {{", a.name, a.component_id).unwrap();
        writeln!(out, "    state {};", a.states.join(", ")).unwrap();
        writeln!(out, "    init {};", a.init).unwrap();
        if a.trans.is_empty() {
            writeln!(out, "    trans;").unwrap();
        } else {
            writeln!(out, "    trans").unwrap();
            for (i, t) in a.trans.iter().enumerate() {
                let sep = if i + 1 == a.trans.len() { ";" } else { "," };
                writeln!(out, "        {} -> {} {}{}", t.from, t.to, t.label, sep).unwrap();
            }
        }
        writeln!(out, "}}").unwrap();
    }
    for c in &model.composites {
        writeln!(out, "composite {} {{", c.name).unwrap();
        writeln!(out, "    {};", c.children.join(", ")).unwrap();
        if let Some((kind, labels)) = &c.filter {
            let kw = match kind {
                FilterKind::RestrictL => "restrictL",
                FilterKind::OnlyL => "onlyL",
            };
            let rendered: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
            writeln!(out, "    {kw} {};", rendered.join(", ")).unwrap();
        }
        writeln!(out, "}}").unwrap();
    }
    writeln!(out, "system {};", model.system).unwrap();
    out
}
