//! Generated benchmark model families.
//!
//! Three shapes with known state-space structure:
//!
//! * `toggles(n)`: n independent two-state components with internal
//!   toggle labels under one allow-all composite; 2^n reachable states and
//!   the best case for ample-set reduction.
//! * `pipeline-tree(n, d)`: n producer/consumer pairs arranged as a ring
//!   of 2n single-slot cells, composed by a complete binary tree of depth
//!   d (so 2n must equal 2^d). Four circulating items, C(2n, 4) reachable
//!   states, every move a synchronization formed at varying tree depths;
//!   stresses the LCA tables.
//! * `ring(n)`: n components passing one token; exactly one enabled
//!   (synchronization) move per state, so reduction can never apply.

use coin_core::lang::ast::{
    CompositeDecl, FilterKind, PrimitiveDecl, RawEndpoint, RawLabel, SourceModel, TransDecl,
};
use coin_core::lang::lexer::Loc;
use coin_core::lang::to_coin_text;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    Toggles,
    PipelineTree,
    Ring,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "toggles" => Ok(Family::Toggles),
            "pipeline-tree" => Ok(Family::PipelineTree),
            "ring" => Ok(Family::Ring),
            other => Err(format!("unknown family '{other}' (toggles, pipeline-tree, ring)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FamilyError {
    #[error("size parameter n must be >= 1")]
    BadSize,
    #[error("pipeline-tree needs a depth d >= 1 with 2*n == 2^d (got n={n}, d={d})")]
    BadDepth { n: usize, d: usize },
}

/// Renders a family instance as CoIn source text.
pub fn generate(family: Family, n: usize, d: Option<usize>) -> Result<String, FamilyError> {
    if n == 0 {
        return Err(FamilyError::BadSize);
    }
    match family {
        Family::Toggles => Ok(toggles(n)),
        Family::Ring => Ok(ring(n)),
        Family::PipelineTree => {
            let d = d.unwrap_or(0);
            if d == 0 || (1usize << d) != 2 * n {
                return Err(FamilyError::BadDepth { n, d });
            }
            Ok(pipeline_tree(n, d))
        }
    }
}

const AT: Loc = Loc { line: 0, col: 0 };

fn internal(id: u32, action: String) -> RawLabel {
    RawLabel { sender: RawEndpoint::Id(id), action, receiver: RawEndpoint::Id(id) }
}

fn output(id: u32, action: String) -> RawLabel {
    RawLabel { sender: RawEndpoint::Id(id), action, receiver: RawEndpoint::Open }
}

fn input(action: String, id: u32) -> RawLabel {
    RawLabel { sender: RawEndpoint::Open, action, receiver: RawEndpoint::Id(id) }
}

fn trans(from: &str, to: &str, label: RawLabel) -> TransDecl {
    TransDecl { from: from.to_string(), to: to.to_string(), label, loc: AT }
}

fn toggles(n: usize) -> String {
    let automata = (1..=n as u32)
        .map(|i| PrimitiveDecl {
            name: format!("T{i}"),
            component_id: i,
            states: vec!["off".into(), "on".into()],
            init: "off".into(),
            trans: vec![
                trans("off", "on", internal(i, format!("t{i}"))),
                trans("on", "off", internal(i, format!("t{i}"))),
            ],
            loc: AT,
        })
        .collect();
    let root = CompositeDecl {
        name: "R".into(),
        children: (1..=n).map(|i| format!("T{i}")).collect(),
        filter: None,
        loc: AT,
    };
    to_coin_text(&SourceModel {
        automata,
        composites: vec![root],
        system: "R".into(),
        system_loc: AT,
    })
}

fn ring(n: usize) -> String {
    let pass = |k: usize| format!("p{k}");
    let automata = (0..n)
        .map(|k| {
            let id = (k + 1) as u32;
            let prev = (k + n - 1) % n;
            PrimitiveDecl {
                name: format!("R{k}"),
                component_id: id,
                states: vec!["h".into(), "w".into()],
                init: if k == 0 { "h".into() } else { "w".into() },
                trans: vec![
                    trans("h", "w", output(id, pass(k))),
                    trans("w", "h", input(pass(prev), id)),
                ],
                loc: AT,
            }
        })
        .collect();

    // Block every open half; only completed synchronizations remain.
    let mut restricted = Vec::new();
    for k in 0..n {
        let id = (k + 1) as u32;
        let next = ((k + 1) % n + 1) as u32;
        restricted.push(output(id, pass(k)));
        restricted.push(input(pass(k), next));
    }
    let root = CompositeDecl {
        name: "R".into(),
        children: (0..n).map(|k| format!("R{k}")).collect(),
        filter: Some((FilterKind::RestrictL, restricted)),
        loc: AT,
    };
    to_coin_text(&SourceModel {
        automata,
        composites: vec![root],
        system: "R".into(),
        system_loc: AT,
    })
}

/// Number of circulating items in the pipeline ring.
pub const PIPELINE_TOKENS: usize = 4;

fn pipeline_tree(n: usize, depth: usize) -> String {
    let cells = 2 * n;
    let tokens = PIPELINE_TOKENS.min(cells - 1);
    let mv = |j: usize| format!("mv{j}");
    let cell_name = |j: usize| {
        if j.is_multiple_of(2) {
            format!("prod{}", j / 2)
        } else {
            format!("cons{}", j / 2)
        }
    };

    let automata = (0..cells)
        .map(|j| {
            let id = (j + 1) as u32;
            let prev = (j + cells - 1) % cells;
            PrimitiveDecl {
                name: cell_name(j),
                component_id: id,
                states: vec!["e".into(), "f".into()],
                init: if j < tokens { "f".into() } else { "e".into() },
                trans: vec![
                    trans("f", "e", output(id, mv(j))),
                    trans("e", "f", input(mv(prev), id)),
                ],
                loc: AT,
            }
        })
        .collect();

    // Complete binary tree over the cells; each composite restricts the
    // open halves of every adjacent pair joined at or below it, so a
    // handoff exists exactly at the pair's lowest common ancestor.
    let mut composites: Vec<CompositeDecl> = Vec::new();
    let mut counter = 0usize;
    let root = build_pipeline_node(0, cells, depth, cells, &cell_name, &mv, &mut composites, &mut counter);
    to_coin_text(&SourceModel {
        automata,
        composites,
        system: root,
        system_loc: AT,
    })
}

#[allow(clippy::too_many_arguments)]
fn build_pipeline_node(
    lo: usize,
    hi: usize,
    depth: usize,
    cells: usize,
    cell_name: &dyn Fn(usize) -> String,
    mv: &dyn Fn(usize) -> String,
    composites: &mut Vec<CompositeDecl>,
    counter: &mut usize,
) -> String {
    if hi - lo == 1 {
        debug_assert_eq!(depth, 0);
        return cell_name(lo);
    }
    let mid = (lo + hi) / 2;
    let left = build_pipeline_node(lo, mid, depth - 1, cells, cell_name, mv, composites, counter);
    let right = build_pipeline_node(mid, hi, depth - 1, cells, cell_name, mv, composites, counter);

    let mut restricted = Vec::new();
    let mut restrict_pair = |j: usize| {
        let next = (j + 1) % cells;
        restricted.push(output((j + 1) as u32, mv(j)));
        restricted.push(input(mv(j), (next + 1) as u32));
    };
    for j in lo..hi - 1 {
        restrict_pair(j);
    }
    if lo == 0 && hi == cells {
        restrict_pair(cells - 1); // the wrap-around handoff joins at the root
    }

    let name = format!("n{}", *counter);
    *counter += 1;
    composites.push(CompositeDecl {
        name: name.clone(),
        children: vec![left, right],
        filter: Some((FilterKind::RestrictL, restricted)),
        loc: AT,
    });
    name
}

/// C(cells, tokens): the expected reachable state count of a pipeline
/// ring, used by tests and the bench harness.
pub fn pipeline_expected_states(n: usize) -> u64 {
    let cells = 2 * n as u64;
    let tokens = PIPELINE_TOKENS.min(2 * n - 1) as u64;
    let mut result = 1u64;
    for k in 0..tokens {
        result = result * (cells - k) / (k + 1);
    }
    result
}
