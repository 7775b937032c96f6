//! Seeded generation of models, formulas and runs for differential
//! testing. Everything here is deterministic in the seed, so failures
//! reproduce exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hierarchy::{GlobalState, HierarchyTree};
use crate::label::Label;
use crate::ltl::semantics::{LassoWord, Letter};
use crate::succgen::{Generator, PrecomputedTables};

/// The two-component demo model: A interacts with B under a restricted
/// composition. Its composed system has exactly 3 reachable states and 9
/// transitions, which several tests pin down.
pub const DEMO_MODEL: &str = "\
automaton A (1) {
    state q0, q1, q2;
    init q0;
    trans
        q0 -> q1 (1, a, -),
        q1 -> q2 (1, b, 1),
        q2 -> q0 (-, c, 1);
}
automaton B (2) {
    state p0;
    init p0;
    trans
        p0 -> p0 (-, a, 2),
        p0 -> p0 (2, c, -);
}
composite C {
    A, B;
    restrictL (1, a, -), (-, c, 1);
}
system C;
";

/// A three-level nesting with six leaves and four internal nodes; exercises
/// LCA queries at every depth.
pub const NESTED_SHAPE_MODEL: &str = "\
automaton S1 (1) { state s; init s; trans; }
automaton Si (2) { state s; init s; trans; }
automaton S3 (3) { state s; init s; trans; }
automaton S4 (4) { state s; init s; trans; }
automaton Sj (5) { state s; init s; trans; }
automaton S6 (6) { state s; init s; trans; }
composite C3 { Si, S3; }
composite C4 { Sj, S6; }
composite C2 { C3, S4, C4; }
composite root { S1, C2; }
system root;
";

/// Knobs for [`random_model`].
#[derive(Clone, Debug)]
pub struct RandomModelCfg {
    pub max_leaves: usize,
    pub max_states: usize,
    pub max_depth: usize,
    /// Chance (in percent) that a generated label is internal; higher
    /// values produce more fully-local leaves, which partial-order
    /// reduction can exploit.
    pub internal_pct: u32,
    /// Number of distinct action names to draw from.
    pub actions: usize,
}

impl Default for RandomModelCfg {
    fn default() -> Self {
        RandomModelCfg { max_leaves: 6, max_states: 4, max_depth: 4, internal_pct: 40, actions: 3 }
    }
}

/// Generates a random valid CoIn model as source text.
pub fn random_model(seed: u64, cfg: &RandomModelCfg) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = rng.gen_range(1..=cfg.max_leaves);
    let mut text = String::new();
    let action_name = |i: usize| format!("a{i}");

    // Primitives first.
    for id in 1..=leaves {
        let states = rng.gen_range(1..=cfg.max_states);
        let names: Vec<String> = (0..states).map(|i| format!("s{i}")).collect();
        let init = rng.gen_range(0..states);
        let ntrans = rng.gen_range(1..=(2 * states + 1));
        text.push_str(&format!("automaton P{id} ({id}) {{\n"));
        text.push_str(&format!("    state {};\n", names.join(", ")));
        text.push_str(&format!("    init s{init};\n"));
        text.push_str("    trans\n");
        for t in 0..ntrans {
            let from = rng.gen_range(0..states);
            let to = rng.gen_range(0..states);
            let action = action_name(rng.gen_range(0..cfg.actions));
            let roll = rng.gen_range(0..100);
            let label = if roll < cfg.internal_pct {
                format!("({id}, {action}, {id})")
            } else if roll < cfg.internal_pct + (100 - cfg.internal_pct) / 2 {
                format!("({id}, {action}, -)")
            } else {
                format!("(-, {action}, {id})")
            };
            let sep = if t + 1 == ntrans { ";" } else { "," };
            text.push_str(&format!("        s{from} -> s{to} {label}{sep}\n"));
        }
        text.push_str("}\n");
    }

    // Random tree over the leaves: fold groups of pending roots under new
    // composites until one root remains, bounded by the depth budget.
    let mut pending: Vec<(String, u32)> = (1..=leaves).map(|id| (format!("P{id}"), 0u32)).collect();
    let mut next_comp = 0usize;
    while pending.len() > 1 {
        let max_group = pending.len().min(3);
        let group = if pending.iter().any(|(_, d)| *d as usize >= cfg.max_depth) {
            // Depth budget reached: close everything under one root.
            pending.len()
        } else {
            rng.gen_range(2..=max_group)
        };
        let mut children = Vec::new();
        let mut depth = 0;
        for _ in 0..group {
            let pick = rng.gen_range(0..pending.len());
            let (name, d) = pending.remove(pick);
            depth = depth.max(d + 1);
            children.push(name);
        }
        let name = format!("N{next_comp}");
        next_comp += 1;
        text.push_str(&format!("composite {name} {{\n    {};\n", children.join(", ")));
        if let Some(filter) = random_filter(&mut rng, leaves, cfg) {
            text.push_str(&format!("    {filter};\n"));
        }
        text.push_str("}\n");
        pending.push((name, depth));
    }
    let root = pending.pop().map(|(n, _)| n).unwrap_or_else(|| "P1".to_string());
    text.push_str(&format!("system {root};\n"));
    text
}

fn random_filter(rng: &mut ChaCha8Rng, leaves: usize, cfg: &RandomModelCfg) -> Option<String> {
    let roll = rng.gen_range(0..100);
    if roll < 40 {
        return None; // allow-all
    }
    let keyword = if roll < 85 { "restrictL" } else { "onlyL" };
    // Sample from the plausible universe: open halves, internals, pairs.
    let count = rng.gen_range(1..=4.min(leaves * 2));
    let mut labels: Vec<String> = Vec::new();
    for _ in 0..count {
        let a = format!("a{}", rng.gen_range(0..cfg.actions));
        let m = rng.gen_range(1..=leaves);
        labels.push(match rng.gen_range(0..4) {
            0 => format!("({m}, {a}, -)"),
            1 => format!("(-, {a}, {m})"),
            2 => format!("({m}, {a}, {m})"),
            _ => {
                let n = rng.gen_range(1..=leaves);
                format!("({m}, {a}, {n})")
            }
        });
    }
    labels.sort();
    labels.dedup();
    Some(format!("{keyword} {}", labels.join(", ")))
}

/// Every lasso run of the composed system with at most `max_letters`
/// letters: a stem, then a cycle back into it. Runs that reach a deadlock
/// close with the stutter letter.
pub fn enumerate_lassos(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    max_letters: usize,
) -> Vec<LassoWord> {
    let mut gen = Generator::new(tree, tables, crate::succgen::Algorithm::Lca);
    let mut out = Vec::new();
    let init = crate::hierarchy::initial_state(tree);
    let mut path = vec![init];
    let mut letters: Vec<Letter> = Vec::new();
    dfs(&mut gen, &mut path, &mut letters, max_letters, &mut out);
    out
}

fn dfs(
    gen: &mut Generator,
    path: &mut Vec<GlobalState>,
    letters: &mut Vec<Letter>,
    max_letters: usize,
    out: &mut Vec<LassoWord>,
) {
    let current = path.last().unwrap().clone();
    let succs = gen.successors(&current);

    if succs.is_empty() {
        if letters.len() < max_letters {
            let mut word = letters.clone();
            word.push(Letter::new(None, Vec::new()));
            out.push(LassoWord { letters: word, loop_start: letters.len() });
        }
        return;
    }
    if letters.len() == max_letters {
        return;
    }

    let enabled: Vec<Label> = succs.iter().map(|t| t.label).collect();
    for t in &succs {
        letters.push(Letter::new(Some(t.label), enabled.clone()));
        for (j, earlier) in path.iter().enumerate() {
            if *earlier == t.successor {
                out.push(LassoWord { letters: letters.clone(), loop_start: j });
            }
        }
        path.push(t.successor.clone());
        dfs(gen, path, letters, max_letters, out);
        path.pop();
        letters.pop();
    }
}

/// Labels a property could meaningfully observe: everything in the leaf
/// alphabets plus every merged synchronization label the partner structure
/// allows.
pub fn observable_labels(tree: &HierarchyTree) -> Vec<Label> {
    let mut labels: Vec<Label> = tree
        .leaves
        .iter()
        .flat_map(|p| p.alphabet().copied().collect::<Vec<_>>())
        .collect();
    for (i, a) in tree.leaves.iter().enumerate() {
        for (j, b) in tree.leaves.iter().enumerate() {
            if i == j {
                continue;
            }
            for la in a.alphabet() {
                if la.kind() != crate::label::LabelKind::Output {
                    continue;
                }
                for lb in b.alphabet() {
                    if let Some(m) = Label::merge(la, lb) {
                        labels.push(m);
                    }
                }
            }
        }
    }
    labels.sort_unstable();
    labels.dedup();
    labels
}

fn render_label(l: &Label, tree: &HierarchyTree) -> String {
    format!("{}", crate::label::LabelDisplay { label: l, actions: &tree.actions })
}

/// Seeded property templates instantiated with the model's own labels.
/// Most are reduction-compatible request/response shapes; a few are
/// step-sensitive on purpose, to exercise the full-expansion fallback.
pub fn formula_templates(tree: &HierarchyTree, seed: u64, count: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x666f726d756c6173);
    let labels = observable_labels(tree);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        if labels.is_empty() {
            out.push("G true".to_string());
            continue;
        }
        let l1 = render_label(&labels[rng.gen_range(0..labels.len())], tree);
        let l2 = render_label(&labels[rng.gen_range(0..labels.len())], tree);
        out.push(match k % 11 {
            0 => "G true".to_string(),
            1 => format!("F act{l1}"),
            2 => format!("G !act{l1}"),
            3 => format!("G (act{l1} -> F act{l2})"),
            4 => format!("G F act{l1}"),
            5 => format!("F G !act{l1}"),
            6 => format!("G (en{l1} -> F act{l1})"),
            7 => format!("en{l1} U act{l2}"),
            8 => format!("en{l1} U en{l2}"),
            9 => format!("X act{l1}"),
            _ => format!("act{l1} U act{l2}"),
        });
    }
    out
}

/// A flat family of `n` independent two-state toggle components with
/// internal labels only; the classic best case for ample-set reduction.
pub fn toggle_model(n: usize) -> String {
    let mut text = String::new();
    for i in 1..=n {
        text.push_str(&format!(
            "automaton T{i} ({i}) {{ state off, on; init off; trans off -> on ({i}, t{i}, {i}), on -> off ({i}, t{i}, {i}); }}\n"
        ));
    }
    let children: Vec<String> = (1..=n).map(|i| format!("T{i}")).collect();
    text.push_str(&format!("composite R {{ {}; }}\nsystem R;\n", children.join(", ")));
    text
}

/// Enumerates all formulas of syntactic depth at most `depth` over the
/// given atoms (atoms have depth 1).
pub fn enumerate_formulas(
    atoms: &[crate::ltl::CiLtlFormula],
    depth: usize,
) -> Vec<crate::ltl::CiLtlFormula> {
    use crate::ltl::CiLtlFormula as F;
    let mut by_depth: Vec<Vec<F>> = vec![atoms.to_vec()];
    for d in 1..depth {
        let mut level = Vec::new();
        let newest: Vec<F> = by_depth[d - 1].clone();
        let shallower: Vec<F> = by_depth.iter().flatten().cloned().collect();
        for f in &newest {
            level.push(F::not(f.clone()));
            level.push(F::next(f.clone()));
            level.push(F::finally(f.clone()));
            level.push(F::globally(f.clone()));
        }
        for a in &shallower {
            for b in &shallower {
                // At least one operand from the previous level keeps the
                // enumeration duplicate-free across depths.
                if !newest.contains(a) && !newest.contains(b) {
                    continue;
                }
                level.push(F::and(a.clone(), b.clone()));
                level.push(F::or(a.clone(), b.clone()));
                level.push(F::implies(a.clone(), b.clone()));
                level.push(F::until(a.clone(), b.clone()));
                level.push(F::release(a.clone(), b.clone()));
            }
        }
        by_depth.push(level);
    }
    by_depth.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{elaborate, parse_model};

    #[test]
    fn random_models_parse_and_elaborate() {
        for seed in 0..50 {
            let text = random_model(seed, &RandomModelCfg::default());
            let model =
                parse_model(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
            let tree = elaborate(&model);
            assert!((1..=6).contains(&tree.leaf_count()));
        }
    }

    #[test]
    fn formula_enumeration_counts() {
        use crate::ltl::CiLtlFormula as F;
        let atoms = vec![F::True, F::False];
        assert_eq!(enumerate_formulas(&atoms, 1).len(), 2);
        // 2 atoms + 4 unary * 2 + 5 binary * (2*2) = 2 + 8 + 20
        assert_eq!(enumerate_formulas(&atoms, 2).len(), 30);
    }
}
