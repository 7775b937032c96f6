//! Command implementations behind the `coin` binary: metrics, CI-LTL
//! verification, never-claim emission, benchmark model generation, and the
//! timing matrix. Everything returns structured output so both the binary
//! and the test suites drive the same code.

pub mod families;

use std::fmt::Write as _;
use std::time::Duration;

use coin_core::explore::{
    build_product_graph, check_deadlock, detect_accepting_cycle, reach, ExploreOptions, Verdict,
};
use coin_core::hierarchy::StateDisplay;
use coin_core::label::LabelDisplay;
use coin_core::lang::{elaborate, parse_claim, parse_formula, parse_model};
use coin_core::ltl::{
    claim_from_raw, negate, nnf, to_buchi, to_never_claim, BuchiAutomaton, CiLtlFormula,
    ProductStep, StepLabel,
};
use coin_core::por::por_admissible;
use coin_core::succgen::{precompute, Algorithm};
use coin_core::HierarchyTree;

pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const COUNTEREXAMPLE: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
    pub const RESOURCE_LIMIT: i32 = 3;
    pub const DEADLOCK: i32 = 4;
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum OutputFormat {
    #[default]
    Human,
    Machine,
}

/// Everything one invocation needs; mirrors the command-line surface.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model_text: String,
    pub algorithm: Algorithm,
    pub por: bool,
    pub por_stats: bool,
    pub workers: usize,
    pub mem_limit_bytes: u64,
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model_text: String::new(),
            algorithm: Algorithm::Lca,
            por: false,
            por_stats: false,
            workers: 1,
            mem_limit_bytes: coin_core::explore::DEFAULT_MEM_LIMIT,
            format: OutputFormat::Human,
            seed: 0,
        }
    }
}

/// What a command produced: text for stdout, diagnostics for stderr, and
/// the process exit code.
#[derive(Clone, Debug, Default)]
pub struct CmdOutput {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CmdOutput {
    fn ok(stdout: String) -> Self {
        CmdOutput { exit_code: exit_codes::OK, stdout, stderr: String::new() }
    }

    fn input_error(message: String) -> Self {
        CmdOutput {
            exit_code: exit_codes::INPUT_ERROR,
            stdout: String::new(),
            stderr: message,
        }
    }
}

fn explore_options(cfg: &RunConfig) -> ExploreOptions {
    ExploreOptions {
        algorithm: cfg.algorithm,
        workers: cfg.workers,
        por: cfg.por,
        mem_limit_bytes: cfg.mem_limit_bytes,
        seed: cfg.seed,
    }
}

fn parse_tree(cfg: &RunConfig) -> Result<HierarchyTree, CmdOutput> {
    match parse_model(&cfg.model_text) {
        Ok(m) => Ok(elaborate(&m)),
        Err(e) => Err(CmdOutput::input_error(format!("model error: {e}\n"))),
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

/// State-space generation metrics; with `por_stats` both the full and the
/// reduced spaces are generated and compared.
pub fn cmd_metrics(cfg: &RunConfig) -> CmdOutput {
    let tree = match parse_tree(cfg) {
        Ok(t) => t,
        Err(out) => return out,
    };

    let run = |por: bool| reach(&tree, &ExploreOptions { por, ..explore_options(cfg) });

    if cfg.por_stats {
        let full = run(false);
        let reduced = run(true);
        if full.limit_hit || reduced.limit_hit {
            return CmdOutput {
                exit_code: exit_codes::RESOURCE_LIMIT,
                stdout: String::new(),
                stderr: "memory limit exceeded\n".to_string(),
            };
        }
        let ratio = (full.states as f64 / reduced.states as f64).round() as u64;
        let stdout = match cfg.format {
            OutputFormat::Machine => format!(
                "full_states={} full_transitions={} reduced_states={} reduced_transitions={} ratio={}:1 algorithm={} workers={}\n",
                full.states,
                full.transitions,
                reduced.states,
                reduced.transitions,
                ratio,
                cfg.algorithm,
                cfg.workers,
            ),
            OutputFormat::Human => format!(
                "              states   transitions\n\
                 full    {:>12}  {:>12}\n\
                 reduced {:>12}  {:>12}\n\
                 reduction ratio {ratio}:1\n",
                full.states, full.transitions, reduced.states, reduced.transitions,
            ),
        };
        return CmdOutput::ok(stdout);
    }

    let m = run(cfg.por);
    let exit = if m.limit_hit { exit_codes::RESOURCE_LIMIT } else { exit_codes::OK };
    let stdout = match cfg.format {
        OutputFormat::Machine => format!(
            "states={} transitions={} time_s={:.3} mem_bytes={} store_bytes={} digest={:016x} algorithm={} workers={} por={}{}\n",
            m.states,
            m.transitions,
            secs(m.duration),
            m.peak_mem_bytes,
            m.store_bytes,
            m.digest,
            cfg.algorithm,
            cfg.workers,
            if cfg.por { "on" } else { "off" },
            if m.limit_hit { " limit=hit" } else { "" },
        ),
        OutputFormat::Human => {
            let mut s = format!(
                "states:      {}\ntransitions: {}\ntime:        {:.3} s\npeak memory: {:.1} MiB\nalgorithm:   {}\nworkers:     {}\npor:         {}\n",
                m.states,
                m.transitions,
                secs(m.duration),
                m.peak_mem_bytes as f64 / (1024.0 * 1024.0),
                cfg.algorithm,
                cfg.workers,
                if cfg.por { "on" } else { "off" },
            );
            if m.limit_hit {
                s.push_str("exploration stopped at the memory limit; counts are partial\n");
            }
            s
        }
    };
    CmdOutput { exit_code: exit, stdout, stderr: String::new() }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// The property source for a verification run.
#[derive(Clone, Debug)]
pub enum Property {
    /// A CI-LTL formula; the checker negates and translates it.
    Formula(String),
    /// A ready never-claim block (as emitted by `property`).
    ClaimText(String),
    /// Deadlock search instead of a temporal property.
    Deadlock,
}

pub fn cmd_verify(cfg: &RunConfig, property: &Property) -> CmdOutput {
    let tree = match parse_tree(cfg) {
        Ok(t) => t,
        Err(out) => return out,
    };

    match property {
        Property::Deadlock => {
            let (verdict, _) = check_deadlock(&tree, &explore_options(cfg));
            render_verdict(cfg, &tree, verdict, true)
        }
        Property::Formula(text) => {
            let formula = match parse_formula(text) {
                Ok(f) => f,
                Err(e) => return CmdOutput::input_error(format!("formula error: {e}\n")),
            };
            let mut actions = tree.actions.clone();
            let claim = to_buchi(&negate(&formula, &mut actions));
            verify_against_claim(cfg, &tree, &claim, Some(&formula))
        }
        Property::ClaimText(text) => {
            let raw = match parse_claim(text) {
                Ok(c) => c,
                Err(e) => return CmdOutput::input_error(format!("claim error: {e}\n")),
            };
            let mut actions = tree.actions.clone();
            let claim = match claim_from_raw(&raw, &mut actions) {
                Ok(c) => c,
                Err(e) => return CmdOutput::input_error(format!("claim error: {e}\n")),
            };
            verify_against_claim(cfg, &tree, &claim, None)
        }
    }
}

fn verify_against_claim(
    cfg: &RunConfig,
    tree: &HierarchyTree,
    claim: &BuchiAutomaton,
    formula: Option<&CiLtlFormula>,
) -> CmdOutput {
    let tables = precompute(tree);
    let mut actions = tree.actions.clone();

    // Reduction applies only when the property provably cannot observe
    // the reordering; a raw claim file carries no formula to analyze, so
    // it always explores fully.
    let (por, atoms) = match formula {
        Some(f) if cfg.por => {
            let admissible = por_admissible(&nnf(f, &mut actions), &negate(f, &mut actions));
            let atoms = f
                .atoms()
                .into_iter()
                .map(|a| coin_core::ltl::formula::resolve_atom(a, &mut actions))
                .collect();
            (admissible, atoms)
        }
        Some(f) => {
            let atoms = f
                .atoms()
                .into_iter()
                .map(|a| coin_core::ltl::formula::resolve_atom(a, &mut actions))
                .collect();
            (false, atoms)
        }
        None => (false, Vec::new()),
    };

    let options = ExploreOptions { por, ..explore_options(cfg) };
    let graph = build_product_graph(tree, &tables, claim, &atoms, &options);
    let verdict = detect_accepting_cycle(tree, &tables, claim, &graph, options.algorithm);
    render_verdict(cfg, tree, verdict, false)
}

fn render_verdict(
    cfg: &RunConfig,
    tree: &HierarchyTree,
    verdict: Verdict,
    deadlock_mode: bool,
) -> CmdOutput {
    let machine = cfg.format == OutputFormat::Machine;
    match verdict {
        Verdict::PropertyHolds => {
            let text = if machine {
                "verdict=holds\n".to_string()
            } else if deadlock_mode {
                "no deadlock is reachable\n".to_string()
            } else {
                "the property holds\n".to_string()
            };
            CmdOutput::ok(text)
        }
        Verdict::ResourceLimit => CmdOutput {
            exit_code: exit_codes::RESOURCE_LIMIT,
            stdout: if machine { "verdict=resource-limit\n".to_string() } else { String::new() },
            stderr: "memory limit exceeded before a verdict was reached\n".to_string(),
        },
        Verdict::DeadlockFound { trace } => {
            let mut out = String::new();
            if machine {
                writeln!(out, "verdict=deadlock trace_len={}", trace.len()).unwrap();
            } else {
                writeln!(out, "deadlock reachable in {} steps:", trace.len()).unwrap();
                let mut current = coin_core::initial_state(tree);
                writeln!(out, "  {}", StateDisplay { tree, state: &current }).unwrap();
                for t in &trace {
                    writeln!(
                        out,
                        "  -- {} -->",
                        LabelDisplay { label: &t.label, actions: &tree.actions }
                    )
                    .unwrap();
                    current = t.successor.clone();
                    writeln!(out, "  {}", StateDisplay { tree, state: &current }).unwrap();
                }
            }
            CmdOutput { exit_code: exit_codes::DEADLOCK, stdout: out, stderr: String::new() }
        }
        Verdict::CounterexampleFound { initial, stem, cycle } => {
            let mut out = String::new();
            if machine {
                writeln!(
                    out,
                    "verdict=counterexample stem_len={} cycle_len={}",
                    stem.len(),
                    cycle.len()
                )
                .unwrap();
            } else {
                writeln!(out, "counterexample (lasso):").unwrap();
                writeln!(
                    out,
                    "  model {}  claim {}",
                    StateDisplay { tree, state: &initial.model },
                    initial.claim
                )
                .unwrap();
                render_steps(&mut out, tree, &stem, "stem");
                render_steps(&mut out, tree, &cycle, "cycle");
            }
            CmdOutput {
                exit_code: exit_codes::COUNTEREXAMPLE,
                stdout: out,
                stderr: String::new(),
            }
        }
    }
}

fn render_steps(out: &mut String, tree: &HierarchyTree, steps: &[ProductStep], part: &str) {
    writeln!(out, "  {part}:").unwrap();
    for s in steps {
        match &s.step {
            StepLabel::Real(t) => writeln!(
                out,
                "    -- {} -->",
                LabelDisplay { label: &t.label, actions: &tree.actions }
            )
            .unwrap(),
            StepLabel::Stutter => writeln!(out, "    -- (stutter) -->").unwrap(),
        }
        writeln!(
            out,
            "    model {}  claim {}{}",
            StateDisplay { tree, state: &s.state.model },
            s.state.claim,
            if s.accepting { "  (accepting)" } else { "" }
        )
        .unwrap();
    }
}

// ---------------------------------------------------------------------------
// property
// ---------------------------------------------------------------------------

/// Emits the never-claim of the negated formula, ready to be archived next
/// to the model and fed back through `verify --claim`.
pub fn cmd_property(formula_text: &str) -> CmdOutput {
    let formula = match parse_formula(formula_text) {
        Ok(f) => f,
        Err(e) => return CmdOutput::input_error(format!("formula error: {e}\n")),
    };
    let mut actions = coin_core::ActionInterner::new();
    let claim = to_buchi(&negate(&formula, &mut actions));
    CmdOutput::ok(to_never_claim(&claim, &actions))
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

pub fn cmd_gen(family: families::Family, n: usize, d: Option<usize>) -> CmdOutput {
    match families::generate(family, n, d) {
        Ok(text) => CmdOutput::ok(text),
        Err(e) => CmdOutput::input_error(format!("gen error: {e}\n")),
    }
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub family: families::Family,
    pub n: usize,
    pub d: Option<usize>,
    pub workers: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    pub seed: u64,
}

/// Generation-time matrix over algorithms and worker counts; reports the
/// median of `runs` wall times per cell.
pub fn cmd_bench(cfg: &BenchConfig) -> CmdOutput {
    let text = match families::generate(cfg.family, cfg.n, cfg.d) {
        Ok(t) => t,
        Err(e) => return CmdOutput::input_error(format!("bench error: {e}\n")),
    };
    let tree = elaborate(&parse_model(&text).expect("generated models parse"));

    let mut out = String::new();
    writeln!(out, "model: {:?} n={} states below", cfg.family, cfg.n).unwrap();
    writeln!(out, "{:>10} {:>8} {:>12} {:>12} {:>12}", "algorithm", "workers", "states", "transitions", "median_s").unwrap();
    for &algorithm in &cfg.algorithms {
        for &workers in &cfg.workers {
            let mut times = Vec::with_capacity(cfg.runs);
            let mut states = 0;
            let mut transitions = 0;
            for _ in 0..cfg.runs.max(1) {
                let m = reach(
                    &tree,
                    &ExploreOptions {
                        algorithm,
                        workers,
                        seed: cfg.seed,
                        ..ExploreOptions::default()
                    },
                );
                states = m.states;
                transitions = m.transitions;
                times.push(m.duration.as_secs_f64());
            }
            times.sort_by(f64::total_cmp);
            let median = times[times.len() / 2];
            writeln!(
                out,
                "{:>10} {:>8} {:>12} {:>12} {:>12.3}",
                algorithm.to_string(),
                workers,
                states,
                transitions,
                median
            )
            .unwrap();
        }
    }
    CmdOutput::ok(out)
}
