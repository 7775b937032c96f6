//! Parallel state-space engine: partitioned reachability, deadlock
//! checking, and accepting-cycle detection over never-claim products,
//! with counterexample reconstruction.

pub mod codec;
mod engine;
mod owcty;

use std::time::{Duration, Instant};

use codec::{ProductCodec, StateCodec};
use engine::{EngineCfg, Explored, Job, NO_PARENT};

use crate::hierarchy::{initial_state, GlobalState, HierarchyTree};
use crate::ltl::buchi::BuchiAutomaton;
use crate::ltl::formula::Atom;
use crate::ltl::product::{ProductState, ProductStep};
use crate::por::{reduced_expansion, static_dependence, StaticDependence};
use crate::succgen::{precompute, Algorithm, Generator, PrecomputedTables, Transition};

pub use engine::partition_bytes;

/// Deterministic owner of a state among `workers` shards.
pub fn partition(state_bytes: &[u8], workers: usize, seed: u64) -> usize {
    partition_bytes(state_bytes, workers, seed)
}

pub const DEFAULT_MEM_LIMIT: u64 = 4 << 30;

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub algorithm: Algorithm,
    pub workers: usize,
    pub por: bool,
    pub mem_limit_bytes: u64,
    pub seed: u64,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            algorithm: Algorithm::Lca,
            workers: 1,
            por: false,
            mem_limit_bytes: DEFAULT_MEM_LIMIT,
            seed: 0,
        }
    }
}

/// Metrics of one exploration run.
#[derive(Clone, Debug)]
pub struct ReachMetrics {
    pub states: u64,
    pub transitions: u64,
    pub duration: Duration,
    /// Process peak RSS if the platform exposes it, else the store estimate.
    pub peak_mem_bytes: u64,
    /// Approximate bytes held by the state store and graph data.
    pub store_bytes: u64,
    /// Order-independent digest of the canonical state set.
    pub digest: u64,
    pub limit_hit: bool,
}

/// Outcome of a verification or deadlock run.
#[derive(Clone, Debug)]
pub enum Verdict {
    PropertyHolds,
    CounterexampleFound {
        initial: ProductState,
        stem: Vec<ProductStep>,
        cycle: Vec<ProductStep>,
    },
    DeadlockFound {
        /// Transitions from the initial state to the deadlocked state.
        trace: Vec<Transition>,
    },
    ResourceLimit,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::PropertyHolds)
    }
}

// ---------------------------------------------------------------------------
// Jobs
// ---------------------------------------------------------------------------

struct ModelJob<'t> {
    tree: &'t HierarchyTree,
    tables: &'t PrecomputedTables,
    codec: StateCodec,
    algorithm: Algorithm,
    dep: Option<StaticDependence>,
}

struct ModelWorker<'t> {
    gen: Generator<'t>,
    emit_buf: Vec<u8>,
}

impl<'t> Job for ModelJob<'t> {
    type Worker = ModelWorker<'t>;

    fn make_worker(&self) -> ModelWorker<'t> {
        ModelWorker { gen: Generator::new(self.tree, self.tables, self.algorithm), emit_buf: Vec::new() }
    }

    fn encoded_len(&self) -> usize {
        self.codec.encoded_len()
    }

    fn initials(&self) -> Vec<Vec<u8>> {
        vec![self.codec.encode(&initial_state(self.tree))]
    }

    fn expand(
        &self,
        w: &mut ModelWorker<'t>,
        state: &[u8],
        force_full: bool,
        emit: &mut dyn FnMut(&[u8]),
    ) -> (u32, bool) {
        let decoded = self.codec.decode(state);

        if let Some(dep) = &self.dep {
            if !force_full {
                if let Some(ample) = reduced_expansion(self.tree, self.tables, dep, &decoded) {
                    for t in &ample {
                        w.emit_buf.clear();
                        self.codec.encode_into(&t.successor, &mut w.emit_buf);
                        emit(&w.emit_buf);
                    }
                    return (ample.len() as u32, false);
                }
            }
        }

        // Full expansion. The LCA generator emits successors by patching
        // the encoded bytes directly; nothing is allocated per move.
        match &w.gen {
            Generator::Lca(lca) => {
                let mut count = 0u32;
                let buf = &mut w.emit_buf;
                lca.for_each_move(&decoded, |mv| {
                    buf.clear();
                    match mv.partner {
                        None => self.codec.patch_into(state, &[(mv.leaf.0, mv.target)], buf),
                        Some((partner, pt)) => self.codec.patch_into(
                            state,
                            &[(mv.leaf.0, mv.target), (partner.0, pt)],
                            buf,
                        ),
                    }
                    emit(buf);
                    count += 1;
                });
                (count, true)
            }
            Generator::Recursive(_) => {
                let steps = w.gen.successors(&decoded);
                for t in &steps {
                    w.emit_buf.clear();
                    self.codec.encode_into(&t.successor, &mut w.emit_buf);
                    emit(&w.emit_buf);
                }
                (steps.len() as u32, true)
            }
        }
    }
}

/// Model steps at a state under the configured reduction: the ample set of
/// the best qualifying leaf (gated on the acyclicity rank), or the full
/// successor list.
fn expand_model(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    dep: Option<&StaticDependence>,
    gen: &mut Generator,
    state: &GlobalState,
    force_full: bool,
) -> (Vec<Transition>, bool) {
    if let Some(dep) = dep {
        if !force_full {
            if let Some(ample) = reduced_expansion(tree, tables, dep, state) {
                return (ample, false);
            }
        }
    }
    (gen.successors(state), true)
}

struct ProductJob<'t> {
    tree: &'t HierarchyTree,
    tables: &'t PrecomputedTables,
    claim: &'t BuchiAutomaton,
    codec: ProductCodec,
    algorithm: Algorithm,
    dep: Option<StaticDependence>,
}

struct ProductWorker<'t> {
    gen: Generator<'t>,
    emit_buf: Vec<u8>,
}

impl<'t> ProductJob<'t> {
    fn claim_of(&self, state: &[u8]) -> usize {
        let split = self.codec.model.encoded_len();
        u32::from_le_bytes(state[split..].try_into().unwrap()) as usize
    }
}

impl<'t> Job for ProductJob<'t> {
    type Worker = ProductWorker<'t>;

    fn make_worker(&self) -> ProductWorker<'t> {
        ProductWorker {
            gen: Generator::new(self.tree, self.tables, self.algorithm),
            emit_buf: Vec::new(),
        }
    }

    fn encoded_len(&self) -> usize {
        self.codec.encoded_len()
    }

    fn initials(&self) -> Vec<Vec<u8>> {
        let p = ProductState {
            model: initial_state(self.tree),
            claim: self.claim.initial as u32,
        };
        vec![self.codec.encode(&p)]
    }

    fn is_accepting(&self, state: &[u8]) -> bool {
        self.claim.accepting[self.claim_of(state)]
    }

    fn expand(
        &self,
        w: &mut ProductWorker<'t>,
        state: &[u8],
        force_full: bool,
        emit: &mut dyn FnMut(&[u8]),
    ) -> (u32, bool) {
        let model = self.codec.model.decode(&state[..self.codec.model.encoded_len()]);
        let claim_state = self.claim_of(state);
        let (steps, full) =
            expand_model(self.tree, self.tables, self.dep.as_ref(), &mut w.gen, &model, force_full);
        let deadlocked = full && steps.is_empty();

        let mut enabled =
            |l: &crate::label::Label| crate::succgen::is_label_enabled(self.tree, self.tables, &model, l);
        let mut count = 0u32;
        let mut push = |succ_model: &GlobalState, target: usize, w: &mut ProductWorker| {
            w.emit_buf.clear();
            self.codec.model.encode_into(succ_model, &mut w.emit_buf);
            w.emit_buf.extend_from_slice(&(target as u32).to_le_bytes());
            count += 1;
        };

        for edge in &self.claim.edges[claim_state] {
            if deadlocked {
                if edge.guard.eval(None, &mut enabled) {
                    push(&model, edge.target, w);
                    emit(&w.emit_buf);
                }
            } else {
                for t in &steps {
                    if edge.guard.eval(Some(&t.label), &mut enabled) {
                        push(&t.successor, edge.target, w);
                        emit(&w.emit_buf);
                    }
                }
            }
        }
        (count, full)
    }
}

// ---------------------------------------------------------------------------
// Reachability and deadlock
// ---------------------------------------------------------------------------

/// Exhaustive reachable-set exploration; counts are independent of the
/// worker count and of the successor algorithm.
pub fn reach(tree: &HierarchyTree, opts: &ExploreOptions) -> ReachMetrics {
    let start = Instant::now();
    let tables = precompute(tree);
    let dep = opts.por.then(|| static_dependence(tree, &tables, &[]));
    let job = ModelJob {
        tree,
        tables: &tables,
        codec: StateCodec::for_tree(tree),
        algorithm: opts.algorithm,
        dep,
    };
    let cfg = EngineCfg {
        workers: opts.workers,
        mem_limit: opts.mem_limit_bytes,
        seed: opts.seed,
        collect_edges: opts.por,
        track_parents: false,
        por: opts.por,
        track_deadlocks: false,
    };
    let explored = engine::explore(&job, &cfg);
    metrics_from(&explored, job.encoded_len(), start.elapsed())
}

fn metrics_from(explored: &Explored, enc_len: usize, duration: Duration) -> ReachMetrics {
    let store_bytes: u64 = explored
        .shards
        .iter()
        .map(|s| {
            s.index.len() as u64 * (enc_len as u64 + 56)
                + s.edges.iter().map(|e| 24 + e.len() as u64 * 8).sum::<u64>()
        })
        .sum();
    ReachMetrics {
        states: explored.states,
        transitions: explored.transitions,
        duration,
        peak_mem_bytes: peak_rss_bytes().unwrap_or(store_bytes),
        store_bytes,
        digest: explored.digest,
        limit_hit: explored.limit_hit,
    }
}

/// Process peak resident set size when the platform exposes it, else the
/// current RSS (read right after exploration, while the store is live).
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let field = |name: &str| {
        status.lines().find_map(|line| {
            let rest = line.strip_prefix(name)?;
            let kb: u64 = rest.trim().trim_end_matches("kB").trim().parse().ok()?;
            Some(kb * 1024)
        })
    };
    field("VmHWM:").or_else(|| field("VmRSS:"))
}

/// Searches for a reachable state without successors.
pub fn check_deadlock(tree: &HierarchyTree, opts: &ExploreOptions) -> (Verdict, ReachMetrics) {
    let start = Instant::now();
    let tables = precompute(tree);
    let dep = opts.por.then(|| static_dependence(tree, &tables, &[]));
    let job = ModelJob {
        tree,
        tables: &tables,
        codec: StateCodec::for_tree(tree),
        algorithm: opts.algorithm,
        dep,
    };
    let cfg = EngineCfg {
        workers: opts.workers,
        mem_limit: opts.mem_limit_bytes,
        seed: opts.seed,
        collect_edges: opts.por,
        track_parents: true,
        por: opts.por,
        track_deadlocks: true,
    };
    let explored = engine::explore(&job, &cfg);
    let metrics = metrics_from(&explored, job.encoded_len(), start.elapsed());

    // Deterministic pick: the shortest trace, ties broken on state bytes.
    let mut best: Option<(usize, &[u8], u64)> = None;
    for (w, sh) in explored.shards.iter().enumerate() {
        for &idx in &sh.deadlocked {
            let bytes: &[u8] = sh.index.get_index(idx as usize).unwrap();
            let depth = parent_depth(&explored, engine::gid(w, idx));
            let candidate = (depth, bytes, engine::gid(w, idx));
            if best.is_none_or(|b| (candidate.0, candidate.1) < (b.0, b.1)) {
                best = Some(candidate);
            }
        }
    }

    let verdict = match best {
        None if metrics.limit_hit => Verdict::ResourceLimit,
        None => Verdict::PropertyHolds,
        Some((_, _, g)) => {
            let trace = rebuild_model_trace(tree, &tables, opts.algorithm, &job.codec, &explored, g);
            Verdict::DeadlockFound { trace }
        }
    };
    (verdict, metrics)
}

fn parent_depth(explored: &Explored, mut g: u64) -> usize {
    let mut depth = 0;
    loop {
        let (w, idx) = (engine::gid_worker(g), engine::gid_idx(g));
        let p = explored.shards[w].parent[idx as usize];
        if p == NO_PARENT {
            return depth;
        }
        depth += 1;
        g = p;
    }
}

fn rebuild_model_trace(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    algorithm: Algorithm,
    codec: &StateCodec,
    explored: &Explored,
    target: u64,
) -> Vec<Transition> {
    let mut chain = vec![target];
    let mut g = target;
    loop {
        let (w, idx) = (engine::gid_worker(g), engine::gid_idx(g));
        let p = explored.shards[w].parent[idx as usize];
        if p == NO_PARENT {
            break;
        }
        chain.push(p);
        g = p;
    }
    chain.reverse();

    let decode = |g: u64| {
        let (w, idx) = (engine::gid_worker(g), engine::gid_idx(g));
        codec.decode(explored.shards[w].index.get_index(idx as usize).unwrap())
    };

    let mut gen = Generator::new(tree, tables, algorithm);
    let mut trace = Vec::with_capacity(chain.len().saturating_sub(1));
    for pair in chain.windows(2) {
        let from = decode(pair[0]);
        let to = decode(pair[1]);
        let step = gen
            .successors(&from)
            .into_iter()
            .find(|t| t.successor == to)
            .expect("a recorded parent edge replays");
        trace.push(step);
    }
    trace
}

// ---------------------------------------------------------------------------
// Product graphs and accepting cycles
// ---------------------------------------------------------------------------

/// A fully explored (possibly reduced) product graph.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    codec: ProductCodec,
    pub states: Vec<Box<[u8]>>,
    /// Deduplicated dense target ids per state.
    pub edges: Vec<Vec<u32>>,
    pub accepting: Vec<bool>,
    pub fully_expanded: Vec<bool>,
    pub initial: u32,
    /// Labelled transition count (parallel guard matches included).
    pub transitions: u64,
    pub digest: u64,
    pub limit_hit: bool,
}

impl ProductGraph {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn decode(&self, id: u32) -> ProductState {
        self.codec.decode(&self.states[id as usize])
    }

    /// All decoded states, for containment checks in tests.
    pub fn decoded_states(&self) -> Vec<ProductState> {
        (0..self.states.len() as u32).map(|i| self.decode(i)).collect()
    }
}

/// Explores the product of the model with a never-claim. With `por` the
/// model component is ample-reduced under the visibility constraints of
/// `atoms`, alternating with proviso passes until the cycle condition
/// holds.
pub fn build_product_graph(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    claim: &BuchiAutomaton,
    atoms: &[Atom],
    opts: &ExploreOptions,
) -> ProductGraph {
    let codec = ProductCodec::new(StateCodec::for_tree(tree));
    let dep = opts.por.then(|| static_dependence(tree, tables, atoms));
    let job = ProductJob {
        tree,
        tables,
        claim,
        codec: codec.clone(),
        algorithm: opts.algorithm,
        dep,
    };
    let cfg = EngineCfg {
        workers: opts.workers,
        mem_limit: opts.mem_limit_bytes,
        seed: opts.seed,
        collect_edges: true,
        track_parents: false,
        por: opts.por,
        track_deadlocks: false,
    };
    let explored = engine::explore(&job, &cfg);

    let initial_bytes = job.initials().pop().unwrap();
    let owner = partition_bytes(&initial_bytes, opts.workers.max(1), opts.seed);
    let initial = explored.offsets[owner]
        + explored.shards[owner].index.get_index_of(initial_bytes.as_slice()).unwrap() as u32;

    let mut states = Vec::with_capacity(explored.states as usize);
    let mut edges = Vec::with_capacity(explored.states as usize);
    let mut accepting = Vec::with_capacity(explored.states as usize);
    let mut fully_expanded = Vec::with_capacity(explored.states as usize);
    for sh in &explored.shards {
        for i in 0..sh.index.len() {
            states.push(sh.index.get_index(i).unwrap().clone());
            edges.push(sh.edges[i].iter().map(|&g| explored.dense(g)).collect());
        }
        accepting.extend_from_slice(&sh.accepting);
        fully_expanded.extend_from_slice(&sh.fully_expanded);
    }

    ProductGraph {
        codec,
        states,
        edges,
        accepting,
        fully_expanded,
        initial,
        transitions: explored.transitions,
        digest: explored.digest,
        limit_hit: explored.limit_hit,
    }
}

/// One-way-catch-them-young over an explored product graph, with lasso
/// reconstruction through the real product successor function.
pub fn detect_accepting_cycle(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    claim: &BuchiAutomaton,
    graph: &ProductGraph,
    algorithm: Algorithm,
) -> Verdict {
    if graph.limit_hit {
        return Verdict::ResourceLimit;
    }
    let Some((stem_ids, cycle_ids)) =
        owcty::find_accepting_cycle(&graph.edges, &graph.accepting, graph.initial)
    else {
        return Verdict::PropertyHolds;
    };

    let mut gen = Generator::new(tree, tables, algorithm);
    let initial = graph.decode(graph.initial);
    let steps_of = |ids: &[u32], start: &ProductState, gen: &mut Generator| {
        let mut steps = Vec::with_capacity(ids.len());
        let mut current = start.clone();
        for &id in ids {
            let next_bytes = &graph.states[id as usize];
            let options =
                crate::ltl::product::product_successors(tree, tables, &mut *gen, claim, &current);
            let chosen = options
                .into_iter()
                .find(|s| graph.codec.encode(&s.state).as_slice() == &next_bytes[..])
                .expect("graph edges replay through product successors");
            current = chosen.state.clone();
            steps.push(chosen);
        }
        steps
    };

    // stem_ids = [initial, ..., a]; the steps start after the initial.
    let stem = steps_of(&stem_ids[1..], &initial, &mut gen);
    let anchor = stem.last().map(|s| s.state.clone()).unwrap_or_else(|| initial.clone());
    let cycle = steps_of(&cycle_ids, &anchor, &mut gen);

    Verdict::CounterexampleFound { initial, stem, cycle }
}

// ---------------------------------------------------------------------------
// Model graphs (for reduction analysis and tests)
// ---------------------------------------------------------------------------

/// A fully explored model-space graph, with reduction metadata.
#[derive(Clone, Debug)]
pub struct ModelGraph {
    codec: StateCodec,
    pub states: Vec<Box<[u8]>>,
    pub edges: Vec<Vec<u32>>,
    pub fully_expanded: Vec<bool>,
    pub initial: u32,
    pub transitions: u64,
    pub digest: u64,
    pub limit_hit: bool,
}

impl ModelGraph {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn decode(&self, id: u32) -> GlobalState {
        self.codec.decode(&self.states[id as usize])
    }
}

/// Explores the model state space, recording edges and expansion flags.
/// `atoms` constrain visibility when `por` is on.
pub fn explore_model_graph(
    tree: &HierarchyTree,
    tables: &PrecomputedTables,
    atoms: &[Atom],
    opts: &ExploreOptions,
) -> ModelGraph {
    let codec = StateCodec::for_tree(tree);
    let dep = opts.por.then(|| static_dependence(tree, tables, atoms));
    let job = ModelJob { tree, tables, codec: codec.clone(), algorithm: opts.algorithm, dep };
    let cfg = EngineCfg {
        workers: opts.workers,
        mem_limit: opts.mem_limit_bytes,
        seed: opts.seed,
        collect_edges: true,
        track_parents: false,
        por: opts.por,
        track_deadlocks: false,
    };
    let explored = engine::explore(&job, &cfg);

    let initial_bytes = job.initials().pop().unwrap();
    let owner = partition_bytes(&initial_bytes, opts.workers.max(1), opts.seed);
    let initial = explored.offsets[owner]
        + explored.shards[owner].index.get_index_of(initial_bytes.as_slice()).unwrap() as u32;

    let mut states = Vec::with_capacity(explored.states as usize);
    let mut edges = Vec::with_capacity(explored.states as usize);
    let mut fully_expanded = Vec::with_capacity(explored.states as usize);
    for sh in &explored.shards {
        for i in 0..sh.index.len() {
            states.push(sh.index.get_index(i).unwrap().clone());
            edges.push(sh.edges[i].iter().map(|&g| explored.dense(g)).collect());
        }
        fully_expanded.extend_from_slice(&sh.fully_expanded);
    }

    ModelGraph {
        codec,
        states,
        edges,
        fully_expanded,
        initial,
        transitions: explored.transitions,
        digest: explored.digest,
        limit_hit: explored.limit_hit,
    }
}
