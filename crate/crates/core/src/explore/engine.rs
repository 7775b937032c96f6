//! Round-based parallel exploration with ownership partitioning.
//!
//! Every state is owned by exactly one worker shard, decided by a hash of
//! its canonical encoding. Workers expand their own frontiers, bucket the
//! generated successors by owner, and exchange them at a barrier; only the
//! owner inserts. Rounds are level-synchronized, so state and transition
//! counts are independent of the worker count by construction.
//!
//! Partial-order-reduced exploration alternates with stop-the-world
//! proviso passes: after the frontier drains, states trapped on cycles of
//! reduced edges are re-expanded fully and exploration resumes.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Barrier, Mutex};

use indexmap::IndexSet;

use crate::explore::codec::hash_bytes;
use crate::por::proviso_pass;

/// Seed for the order-independent state-set digest; fixed so digests are
/// comparable across runs, algorithms and worker counts.
const DIGEST_SEED: u64 = 0x6469_6765_7374_3634;

pub(crate) const NO_PARENT: u64 = u64::MAX;

#[inline]
pub(crate) fn gid(worker: usize, idx: u32) -> u64 {
    ((worker as u64) << 40) | idx as u64
}

#[inline]
pub(crate) fn gid_worker(g: u64) -> usize {
    (g >> 40) as usize
}

#[inline]
pub(crate) fn gid_idx(g: u64) -> u32 {
    (g & 0xFF_FFFF_FFFF) as u32
}

/// Deterministic owner of an encoded state.
pub fn partition_bytes(bytes: &[u8], workers: usize, seed: u64) -> usize {
    debug_assert!(workers >= 1);
    (hash_bytes(bytes, seed) % workers as u64) as usize
}

#[derive(Clone, Debug)]
pub(crate) struct EngineCfg {
    pub workers: usize,
    pub mem_limit: u64,
    pub seed: u64,
    /// Record per-state out-edge target ids (needed by proviso and cycle
    /// detection).
    pub collect_edges: bool,
    /// Record the first-inserting predecessor of each state.
    pub track_parents: bool,
    /// Alternate exploration with proviso passes.
    pub por: bool,
    /// Record successor-free states.
    pub track_deadlocks: bool,
}

pub(crate) trait Job: Sync {
    type Worker: Send;
    fn make_worker(&self) -> Self::Worker;
    fn encoded_len(&self) -> usize;
    fn initials(&self) -> Vec<Vec<u8>>;
    /// Expands one state, passing each successor encoding to `emit`.
    /// Returns the labelled successor count and whether the expansion was
    /// full (as opposed to ample-reduced).
    fn expand(
        &self,
        worker: &mut Self::Worker,
        state: &[u8],
        force_full: bool,
        emit: &mut dyn FnMut(&[u8]),
    ) -> (u32, bool);
    fn is_accepting(&self, _state: &[u8]) -> bool {
        false
    }
}

#[derive(Default)]
pub(crate) struct Shard {
    pub index: IndexSet<Box<[u8]>>,
    pub frontier: Vec<(u32, bool)>,
    pub parent: Vec<u64>,
    pub edges: Vec<Vec<u64>>,
    pub out_count: Vec<u32>,
    pub fully_expanded: Vec<bool>,
    pub accepting: Vec<bool>,
    pub deadlocked: Vec<u32>,
    pub digest: u64,
}

impl Shard {
    fn insert(&mut self, bytes: &[u8], parent: u64, accepting: bool, cfg: &EngineCfg) -> Option<u32> {
        let (idx, new) = self.index.insert_full(bytes.into());
        if !new {
            return None;
        }
        self.digest ^= hash_bytes(bytes, DIGEST_SEED);
        if cfg.track_parents {
            self.parent.push(parent);
        }
        if cfg.collect_edges {
            self.edges.push(Vec::new());
            self.out_count.push(0);
        }
        self.fully_expanded.push(false);
        self.accepting.push(accepting);
        Some(idx as u32)
    }

    fn approx_bytes(&self, enc_len: usize) -> u64 {
        let per_state = enc_len as u64 + 56;
        let mut total = self.index.len() as u64 * per_state;
        total += self.parent.len() as u64 * 8;
        total += self.accepting.len() as u64 * 2;
        if !self.edges.is_empty() {
            total += self.edges.iter().map(|e| 24 + e.len() as u64 * 8).sum::<u64>();
        }
        total
    }
}

pub(crate) struct Explored {
    pub shards: Vec<Shard>,
    /// Dense-id offset of each shard.
    pub offsets: Vec<u32>,
    pub states: u64,
    pub transitions: u64,
    pub digest: u64,
    pub limit_hit: bool,
}

impl Explored {
    pub fn dense(&self, g: u64) -> u32 {
        self.offsets[gid_worker(g)] + gid_idx(g)
    }
}

pub(crate) fn explore<J: Job>(job: &J, cfg: &EngineCfg) -> Explored {
    assert!(
        !cfg.por || cfg.collect_edges,
        "the proviso needs the reduced graph's edges"
    );
    let nw = cfg.workers.max(1);
    let enc_len = job.encoded_len();
    let carries_gid = cfg.collect_edges || cfg.track_parents;
    let rec_len = enc_len + if carries_gid { 8 } else { 0 };

    let shards: Vec<Mutex<Shard>> = (0..nw).map(|_| Mutex::new(Shard::default())).collect();
    for bytes in job.initials() {
        let owner = partition_bytes(&bytes, nw, cfg.seed);
        let mut sh = shards[owner].lock().unwrap();
        let accepting = job.is_accepting(&bytes);
        if let Some(idx) = sh.insert(&bytes, NO_PARENT, accepting, cfg) {
            sh.frontier.push((idx, false));
        }
    }

    let transitions = AtomicU64::new(0);
    let limit_hit = AtomicBool::new(false);

    loop {
        run_rounds(job, cfg, nw, enc_len, rec_len, carries_gid, &shards, &transitions, &limit_hit);
        if limit_hit.load(Ordering::SeqCst) || !cfg.por {
            break;
        }
        let marks = proviso_over_shards(&shards, nw);
        if marks.is_empty() {
            break;
        }
        for g in marks {
            shards[gid_worker(g)].lock().unwrap().frontier.push((gid_idx(g), true));
        }
    }

    let mut shards: Vec<Shard> = shards.into_iter().map(|m| m.into_inner().unwrap()).collect();
    for sh in &mut shards {
        for e in &mut sh.edges {
            e.sort_unstable();
            e.dedup();
        }
    }

    let mut offsets = Vec::with_capacity(nw);
    let mut acc = 0u32;
    for sh in &shards {
        offsets.push(acc);
        acc += sh.index.len() as u32;
    }
    let states = acc as u64;
    let digest = shards.iter().fold(0u64, |d, s| d ^ s.digest);
    let transitions = if cfg.collect_edges {
        shards.iter().map(|s| s.out_count.iter().map(|&c| c as u64).sum::<u64>()).sum()
    } else {
        transitions.load(Ordering::SeqCst)
    };

    Explored {
        shards,
        offsets,
        states,
        transitions,
        digest,
        limit_hit: limit_hit.load(Ordering::SeqCst),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_rounds<J: Job>(
    job: &J,
    cfg: &EngineCfg,
    nw: usize,
    enc_len: usize,
    rec_len: usize,
    carries_gid: bool,
    shards: &[Mutex<Shard>],
    transitions: &AtomicU64,
    limit_hit: &AtomicBool,
) {
    let barrier = Barrier::new(nw);
    let outbox: Vec<Vec<Mutex<Vec<u8>>>> =
        (0..nw).map(|_| (0..nw).map(|_| Mutex::new(Vec::new())).collect()).collect();
    let replies: Vec<Vec<Mutex<Vec<u8>>>> =
        (0..nw).map(|_| (0..nw).map(|_| Mutex::new(Vec::new())).collect()).collect();
    let stop = AtomicBool::new(false);

    std::thread::scope(|scope| {
        for w in 0..nw {
            let outbox = &outbox;
            let replies = &replies;
            let barrier = &barrier;
            let stop = &stop;
            scope.spawn(move || {
                let mut worker = job.make_worker();
                let mut state_buf: Vec<u8> = Vec::with_capacity(enc_len);
                let mut local_out: Vec<Vec<u8>> = vec![Vec::new(); nw];

                loop {
                    // Expand own frontier; bucket successors by owner.
                    {
                        let mut sh = shards[w].lock().unwrap();
                        let frontier = std::mem::take(&mut sh.frontier);
                        let mut emitted = 0u64;
                        for (idx, force_full) in frontier {
                            state_buf.clear();
                            state_buf
                                .extend_from_slice(sh.index.get_index(idx as usize).unwrap());
                            if cfg.collect_edges && force_full {
                                sh.edges[idx as usize].clear();
                            }
                            let src = gid(w, idx);
                            let (count, full) = job.expand(
                                &mut worker,
                                &state_buf,
                                force_full,
                                &mut |succ: &[u8]| {
                                    debug_assert_eq!(succ.len(), enc_len);
                                    let owner = partition_bytes(succ, nw, cfg.seed);
                                    let buf = &mut local_out[owner];
                                    buf.extend_from_slice(succ);
                                    if carries_gid {
                                        buf.extend_from_slice(&src.to_le_bytes());
                                    }
                                },
                            );
                            emitted += count as u64;
                            if cfg.collect_edges {
                                sh.out_count[idx as usize] = count;
                            }
                            if full {
                                sh.fully_expanded[idx as usize] = true;
                            }
                            if cfg.track_deadlocks && full && count == 0 {
                                sh.deadlocked.push(idx);
                            }
                        }
                        if !cfg.collect_edges {
                            transitions.fetch_add(emitted, Ordering::Relaxed);
                        }
                        for (owner, buf) in local_out.iter_mut().enumerate() {
                            if !buf.is_empty() {
                                let mut ob = outbox[w][owner].lock().unwrap();
                                if ob.is_empty() {
                                    std::mem::swap(&mut *ob, buf);
                                } else {
                                    ob.extend_from_slice(buf);
                                    buf.clear();
                                }
                            }
                        }
                    }
                    barrier.wait();

                    // Insert what the others sent; reply with assigned ids.
                    {
                        let mut sh = shards[w].lock().unwrap();
                        for row in outbox.iter() {
                            // Drain the slot; the cleared buffer goes back
                            // below so its capacity survives across rounds.
                            let buf = std::mem::take(&mut *row[w].lock().unwrap());
                            for rec in buf.chunks_exact(rec_len) {
                                let bytes = &rec[..enc_len];
                                let src = if carries_gid {
                                    u64::from_le_bytes(rec[enc_len..].try_into().unwrap())
                                } else {
                                    NO_PARENT
                                };
                                let idx = match sh.index.get_index_of(bytes) {
                                    Some(i) => i as u32,
                                    None => {
                                        let accepting = job.is_accepting(bytes);
                                        let idx =
                                            sh.insert(bytes, src, accepting, cfg).unwrap();
                                        sh.frontier.push((idx, false));
                                        idx
                                    }
                                };
                                if cfg.collect_edges {
                                    let mut rb =
                                        replies[w][gid_worker(src)].lock().unwrap();
                                    rb.extend_from_slice(&gid_idx(src).to_le_bytes());
                                    rb.extend_from_slice(&gid(w, idx).to_le_bytes());
                                }
                            }
                            // Return the drained buffer's capacity.
                            let mut cleared = buf;
                            cleared.clear();
                            let mut ob = row[w].lock().unwrap();
                            if ob.is_empty() {
                                *ob = cleared;
                            }
                        }
                    }
                    barrier.wait();

                    // Record the replied edge targets.
                    if cfg.collect_edges {
                        let mut sh = shards[w].lock().unwrap();
                        for row in replies.iter() {
                            let buf = std::mem::take(&mut *row[w].lock().unwrap());
                            for rec in buf.chunks_exact(12) {
                                let src_idx = u32::from_le_bytes(rec[..4].try_into().unwrap());
                                let target = u64::from_le_bytes(rec[4..].try_into().unwrap());
                                sh.edges[src_idx as usize].push(target);
                            }
                        }
                    }
                    barrier.wait();

                    // One worker decides whether to continue.
                    if w == 0 {
                        let mut any = false;
                        let mut estimate = 0u64;
                        for s in shards {
                            let sh = s.lock().unwrap();
                            any |= !sh.frontier.is_empty();
                            estimate += sh.approx_bytes(enc_len);
                        }
                        if estimate > cfg.mem_limit {
                            limit_hit.store(true, Ordering::SeqCst);
                            stop.store(true, Ordering::SeqCst);
                        } else {
                            stop.store(!any, Ordering::SeqCst);
                        }
                    }
                    barrier.wait();
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                }
            });
        }
    });
}

/// Stop-the-world proviso pass over the assembled reduced graph;
/// returns the gids to re-expand fully.
fn proviso_over_shards(shards: &[Mutex<Shard>], nw: usize) -> Vec<u64> {
    let guards: Vec<std::sync::MutexGuard<Shard>> =
        shards.iter().map(|s| s.lock().unwrap()).collect();

    let mut offsets = Vec::with_capacity(nw);
    let mut acc = 0usize;
    for g in &guards {
        offsets.push(acc);
        acc += g.index.len();
    }

    let mut edges: Vec<Vec<usize>> = Vec::with_capacity(acc);
    let mut full: Vec<bool> = Vec::with_capacity(acc);
    for g in guards.iter() {
        for list in &g.edges {
            let mut row: Vec<usize> = list
                .iter()
                .map(|&t| offsets[gid_worker(t)] + gid_idx(t) as usize)
                .collect();
            row.sort_unstable();
            row.dedup();
            edges.push(row);
        }
        full.extend_from_slice(&g.fully_expanded);
    }

    proviso_pass(&edges, &full)
        .into_iter()
        .map(|dense| {
            let w = match offsets.binary_search(&dense) {
                Ok(mut exact) => {
                    while exact + 1 < offsets.len() && offsets[exact + 1] == dense {
                        exact += 1;
                    }
                    exact
                }
                Err(after) => after - 1,
            };
            gid(w, (dense - offsets[w]) as u32)
        })
        .collect()
}
