//! Accepting-cycle detection by iterated forward reachability and
//! in-degree elimination. The surviving set is nonempty exactly when an
//! accepting cycle is reachable; a witness lasso is then reconstructed by
//! searches restricted to the survivors.

/// Returns `(stem, cycle)` as state-id paths when an accepting cycle
/// exists: `stem` runs from `initial` to some accepting state `a` (both
/// inclusive), `cycle` continues from `a` back to `a` (excluding the
/// starting `a`, ending with it).
pub(crate) fn find_accepting_cycle(
    edges: &[Vec<u32>],
    accepting: &[bool],
    initial: u32,
) -> Option<(Vec<u32>, Vec<u32>)> {
    let n = edges.len();
    let mut in_set: Vec<bool> = vec![true; n];

    loop {
        // (a) forward reachability from successors of accepting states.
        let mut reach = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        for s in 0..n {
            if in_set[s] && accepting[s] {
                for &t in &edges[s] {
                    if in_set[t as usize] && !reach[t as usize] {
                        reach[t as usize] = true;
                        stack.push(t);
                    }
                }
            }
        }
        while let Some(s) = stack.pop() {
            for &t in &edges[s as usize] {
                if in_set[t as usize] && !reach[t as usize] {
                    reach[t as usize] = true;
                    stack.push(t);
                }
            }
        }

        // (b) eliminate states with zero remaining in-degree.
        let mut indeg = vec![0u32; n];
        for s in 0..n {
            if reach[s] {
                for &t in &edges[s] {
                    if reach[t as usize] {
                        indeg[t as usize] += 1;
                    }
                }
            }
        }
        let mut queue: Vec<u32> =
            (0..n as u32).filter(|&s| reach[s as usize] && indeg[s as usize] == 0).collect();
        let mut alive = reach.clone();
        while let Some(s) = queue.pop() {
            alive[s as usize] = false;
            for &t in &edges[s as usize] {
                if alive[t as usize] {
                    indeg[t as usize] -= 1;
                    if indeg[t as usize] == 0 {
                        queue.push(t);
                    }
                }
            }
        }

        if alive == in_set {
            break;
        }
        in_set = alive;
        if !in_set.iter().any(|&b| b) {
            return None;
        }
    }

    if !in_set.iter().any(|&b| b) {
        return None;
    }

    // Witness: an accepting survivor that can reach itself inside the
    // surviving set; the fixpoint argument guarantees one exists.
    for a in 0..n as u32 {
        if !in_set[a as usize] || !accepting[a as usize] {
            continue;
        }
        if let Some(cycle) = path_within(edges, &in_set, a, a) {
            let stem = path_anywhere(edges, initial, a)
                .expect("explored states are reachable from the initial state");
            return Some((stem, cycle));
        }
    }
    unreachable!("nonempty OWCTY fixpoint always contains an accepting cycle");
}

/// Shortest path `from -> ... -> to` inside `allowed`, as the sequence of
/// states after `from` (so a self-loop yields `[to]`). Starts from the
/// successors, so `from == to` finds a genuine cycle.
fn path_within(edges: &[Vec<u32>], allowed: &[bool], from: u32, to: u32) -> Option<Vec<u32>> {
    let n = edges.len();
    let mut parent: Vec<u32> = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &t in &edges[from as usize] {
        if allowed[t as usize] && parent[t as usize] == u32::MAX {
            parent[t as usize] = from;
            queue.push_back(t);
            if t == to {
                return Some(backtrack(&parent, from, to));
            }
        }
    }
    while let Some(s) = queue.pop_front() {
        for &t in &edges[s as usize] {
            if allowed[t as usize] && parent[t as usize] == u32::MAX {
                parent[t as usize] = s;
                if t == to {
                    return Some(backtrack(&parent, from, to));
                }
                queue.push_back(t);
            }
        }
    }
    None
}

fn path_anywhere(edges: &[Vec<u32>], from: u32, to: u32) -> Option<Vec<u32>> {
    if from == to {
        return Some(vec![from]);
    }
    let all = vec![true; edges.len()];
    let tail = path_within(edges, &all, from, to)?;
    let mut path = vec![from];
    path.extend(tail);
    Some(path)
}

fn backtrack(parent: &[u32], from: u32, to: u32) -> Vec<u32> {
    let mut rev = vec![to];
    let mut cur = to;
    while parent[cur as usize] != from {
        cur = parent[cur as usize];
        rev.push(cur);
    }
    rev.reverse();
    rev
}
