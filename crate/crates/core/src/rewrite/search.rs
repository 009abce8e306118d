//! Layered bidirectional breadth-first search shared by the term and word
//! engines.
//!
//! Both frontiers grow from their own endpoint using the same neighbor
//! function, which is valid because every rule is usable in both directions.
//! The smaller frontier is expanded one full layer at a time; on a frontier
//! size tie the side whose start is smaller is expanded, so swapping the two
//! endpoints mirrors the whole run.

use std::collections::HashMap;
use std::hash::Hash;

use super::Budget;

struct Side<S, St> {
    nodes: Vec<S>,
    index: HashMap<S, u32>,
    parent: Vec<Option<(u32, St)>>,
    depth: Vec<u32>,
    frontier: Vec<u32>,
    level: usize,
}

impl<S: Clone + Eq + Hash, St: Clone> Side<S, St> {
    fn new(root: S) -> Self {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        Side {
            nodes: vec![root],
            index,
            parent: vec![None],
            depth: vec![0],
            frontier: vec![0],
            level: 0,
        }
    }

    /// Steps from the root to node `id`.
    fn path_to(&self, mut id: u32) -> Vec<St> {
        let mut steps = Vec::new();
        while let Some((p, st)) = &self.parent[id as usize] {
            steps.push(st.clone());
            id = *p;
        }
        steps.reverse();
        steps
    }
}

/// Returns the proof steps from `start` to `goal` (if found) and the number
/// of distinct states visited.
pub(crate) fn bidirectional<S, St, N, I>(
    start: S,
    goal: S,
    budget: &Budget,
    mut neighbors: N,
    invert: I,
) -> (Option<Vec<St>>, usize)
where
    S: Clone + Eq + Hash + Ord,
    St: Clone,
    N: FnMut(&S, &mut Vec<(S, St)>),
    I: Fn(&St) -> St,
{
    if start == goal {
        return (Some(Vec::new()), 1);
    }
    let start_first = start <= goal;
    let mut fwd: Side<S, St> = Side::new(start);
    let mut bwd: Side<S, St> = Side::new(goal);
    let mut buf = Vec::new();
    loop {
        let visited = fwd.nodes.len() + bwd.nodes.len();
        if fwd.frontier.is_empty() || bwd.frontier.is_empty() {
            return (None, visited);
        }
        if fwd.level + bwd.level + 1 > budget.max_depth {
            return (None, visited);
        }
        let expand_fwd = match fwd.frontier.len().cmp(&bwd.frontier.len()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => start_first,
        };
        let (this, other) = if expand_fwd {
            (&mut fwd, &bwd)
        } else {
            (&mut bwd, &fwd)
        };
        let mut next_frontier = Vec::new();
        // (total length, node id in `this`)
        let mut best: Option<(usize, u32)> = None;
        let mut exhausted = false;
        let frontier = std::mem::take(&mut this.frontier);
        'layer: for &id in &frontier {
            buf.clear();
            let node = this.nodes[id as usize].clone();
            neighbors(&node, &mut buf);
            for (n, st) in buf.drain(..) {
                if this.index.contains_key(&n) {
                    continue;
                }
                let new_id = this.nodes.len() as u32;
                if let Some(&oid) = other.index.get(&n) {
                    let total = this.level + 1 + other.depth[oid as usize] as usize;
                    if best.is_none_or(|(b, _)| total < b) {
                        best = Some((total, new_id));
                    }
                }
                this.index.insert(n.clone(), new_id);
                this.nodes.push(n);
                this.parent.push(Some((id, st)));
                this.depth.push(this.level as u32 + 1);
                next_frontier.push(new_id);
                if this.nodes.len() + other.nodes.len() > budget.max_visited {
                    exhausted = true;
                    break 'layer;
                }
            }
        }
        this.frontier = next_frontier;
        this.level += 1;
        if let Some((total, id)) = best {
            if total <= budget.max_depth {
                let meet = this.nodes[id as usize].clone();
                let oid = other.index[&meet];
                let (f_id, b_id) = if expand_fwd { (id, oid) } else { (oid, id) };
                let mut steps = fwd.path_to(f_id);
                let back = bwd.path_to(b_id);
                steps.extend(back.iter().rev().map(&invert));
                return (Some(steps), fwd.nodes.len() + bwd.nodes.len());
            }
        }
        if exhausted {
            return (None, fwd.nodes.len() + bwd.nodes.len());
        }
    }
}
