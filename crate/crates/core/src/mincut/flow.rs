//! Integral max-flow by level-graph blocking flow.
//!
//! Adjacency lists keep insertion order, so callers that insert edges in a
//! fixed order get identical flows and cuts on every run.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: u64,
    rev: usize,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
    /// `(tail, position in adj[tail])` for each user edge.
    handles: Vec<(usize, usize)>,
    original: Vec<u64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            handles: Vec::new(),
            original: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.handles.len()
    }

    /// Adds a directed edge and returns its index.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let fwd = self.adj[from].len();
        let back = self.adj[to].len() + usize::from(from == to);
        self.adj[from].push(Arc { to, cap, rev: back });
        self.adj[to].push(Arc {
            to: from,
            cap: 0,
            rev: fwd,
        });
        self.handles.push((from, fwd));
        self.original.push(cap);
        self.handles.len() - 1
    }

    pub fn capacity(&self, edge: usize) -> u64 {
        self.original[edge]
    }

    /// Flow currently routed through a user edge.
    pub fn flow(&self, edge: usize) -> u64 {
        let (u, i) = self.handles[edge];
        self.original[edge] - self.adj[u][i].cap
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let next = level[u].map(|l| l + 1);
            for a in &self.adj[u] {
                if a.cap > 0 && level[a.to].is_none() {
                    level[a.to] = next;
                    queue.push_back(a.to);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, pushed: u64, level: &[Option<usize>], iter: &mut [usize]) -> u64 {
        if u == t {
            return pushed;
        }
        while iter[u] < self.adj[u].len() {
            let i = iter[u];
            let Arc { to, cap, rev } = self.adj[u][i];
            if cap > 0 && level[to].is_some() && level[to] == level[u].map(|l| l + 1) {
                let got = self.augment(to, t, pushed.min(cap), level, iter);
                if got > 0 {
                    self.adj[u][i].cap -= got;
                    self.adj[to][rev].cap += got;
                    return got;
                }
            }
            iter[u] += 1;
        }
        0
    }

    /// Maximum flow value from `s` to `t`; the network keeps the final
    /// residual capacities.
    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        if s == t {
            return 0;
        }
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut iter = vec![0; self.adj.len()];
            loop {
                let f = self.augment(s, t, u64::MAX, &level, &mut iter);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    /// Nodes reachable from `s` through arcs with positive residual capacity.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l.is_some()).collect()
    }

    /// Nodes from which `t` is reachable through arcs with positive residual
    /// capacity.
    pub fn residual_coreachable(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for a in &self.adj[v] {
                // `a.rev` indexes the arc a.to -> v
                if !seen[a.to] && self.adj[a.to][a.rev].cap > 0 {
                    seen[a.to] = true;
                    queue.push_back(a.to);
                }
            }
        }
        seen
    }
}
