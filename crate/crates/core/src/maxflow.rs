//! Blocking-flow (Dinic) maximum flow over any [`Scalar`] capacity type.

use std::collections::VecDeque;

use crate::scalar::Scalar;

/// Directed network with residual capacities. Arcs are stored in pairs so
/// that `a ^ 1` is the reverse of arc `a`.
#[derive(Clone, Debug)]
pub struct FlowNetwork<S> {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    residual: Vec<S>,
    capacity: Vec<S>,
    eps: S,
}

impl<S: Scalar> FlowNetwork<S> {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            to: Vec::new(),
            residual: Vec::new(),
            capacity: Vec::new(),
            eps: S::zero(),
        }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    /// Adds `u → v` with capacity `cap` and returns its arc id.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: S) -> usize {
        self.add_pair(u, v, cap, S::zero())
    }

    /// Adds capacity `cap` in both directions between `u` and `v`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: S) -> usize {
        self.add_pair(u, v, cap.clone(), cap)
    }

    fn add_pair(&mut self, u: usize, v: usize, forward: S, backward: S) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.residual.push(forward.clone());
        self.capacity.push(forward);
        self.adj[u].push(id);
        self.to.push(u);
        self.residual.push(backward.clone());
        self.capacity.push(backward);
        self.adj[v].push(id + 1);
        id
    }

    /// Net flow pushed along arc `a` (negative when it runs backwards).
    pub fn flow(&self, a: usize) -> S {
        self.capacity[a].clone() - self.residual[a].clone()
    }

    fn usable(&self, a: usize) -> bool {
        self.residual[a] > self.eps
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.nodes()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.adj[v] {
                let w = self.to[a];
                if level[w] == usize::MAX && self.usable(a) {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    /// Maximum `s`-`t` flow value. Leaves the residual graph in place for
    /// cut extraction.
    pub fn max_flow(&mut self, s: usize, t: usize) -> S {
        let scale = self
            .capacity
            .iter()
            .fold(S::zero(), |m, c| S::max_of(m, c.clone()));
        self.eps = S::tol(&scale) / S::int(64);
        let mut total = S::zero();
        if s == t {
            return total;
        }
        while let Some(mut level) = self.levels(s, t) {
            let mut next = vec![0usize; self.nodes()];
            let mut path: Vec<usize> = Vec::new();
            let mut v = s;
            loop {
                if v == t {
                    let bottleneck = path
                        .iter()
                        .map(|&a| self.residual[a].clone())
                        .reduce(S::min_of)
                        .expect("nonempty path");
                    let mut cut_at = path.len();
                    for (k, &a) in path.iter().enumerate() {
                        self.residual[a] = self.residual[a].clone() - bottleneck.clone();
                        self.residual[a ^ 1] = self.residual[a ^ 1].clone() + bottleneck.clone();
                        if cut_at == path.len() && !self.usable(a) {
                            cut_at = k;
                        }
                    }
                    total = total + bottleneck;
                    path.truncate(cut_at);
                    v = path.last().map(|&a| self.to[a]).unwrap_or(s);
                    continue;
                }
                let mut advanced = false;
                while next[v] < self.adj[v].len() {
                    let a = self.adj[v][next[v]];
                    let w = self.to[a];
                    if level[w] == level[v].wrapping_add(1) && self.usable(a) {
                        path.push(a);
                        v = w;
                        advanced = true;
                        break;
                    }
                    next[v] += 1;
                }
                if advanced {
                    continue;
                }
                if v == s {
                    break;
                }
                level[v] = usize::MAX;
                let a = path.pop().expect("retreat from non-source");
                v = self.to[a ^ 1];
                next[v] += 1;
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual graph.
    pub fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.adj[v] {
                let w = self.to[a];
                if !seen[w] && self.usable(a) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Nodes that can still reach `t` in the residual graph.
    pub fn reaching(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes()];
        seen[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.adj[v] {
                // arc a leaves v; its reverse a^1 enters v from to[a]
                let w = self.to[a];
                if !seen[w] && self.usable(a ^ 1) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }
}
