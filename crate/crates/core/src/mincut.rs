//! Exact dimension and self-sufficient closure by minimum cut.
//!
//! `min { δ(Y) : X ⊆ Y }` is a project-selection problem: every tuple support
//! is a project with profit equal to its weight that requires its points,
//! and every point outside `X` costs one. The least minimizer (the
//! self-sufficient closure of `X`) is the source side of the minimal minimum
//! cut, read off the residual graph.
//!
//! This path has no universe cap and is what the generic-chain machinery uses
//! on large stages.

use std::collections::VecDeque;

use crate::structure::RelStructure;

const INF: i64 = i64::MAX / 4;

struct Edge {
    to: usize,
    cap: i64,
}

struct Dinic {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic { edges: Vec::new(), adj: vec![Vec::new(); n], level: vec![0; n], iter: vec![0; n] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0 });
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &e in &self.adj[v] {
                let Edge { to, cap } = self.edges[e];
                if cap > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[v] + 1;
                    q.push_back(to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, f: i64) -> i64 {
        if v == t {
            return f;
        }
        while self.iter[v] < self.adj[v].len() {
            let e = self.adj[v][self.iter[v]];
            let Edge { to, cap } = self.edges[e];
            if cap > 0 && self.level[v] < self.level[to] {
                let d = self.dfs(to, t, f.min(cap));
                if d > 0 {
                    self.edges[e].cap -= d;
                    self.edges[e ^ 1].cap += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, INF);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual graph.
    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &e in &self.adj[v] {
                let Edge { to, cap } = self.edges[e];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    q.push_back(to);
                }
            }
        }
        seen
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCutResult {
    /// `min { δ(Y) : X ⊆ Y }`.
    pub value: i64,
    /// The least minimizer, as a membership vector over the universe.
    pub closure: Vec<bool>,
}

/// Minimize δ over all supersets of `fixed` in the whole structure.
/// Valid for any structure, in the class or not.
pub fn min_predim_over(m: &RelStructure, fixed: &[bool]) -> MinCutResult {
    let points: Vec<usize> = (0..m.len()).collect();
    let supports: Vec<usize> = (0..m.supports().len()).collect();
    solve(m, fixed, &points, &supports)
}

/// Point-to-support incidence lists, built once per structure.
pub struct Incidence {
    pub by_point: Vec<Vec<usize>>,
}

impl Incidence {
    pub fn new(m: &RelStructure) -> Self {
        let mut by_point = vec![Vec::new(); m.len()];
        for (si, s) in m.supports().iter().enumerate() {
            for &p in &s.points {
                by_point[p as usize].push(si);
            }
        }
        Incidence { by_point }
    }
}

/// Minimize δ over supersets of `fixed`, exploring only the part of the
/// structure connected to `fixed` through tuples. Exact when `m` is in the
/// class, since a component untouched by `fixed` has nonnegative predimension
/// and can always be dropped from a minimizer.
pub fn min_predim_local(m: &RelStructure, inc: &Incidence, fixed: &[usize]) -> (i64, Vec<usize>) {
    let mut in_comp = vec![false; m.len()];
    let mut support_seen = vec![false; m.supports().len()];
    let mut points = Vec::new();
    let mut supports = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &p in fixed {
        if !in_comp[p] {
            in_comp[p] = true;
            points.push(p);
            queue.push_back(p);
        }
    }
    while let Some(p) = queue.pop_front() {
        for &si in &inc.by_point[p] {
            if support_seen[si] {
                continue;
            }
            support_seen[si] = true;
            supports.push(si);
            for &q in &m.supports()[si].points {
                let q = q as usize;
                if !in_comp[q] {
                    in_comp[q] = true;
                    points.push(q);
                    queue.push_back(q);
                }
            }
        }
    }
    let mut fixed_mask = vec![false; m.len()];
    for &p in fixed {
        fixed_mask[p] = true;
    }
    let r = solve(m, &fixed_mask, &points, &supports);
    let mut closure: Vec<usize> = points.into_iter().filter(|&p| r.closure[p]).collect();
    closure.sort_unstable();
    (r.value, closure)
}

fn solve(m: &RelStructure, fixed: &[bool], points: &[usize], supports: &[usize]) -> MinCutResult {
    let n = m.len();
    let free: Vec<usize> = points.iter().copied().filter(|&p| !fixed[p]).collect();
    let mut node_of = vec![usize::MAX; n];
    // 0 = source, 1 = sink, then supports, then free points.
    let base = 2 + supports.len();
    for (k, &p) in free.iter().enumerate() {
        node_of[p] = base + k;
    }
    let mut g = Dinic::new(base + free.len());
    let mut total = 0i64;
    for (k, &si) in supports.iter().enumerate() {
        let s = &m.supports()[si];
        total += s.weight;
        g.add_edge(0, 2 + k, s.weight);
        for &p in &s.points {
            let p = p as usize;
            if !fixed[p] {
                g.add_edge(2 + k, node_of[p], INF);
            }
        }
    }
    for &p in &free {
        g.add_edge(node_of[p], 1, 1);
    }
    let cut = g.max_flow(0, 1);
    let side = g.source_side(0);
    let fixed_count = fixed.iter().filter(|&&b| b).count() as i64;
    let mut closure = fixed.to_vec();
    for &p in &free {
        if side[node_of[p]] {
            closure[p] = true;
        }
    }
    MinCutResult { value: fixed_count - (total - cut), closure }
}
