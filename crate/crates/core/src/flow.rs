//! Integer max-flow (Dinic) on small graphs.
//!
//! Probabilities are scaled to integer capacities before the solve, so
//! feasibility decisions are exact and independent of float summation order.

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    flow: i64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

/// Identifier of a directed edge; the reverse edge is `id ^ 1`.
pub type EdgeId = usize;

impl FlowNetwork {
    pub fn new(node_count: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            adj: vec![Vec::new(); node_count],
            level: vec![-1; node_count],
            iter: vec![0; node_count],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> EdgeId {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, flow: 0 });
        self.edges.push(Edge {
            to: from,
            cap: 0,
            flow: 0,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn flow_on(&self, id: EdgeId) -> i64 {
        self.edges[id].flow
    }

    fn residual(&self, id: EdgeId) -> i64 {
        self.edges[id].cap - self.edges[id].flow
    }

    fn bfs(&mut self, source: usize, sink: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = std::collections::VecDeque::new();
        self.level[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &id in &self.adj[u] {
                let e = &self.edges[id];
                if e.cap - e.flow > 0 && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[u] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        self.level[sink] >= 0
    }

    fn dfs(&mut self, u: usize, sink: usize, pushed: i64) -> i64 {
        if u == sink {
            return pushed;
        }
        while self.iter[u] < self.adj[u].len() {
            let id = self.adj[u][self.iter[u]];
            let (to, residual) = {
                let e = &self.edges[id];
                (e.to, e.cap - e.flow)
            };
            if residual > 0 && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, sink, pushed.min(residual));
                if got > 0 {
                    self.edges[id].flow += got;
                    self.edges[id ^ 1].flow -= got;
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        assert_ne!(source, sink);
        let mut total = 0i64;
        while self.bfs(source, sink) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let pushed = self.dfs(source, sink, i64::MAX);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes reachable from `source` in the residual graph; call after
    /// `max_flow` to read off a minimum cut.
    pub fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![source];
        seen[source] = true;
        while let Some(u) = stack.pop() {
            for &id in &self.adj[u] {
                if self.residual(id) > 0 && !seen[self.edges[id].to] {
                    seen[self.edges[id].to] = true;
                    stack.push(self.edges[id].to);
                }
            }
        }
        seen
    }
}

/// Maximum-weight closure of a DAG: a subset `S` of nodes closed under the
/// out-edges (`u` in `S` implies every successor of `u` in `S`) maximizing
/// the node-weight sum. Returns `(value, membership)`; the membership is the
/// canonical source-side minimum cut, so it is deterministic.
pub fn max_weight_closure(weights: &[i64], successors: &[Vec<usize>]) -> (i64, Vec<bool>) {
    let n = weights.len();
    let source = n;
    let sink = n + 1;
    let mut net = FlowNetwork::new(n + 2);
    let mut positive_total = 0i64;
    for (u, &w) in weights.iter().enumerate() {
        if w > 0 {
            positive_total += w;
            net.add_edge(source, u, w);
        } else if w < 0 {
            net.add_edge(u, sink, -w);
        }
    }
    let infinite = positive_total + 1;
    for (u, succ) in successors.iter().enumerate() {
        for &v in succ {
            net.add_edge(u, v, infinite);
        }
    }
    let cut = net.max_flow(source, sink);
    let reach = net.residual_reachable(source);
    let members: Vec<bool> = (0..n).map(|u| reach[u]).collect();
    (positive_total - cut, members)
}
