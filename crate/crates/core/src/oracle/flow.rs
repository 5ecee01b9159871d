//! Min-cost flow by successive shortest augmenting paths.
//!
//! Shortest paths use Bellman-Ford on the residual graph, so arc costs may be
//! negative as long as the initial graph has no negative cycle. Networks here
//! have a few dozen nodes, so the simple O(VE) search is plenty.

pub const INF_CAP: i64 = i64::MAX / 4;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
    cost: f64,
}

#[derive(Debug, Clone)]
pub struct MinCostFlow {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl MinCostFlow {
    pub fn new(nodes: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Adds a directed arc and returns its id for [`MinCostFlow::flow_on`].
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, cost });
        self.adj[from].push(id);
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
        });
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently on arc `id`.
    pub fn flow_on(&self, id: usize) -> i64 {
        self.arcs[id ^ 1].cap
    }

    /// Augments along shortest `source -> sink` paths while their cost is
    /// negative, i.e. computes a minimum-cost flow of unconstrained value.
    /// Returns `(flow, cost)`.
    pub fn min_cost_any_flow(&mut self, source: usize, sink: usize) -> (i64, f64) {
        let mut flow = 0;
        let mut cost = 0.0;
        while let Some((path, dist)) = self.shortest_path(source, sink) {
            if dist >= -EPS {
                break;
            }
            let push = path
                .iter()
                .map(|&id| self.arcs[id].cap)
                .min()
                .expect("path is nonempty");
            for &id in &path {
                self.arcs[id].cap -= push;
                self.arcs[id ^ 1].cap += push;
            }
            flow += push;
            cost += push as f64 * dist;
        }
        (flow, cost)
    }

    /// Arc ids of a cheapest residual path and its cost.
    fn shortest_path(&self, source: usize, sink: usize) -> Option<(Vec<usize>, f64)> {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        dist[source] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u].is_infinite() {
                    continue;
                }
                for &id in &self.adj[u] {
                    let arc = &self.arcs[id];
                    if arc.cap > 0 && dist[u] + arc.cost < dist[arc.to] - EPS {
                        dist[arc.to] = dist[u] + arc.cost;
                        via[arc.to] = Some(id);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink].is_infinite() {
            return None;
        }
        let mut path = Vec::new();
        let mut v = sink;
        while v != source {
            let id = via[v]?;
            path.push(id);
            v = self.arcs[id ^ 1].to;
        }
        path.reverse();
        Some((path, dist[sink]))
    }
}
