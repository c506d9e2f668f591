use std::collections::VecDeque;

use crate::graph::{PartialElection, VoterId};

/// Arc `from -> to` (from may delegate to to) costing 0 when it is the
/// current delegation and 1 otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostArc {
    pub from: VoterId,
    pub to: VoterId,
    pub cost: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostedDigraph {
    pub n: usize,
    pub arcs: Vec<CostArc>,
    pub weights: Vec<u64>,
}

pub fn build_cost_graph(election: &PartialElection) -> CostedDigraph {
    let profile = election.profile();
    let arcs = election
        .network()
        .arcs()
        .map(|(from, to)| CostArc {
            from,
            to,
            cost: u8::from(profile.target(from) != Some(to)),
        })
        .collect();
    CostedDigraph {
        n: election.n(),
        arcs,
        weights: election.weights().as_slice().to_vec(),
    }
}

impl CostedDigraph {
    pub fn single_zero_cost_choice(&self) -> bool {
        let mut zero_out = vec![0usize; self.n];
        for a in &self.arcs {
            if a.cost == 0 {
                zero_out[a.from.0] += 1;
            }
        }
        zero_out.iter().all(|&c| c <= 1)
    }

    /// Whether the zero-cost arcs contain a directed cycle.
    pub fn has_zero_cost_cycle(&self) -> bool {
        let mut next = vec![None; self.n];
        for a in &self.arcs {
            if a.cost == 0 {
                next[a.from.0] = Some(a.to.0);
            }
        }
        (0..self.n).any(|s| {
            let mut v = s;
            for _ in 0..=self.n {
                match next[v] {
                    None => return false,
                    Some(t) => v = t,
                }
            }
            true
        })
    }

    /// Cheapest path cost from every vertex to `root` (0-1 BFS on reversed
    /// arcs), skipping arcs that leave `root`; `None` when unreachable.
    pub fn distances_to(&self, root: VoterId) -> Vec<Option<usize>> {
        let mut incoming: Vec<Vec<(usize, u8)>> = vec![Vec::new(); self.n];
        for a in &self.arcs {
            if a.from != root {
                incoming[a.to.0].push((a.from.0, a.cost));
            }
        }
        let mut dist: Vec<Option<usize>> = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[root.0] = Some(0);
        queue.push_back(root.0);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            for &(u, c) in &incoming[v] {
                let nd = dv + c as usize;
                if dist[u].is_none_or(|du| nd < du) {
                    dist[u] = Some(nd);
                    if c == 0 {
                        queue.push_front(u);
                    } else {
                        queue.push_back(u);
                    }
                }
            }
        }
        dist
    }

    /// For each vertex, the next hop of one cheapest path to `root`.
    pub fn next_hops(&self, root: VoterId, dist: &[Option<usize>]) -> Vec<Option<VoterId>> {
        let mut next: Vec<Option<(usize, VoterId)>> = vec![None; self.n];
        for a in &self.arcs {
            if a.from == root {
                continue;
            }
            let (Some(du), Some(dv)) = (dist[a.from.0], dist[a.to.0]) else {
                continue;
            };
            if dv + a.cost as usize == du {
                // Prefer zero-cost hops so the walk follows decreasing
                // (distance, zero-run) order; then the smallest target id.
                let key = (a.cost as usize, a.to);
                if next[a.from.0].is_none_or(|k| key < k) {
                    next[a.from.0] = Some(key);
                }
            }
        }
        next.into_iter().map(|k| k.map(|(_, t)| t)).collect()
    }
}
