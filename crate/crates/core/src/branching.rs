//! Chu-Liu/Edmonds minimum-cost arborescences and maximum-weight branchings.

/// Directed arc `from -> to` with an integer cost or weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cost: i64,
}

impl Arc {
    pub fn new(from: usize, to: usize, cost: i64) -> Self {
        Self { from, to, cost }
    }
}

/// Minimum-cost spanning out-arborescence of `0..n` rooted at `root`.
/// Returns the chosen arc indices (one per non-root vertex) or `None` when
/// some vertex is unreachable from the root.
pub fn min_arborescence(n: usize, root: usize, arcs: &[Arc]) -> Option<Vec<usize>> {
    let ids: Vec<usize> = (0..arcs.len()).collect();
    let chosen = solve(n, root, arcs, &ids)?;
    let mut out: Vec<usize> = chosen;
    out.sort_unstable();
    Some(out)
}

/// Recursive contraction step. `ids[e]` maps local arc `e` to the caller's id.
fn solve(n: usize, root: usize, arcs: &[Arc], ids: &[usize]) -> Option<Vec<usize>> {
    // Cheapest incoming arc per vertex; ties to the lowest arc index.
    let mut best: Vec<Option<usize>> = vec![None; n];
    for (e, a) in arcs.iter().enumerate() {
        if a.from == a.to || a.to == root {
            continue;
        }
        match best[a.to] {
            Some(b) if arcs[b].cost <= a.cost => {}
            _ => best[a.to] = Some(e),
        }
    }
    if (0..n).any(|v| v != root && best[v].is_none()) {
        return None;
    }

    // Find cycles in the chosen-parent graph.
    let mut comp = vec![usize::MAX; n];
    let mut mark = vec![usize::MAX; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        let mut v = start;
        while v != root && mark[v] == usize::MAX && comp[v] == usize::MAX {
            mark[v] = start;
            v = arcs[best[v].expect("non-root has parent")].from;
        }
        if v != root && mark[v] == start && comp[v] == usize::MAX {
            let id = cycles.len();
            let mut cycle = vec![v];
            comp[v] = id;
            let mut u = arcs[best[v].unwrap()].from;
            while u != v {
                comp[u] = id;
                cycle.push(u);
                u = arcs[best[u].unwrap()].from;
            }
            cycles.push(cycle);
        }
    }
    if cycles.is_empty() {
        return Some(
            (0..n)
                .filter(|&v| v != root)
                .map(|v| ids[best[v].unwrap()])
                .collect(),
        );
    }

    // Contract: cycle c becomes vertex c, the rest follow.
    let mut next = cycles.len();
    let mut label = vec![0usize; n];
    for v in 0..n {
        if comp[v] != usize::MAX {
            label[v] = comp[v];
        } else {
            label[v] = next;
            next += 1;
        }
    }
    let mut sub_arcs = Vec::new();
    let mut sub_ids = Vec::new();
    let mut origin = Vec::new();
    for (e, a) in arcs.iter().enumerate() {
        let (u, v) = (label[a.from], label[a.to]);
        if u == v {
            continue;
        }
        let cost = if comp[a.to] != usize::MAX {
            a.cost - arcs[best[a.to].unwrap()].cost
        } else {
            a.cost
        };
        sub_arcs.push(Arc::new(u, v, cost));
        sub_ids.push(sub_ids.len());
        origin.push(e);
    }
    let chosen = solve(next, label[root], &sub_arcs, &sub_ids)?;

    // Expand: every cycle keeps all its arcs except the one into the vertex
    // where the chosen entering arc lands.
    let mut result = Vec::with_capacity(n - 1);
    let mut entered = vec![usize::MAX; cycles.len()];
    for &se in &chosen {
        let e = origin[se];
        result.push(ids[e]);
        if comp[arcs[e].to] != usize::MAX {
            entered[comp[arcs[e].to]] = arcs[e].to;
        }
    }
    for (c, cycle) in cycles.iter().enumerate() {
        for &v in cycle {
            if v != entered[c] {
                result.push(ids[best[v].unwrap()]);
            }
        }
    }
    Some(result)
}

/// Maximum-weight branching (in-degree at most one, acyclic). Returns the
/// indices of the chosen arcs; arcs with non-positive weight are never chosen.
pub fn optimum_branching(n: usize, arcs: &[Arc]) -> Vec<usize> {
    let root = n;
    let mut aug: Vec<Arc> = Vec::with_capacity(arcs.len() + n);
    let mut back = Vec::with_capacity(arcs.len());
    for (e, a) in arcs.iter().enumerate() {
        if a.cost > 0 && a.from != a.to {
            aug.push(Arc::new(a.from, a.to, -a.cost));
            back.push(e);
        }
    }
    let real = aug.len();
    for v in 0..n {
        aug.push(Arc::new(root, v, 0));
    }
    let chosen = min_arborescence(n + 1, root, &aug).expect("super-root reaches every vertex");
    let mut out: Vec<usize> = chosen.into_iter().filter(|&e| e < real).map(|e| back[e]).collect();
    out.sort_unstable();
    out
}

pub fn total_cost(arcs: &[Arc], chosen: &[usize]) -> i64 {
    chosen.iter().map(|&e| arcs[e].cost).sum()
}

/// In-degree at most one and no directed cycle.
pub fn is_branching(n: usize, arcs: &[Arc], chosen: &[usize]) -> bool {
    let mut parent = vec![None; n];
    for &e in chosen {
        let a = arcs[e];
        if a.from == a.to || parent[a.to].is_some() {
            return false;
        }
        parent[a.to] = Some(a.from);
    }
    (0..n).all(|start| {
        let mut v = start;
        for _ in 0..=n {
            match parent[v] {
                None => return true,
                Some(p) => v = p,
            }
        }
        false
    })
}
