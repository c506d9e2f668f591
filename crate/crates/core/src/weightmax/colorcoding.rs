//! Monte-Carlo color coding in the parameter `req`.
//!
//! `T_d(i*)` is collapsed into a single root of weight `α_d(i*)`. A solution
//! only needs a connected set of at most `req` further voters, so with
//! `req + 1` colors some coloring makes that set colorful. Per coloring, a
//! subset DP over `(vertex, color set, changes)` keeps the heaviest colorful
//! in-tree hanging below each vertex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::costgraph::build_cost_graph;
use super::{normalize, WeightMaxConfig, WeightMaxOutcome, WeightMaxProblem};
use crate::error::{Error, Result};
use crate::graph::{Choice, VoterId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColorCodingStats {
    pub colors: usize,
    pub repetitions: u64,
    /// Index of the coloring that produced the witness, if any.
    pub hit: Option<u64>,
}

/// In-arc `u -> v` of the collapsed graph.
#[derive(Clone, Copy, Debug)]
struct InArc {
    from: usize,
    cost: usize,
    /// Voter `u` delegates to when the arc is used.
    target: VoterId,
}

struct Collapsed {
    /// Original voter of each local vertex; local 0 is the collapsed root.
    voters: Vec<VoterId>,
    weights: Vec<i64>,
    incoming: Vec<Vec<InArc>>,
}

/// Keep best per `(vertex, mask, changes)`, with back-pointers.
struct Table {
    masks: usize,
    cmax: usize,
    best: Vec<i64>,
    split: Vec<Option<(u32, u8, u16, u8)>>,
}

impl Table {
    fn idx(&self, v: usize, mask: usize, c: usize) -> usize {
        (v * self.masks + mask) * (self.cmax + 1) + c
    }
}

fn run_coloring(g: &Collapsed, colors: &[usize], k_colors: usize, cmax: usize) -> Table {
    let nv = g.voters.len();
    let masks = 1usize << k_colors;
    let mut t = Table {
        masks,
        cmax,
        best: vec![-1; nv * masks * (cmax + 1)],
        split: vec![None; nv * masks * (cmax + 1)],
    };
    for v in 0..nv {
        let i = t.idx(v, 1 << colors[v], 0);
        t.best[i] = g.weights[v];
    }
    for mask in 1..masks {
        for v in 0..nv {
            let own = 1usize << colors[v];
            if mask & own == 0 || mask == own {
                continue;
            }
            let rest = mask & !own;
            // Nonempty submasks of `rest` go to one child subtree.
            let mut sub = rest;
            while sub > 0 {
                let head = mask & !sub;
                for arc in &g.incoming[v] {
                    if sub & (1 << colors[arc.from]) == 0 {
                        continue;
                    }
                    for c1 in 0..=cmax {
                        let b1 = t.best[t.idx(v, head, c1)];
                        if b1 < 0 || c1 + arc.cost > cmax {
                            continue;
                        }
                        for c2 in 0..=cmax - c1 - arc.cost {
                            let b2 = t.best[t.idx(arc.from, sub, c2)];
                            if b2 < 0 {
                                continue;
                            }
                            let c = c1 + c2 + arc.cost;
                            let i = t.idx(v, mask, c);
                            if b1 + b2 > t.best[i] {
                                t.best[i] = b1 + b2;
                                t.split[i] = Some((arc.from as u32, arc.cost as u8, sub as u16, c2 as u8));
                            }
                        }
                    }
                }
                sub = (sub - 1) & rest;
            }
        }
    }
    t
}

/// Parent assignments `(child voter, delegation target)` of the tree stored
/// at `(v, mask, c)`.
fn reconstruct(g: &Collapsed, t: &Table, v: usize, mask: usize, c: usize, out: &mut Vec<(VoterId, VoterId)>) {
    let Some((u, cost, sub, c2)) = t.split[t.idx(v, mask, c)] else {
        return;
    };
    let (u, cost, sub, c2) = (u as usize, cost as usize, sub as usize, c2 as usize);
    let arc = g.incoming[v]
        .iter()
        .find(|a| a.from == u && a.cost == cost)
        .expect("recorded arc exists");
    out.push((g.voters[u], arc.target));
    reconstruct(g, t, v, mask & !sub, c - c2 - cost, out);
    reconstruct(g, t, u, sub, c2, out);
}

pub fn solve_fpt_colorcoding(
    problem: &WeightMaxProblem,
    delta: f64,
    seed: u64,
    config: &WeightMaxConfig,
) -> Result<(WeightMaxOutcome, ColorCodingStats)> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("failure probability {delta} outside (0, 1)")));
    }
    let none = ColorCodingStats {
        colors: 0,
        repetitions: 0,
        hit: None,
    };
    let Some(norm) = normalize(problem)? else {
        return Ok((WeightMaxOutcome::no(problem), none));
    };
    let e = &norm.election;
    let root = problem.target;
    let forest = e.forest();
    let alpha = forest.acc_weight(root);
    let req = problem.threshold as i64 - alpha as i64;
    if req <= 0 {
        let out = WeightMaxOutcome::from_profile(problem, e.profile().clone())?;
        return Ok((out, none));
    }
    if req as u64 > config.max_req {
        return Err(Error::ParameterTooLarge {
            name: "req",
            value: req as u64,
            limit: config.max_req,
        });
    }

    // Only voters within budget of the root can ever join its tree.
    let cost_graph = build_cost_graph(e);
    let dist = cost_graph.distances_to(root);
    let reach: u64 = (0..e.n())
        .filter(|&v| dist[v].is_some_and(|d| d <= norm.budget))
        .map(|v| e.weight(VoterId(v)))
        .sum();
    if reach < problem.threshold {
        return Ok((WeightMaxOutcome::no(problem), none));
    }

    let in_tree: Vec<bool> = (0..e.n()).map(|v| forest.guru(VoterId(v)) == root).collect();
    let mut local = vec![usize::MAX; e.n()];
    let mut voters = vec![root];
    let mut weights = vec![alpha as i64];
    local[root.0] = 0;
    for v in 0..e.n() {
        if !in_tree[v] && dist[v].is_some_and(|d| d <= norm.budget) {
            local[v] = voters.len();
            voters.push(VoterId(v));
            weights.push(e.weight(VoterId(v)) as i64);
        }
    }
    let mut incoming: Vec<Vec<InArc>> = vec![Vec::new(); voters.len()];
    for a in &cost_graph.arcs {
        let (u, v) = (a.from.0, a.to.0);
        if in_tree[u] || local[u] == usize::MAX {
            continue;
        }
        let to = if in_tree[v] { 0 } else { local[v] };
        if to == usize::MAX {
            continue;
        }
        let arc = InArc {
            from: local[u],
            cost: a.cost as usize,
            target: a.to,
        };
        // Parallel arcs into the root: keep the cheapest.
        match incoming[to].iter_mut().find(|x| x.from == arc.from) {
            Some(x) if (arc.cost, arc.target) < (x.cost, x.target) => *x = arc,
            Some(_) => {}
            None => incoming[to].push(arc),
        }
    }
    let g = Collapsed {
        voters,
        weights,
        incoming,
    };

    let k_colors = req as usize + 1;
    let cmax = norm.budget.min(k_colors - 1);
    let repetitions = ((k_colors as f64).exp() * (1.0 / delta).ln()).ceil().max(1.0) as u64;
    let need = problem.threshold as i64;

    let found = (0..repetitions).into_par_iter().find_map_first(|rep| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rep);
        let colors: Vec<usize> = (0..g.voters.len()).map(|_| rng.random_range(0..k_colors)).collect();
        let t = run_coloring(&g, &colors, k_colors, cmax);
        let mut best: Option<(i64, usize, usize)> = None;
        for mask in 1..t.masks {
            if mask & (1 << colors[0]) == 0 {
                continue;
            }
            for c in 0..=cmax {
                let b = t.best[t.idx(0, mask, c)];
                if b >= need && best.is_none_or(|(bb, _, _)| b > bb) {
                    best = Some((b, mask, c));
                }
            }
        }
        let (_, mask, c) = best?;
        let mut arcs = Vec::new();
        reconstruct(&g, &t, 0, mask, c, &mut arcs);
        let mut choices = e.profile().choices().to_vec();
        for (u, to) in arcs {
            choices[u.0] = Choice::Delegate(to);
        }
        let profile = crate::graph::DelegationProfile::from_choices(choices);
        let out = WeightMaxOutcome::from_profile(problem, profile).ok()?;
        out.decision.then_some((rep, out))
    });

    let stats = ColorCodingStats {
        colors: k_colors,
        repetitions,
        hit: found.as_ref().map(|(rep, _)| *rep),
    };
    Ok(match found {
        Some((_, out)) => (out, stats),
        None => (WeightMaxOutcome::no(problem), stats),
    })
}
