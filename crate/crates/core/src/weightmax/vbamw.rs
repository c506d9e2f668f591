//! Budget-violating approximation: a min-cost arborescence toward `i*` over
//! the voters within budget, trimmed to a `(1+ε)k` cost cap when needed.

use std::fmt;
use std::str::FromStr;

use super::costgraph::build_cost_graph;
use super::{normalize, WeightMaxProblem};
use crate::branching::{min_arborescence, Arc};
use crate::error::{Error, Result};
use crate::graph::{Choice, DelegationForest, DelegationProfile, VoterId};

/// Exact rational `ε = num/den` in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidArgument(format!("epsilon {num}/{den} outside (0, 1]")));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `cost ≤ (1+ε)k`.
    pub fn within_cap(self, cost: usize, k: usize) -> bool {
        cost as u128 * self.den as u128 <= (self.den + self.num) as u128 * k as u128
    }

    /// `cost ≥ εk/2`.
    pub fn above_floor(self, cost: usize, k: usize) -> bool {
        2 * cost as u128 * self.den as u128 >= self.num as u128 * k as u128
    }

    /// `⌈εk/2⌉`.
    fn floor_target(self, k: usize) -> usize {
        let a = self.num as u128 * k as u128;
        let b = 2 * self.den as u128;
        a.div_ceil(b) as usize
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Accepts `p/q` or a plain decimal such as `0.25`.
impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse epsilon '{s}'"));
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim().parse().map_err(|_| bad())?;
            return Self::new(p, q);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
        Self::new(num, den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VbamwOutcome {
    pub profile: DelegationProfile,
    pub weight: u64,
    /// Changes against the input profile; at most `(1+ε)k`.
    pub changes: usize,
    /// Whether the full arborescence exceeded the cap and was cut down.
    pub trimmed: bool,
    pub tree_cost: usize,
    pub tree_weight: u64,
    /// `weight / changes ≥ (ε/4) · tree_weight / tree_cost`, only meaningful
    /// when trimmed.
    pub ratio_contract_met: bool,
    pub meets_threshold: bool,
}

/// Realizes a partial assignment over the reachable set: voters with an
/// entry switch to it, everyone else keeps the normalized profile.
fn realize(base: &[Choice], voters: &[VoterId], assign: &[Option<usize>]) -> DelegationProfile {
    let mut choices = base.to_vec();
    for (i, a) in assign.iter().enumerate() {
        if let Some(p) = *a {
            choices[voters[i].0] = Choice::Delegate(voters[p]);
        }
    }
    DelegationProfile::from_choices(choices)
}

pub fn vbamw(problem: &WeightMaxProblem, eps: Epsilon) -> Result<VbamwOutcome> {
    let original = problem.election.profile();
    let weights = problem.election.weights();
    let measure = |p: &DelegationProfile| -> (u64, usize) {
        let f = DelegationForest::build(p, weights);
        (f.acc_weight(problem.target), p.distance(original))
    };
    let k = problem.budget;

    let Some(norm) = normalize(problem)? else {
        let (weight, _) = measure(original);
        return Ok(VbamwOutcome {
            profile: original.clone(),
            weight,
            changes: 0,
            trimmed: false,
            tree_cost: 0,
            tree_weight: weight,
            ratio_contract_met: true,
            meets_threshold: weight >= problem.threshold,
        });
    };
    let e = &norm.election;
    let base = e.profile().choices().to_vec();
    let root_voter = problem.target;

    let g = build_cost_graph(e);
    let dist = g.distances_to(root_voter);
    let within = |v: usize| dist[v].is_some_and(|d| d <= norm.budget);
    let voters: Vec<VoterId> = (0..e.n()).filter(|&v| within(v)).map(VoterId).collect();
    let mut local = vec![usize::MAX; e.n()];
    for (i, v) in voters.iter().enumerate() {
        local[v.0] = i;
    }
    let root = local[root_voter.0];

    // Out-arborescence from the root on reversed arcs.
    let mut arcs = Vec::new();
    for a in &g.arcs {
        let (u, v) = (local[a.from.0], local[a.to.0]);
        if u == usize::MAX || v == usize::MAX || u == root {
            continue;
        }
        arcs.push(Arc::new(v, u, a.cost as i64));
    }
    let chosen = min_arborescence(voters.len(), root, &arcs).ok_or(Error::NoSpanningArborescence)?;
    let mut parent = vec![None; voters.len()];
    let mut arc_cost = vec![0usize; voters.len()];
    for &id in &chosen {
        let a = arcs[id];
        parent[a.to] = Some(a.from);
        arc_cost[a.to] = a.cost as usize;
    }

    let full = realize(&base, &voters, &parent);
    let (tree_weight, tree_changes) = measure(&full);
    if eps.within_cap(tree_changes, k) {
        return Ok(VbamwOutcome {
            meets_threshold: tree_weight >= problem.threshold,
            profile: full,
            weight: tree_weight,
            changes: tree_changes,
            trimmed: false,
            tree_cost: tree_changes,
            tree_weight,
            ratio_contract_met: true,
        });
    }

    let trim = Trimmer {
        voters: &voters,
        root,
        parent: &parent,
        arc_cost: &arc_cost,
        next: g
            .next_hops(root_voter, &dist)
            .into_iter()
            .enumerate()
            .filter(|&(v, _)| local[v] != usize::MAX)
            .map(|(_, h)| h.map(|t| local[t.0]))
            .collect(),
        current: voters
            .iter()
            .map(|&v| e.profile().target(v).map(|t| local[t.0]).filter(|&t| t != usize::MAX))
            .collect(),
        base_cost: usize::from(!problem.election.forest().is_guru(root_voter)),
        target_cost: eps.floor_target(k).max(1),
        weights: voters.iter().map(|&v| e.weight(v)).collect(),
    };

    let mut best: Option<(u64, usize, Vec<usize>, DelegationProfile)> = None;
    for assign in trim.candidates() {
        let profile = realize(&base, &voters, &assign);
        let (weight, changes) = measure(&profile);
        if !eps.within_cap(changes, k) || !eps.above_floor(changes, k) {
            continue;
        }
        let key = profile.sort_key();
        let better = match &best {
            None => true,
            Some((bw, bc, bk, _)) => (weight, std::cmp::Reverse(changes), std::cmp::Reverse(&key)) > (*bw, std::cmp::Reverse(*bc), std::cmp::Reverse(bk)),
        };
        if better {
            best = Some((weight, changes, key, profile));
        }
    }
    let (weight, changes, _, profile) = best.expect("path candidates always fit the window");
    let ratio_contract_met = 4 * weight as u128 * tree_changes as u128 * eps.den as u128
        >= eps.num as u128 * tree_weight as u128 * changes as u128;
    Ok(VbamwOutcome {
        profile,
        weight,
        changes,
        trimmed: true,
        tree_cost: tree_changes,
        tree_weight,
        ratio_contract_met,
        meets_threshold: weight >= problem.threshold,
    })
}

struct Trimmer<'a> {
    voters: &'a [VoterId],
    root: usize,
    parent: &'a [Option<usize>],
    arc_cost: &'a [usize],
    /// Next hop on a cheapest path to the root, in local ids.
    next: Vec<Option<usize>>,
    /// Current delegation of each voter, when it stays inside the set.
    current: Vec<Option<usize>>,
    /// Changes spent before any tree arc (normalizing `i*`).
    base_cost: usize,
    target_cost: usize,
    weights: Vec<u64>,
}

impl Trimmer<'_> {
    fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.voters.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(v);
            }
        }
        ch
    }

    /// Pieces `(attach vertex, members)` from a bottom-up greedy split of
    /// the tree into parts of cost at least the target, plus the residual
    /// left at the root.
    fn decompose(&self, children: &[Vec<usize>]) -> (Vec<(usize, Vec<usize>)>, Vec<usize>) {
        let l = self.target_cost;
        let mut order = Vec::with_capacity(self.voters.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(children[v].iter().copied());
        }
        let mut residual: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new()); self.voters.len()];
        let mut pieces = Vec::new();
        for &v in order.iter().rev() {
            let mut group: (usize, Vec<usize>) = (0, Vec::new());
            for &c in &children[v] {
                let (rc, rv) = std::mem::take(&mut residual[c]);
                group.0 += rc;
                group.1.extend(rv);
                if group.0 >= l {
                    pieces.push((v, std::mem::take(&mut group.1)));
                    group.0 = 0;
                }
            }
            if v == self.root {
                return (pieces, group.1);
            }
            group.0 += self.arc_cost[v];
            group.1.push(v);
            if group.0 >= l {
                pieces.push((v, group.1));
            } else {
                residual[v] = group;
            }
        }
        unreachable!("root is visited last")
    }

    fn candidates(&self) -> Vec<Vec<Option<usize>>> {
        let children = self.children();
        let (pieces, r0) = self.decompose(&children);
        let mut out = Vec::new();
        let empty = vec![None; self.voters.len()];

        let mut a = empty.clone();
        for &v in &r0 {
            a[v] = self.parent[v];
        }
        out.push(self.grow(a));

        for (attach, members) in pieces {
            let mut a = empty.clone();
            for &v in &members {
                a[v] = self.parent[v];
            }
            self.lay_path(&mut a, attach);
            out.push(self.grow(a));
        }
        for u in 0..self.voters.len() {
            let mut a = empty.clone();
            self.lay_path(&mut a, u);
            out.push(self.grow(a));
        }
        out
    }

    /// Cheapest path from `v` to the root; path arcs override tree arcs.
    fn lay_path(&self, a: &mut [Option<usize>], mut v: usize) {
        while v != self.root {
            let h = self.next[v].expect("reachable voters have a next hop");
            a[v] = Some(h);
            v = h;
        }
    }

    fn selected(&self, a: &[Option<usize>], v: usize) -> bool {
        v == self.root || a[v].is_some()
    }

    fn cost(&self, a: &[Option<usize>]) -> usize {
        self.base_cost + (0..a.len()).filter(|&v| a[v].is_some() && a[v] != self.current[v]).count()
    }

    /// Adds tree vertices hanging off the selection, heaviest first, until
    /// the cost reaches the target.
    fn grow(&self, mut a: Vec<Option<usize>>) -> Vec<Option<usize>> {
        let mut cost = self.cost(&a);
        while cost < self.target_cost {
            let pick = (0..self.voters.len())
                .filter(|&v| !self.selected(&a, v))
                .filter(|&v| self.parent[v].is_some_and(|p| self.selected(&a, p)))
                .max_by_key(|&v| (self.weights[v], std::cmp::Reverse(v)));
            let Some(v) = pick else { break };
            a[v] = self.parent[v];
            cost += self.arc_cost[v];
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::{wmaxp_exact, WeightMaxConfig};
    use super::*;

    #[test]
    fn parse_epsilon() {
        assert_eq!("0.25".parse::<Epsilon>().unwrap(), Epsilon::new(1, 4).unwrap());
        assert_eq!("1".parse::<Epsilon>().unwrap(), Epsilon::new(1, 1).unwrap());
        assert_eq!("2/4".parse::<Epsilon>().unwrap().to_string(), "1/2");
        assert!("0".parse::<Epsilon>().is_err());
        assert!("1.5".parse::<Epsilon>().is_err());
        assert!("x".parse::<Epsilon>().is_err());
    }

    #[test]
    fn full_tree_within_budget_is_returned() {
        let e = line5(&[0, 1, 2, 3, 4]);
        let p = WeightMaxProblem::new(e, VoterId(4), 4, 8).unwrap();
        let out = vbamw(&p, Epsilon::new(1, 2).unwrap()).unwrap();
        assert!(!out.trimmed);
        assert_eq!(out.weight, 8);
        assert_eq!(out.changes, 4);
        assert!(out.meets_threshold);
    }

    #[test]
    fn trimming_respects_window_and_bound() {
        // Star around voter 0 with six leaves, budget 2: the tree costs 6.
        let arcs: Vec<(usize, usize)> = (1..7).map(|v| (v, 0)).collect();
        let e = partial(7, &arcs, vec![1, 3, 1, 2, 1, 1, 4], &[0, 1, 2, 3, 4, 5, 6]);
        for (num, den) in [(1, 4), (1, 2), (1, 1)] {
            let eps = Epsilon::new(num, den).unwrap();
            let p = WeightMaxProblem::new(e.clone(), VoterId(0), 2, 1).unwrap();
            let out = vbamw(&p, eps).unwrap();
            assert!(out.trimmed);
            assert!(eps.within_cap(out.changes, 2));
            assert!(eps.above_floor(out.changes, 2));
            let opt = wmaxp_exact(&p, &WeightMaxConfig::default()).unwrap().weight;
            // weight ≥ ε²k/(8n) · OPT
            assert!(8 * 7 * out.weight * den * den >= num * num * 2 * opt);
            assert!(p.evaluate(&out.profile).is_ok());
        }
    }
}
