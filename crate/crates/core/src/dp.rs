//! Pseudo-polynomial dynamic program for the delegative Shapley-Shubik and
//! Banzhaf measures.
//!
//! For a target voter the forest is relabeled so that every subtree occupies a
//! contiguous block ending at its root and the target's tree comes last. The
//! table `F[j, w, s]` counts the `s`-element subsets of the first `j` voters
//! that add weight `w` to a coalition already holding every delegate of `j`:
//!
//! ```text
//! F[j, w, s] = Σ_x C(t_j - 1, x) · F[j - t_j, w, s - x]   (j out: its followers are inactive)
//!            + F[j - 1, w - w_j, s - 1]                    (j in and active)
//! ```
//!
//! Swing counts combine the table of the target's tree with the table of the
//! rest of the forest. When the target is a follower, its delegates are
//! forced into every coalition and removed from the forest; voters that
//! delegated to them become roots.

use std::ops::AddAssign;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{factorials, IndexKind, IndexReport};
use crate::graph::{DelegationForest, LiquidElection, VoterId};
use crate::rational::RationalValue;

/// Largest instance for which table entries are kept in `u128` (entries never
/// exceed `2^n`).
const NATIVE_COUNT_LIMIT: usize = 120;

/// Counter arithmetic needed by the tables.
pub trait Count: Clone + Send + Sync + std::fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn pow2(k: usize) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&mut self, other: &Self);
    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self);
    fn to_big(&self) -> BigUint;
}

impl Count for u128 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn pow2(k: usize) -> Self {
        1u128 << k
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    #[inline]
    fn add(&mut self, other: &Self) {
        *self += *other;
    }
    #[inline]
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Count for BigUint {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn pow2(k: usize) -> Self {
        BigUint::one() << k
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&mut self, other: &Self) {
        AddAssign::add_assign(self, other);
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        if !Zero::is_zero(a) && !Zero::is_zero(b) {
            AddAssign::add_assign(self, a * b);
        }
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
}

/// Pascal triangle `C(a, b)` for `a <= n`.
#[derive(Clone, Debug)]
pub struct Binomials<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Count> Binomials<T> {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<T>> = Vec::with_capacity(n + 1);
        for a in 0..=n {
            let mut row = vec![T::unit(); a + 1];
            for b in 1..a {
                let mut v = rows[a - 1][b - 1].clone();
                v.add(&rows[a - 1][b]);
                row[b] = v;
            }
            rows.push(row);
        }
        Self { rows }
    }

    pub fn row(&self, a: usize) -> &[T] {
        &self.rows[a]
    }

    pub fn get(&self, a: usize, b: usize) -> T {
        if b > a {
            T::nil()
        } else {
            self.rows[a][b].clone()
        }
    }
}

/// Relabeling of a (possibly restricted) forest for one target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfsOrdering {
    /// Voter at each position.
    pub order: Vec<VoterId>,
    /// Size of the subtree rooted at the voter in each position.
    pub subtree_sizes: Vec<usize>,
    /// First position of the target's subtree block (the target is last).
    pub target_block_start: usize,
}

impl DfsOrdering {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn target(&self) -> VoterId {
        *self.order.last().expect("ordering is never empty")
    }

    /// Every position `j` heads the block `j - t_j + 1 ..= j` holding exactly
    /// its subtree.
    pub fn blocks_are_contiguous(&self, forest: &DelegationForest) -> bool {
        let pos_of = |v: VoterId| self.order.iter().position(|&u| u == v);
        self.order.iter().enumerate().all(|(j, &v)| {
            let t = self.subtree_sizes[j];
            if t > j + 1 {
                return false;
            }
            let mut block: Vec<VoterId> = self.order[j + 1 - t..=j].to_vec();
            let mut sub: Vec<VoterId> = forest
                .subtree(v)
                .into_iter()
                .filter(|&u| pos_of(u).is_some())
                .collect();
            block.sort();
            sub.sort();
            block == sub
        })
    }
}

/// Reverse pre-order of the subtree at `root`: children visited in decreasing
/// id order, so the reversed sequence lists each subtree before its root.
fn push_reverse_preorder(forest: &DelegationForest, root: VoterId, out: &mut Vec<VoterId>) {
    let start = out.len();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        out.push(v);
        let mut kids = forest.children(v).to_vec();
        kids.sort();
        // Pop order is decreasing id.
        stack.extend(kids);
    }
    out[start..].reverse();
}

/// Ordering over the forest restricted to voters not in `excluded`; the roots
/// of the restricted forest are voters whose delegate is excluded or who vote
/// directly. `target` must be such a root.
fn ordering_restricted(
    forest: &DelegationForest,
    target: VoterId,
    excluded: &[bool],
) -> DfsOrdering {
    let n = forest.n();
    let is_root = |v: VoterId| match forest.parent(v) {
        None => true,
        Some(p) => excluded[p.0],
    };
    debug_assert!(is_root(target));
    let mut order = Vec::with_capacity(n);
    for r in (0..n).map(VoterId) {
        if r != target && !excluded[r.0] && is_root(r) {
            push_reverse_preorder(forest, r, &mut order);
        }
    }
    let target_block_start = order.len();
    push_reverse_preorder(forest, target, &mut order);
    let subtree_sizes = order.iter().map(|&v| forest.subtree_size(v)).collect();
    DfsOrdering {
        order,
        subtree_sizes,
        target_block_start,
    }
}

/// Ordering for `target`. For a follower the forest is restricted to voters
/// outside its delegation chain, which makes it a root.
pub fn dfs_order(forest: &DelegationForest, target: VoterId) -> DfsOrdering {
    let mut excluded = vec![false; forest.n()];
    for v in forest.delegates_of(target) {
        excluded[v.0] = true;
    }
    ordering_restricted(forest, target, &excluded)
}

/// `F[j, w, s]` for `j in 0..=m`, `w in 0..=wcap`, `s in 0..=m`. Entries
/// with weight above `wcap` are dropped; nothing below the cap depends on them.
#[derive(Clone, Debug)]
pub struct DpTable<T = BigUint> {
    m: usize,
    wcap: usize,
    data: Vec<T>,
}

impl<T: Count> DpTable<T> {
    #[inline]
    fn idx(&self, j: usize, w: usize, s: usize) -> usize {
        (j * (self.wcap + 1) + w) * (self.m + 1) + s
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn weight_cap(&self) -> usize {
        self.wcap
    }

    pub fn get(&self, j: usize, w: usize, s: usize) -> T {
        if j > self.m || w > self.wcap || s > self.m {
            return T::nil();
        }
        self.data[self.idx(j, w, s)].clone()
    }

    fn at(&self, j: usize, w: usize, s: usize) -> &T {
        &self.data[self.idx(j, w, s)]
    }
}

/// Fills the size-resolved table over a block of `(weight, subtree size)`
/// items in block order.
pub fn fill_table<T: Count>(items: &[(u64, usize)], wcap: usize, binom: &Binomials<T>) -> DpTable<T> {
    let m = items.len();
    let mut t = DpTable {
        m,
        wcap,
        data: vec![T::nil(); (m + 1) * (wcap + 1) * (m + 1)],
    };
    let base = t.idx(0, 0, 0);
    t.data[base] = T::unit();
    for j in 1..=m {
        let (wj, tj) = items[j - 1];
        let wj = wj as usize;
        let back = j - tj;
        let coeffs = binom.row(tj - 1);
        for w in 0..=wcap {
            for s in 0..=j {
                let mut acc = T::nil();
                for (x, c) in coeffs.iter().enumerate().take(s.min(tj - 1) + 1) {
                    let prev = t.at(back, w, s - x);
                    if !prev.is_zero() {
                        acc.add_mul(c, prev);
                    }
                }
                if s >= 1 && w >= wj {
                    acc.add(t.at(j - 1, w - wj, s - 1));
                }
                let i = t.idx(j, w, s);
                t.data[i] = acc;
            }
        }
    }
    t
}

/// Weight-only table `F[j, w]` used for the Banzhaf measure.
#[derive(Clone, Debug)]
pub struct DpTable2<T = BigUint> {
    m: usize,
    wcap: usize,
    data: Vec<T>,
}

impl<T: Count> DpTable2<T> {
    pub fn get(&self, j: usize, w: usize) -> T {
        if j > self.m || w > self.wcap {
            return T::nil();
        }
        self.data[j * (self.wcap + 1) + w].clone()
    }

    fn last_row(&self) -> &[T] {
        let start = self.m * (self.wcap + 1);
        &self.data[start..start + self.wcap + 1]
    }
}

pub fn fill_table_banzhaf<T: Count>(items: &[(u64, usize)], wcap: usize) -> DpTable2<T> {
    let m = items.len();
    let width = wcap + 1;
    let mut data = vec![T::nil(); (m + 1) * width];
    data[0] = T::unit();
    for j in 1..=m {
        let (wj, tj) = items[j - 1];
        let wj = wj as usize;
        let back = j - tj;
        let free = T::pow2(tj - 1);
        for w in 0..=wcap {
            let mut acc = T::nil();
            acc.add_mul(&free, &data[back * width + w]);
            if w >= wj {
                let prev = data[(j - 1) * width + w - wj].clone();
                acc.add(&prev);
            }
            data[j * width + w] = acc;
        }
    }
    DpTable2 { m, wcap, data }
}

/// `N_s` for `s in 0..n`: coalitions of size `s` without the target for
/// which the target is a swing agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwingCounts {
    pub by_size: Vec<BigUint>,
}

impl SwingCounts {
    pub fn total(&self) -> BigUint {
        self.by_size.iter().sum()
    }
}

/// Everything the combination step needs for one target.
struct Setup {
    n: usize,
    ordering: DfsOrdering,
    /// Voters forced into every coalition (the target's delegates).
    forced_size: usize,
    /// Residual quota once the forced voters are counted; `None` if they
    /// already meet the quota.
    quota: Option<usize>,
}

fn setup(election: &LiquidElection, target: VoterId) -> Setup {
    let forest = election.forest();
    let delegates = forest.delegates_of(target);
    let forced_weight: u64 = delegates.iter().map(|&v| election.weight(v)).sum();
    let quota = election
        .quota()
        .checked_sub(forced_weight)
        .filter(|&q| q > 0)
        .map(|q| q as usize);
    Setup {
        n: election.n(),
        ordering: dfs_order(forest, target),
        forced_size: delegates.len(),
        quota,
    }
}

fn block_items(election: &LiquidElection, ordering: &DfsOrdering, range: std::ops::Range<usize>) -> Vec<(u64, usize)> {
    range
        .map(|j| (election.weight(ordering.order[j]), ordering.subtree_sizes[j]))
        .collect()
}

fn swing_counts_generic<T: Count>(election: &LiquidElection, target: VoterId) -> Vec<T> {
    let Setup {
        n,
        ordering,
        forced_size,
        quota,
    } = setup(election, target);
    let mut counts = vec![T::nil(); n];
    let Some(q) = quota else {
        return counts;
    };
    let split = ordering.target_block_start;
    let rest_items = block_items(election, &ordering, 0..split);
    let tree_items = block_items(election, &ordering, split..ordering.len());
    let tree_weight: usize = tree_items.iter().map(|&(w, _)| w as usize).sum();
    let binom = Binomials::<T>::new(n);

    let rest = fill_table(&rest_items, q - 1, &binom);
    let tree = fill_table(&tree_items, tree_weight, &binom);
    let (mr, mt) = (rest_items.len(), tree_items.len());

    // suffix[w'][s'] = Σ_{v >= w'} tree[mt, v, s']
    let mut suffix = vec![vec![T::nil(); mt + 1]; tree_weight + 2];
    for w in (0..=tree_weight).rev() {
        for s in 0..=mt {
            let mut v = suffix[w + 1][s].clone();
            v.add(tree.at(mt, w, s));
            suffix[w][s] = v;
        }
    }

    for k in 0..=mr {
        for w in 0..q {
            let left = rest.at(mr, w, k);
            if left.is_zero() {
                continue;
            }
            // The tree part must bring at least q - w >= 1, so it contains the target.
            let need = q - w;
            if need > tree_weight {
                continue;
            }
            for s_tree in 1..=mt {
                let right = &suffix[need][s_tree];
                if right.is_zero() {
                    continue;
                }
                let s = k + (s_tree - 1) + forced_size;
                counts[s].add_mul(left, right);
            }
        }
    }
    counts
}

fn banzhaf_total_generic<T: Count>(election: &LiquidElection, target: VoterId) -> T {
    let Setup { ordering, quota, .. } = setup(election, target);
    let Some(q) = quota else {
        return T::nil();
    };
    let split = ordering.target_block_start;
    let rest_items = block_items(election, &ordering, 0..split);
    let tree_items = block_items(election, &ordering, split..ordering.len());
    let tree_weight: usize = tree_items.iter().map(|&(w, _)| w as usize).sum();

    let rest = fill_table_banzhaf::<T>(&rest_items, q - 1);
    let tree = fill_table_banzhaf::<T>(&tree_items, tree_weight);
    let tree_row = tree.last_row();
    let mut suffix = vec![T::nil(); tree_weight + 2];
    for w in (0..=tree_weight).rev() {
        let mut v = suffix[w + 1].clone();
        v.add(&tree_row[w]);
        suffix[w] = v;
    }
    let mut total = T::nil();
    for (w, left) in rest.last_row().iter().enumerate().take(q) {
        let need = q - w;
        if need <= tree_weight {
            total.add_mul(left, &suffix[need]);
        }
    }
    total
}

fn use_native(n: usize) -> bool {
    n <= NATIVE_COUNT_LIMIT
}

fn swing_counts(election: &LiquidElection, target: VoterId) -> SwingCounts {
    let by_size = if use_native(election.n()) {
        swing_counts_generic::<u128>(election, target)
            .iter()
            .map(Count::to_big)
            .collect()
    } else {
        swing_counts_generic::<BigUint>(election, target)
    };
    SwingCounts { by_size }
}

pub fn swing_counts_guru(election: &LiquidElection, target: VoterId) -> Result<SwingCounts> {
    if !election.forest().is_guru(target) {
        return Err(Error::InvalidArgument(format!("voter {target} is not a guru")));
    }
    Ok(swing_counts(election, target))
}

pub fn swing_counts_delegator(election: &LiquidElection, target: VoterId) -> Result<SwingCounts> {
    if election.forest().is_guru(target) {
        return Err(Error::InvalidArgument(format!("voter {target} is a guru")));
    }
    Ok(swing_counts(election, target))
}

/// Number of coalitions (without the target) for which the target is swing.
pub fn banzhaf_swing_total(election: &LiquidElection, target: VoterId) -> BigUint {
    if use_native(election.n()) {
        banzhaf_total_generic::<u128>(election, target).to_big()
    } else {
        banzhaf_total_generic::<BigUint>(election, target)
    }
}

pub fn shapley_dp(election: &LiquidElection, target: VoterId) -> RationalValue {
    let n = election.n();
    let counts = swing_counts(election, target);
    let f = factorials(n);
    let mut numer = BigUint::zero();
    for (s, c) in counts.by_size.iter().enumerate() {
        if !Zero::is_zero(c) {
            numer += &f[s] * &f[n - s - 1] * c;
        }
    }
    RationalValue::from_counts(&numer, &f[n])
}

pub fn banzhaf_dp(election: &LiquidElection, target: VoterId) -> RationalValue {
    let total = banzhaf_swing_total(election, target);
    RationalValue::from_counts(&total, &(BigUint::one() << (election.n() - 1)))
}

pub fn index_dp(election: &LiquidElection, target: VoterId, kind: IndexKind) -> RationalValue {
    match kind {
        IndexKind::Banzhaf => banzhaf_dp(election, target),
        IndexKind::ShapleyShubik => shapley_dp(election, target),
    }
}

pub fn all_indices_dp(election: &LiquidElection, kind: IndexKind) -> IndexReport {
    let values = (0..election.n())
        .into_par_iter()
        .map(|i| index_dp(election, VoterId(i), kind))
        .collect();
    IndexReport { kind, values }
}

/// Rough operation count of the Shapley table fill, for reporting.
pub fn shapley_work_estimate(election: &LiquidElection) -> f64 {
    let n = election.n() as f64;
    let w = election.total_weight().to_f64().unwrap_or(f64::MAX);
    n * n * w * n
}
