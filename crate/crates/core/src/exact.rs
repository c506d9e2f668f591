//! Ground-truth power measures by full coalition enumeration.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Coalition, EvaluableGame};
use crate::graph::{LiquidElection, VoterId};
use crate::rational::RationalValue;

/// Enumeration refuses games with more voters than this.
pub const MAX_ENUMERATION_VOTERS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    Banzhaf,
    #[serde(rename = "shapley")]
    ShapleyShubik,
}

impl std::str::FromStr for IndexKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "banzhaf" | "db" => Ok(Self::Banzhaf),
            "shapley" | "shapley-shubik" | "ds" => Ok(Self::ShapleyShubik),
            other => Err(Error::InvalidArgument(format!("unknown index kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub kind: IndexKind,
    pub values: Vec<RationalValue>,
}

fn guard<G: EvaluableGame + ?Sized>(game: &G) -> Result<()> {
    if game.n() > MAX_ENUMERATION_VOTERS {
        return Err(Error::InstanceTooLargeForEnumeration {
            what: "voters",
            actual: game.n() as u128,
            limit: MAX_ENUMERATION_VOTERS as u128,
        });
    }
    Ok(())
}

/// Swing counts by coalition size, recomputing the game value per subset.
pub fn swing_counts_plain<G: EvaluableGame + ?Sized>(game: &G, voter: VoterId) -> Vec<u128> {
    let n = game.n();
    let others: Vec<VoterId> = (0..n).map(VoterId).filter(|&v| v != voter).collect();
    let mut counts = vec![0u128; n];
    for bits in 0..(1u64 << others.len()) {
        let coalition = spread(bits, &others);
        if !game.value(coalition) && game.value(coalition.with(voter)) {
            counts[bits.count_ones() as usize] += 1;
        }
    }
    counts
}

fn spread(bits: u64, others: &[VoterId]) -> Coalition {
    let mut c = Coalition::EMPTY;
    let mut b = bits;
    while b != 0 {
        let k = b.trailing_zeros() as usize;
        c = c.with(others[k]);
        b &= b - 1;
    }
    c
}

/// Incrementally maintained active set of a coalition in an election.
struct ActiveTracker<'a> {
    election: &'a LiquidElection,
    member: Vec<bool>,
    active: Vec<bool>,
    weight: u64,
    stack: Vec<VoterId>,
}

impl<'a> ActiveTracker<'a> {
    fn new(election: &'a LiquidElection) -> Self {
        let n = election.n();
        Self {
            election,
            member: vec![false; n],
            active: vec![false; n],
            weight: 0,
            stack: Vec::new(),
        }
    }

    fn insert(&mut self, v: VoterId) {
        self.member[v.0] = true;
        let forest = self.election.forest();
        let reachable = match forest.parent(v) {
            None => true,
            Some(p) => self.active[p.0],
        };
        if !reachable {
            return;
        }
        self.stack.push(v);
        while let Some(u) = self.stack.pop() {
            self.active[u.0] = true;
            self.weight += self.election.weight(u);
            for &c in forest.children(u) {
                if self.member[c.0] {
                    self.stack.push(c);
                }
            }
        }
    }

    fn remove(&mut self, v: VoterId) {
        self.member[v.0] = false;
        if !self.active[v.0] {
            return;
        }
        let forest = self.election.forest();
        self.stack.push(v);
        while let Some(u) = self.stack.pop() {
            self.active[u.0] = false;
            self.weight -= self.election.weight(u);
            for &c in forest.children(u) {
                if self.active[c.0] {
                    self.stack.push(c);
                }
            }
        }
    }
}

/// Swing counts by coalition size, walking subsets in Gray-code order and
/// updating the active weight incrementally.
pub fn swing_counts_gray(election: &LiquidElection, voter: VoterId) -> Vec<u128> {
    let n = election.n();
    let q = election.quota();
    let others: Vec<VoterId> = (0..n).map(VoterId).filter(|&v| v != voter).collect();
    let mut counts = vec![0u128; n];
    let mut tracker = ActiveTracker::new(election);
    let mut size = 0usize;

    let mut check = |tracker: &mut ActiveTracker, size: usize| {
        if tracker.weight >= q {
            return;
        }
        tracker.insert(voter);
        if tracker.weight >= q {
            counts[size] += 1;
        }
        tracker.remove(voter);
    };

    check(&mut tracker, size);
    for step in 1u64..(1u64 << others.len()) {
        let v = others[step.trailing_zeros() as usize];
        if tracker.member[v.0] {
            tracker.remove(v);
            size -= 1;
        } else {
            tracker.insert(v);
            size += 1;
        }
        check(&mut tracker, size);
    }
    counts
}

pub(crate) fn banzhaf_from_counts(n: usize, counts: &[u128]) -> RationalValue {
    let total: u128 = counts.iter().sum();
    RationalValue::from_counts(&BigUint::from(total), &(BigUint::one() << (n - 1)))
}

pub(crate) fn shapley_from_counts(n: usize, counts: &[u128]) -> RationalValue {
    let factorials = factorials(n);
    let mut numer = BigUint::zero();
    for (s, &c) in counts.iter().enumerate() {
        if c != 0 {
            numer += &factorials[s] * &factorials[n - s - 1] * BigUint::from(c);
        }
    }
    RationalValue::from_counts(&numer, &factorials[n])
}

pub(crate) fn factorials(n: usize) -> Vec<BigUint> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(BigUint::one());
    for i in 1..=n {
        let next = &f[i - 1] * BigUint::from(i);
        f.push(next);
    }
    f
}

pub fn banzhaf_exact<G: EvaluableGame + ?Sized>(game: &G, voter: VoterId) -> Result<RationalValue> {
    guard(game)?;
    Ok(banzhaf_from_counts(game.n(), &game.swing_counts_by_size(voter)))
}

pub fn shapley_exact<G: EvaluableGame + ?Sized>(game: &G, voter: VoterId) -> Result<RationalValue> {
    guard(game)?;
    Ok(shapley_from_counts(game.n(), &game.swing_counts_by_size(voter)))
}

pub fn index_exact<G: EvaluableGame + ?Sized>(
    game: &G,
    voter: VoterId,
    kind: IndexKind,
) -> Result<RationalValue> {
    match kind {
        IndexKind::Banzhaf => banzhaf_exact(game, voter),
        IndexKind::ShapleyShubik => shapley_exact(game, voter),
    }
}

/// Every voter's value; voters are evaluated in parallel.
pub fn all_indices_exact<G: EvaluableGame + ?Sized>(game: &G, kind: IndexKind) -> Result<IndexReport> {
    guard(game)?;
    let values = (0..game.n())
        .into_par_iter()
        .map(|i| index_exact(game, VoterId(i), kind))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndexReport { kind, values })
}
