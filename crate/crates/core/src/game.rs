//! Coalition evaluation for delegative simple games.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Choice, LiquidElection, VoterId};

/// Exact coalition bitmask; enumeration paths are limited to 64 voters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(pub u64);

pub const MAX_COALITION_VOTERS: usize = 64;

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_COALITION_VOTERS);
        if n == 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << n) - 1)
        }
    }

    pub fn from_voters(voters: impl IntoIterator<Item = VoterId>) -> Self {
        voters.into_iter().fold(Self::EMPTY, |c, v| c.with(v))
    }

    #[inline]
    pub fn contains(self, v: VoterId) -> bool {
        self.0 >> v.0 & 1 == 1
    }

    #[inline]
    pub fn with(self, v: VoterId) -> Self {
        Self(self.0 | 1 << v.0)
    }

    #[inline]
    pub fn without(self, v: VoterId) -> Self {
        Self(self.0 & !(1 << v.0))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn members(self) -> impl Iterator<Item = VoterId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(VoterId(i))
        })
    }
}

/// A simple game: voters `0..n` and a 0/1 characteristic function.
pub trait EvaluableGame: Sync {
    fn n(&self) -> usize;

    fn value(&self, coalition: Coalition) -> bool;

    /// `N_s`: number of coalitions of size `s` not containing `voter` for
    /// which `voter` is a swing agent, for `s` in `0..n`.
    fn swing_counts_by_size(&self, voter: VoterId) -> Vec<u128> {
        crate::exact::swing_counts_plain(self, voter)
    }
}

impl EvaluableGame for LiquidElection {
    fn n(&self) -> usize {
        LiquidElection::n(self)
    }

    fn value(&self, coalition: Coalition) -> bool {
        coalition_weight(self, coalition) >= self.quota()
    }

    fn swing_counts_by_size(&self, voter: VoterId) -> Vec<u128> {
        crate::exact::swing_counts_gray(self, voter)
    }
}

/// Members of `coalition` whose whole chain to their guru lies in `coalition`.
pub fn active_agents(election: &LiquidElection, coalition: Coalition) -> Coalition {
    let forest = election.forest();
    let mut active = 0u64;
    for &v in forest.top_down() {
        if !coalition.contains(v) {
            continue;
        }
        let ok = match forest.parent(v) {
            None => true,
            Some(p) => active >> p.0 & 1 == 1,
        };
        if ok {
            active |= 1 << v.0;
        }
    }
    Coalition(active)
}

/// `γ_d(C)`: total weight of the active agents of `coalition`.
pub fn coalition_weight(election: &LiquidElection, coalition: Coalition) -> u64 {
    let forest = election.forest();
    let mut active = 0u64;
    let mut weight = 0;
    for &v in forest.top_down() {
        if !coalition.contains(v) {
            continue;
        }
        let ok = match forest.parent(v) {
            None => true,
            Some(p) => active >> p.0 & 1 == 1,
        };
        if ok {
            active |= 1 << v.0;
            weight += election.weight(v);
        }
    }
    weight
}

pub fn char_value<G: EvaluableGame + ?Sized>(game: &G, coalition: Coalition) -> u8 {
    u8::from(game.value(coalition))
}

/// Whether adding `voter` turns `coalition` from losing into winning.
pub fn is_swing<G: EvaluableGame + ?Sized>(
    game: &G,
    voter: VoterId,
    coalition: Coalition,
) -> Result<bool> {
    if coalition.contains(voter) {
        return Err(Error::MemberAlreadyInCoalition(voter));
    }
    Ok(!game.value(coalition) && game.value(coalition.with(voter)))
}

/// A follower whose chain (excluding herself) already meets the quota.
pub fn is_distant(election: &LiquidElection, voter: VoterId) -> bool {
    let above: u64 = election
        .forest()
        .delegates_of(voter)
        .iter()
        .map(|&v| election.weight(v))
        .sum();
    !election.forest().is_guru(voter) && above >= election.quota()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComposeMode {
    /// Both parts must win.
    And,
    /// Either part wins.
    Or,
}

#[derive(Clone, Debug)]
struct Part {
    election: LiquidElection,
    /// Universe position of each local voter.
    positions: Vec<usize>,
}

impl Part {
    fn restrict(&self, coalition: Coalition) -> Coalition {
        let mut local = 0u64;
        for (l, &p) in self.positions.iter().enumerate() {
            if coalition.0 >> p & 1 == 1 {
                local |= 1 << l;
            }
        }
        Coalition(local)
    }
}

/// Meet or join of two elections over the union of their voters.
#[derive(Clone, Debug)]
pub struct ComposedGame {
    mode: ComposeMode,
    parts: [Part; 2],
    universe: Vec<usize>,
}

impl ComposedGame {
    pub fn mode(&self) -> ComposeMode {
        self.mode
    }

    /// Global labels of the voters, indexed by universe position.
    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    pub fn position_of(&self, label: usize) -> Option<VoterId> {
        self.universe.binary_search(&label).ok().map(VoterId)
    }
}

impl EvaluableGame for ComposedGame {
    fn n(&self) -> usize {
        self.universe.len()
    }

    fn value(&self, coalition: Coalition) -> bool {
        let a = self.parts[0].election.value(self.parts[0].restrict(coalition));
        let b = self.parts[1].election.value(self.parts[1].restrict(coalition));
        match self.mode {
            ComposeMode::And => a && b,
            ComposeMode::Or => a || b,
        }
    }
}

/// Composes two elections whose voters carry global labels `labels1` and
/// `labels2`. Shared voters must have equal weights and identical
/// delegations that stay inside the shared region.
pub fn compose(
    e1: &LiquidElection,
    labels1: &[usize],
    e2: &LiquidElection,
    labels2: &[usize],
    mode: ComposeMode,
) -> Result<ComposedGame> {
    for (e, labels) in [(e1, labels1), (e2, labels2)] {
        if labels.len() != e.n() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for an election of {} voters",
                labels.len(),
                e.n()
            )));
        }
        let mut sorted = labels.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate voter label".into()));
        }
    }

    let local2: BTreeMap<usize, usize> = labels2.iter().enumerate().map(|(l, &g)| (g, l)).collect();
    let label_of = |labels: &[usize], c: Choice, me: usize| match c {
        Choice::Direct => labels[me],
        Choice::Delegate(t) => labels[t.0],
    };
    for (l1, &g) in labels1.iter().enumerate() {
        let Some(&l2) = local2.get(&g) else { continue };
        if e1.weight(VoterId(l1)) != e2.weight(VoterId(l2)) {
            return Err(Error::IncompatibleOverlap(g));
        }
        let t1 = label_of(labels1, e1.profile().choice(VoterId(l1)), l1);
        let t2 = label_of(labels2, e2.profile().choice(VoterId(l2)), l2);
        if t1 != t2 {
            return Err(Error::IncompatibleOverlap(g));
        }
    }

    let mut universe: Vec<usize> = labels1.iter().chain(labels2).copied().collect();
    universe.sort_unstable();
    universe.dedup();
    if universe.len() > MAX_COALITION_VOTERS {
        return Err(Error::InstanceTooLargeForEnumeration {
            what: "composed universe",
            actual: universe.len() as u128,
            limit: MAX_COALITION_VOTERS as u128,
        });
    }
    let positions = |labels: &[usize]| {
        labels
            .iter()
            .map(|g| universe.binary_search(g).expect("label in universe"))
            .collect::<Vec<_>>()
    };
    let parts = [
        Part {
            election: e1.clone(),
            positions: positions(labels1),
        },
        Part {
            election: e2.clone(),
            positions: positions(labels2),
        },
    ];
    Ok(ComposedGame {
        mode,
        parts,
        universe,
    })
}
