//! Instance model: social network, weights, delegation profile and the
//! delegation forest derived from them.

use std::fmt;

use crate::error::{Error, Result};

/// Dense 0-based voter index. Displayed 1-based, matching the JSON format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VoterId(pub usize);

impl VoterId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

/// Directed social network. Arc `(i, j)` means `i` accepts to delegate to `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SocialNetwork {
    out_neighbors: Vec<Vec<VoterId>>,
    in_neighbors: Vec<Vec<VoterId>>,
}

impl SocialNetwork {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out_neighbors = vec![Vec::new(); n];
        let mut in_neighbors = vec![Vec::new(); n];
        for (from, to) in arcs {
            for v in [from, to] {
                if v >= n {
                    return Err(Error::VoterOutOfRange { voter: v, n });
                }
            }
            if from == to {
                return Err(Error::SelfLoop(VoterId(from)));
            }
            out_neighbors[from].push(VoterId(to));
            in_neighbors[to].push(VoterId(from));
        }
        for list in out_neighbors.iter_mut().chain(in_neighbors.iter_mut()) {
            list.sort_unstable();
        }
        for outs in &out_neighbors {
            if let Some(w) = outs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateArc(w[0]));
            }
        }
        Ok(Self {
            out_neighbors,
            in_neighbors,
        })
    }

    /// Complete digraph on `n` voters.
    pub fn complete(n: usize) -> Self {
        let arcs = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
        Self::new(n, arcs).expect("complete digraph is well formed")
    }

    pub fn n(&self) -> usize {
        self.out_neighbors.len()
    }

    pub fn out_neighbors(&self, v: VoterId) -> &[VoterId] {
        &self.out_neighbors[v.0]
    }

    pub fn in_neighbors(&self, v: VoterId) -> &[VoterId] {
        &self.in_neighbors[v.0]
    }

    pub fn has_arc(&self, from: VoterId, to: VoterId) -> bool {
        self.out_neighbors[from.0].binary_search(&to).is_ok()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VoterId, VoterId)> + '_ {
        self.out_neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, outs)| outs.iter().map(move |&j| (VoterId(i), j)))
    }

    pub fn arc_count(&self) -> usize {
        self.out_neighbors.iter().map(Vec::len).sum()
    }
}

/// Positive integer voting weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightAssignment(Vec<u64>);

impl WeightAssignment {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(Error::NonPositiveWeight(VoterId(i)));
        }
        Ok(Self(weights))
    }

    pub fn unit(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn get(&self, v: VoterId) -> u64 {
        self.0[v.0]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// What a single voter does with its vote.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Choice {
    /// Votes directly (the voter is a guru).
    Direct,
    Delegate(VoterId),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DelegationProfile(Vec<Choice>);

impl DelegationProfile {
    /// Unchecked constructor; use [`DelegationProfile::validated`] or
    /// [`PartialElection::new`] to enforce legality and acyclicity.
    pub fn from_choices(choices: Vec<Choice>) -> Self {
        Self(choices)
    }

    pub fn all_direct(n: usize) -> Self {
        Self(vec![Choice::Direct; n])
    }

    /// Builds from a target array where `targets[i] == i` means voting directly.
    pub fn from_targets(targets: &[usize]) -> Self {
        Self(
            targets
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    if t == i {
                        Choice::Direct
                    } else {
                        Choice::Delegate(VoterId(t))
                    }
                })
                .collect(),
        )
    }

    pub fn validated(choices: Vec<Choice>, network: &SocialNetwork) -> Result<Self> {
        let profile = Self(choices);
        profile.check(network)?;
        Ok(profile)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn choice(&self, v: VoterId) -> Choice {
        self.0[v.0]
    }

    pub fn choices(&self) -> &[Choice] {
        &self.0
    }

    /// The voter `v` delegates to, if any.
    pub fn target(&self, v: VoterId) -> Option<VoterId> {
        match self.0[v.0] {
            Choice::Direct => None,
            Choice::Delegate(t) => Some(t),
        }
    }

    /// `d(i)` as an index, with `d(i) = i` for direct voters.
    pub fn target_or_self(&self, v: VoterId) -> VoterId {
        self.target(v).unwrap_or(v)
    }

    /// Key for lexicographic tie-breaking between profiles.
    pub fn sort_key(&self) -> Vec<usize> {
        (0..self.0.len())
            .map(|i| self.target_or_self(VoterId(i)).0)
            .collect()
    }

    pub fn gurus(&self) -> Vec<VoterId> {
        (0..self.0.len())
            .map(VoterId)
            .filter(|&v| self.target(v).is_none())
            .collect()
    }

    /// Number of voters whose choice differs from `other`.
    pub fn distance(&self, other: &DelegationProfile) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Checks arc legality and acyclicity against `network`.
    pub fn check(&self, network: &SocialNetwork) -> Result<()> {
        let n = network.n();
        if self.0.len() != n {
            return Err(Error::MalformedInstance(format!(
                "profile has {} entries for {} voters",
                self.0.len(),
                n
            )));
        }
        for (i, c) in self.0.iter().enumerate() {
            if let Choice::Delegate(t) = *c {
                if t.0 >= n {
                    return Err(Error::VoterOutOfRange { voter: t.0, n });
                }
                if t.0 == i {
                    return Err(Error::SelfLoop(t));
                }
                if !network.has_arc(VoterId(i), t) {
                    return Err(Error::ArcNotInNetwork {
                        from: VoterId(i),
                        to: t,
                    });
                }
            }
        }
        if let Some(cycle) = self.find_cycle() {
            return Err(Error::CycleInDelegations(cycle));
        }
        Ok(())
    }

    /// Iterative chain-following with three-state marks; O(n).
    pub fn find_cycle(&self) -> Option<Vec<VoterId>> {
        const NEW: u8 = 0;
        const ON_PATH: u8 = 1;
        const DONE: u8 = 2;
        let n = self.0.len();
        let mut state = vec![NEW; n];
        let mut path = Vec::new();
        for start in 0..n {
            if state[start] != NEW {
                continue;
            }
            path.clear();
            let mut v = start;
            loop {
                match state[v] {
                    DONE => break,
                    ON_PATH => {
                        let pos = path.iter().position(|&p| p == v).expect("on path");
                        return Some(path[pos..].iter().map(|&p| VoterId(p)).collect());
                    }
                    _ => {}
                }
                state[v] = ON_PATH;
                path.push(v);
                match self.0[v] {
                    Choice::Direct => break,
                    Choice::Delegate(t) if t.0 < n => v = t.0,
                    Choice::Delegate(_) => break,
                }
            }
            for &p in &path {
                state[p] = DONE;
            }
        }
        None
    }

    /// Applies `(voter, new choice)` changes. Returns the new profile and the
    /// number of voters whose choice actually differs from `self`.
    pub fn apply_changes(
        &self,
        network: &SocialNetwork,
        changes: &[(VoterId, Choice)],
    ) -> Result<(DelegationProfile, usize)> {
        let mut next = self.0.clone();
        for &(v, c) in changes {
            if v.0 >= next.len() {
                return Err(Error::VoterOutOfRange {
                    voter: v.0,
                    n: next.len(),
                });
            }
            next[v.0] = c;
        }
        let next = DelegationProfile::validated(next, network)?;
        let count = next.distance(self);
        Ok((next, count))
    }
}

/// Acyclic view of a delegation profile: gurus, trees and accumulated weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelegationForest {
    parent: Vec<Option<VoterId>>,
    guru: Vec<VoterId>,
    children: Vec<Vec<VoterId>>,
    acc_weight: Vec<u64>,
    subtree_weight: Vec<u64>,
    subtree_size: Vec<usize>,
    depth: Vec<usize>,
    /// Voters ordered so every voter appears after its delegate.
    top_down: Vec<VoterId>,
}

impl DelegationForest {
    /// Builds the forest. The profile must be acyclic.
    pub fn build(profile: &DelegationProfile, weights: &WeightAssignment) -> Self {
        let n = profile.len();
        let parent: Vec<Option<VoterId>> = (0..n).map(|i| profile.target(VoterId(i))).collect();
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[p.0].push(VoterId(i));
            }
        }

        // BFS from gurus gives a top-down order.
        let mut top_down = Vec::with_capacity(n);
        let mut depth = vec![0; n];
        let mut guru = vec![VoterId(0); n];
        for g in (0..n).filter(|&i| parent[i].is_none()) {
            guru[g] = VoterId(g);
            let start = top_down.len();
            top_down.push(VoterId(g));
            let mut head = start;
            while head < top_down.len() {
                let v = top_down[head];
                head += 1;
                for &c in &children[v.0] {
                    depth[c.0] = depth[v.0] + 1;
                    guru[c.0] = VoterId(g);
                    top_down.push(c);
                }
            }
        }
        assert_eq!(top_down.len(), n, "delegation profile must be acyclic");

        let mut subtree_weight: Vec<u64> = weights.as_slice().to_vec();
        let mut subtree_size = vec![1usize; n];
        for &v in top_down.iter().rev() {
            if let Some(p) = parent[v.0] {
                subtree_weight[p.0] += subtree_weight[v.0];
                subtree_size[p.0] += subtree_size[v.0];
            }
        }
        let acc_weight = (0..n)
            .map(|i| if parent[i].is_none() { subtree_weight[i] } else { 0 })
            .collect();

        Self {
            parent,
            guru,
            children,
            acc_weight,
            subtree_weight,
            subtree_size,
            depth,
            top_down,
        }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: VoterId) -> Option<VoterId> {
        self.parent[v.0]
    }

    pub fn guru(&self, v: VoterId) -> VoterId {
        self.guru[v.0]
    }

    pub fn is_guru(&self, v: VoterId) -> bool {
        self.parent[v.0].is_none()
    }

    pub fn gurus(&self) -> impl Iterator<Item = VoterId> + '_ {
        (0..self.n()).map(VoterId).filter(|&v| self.is_guru(v))
    }

    pub fn children(&self, v: VoterId) -> &[VoterId] {
        &self.children[v.0]
    }

    /// `α_d(v)`: subtree weight for gurus, zero for followers.
    pub fn acc_weight(&self, v: VoterId) -> u64 {
        self.acc_weight[v.0]
    }

    /// Total weight of the subtree hanging from `v` (defined for every voter).
    pub fn subtree_weight(&self, v: VoterId) -> u64 {
        self.subtree_weight[v.0]
    }

    pub fn subtree_size(&self, v: VoterId) -> usize {
        self.subtree_size[v.0]
    }

    pub fn depth(&self, v: VoterId) -> usize {
        self.depth[v.0]
    }

    pub fn top_down(&self) -> &[VoterId] {
        &self.top_down
    }

    /// Delegation chain from `v` to its guru, both included.
    pub fn chain(&self, v: VoterId) -> Vec<VoterId> {
        let mut out = Vec::with_capacity(self.depth[v.0] + 1);
        let mut cur = Some(v);
        while let Some(c) = cur {
            out.push(c);
            cur = self.parent[c.0];
        }
        out
    }

    /// Voters `v` delegates to directly or indirectly (chain minus `v`).
    pub fn delegates_of(&self, v: VoterId) -> Vec<VoterId> {
        let mut chain = self.chain(v);
        chain.remove(0);
        chain
    }

    /// All voters of the subtree rooted at `v`, `v` first.
    pub fn subtree(&self, v: VoterId) -> Vec<VoterId> {
        let mut out = vec![v];
        let mut head = 0;
        while head < out.len() {
            let u = out[head];
            head += 1;
            out.extend_from_slice(&self.children[u.0]);
        }
        out
    }

    /// Whether `anc` lies on the chain from `v` to its guru (`v` included).
    pub fn in_chain(&self, v: VoterId, anc: VoterId) -> bool {
        let mut cur = Some(v);
        while let Some(c) = cur {
            if c == anc {
                return true;
            }
            cur = self.parent[c.0];
        }
        false
    }

    /// Leaves of the forest: voters nobody delegates to (isolated gurus included).
    pub fn leaves(&self) -> impl Iterator<Item = VoterId> + '_ {
        (0..self.n())
            .map(VoterId)
            .filter(|&v| self.children[v.0].is_empty())
    }
}

/// Network, weights and delegations without a quota.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialElection {
    network: SocialNetwork,
    weights: WeightAssignment,
    profile: DelegationProfile,
    forest: DelegationForest,
}

impl PartialElection {
    pub fn new(
        network: SocialNetwork,
        weights: WeightAssignment,
        profile: DelegationProfile,
    ) -> Result<Self> {
        if weights.len() != network.n() {
            return Err(Error::MalformedInstance(format!(
                "{} weights for {} voters",
                weights.len(),
                network.n()
            )));
        }
        profile.check(&network)?;
        let forest = DelegationForest::build(&profile, &weights);
        Ok(Self {
            network,
            weights,
            profile,
            forest,
        })
    }

    pub fn n(&self) -> usize {
        self.network.n()
    }

    pub fn network(&self) -> &SocialNetwork {
        &self.network
    }

    pub fn weights(&self) -> &WeightAssignment {
        &self.weights
    }

    pub fn weight(&self, v: VoterId) -> u64 {
        self.weights.get(v)
    }

    pub fn profile(&self) -> &DelegationProfile {
        &self.profile
    }

    pub fn forest(&self) -> &DelegationForest {
        &self.forest
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.total()
    }

    /// Same network and weights, different profile.
    pub fn with_profile(&self, profile: DelegationProfile) -> Result<Self> {
        Self::new(self.network.clone(), self.weights.clone(), profile)
    }

    pub fn with_quota(self, quota: u64) -> Result<LiquidElection> {
        LiquidElection::from_partial(self, quota)
    }

    /// Applies changes and returns the rebuilt election with the change count.
    pub fn apply_changes(&self, changes: &[(VoterId, Choice)]) -> Result<(Self, usize)> {
        let (profile, count) = self.profile.apply_changes(&self.network, changes)?;
        Ok((self.with_profile(profile)?, count))
    }
}

/// Admissible quota range.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum QuotaRule {
    /// `total/2 < q <= total`.
    #[default]
    SuperMajority,
    /// `1 <= q <= total`; needed for small textbook instances with a low quota.
    Positive,
}

impl QuotaRule {
    pub fn admits(self, quota: u64, total: u64) -> bool {
        match self {
            Self::SuperMajority => 2 * quota > total && quota <= total,
            Self::Positive => quota >= 1 && quota <= total,
        }
    }
}

/// A liquid democracy election: the game instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiquidElection {
    base: PartialElection,
    quota: u64,
}

impl LiquidElection {
    pub fn new(
        network: SocialNetwork,
        weights: WeightAssignment,
        profile: DelegationProfile,
        quota: u64,
    ) -> Result<Self> {
        Self::from_partial(PartialElection::new(network, weights, profile)?, quota)
    }

    pub fn from_partial(base: PartialElection, quota: u64) -> Result<Self> {
        Self::from_partial_with_rule(base, quota, QuotaRule::SuperMajority)
    }

    pub fn new_with_rule(
        network: SocialNetwork,
        weights: WeightAssignment,
        profile: DelegationProfile,
        quota: u64,
        rule: QuotaRule,
    ) -> Result<Self> {
        Self::from_partial_with_rule(PartialElection::new(network, weights, profile)?, quota, rule)
    }

    pub fn from_partial_with_rule(base: PartialElection, quota: u64, rule: QuotaRule) -> Result<Self> {
        let total = base.total_weight();
        if !rule.admits(quota, total) {
            return Err(Error::QuotaOutOfRange { quota, total });
        }
        Ok(Self { base, quota })
    }

    pub fn quota(&self) -> u64 {
        self.quota
    }

    pub fn partial(&self) -> &PartialElection {
        &self.base
    }

    pub fn into_partial(self) -> PartialElection {
        self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn network(&self) -> &SocialNetwork {
        self.base.network()
    }

    pub fn weights(&self) -> &WeightAssignment {
        self.base.weights()
    }

    pub fn weight(&self, v: VoterId) -> u64 {
        self.base.weight(v)
    }

    pub fn profile(&self) -> &DelegationProfile {
        self.base.profile()
    }

    pub fn forest(&self) -> &DelegationForest {
        self.base.forest()
    }

    pub fn total_weight(&self) -> u64 {
        self.base.total_weight()
    }

    pub fn with_profile(&self, profile: DelegationProfile) -> Result<Self> {
        Ok(Self {
            base: self.base.with_profile(profile)?,
            quota: self.quota,
        })
    }

    pub fn apply_changes(&self, changes: &[(VoterId, Choice)]) -> Result<(Self, usize)> {
        let (base, count) = self.base.apply_changes(changes)?;
        Ok((
            Self {
                base,
                quota: self.quota,
            },
            count,
        ))
    }
}

/// Validates raw components into a full election (with quota) or a partial one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidatedInstance {
    Election(LiquidElection),
    Partial(PartialElection),
}

pub fn validate(
    network: SocialNetwork,
    weights: WeightAssignment,
    profile: DelegationProfile,
    quota: Option<u64>,
) -> Result<ValidatedInstance> {
    validate_with_rule(network, weights, profile, quota, QuotaRule::SuperMajority)
}

pub fn validate_with_rule(
    network: SocialNetwork,
    weights: WeightAssignment,
    profile: DelegationProfile,
    quota: Option<u64>,
    rule: QuotaRule,
) -> Result<ValidatedInstance> {
    let base = PartialElection::new(network, weights, profile)?;
    Ok(match quota {
        Some(q) => ValidatedInstance::Election(LiquidElection::from_partial_with_rule(base, q, rule)?),
        None => ValidatedInstance::Partial(base),
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::eight_voter;
    use super::*;
    use proptest::prelude::*;

    fn v(i: usize) -> VoterId {
        VoterId(i - 1)
    }

    #[test]
    fn eight_voter_gurus_and_accumulated_weights() {
        let e = eight_voter();
        let gurus: Vec<_> = e.forest().gurus().collect();
        assert_eq!(gurus, vec![v(3), v(8)]);
        assert_eq!(e.forest().acc_weight(v(3)), 3);
        assert_eq!(e.forest().acc_weight(v(8)), 5);
        for i in [1, 2, 4, 5, 6, 7] {
            assert_eq!(e.forest().acc_weight(v(i)), 0);
        }
        assert_eq!(e.forest().chain(v(5)), vec![v(5), v(6), v(7), v(8)]);
        assert_eq!(e.forest().delegates_of(v(6)), vec![v(7), v(8)]);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let net = SocialNetwork::complete(3);
        let profile = DelegationProfile::from_targets(&[1, 0, 2]);
        let err = PartialElection::new(net, WeightAssignment::unit(3), profile).unwrap_err();
        match err {
            Error::CycleInDelegations(c) => {
                let mut c = c;
                c.sort();
                assert_eq!(c, vec![VoterId(0), VoterId(1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quota_at_half_is_rejected() {
        let net = SocialNetwork::complete(4);
        let err = LiquidElection::new(
            net.clone(),
            WeightAssignment::unit(4),
            DelegationProfile::all_direct(4),
            2,
        )
        .unwrap_err();
        assert_eq!(err, Error::QuotaOutOfRange { quota: 2, total: 4 });
        assert!(LiquidElection::new(
            net.clone(),
            WeightAssignment::unit(4),
            DelegationProfile::all_direct(4),
            5
        )
        .is_err());
        assert!(LiquidElection::new(net, WeightAssignment::unit(4), DelegationProfile::all_direct(4), 3).is_ok());
    }

    #[test]
    fn illegal_arc_and_zero_weight() {
        let net = SocialNetwork::new(3, [(0, 1)]).unwrap();
        let err = DelegationProfile::validated(
            vec![Choice::Direct, Choice::Delegate(VoterId(2)), Choice::Direct],
            &net,
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::ArcNotInNetwork {
                from: VoterId(1),
                to: VoterId(2)
            }
        );
        assert_eq!(
            WeightAssignment::new(vec![1, 0, 2]).unwrap_err(),
            Error::NonPositiveWeight(VoterId(1))
        );
        assert!(matches!(
            SocialNetwork::new(2, [(0, 0)]),
            Err(Error::SelfLoop(_))
        ));
    }

    #[test]
    fn all_direct_profile_is_identity() {
        let w = WeightAssignment::new(vec![2, 5, 1]).unwrap();
        let f = DelegationForest::build(&DelegationProfile::all_direct(3), &w);
        for i in 0..3 {
            assert_eq!(f.guru(VoterId(i)), VoterId(i));
            assert_eq!(f.acc_weight(VoterId(i)), w.get(VoterId(i)));
        }
    }

    #[test]
    fn single_chain() {
        let net = SocialNetwork::new(3, [(0, 1), (1, 2)]).unwrap();
        let e = PartialElection::new(
            net,
            WeightAssignment::unit(3),
            DelegationProfile::from_targets(&[1, 2, 2]),
        )
        .unwrap();
        assert_eq!(e.forest().chain(VoterId(0)), vec![VoterId(0), VoterId(1), VoterId(2)]);
        assert_eq!(e.forest().acc_weight(VoterId(2)), 3);
    }

    #[test]
    fn apply_changes_cases() {
        let e = eight_voter();
        let (e2, count) = e.apply_changes(&[(v(1), Choice::Direct)]).unwrap();
        assert_eq!(count, 1);
        assert_eq!(e2.forest().gurus().collect::<Vec<_>>(), vec![v(1), v(3), v(8)]);

        let (same, count) = e.apply_changes(&[]).unwrap();
        assert_eq!(count, 0);
        assert_eq!(same.profile(), e.profile());

        // 7 -> 4 while 4 -> 7 closes a 2-cycle.
        let err = e.apply_changes(&[(v(7), Choice::Delegate(v(4)))]).unwrap_err();
        assert!(matches!(err, Error::CycleInDelegations(_)));
    }

    /// Random acyclic profile: voters delegate only to higher-ranked voters of
    /// a random permutation.
    fn arb_partial() -> impl Strategy<Value = PartialElection> {
        (1usize..12)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec(1u64..5, n),
                    Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                    proptest::collection::vec(proptest::option::of(0usize..64), n),
                )
            })
            .prop_map(|(n, weights, perm, picks)| {
                let mut rank = vec![0; n];
                for (r, &v) in perm.iter().enumerate() {
                    rank[v] = r;
                }
                let targets: Vec<usize> = (0..n)
                    .map(|i| {
                        let higher: Vec<usize> = (0..n).filter(|&j| rank[j] > rank[i]).collect();
                        match picks[i] {
                            Some(p) if !higher.is_empty() => higher[p % higher.len()],
                            _ => i,
                        }
                    })
                    .collect();
                PartialElection::new(
                    SocialNetwork::complete(n),
                    WeightAssignment::new(weights).unwrap(),
                    DelegationProfile::from_targets(&targets),
                )
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn forest_invariants(e in arb_partial()) {
            let f = e.forest();
            let total: u64 = f.gurus().map(|g| f.acc_weight(g)).sum();
            prop_assert_eq!(total, e.total_weight());
            for i in 0..e.n() {
                let vi = VoterId(i);
                let chain = f.chain(vi);
                prop_assert_eq!(chain[0], vi);
                prop_assert_eq!(*chain.last().unwrap(), f.guru(vi));
                prop_assert_eq!(f.is_guru(vi), e.profile().choice(vi) == Choice::Direct);
                if let Some(p) = e.profile().target(vi) {
                    prop_assert_eq!(f.guru(vi), f.guru(p));
                    let mut expect = vec![vi];
                    expect.extend(f.chain(p));
                    prop_assert_eq!(chain, expect);
                }
            }
            prop_assert_eq!(&DelegationForest::build(e.profile(), e.weights()), f);
        }

        #[test]
        fn apply_changes_matches_rebuild(e in arb_partial(), who in 0usize..12) {
            let who = VoterId(who % e.n());
            if let Ok((changed, count)) = e.apply_changes(&[(who, Choice::Direct)]) {
                let rebuilt = DelegationForest::build(changed.profile(), e.weights());
                prop_assert_eq!(changed.forest(), &rebuilt);
                prop_assert_eq!(count, usize::from(e.profile().choice(who) != Choice::Direct));
            }
        }
    }
}
