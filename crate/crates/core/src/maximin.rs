//! Maximin delegation: among acyclic profiles with exactly `k` gurus, find
//! one maximizing the smallest power value of any voter.

use rayon::prelude::*;

use crate::dp::index_dp;
use crate::error::{Error, Result};
use crate::exact::IndexKind;
use crate::graph::{Choice, DelegationProfile, LiquidElection, QuotaRule, SocialNetwork, VoterId, WeightAssignment};
use crate::rational::RationalValue;

pub const MAX_MAXIMIN_VOTERS: usize = 8;

#[derive(Clone, Debug)]
pub struct MaximinProblem {
    pub network: SocialNetwork,
    pub weights: WeightAssignment,
    pub quota: u64,
    pub rule: QuotaRule,
    pub gurus: usize,
    pub kind: IndexKind,
}

impl MaximinProblem {
    pub fn new(
        network: SocialNetwork,
        weights: WeightAssignment,
        quota: u64,
        rule: QuotaRule,
        gurus: usize,
        kind: IndexKind,
    ) -> Result<Self> {
        let n = network.n();
        if weights.len() != n {
            return Err(Error::MalformedInstance(format!("{} weights for {n} voters", weights.len())));
        }
        if gurus == 0 || gurus > n {
            return Err(Error::InvalidArgument(format!("guru count {gurus} outside 1..={n}")));
        }
        if !rule.admits(quota, weights.total()) {
            return Err(Error::QuotaOutOfRange {
                quota,
                total: weights.total(),
            });
        }
        Ok(Self {
            network,
            weights,
            quota,
            rule,
            gurus,
            kind,
        })
    }

    fn election(&self, profile: DelegationProfile) -> Result<LiquidElection> {
        LiquidElection::new_with_rule(self.network.clone(), self.weights.clone(), profile, self.quota, self.rule)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximinSolution {
    pub profile: DelegationProfile,
    /// Smallest value over all voters.
    pub mu: RationalValue,
    pub values: Vec<RationalValue>,
}

/// Smallest value over every voter.
pub fn mmwp_fullmin(election: &LiquidElection, kind: IndexKind) -> RationalValue {
    (0..election.n())
        .map(|i| index_dp(election, VoterId(i), kind))
        .min()
        .expect("elections have at least one voter")
}

/// Smallest Banzhaf value, taken over the forest's leaves only: a delegator
/// never has more power than the voter it delegates to.
pub fn mmwp_leafmin(election: &LiquidElection, kind: IndexKind) -> Result<RationalValue> {
    if kind != IndexKind::Banzhaf {
        return Err(Error::MeasureNotSupported("the leaf shortcut holds for the Banzhaf measure only"));
    }
    let mu = election
        .forest()
        .leaves()
        .map(|v| index_dp(election, v, kind))
        .min()
        .expect("a forest has at least one leaf");
    debug_assert_eq!(mu, mmwp_fullmin(election, kind));
    Ok(mu)
}

/// All acyclic profiles whose gurus are exactly `gurus`: every other voter
/// delegates to an out-neighbor and every chain ends at a guru.
pub fn profiles_with_gurus(network: &SocialNetwork, gurus: &[VoterId]) -> Vec<DelegationProfile> {
    let n = network.n();
    let mut choices = vec![Choice::Direct; n];
    let mut is_guru = vec![false; n];
    for g in gurus {
        is_guru[g.0] = true;
    }
    let followers: Vec<usize> = (0..n).filter(|&v| !is_guru[v]).collect();
    let mut assigned = is_guru.clone();
    let mut out = Vec::new();
    extend(network, &followers, 0, &mut choices, &mut assigned, &mut out);
    out
}

fn extend(
    network: &SocialNetwork,
    followers: &[usize],
    i: usize,
    choices: &mut [Choice],
    assigned: &mut [bool],
    out: &mut Vec<DelegationProfile>,
) {
    let Some(&v) = followers.get(i) else {
        out.push(DelegationProfile::from_choices(choices.to_vec()));
        return;
    };
    for &t in network.out_neighbors(VoterId(v)) {
        // Reject a choice that closes a cycle among the voters assigned so far.
        let mut u = t.0;
        let mut closes = false;
        while assigned[u] {
            if u == v {
                closes = true;
                break;
            }
            match choices[u] {
                Choice::Delegate(w) => u = w.0,
                Choice::Direct => break,
            }
        }
        if closes || u == v {
            continue;
        }
        choices[v] = Choice::Delegate(t);
        assigned[v] = true;
        extend(network, followers, i + 1, choices, assigned, out);
        assigned[v] = false;
        choices[v] = Choice::Direct;
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<VoterId>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| VoterId(i)).collect());
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return out;
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

pub fn mmwp_bruteforce(problem: &MaximinProblem) -> Result<MaximinSolution> {
    let n = problem.network.n();
    if n > MAX_MAXIMIN_VOTERS {
        return Err(Error::InstanceTooLargeForEnumeration {
            what: "voters",
            actual: n as u128,
            limit: MAX_MAXIMIN_VOTERS as u128,
        });
    }
    let best = combinations(n, problem.gurus)
        .into_par_iter()
        .flat_map_iter(|gurus| profiles_with_gurus(&problem.network, &gurus))
        .map(|profile| -> Result<(RationalValue, Vec<usize>, DelegationProfile)> {
            let e = problem.election(profile.clone())?;
            Ok((mmwp_fullmin(&e, problem.kind), profile.sort_key(), profile))
        })
        .try_reduce_with(|a, b| {
            let b_wins = b.0 > a.0 || (b.0 == a.0 && b.1 < a.1);
            Ok(if b_wins { b } else { a })
        })
        .transpose()?
        .ok_or(Error::NoFeasibleProfile(problem.gurus))?;
    let (mu, _, profile) = best;
    let e = problem.election(profile.clone())?;
    let values = (0..n).map(|i| index_dp(&e, VoterId(i), problem.kind)).collect();
    Ok(MaximinSolution { profile, mu, values })
}


#[cfg(test)]
mod tests {
    use super::fixtures::matching_gadget;
    use super::*;
    use crate::exact::index_exact;
    use crate::graph::fixtures::eight_voter;

    #[test]
    fn matching_gadget_optimum() {
        let p = matching_gadget(IndexKind::Banzhaf, 2);
        let sol = mmwp_bruteforce(&p).unwrap();
        assert_eq!(sol.mu, RationalValue::new(1, 8));
        let f = crate::graph::DelegationForest::build(&sol.profile, &p.weights);
        let mut sizes: Vec<usize> = f.gurus().map(|g| f.subtree_size(g)).collect();
        sizes.sort();
        assert_eq!(sizes, vec![3, 3]);
        assert_eq!(sol.profile, DelegationProfile::from_targets(&[2, 3, 4, 5, 4, 5]));
        assert_eq!(sol.profile.gurus().len(), 2);
    }

    #[test]
    fn unbalanced_split_is_worse() {
        let p = matching_gadget(IndexKind::Banzhaf, 2);
        // x1 and x2 both through y2 into z1: subtrees of sizes 5 and 1.
        let profile = DelegationProfile::from_targets(&[3, 3, 4, 4, 4, 5]);
        let e = p.election(profile).unwrap();
        assert!(mmwp_fullmin(&e, IndexKind::Banzhaf) < RationalValue::new(1, 8));
    }

    #[test]
    fn all_gurus_is_the_weighted_game() {
        let p = matching_gadget(IndexKind::ShapleyShubik, 6);
        let sol = mmwp_bruteforce(&p).unwrap();
        assert_eq!(sol.profile, DelegationProfile::all_direct(6));
        assert_eq!(sol.mu, RationalValue::new(1, 6));
    }

    #[test]
    fn disconnected_is_infeasible() {
        let p = MaximinProblem::new(
            SocialNetwork::new(3, [(0, 1)]).unwrap(),
            WeightAssignment::unit(3),
            2,
            QuotaRule::SuperMajority,
            1,
            IndexKind::Banzhaf,
        )
        .unwrap();
        assert_eq!(mmwp_bruteforce(&p), Err(Error::NoFeasibleProfile(1)));
    }

    #[test]
    fn leafmin_on_eight_voter() {
        let e = eight_voter();
        let full = (0..8)
            .map(|i| index_exact(&e, VoterId(i), IndexKind::Banzhaf).unwrap())
            .min()
            .unwrap();
        assert_eq!(mmwp_leafmin(&e, IndexKind::Banzhaf).unwrap(), full);
        assert!(matches!(
            mmwp_leafmin(&e, IndexKind::ShapleyShubik),
            Err(Error::MeasureNotSupported(_))
        ));
    }

    #[test]
    fn chain_and_star() {
        let chain = LiquidElection::new(
            SocialNetwork::new(4, [(1, 0), (2, 1), (3, 2)]).unwrap(),
            WeightAssignment::unit(4),
            DelegationProfile::from_targets(&[0, 0, 1, 2]),
            3,
        )
        .unwrap();
        assert_eq!(
            mmwp_leafmin(&chain, IndexKind::Banzhaf).unwrap(),
            index_dp(&chain, VoterId(3), IndexKind::Banzhaf)
        );
        let star = LiquidElection::new(
            SocialNetwork::new(4, [(1, 0), (2, 0), (3, 0)]).unwrap(),
            WeightAssignment::unit(4),
            DelegationProfile::from_targets(&[0, 0, 0, 0]),
            3,
        )
        .unwrap();
        assert_eq!(
            mmwp_leafmin(&star, IndexKind::Banzhaf).unwrap(),
            index_dp(&star, VoterId(2), IndexKind::Banzhaf)
        );
    }

    #[test]
    fn enumeration_counts() {
        // Complete graph on 3 voters with guru 0: 1 and 2 each pick 0 or the
        // other, minus the 1 <-> 2 cycle.
        let net = SocialNetwork::complete(3);
        assert_eq!(profiles_with_gurus(&net, &[VoterId(0)]).len(), 3);
        assert_eq!(combinations(5, 2).len(), 10);
    }
}
