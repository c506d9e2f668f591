//! Seeded random instance generators for experiments and tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{
    Choice, DelegationProfile, LiquidElection, PartialElection, SocialNetwork, VoterId,
    WeightAssignment,
};

#[derive(Clone, Copy, Debug)]
pub struct InstanceParams {
    pub n: usize,
    pub max_weight: u64,
    /// Probability of each ordered arc; `1.0` gives the complete digraph.
    pub arc_density: f64,
    /// Probability that a voter with an eligible out-neighbor delegates.
    pub delegation_rate: f64,
}

impl InstanceParams {
    pub fn new(n: usize, max_weight: u64) -> Self {
        Self {
            n,
            max_weight,
            arc_density: 0.5,
            delegation_rate: 0.6,
        }
    }

    pub fn density(mut self, p: f64) -> Self {
        self.arc_density = p;
        self
    }

    pub fn delegation_rate(mut self, p: f64) -> Self {
        self.delegation_rate = p;
        self
    }
}

pub fn random_network<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> SocialNetwork {
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && (density >= 1.0 || rng.random_bool(density.max(0.0))) {
                arcs.push((i, j));
            }
        }
    }
    SocialNetwork::new(n, arcs).expect("generated arcs are well formed")
}

pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize, max_weight: u64) -> WeightAssignment {
    WeightAssignment::new((0..n).map(|_| rng.random_range(1..=max_weight.max(1))).collect())
        .expect("weights are positive")
}

/// Random acyclic profile: voters are ranked by a random permutation and only
/// delegate to out-neighbors of higher rank.
pub fn random_profile<R: Rng + ?Sized>(
    rng: &mut R,
    network: &SocialNetwork,
    delegation_rate: f64,
) -> DelegationProfile {
    let n = network.n();
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    let choices = (0..n)
        .map(|i| {
            let up: Vec<VoterId> = network
                .out_neighbors(VoterId(i))
                .iter()
                .copied()
                .filter(|t| rank[t.0] > rank[i])
                .collect();
            if up.is_empty() || !rng.random_bool(delegation_rate.clamp(0.0, 1.0)) {
                Choice::Direct
            } else {
                Choice::Delegate(up[rng.random_range(0..up.len())])
            }
        })
        .collect();
    DelegationProfile::from_choices(choices)
}

pub fn random_partial<R: Rng + ?Sized>(rng: &mut R, params: InstanceParams) -> PartialElection {
    let network = random_network(rng, params.n, params.arc_density);
    let weights = random_weights(rng, params.n, params.max_weight);
    let profile = random_profile(rng, &network, params.delegation_rate);
    PartialElection::new(network, weights, profile).expect("generated profile is acyclic")
}

/// Random election with a quota drawn uniformly from `(Σw/2, Σw]`.
pub fn random_election<R: Rng + ?Sized>(rng: &mut R, params: InstanceParams) -> LiquidElection {
    let base = random_partial(rng, params);
    let total = base.total_weight();
    let quota = rng.random_range(total / 2 + 1..=total);
    base.with_quota(quota).expect("quota drawn from the valid range")
}
