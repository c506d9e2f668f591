//! Weight maximization: can `i*` gather at least `τ` voting weight with at
//! most `k` delegation changes?
//!
//! All solvers first make `i*` a guru (one change if it follows someone),
//! since a follower accumulates nothing.

mod colorcoding;
mod costgraph;
mod full_support;
mod vbamw;
mod xp;

pub use colorcoding::{solve_fpt_colorcoding, ColorCodingStats};
pub use costgraph::{build_cost_graph, CostArc, CostedDigraph};
pub use full_support::solve_full_support;
pub use vbamw::{vbamw, Epsilon, VbamwOutcome};
pub use xp::solve_xp_reqbar;

use rayon::prelude::*;

use crate::bribery::{neighborhood_size_bound, Neighborhood};
use crate::error::{Error, Result};
use crate::graph::{Choice, DelegationForest, DelegationProfile, PartialElection, VoterId};

#[derive(Clone, Debug)]
pub struct WeightMaxProblem {
    pub election: PartialElection,
    pub target: VoterId,
    pub budget: usize,
    pub threshold: u64,
}

impl WeightMaxProblem {
    pub fn new(election: PartialElection, target: VoterId, budget: usize, threshold: u64) -> Result<Self> {
        if target.0 >= election.n() {
            return Err(Error::VoterOutOfRange {
                voter: target.0,
                n: election.n(),
            });
        }
        if threshold == 0 {
            return Err(Error::InvalidArgument("threshold must be at least 1".to_string()));
        }
        Ok(Self {
            election,
            target,
            budget,
            threshold,
        })
    }

    /// Extra weight `i*` needs: `τ - α_d(i*)`.
    pub fn req(&self) -> i64 {
        self.threshold as i64 - self.election.forest().acc_weight(self.target) as i64
    }

    /// Weight `i*` can do without: `Σw - τ`.
    pub fn req_bar(&self) -> i64 {
        self.election.total_weight() as i64 - self.threshold as i64
    }

    /// Checks a candidate profile and returns `(α_{d'}(i*), changes)`.
    pub fn evaluate(&self, profile: &DelegationProfile) -> Result<(u64, usize)> {
        profile.check(self.election.network())?;
        let changes = profile.distance(self.election.profile());
        let forest = DelegationForest::build(profile, self.election.weights());
        Ok((forest.acc_weight(self.target), changes))
    }

    /// A witness must be feasible, within budget and reach the threshold.
    pub fn is_witness(&self, profile: &DelegationProfile) -> bool {
        matches!(self.evaluate(profile), Ok((w, c)) if c <= self.budget && w >= self.threshold)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WeightMaxConfig {
    pub max_req: u64,
    pub max_req_bar: u64,
    pub max_enum_voters: usize,
    pub max_neighborhood: u128,
}

impl Default for WeightMaxConfig {
    fn default() -> Self {
        Self {
            max_req: 8,
            max_req_bar: 6,
            max_enum_voters: 10,
            max_neighborhood: 20_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMaxOutcome {
    pub decision: bool,
    /// Best profile found; a witness when `decision` holds.
    pub profile: DelegationProfile,
    pub weight: u64,
    pub changes: usize,
}

impl WeightMaxOutcome {
    pub fn witness(&self) -> Option<&DelegationProfile> {
        self.decision.then_some(&self.profile)
    }

    fn from_profile(problem: &WeightMaxProblem, profile: DelegationProfile) -> Result<Self> {
        let (weight, changes) = problem.evaluate(&profile)?;
        Ok(Self {
            decision: changes <= problem.budget && weight >= problem.threshold,
            profile,
            weight,
            changes,
        })
    }

    fn no(problem: &WeightMaxProblem) -> Self {
        let e = &problem.election;
        Self {
            decision: false,
            profile: e.profile().clone(),
            weight: e.forest().acc_weight(problem.target),
            changes: 0,
        }
    }
}

/// The instance with `i*` voting directly and the budget that remains.
#[derive(Clone, Debug)]
pub(crate) struct Normalized {
    pub election: PartialElection,
    pub budget: usize,
}

pub(crate) fn normalize(problem: &WeightMaxProblem) -> Result<Option<Normalized>> {
    let e = &problem.election;
    if e.forest().is_guru(problem.target) {
        return Ok(Some(Normalized {
            election: e.clone(),
            budget: problem.budget,
        }));
    }
    if problem.budget == 0 {
        return Ok(None);
    }
    let (election, _) = e.apply_changes(&[(problem.target, Choice::Direct)])?;
    Ok(Some(Normalized {
        election,
        budget: problem.budget - 1,
    }))
}

/// Exhaustive search over every profile within `k` changes.
pub fn wmaxp_exact(problem: &WeightMaxProblem, config: &WeightMaxConfig) -> Result<WeightMaxOutcome> {
    let e = &problem.election;
    if e.n() > config.max_enum_voters {
        return Err(Error::InstanceTooLargeForEnumeration {
            what: "voters",
            actual: e.n() as u128,
            limit: config.max_enum_voters as u128,
        });
    }
    let bound = neighborhood_size_bound(e.network(), e.profile(), problem.budget);
    if bound > config.max_neighborhood {
        return Err(Error::InstanceTooLargeForEnumeration {
            what: "neighborhood profiles",
            actual: bound,
            limit: config.max_neighborhood,
        });
    }
    let best = Neighborhood::new(e.network(), e.profile(), problem.budget)
        .par_bridge()
        .map(|p| {
            let forest = DelegationForest::build(&p, e.weights());
            let w = forest.acc_weight(problem.target);
            let c = p.distance(e.profile());
            (w, c, p.sort_key(), p)
        })
        .reduce_with(|a, b| {
            let ord = b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then_with(|| a.2.cmp(&b.2));
            if ord == std::cmp::Ordering::Greater {
                b
            } else {
                a
            }
        })
        .expect("base profile is always enumerated");
    Ok(WeightMaxOutcome {
        decision: best.0 >= problem.threshold,
        profile: best.3,
        weight: best.0,
        changes: best.1,
    })
}
