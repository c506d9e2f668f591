//! Power-index bribery: exhaustive decision procedures for the four
//! objectives and the GAMW greedy for the maximization variants.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::index_dp;
use crate::error::{Error, Result};
use crate::exact::{index_exact, IndexKind};
use crate::graph::{Choice, DelegationProfile, LiquidElection, SocialNetwork, VoterId};
use crate::rational::RationalValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    BMinP,
    SMinP,
    BMaxP,
    SMaxP,
}

impl Objective {
    pub fn kind(self) -> IndexKind {
        match self {
            Self::BMinP | Self::BMaxP => IndexKind::Banzhaf,
            Self::SMinP | Self::SMaxP => IndexKind::ShapleyShubik,
        }
    }

    pub fn maximize(self) -> bool {
        matches!(self, Self::BMaxP | Self::SMaxP)
    }

    /// Whether `value` meets the threshold in this objective's direction.
    pub fn accepts(self, value: &RationalValue, threshold: &RationalValue) -> bool {
        if self.maximize() {
            value >= threshold
        } else {
            value <= threshold
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bminp" => Ok(Self::BMinP),
            "sminp" => Ok(Self::SMinP),
            "bmaxp" => Ok(Self::BMaxP),
            "smaxp" => Ok(Self::SMaxP),
            other => Err(Error::InvalidArgument(format!("unknown objective {other:?}"))),
        }
    }
}

/// How index values of candidate profiles are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IndexMethod {
    Exact,
    Dp,
    /// Enumeration for small games, the dynamic program otherwise.
    #[default]
    Auto,
}

const AUTO_EXACT_LIMIT: usize = 12;

pub fn evaluate(election: &LiquidElection, voter: VoterId, kind: IndexKind, method: IndexMethod) -> RationalValue {
    let exact = match method {
        IndexMethod::Exact => true,
        IndexMethod::Dp => false,
        IndexMethod::Auto => election.n() <= AUTO_EXACT_LIMIT,
    };
    if exact {
        if let Ok(v) = index_exact(election, voter, kind) {
            return v;
        }
    }
    index_dp(election, voter, kind)
}

#[derive(Clone, Debug)]
pub struct BriberyProblem {
    pub election: LiquidElection,
    pub target: VoterId,
    pub budget: usize,
    pub threshold: RationalValue,
    pub objective: Objective,
}

impl BriberyProblem {
    pub fn new(
        election: LiquidElection,
        target: VoterId,
        budget: usize,
        threshold: RationalValue,
        objective: Objective,
    ) -> Result<Self> {
        if target.0 >= election.n() {
            return Err(Error::VoterOutOfRange {
                voter: target.0,
                n: election.n(),
            });
        }
        if threshold < RationalValue::zero() || threshold > RationalValue::one() {
            return Err(Error::InvalidArgument(format!("threshold {threshold} outside [0, 1]")));
        }
        Ok(Self {
            election,
            target,
            budget,
            threshold,
            objective,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BriberyOutcome {
    pub decision: bool,
    /// Best profile found; a witness when `decision` holds.
    pub profile: DelegationProfile,
    pub value: RationalValue,
    pub changes: usize,
    /// Greedy steps dropped for lack of a supporting arc.
    pub skipped: Vec<VoterId>,
}

impl BriberyOutcome {
    pub fn witness(&self) -> Option<&DelegationProfile> {
        self.decision.then_some(&self.profile)
    }

    /// Re-validates the profile and recomputes its value.
    pub fn verify(&self, problem: &BriberyProblem) -> Result<bool> {
        let e = problem.election.with_profile(self.profile.clone())?;
        let changes = self.profile.distance(problem.election.profile());
        let value = evaluate(&e, problem.target, problem.objective.kind(), IndexMethod::Auto);
        Ok(changes == self.changes
            && changes <= problem.budget
            && value == self.value
            && self.decision == problem.objective.accepts(&value, &problem.threshold))
    }
}

/// Alternative choices of a voter: direct voting or any out-neighbor, minus
/// its current choice.
fn alternatives(network: &SocialNetwork, current: Choice, v: VoterId) -> Vec<Choice> {
    std::iter::once(Choice::Direct)
        .chain(network.out_neighbors(v).iter().map(|&t| Choice::Delegate(t)))
        .filter(|&c| c != current)
        .collect()
}

/// Upper bound on the neighborhood size (acyclicity ignored).
pub fn neighborhood_size_bound(network: &SocialNetwork, profile: &DelegationProfile, k: usize) -> u128 {
    // Elementary symmetric sums of the per-voter alternative counts.
    let mut e = vec![0u128; k + 1];
    e[0] = 1;
    for v in 0..network.n() {
        let a = alternatives(network, profile.choice(VoterId(v)), VoterId(v)).len() as u128;
        for j in (1..=k).rev() {
            e[j] = e[j].saturating_add(e[j - 1].saturating_mul(a));
        }
    }
    e.iter().fold(0u128, |s, &x| s.saturating_add(x))
}

/// Every acyclic profile differing from the base in at most `k` voters, each
/// exactly once: change-sets by increasing size, then an odometer over the
/// alternatives of the chosen voters.
pub struct Neighborhood {
    base: Vec<Choice>,
    alts: Vec<Vec<Choice>>,
    eligible: Vec<usize>,
    k: usize,
    combo: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Neighborhood {
    pub fn new(network: &SocialNetwork, profile: &DelegationProfile, k: usize) -> Self {
        let n = network.n();
        let alts: Vec<Vec<Choice>> = (0..n)
            .map(|v| alternatives(network, profile.choice(VoterId(v)), VoterId(v)))
            .collect();
        let eligible = (0..n).filter(|&v| !alts[v].is_empty()).collect();
        Self {
            base: profile.choices().to_vec(),
            alts,
            eligible,
            k,
            combo: Vec::new(),
            digits: Vec::new(),
            done: false,
        }
    }

    fn advance(&mut self) {
        // Odometer over the current change-set.
        for i in (0..self.combo.len()).rev() {
            let v = self.eligible[self.combo[i]];
            self.digits[i] += 1;
            if self.digits[i] < self.alts[v].len() {
                return;
            }
            self.digits[i] = 0;
        }
        // Next change-set of the same size.
        let m = self.eligible.len();
        let r = self.combo.len();
        for i in (0..r).rev() {
            if self.combo[i] < m - r + i {
                self.combo[i] += 1;
                for j in i + 1..r {
                    self.combo[j] = self.combo[j - 1] + 1;
                }
                return;
            }
        }
        // Next size.
        let r = r + 1;
        if r > self.k || r > m {
            self.done = true;
            return;
        }
        self.combo = (0..r).collect();
        self.digits = vec![0; r];
    }
}

impl Iterator for Neighborhood {
    type Item = DelegationProfile;

    fn next(&mut self) -> Option<DelegationProfile> {
        while !self.done {
            let mut choices = self.base.clone();
            for (i, &c) in self.combo.iter().enumerate() {
                let v = self.eligible[c];
                choices[v] = self.alts[v][self.digits[i]];
            }
            self.advance();
            let profile = DelegationProfile::from_choices(choices);
            if self.combo.is_empty() || profile.find_cycle().is_none() {
                return Some(profile);
            }
        }
        None
    }
}

pub fn enumerate_neighborhood(election: &LiquidElection, k: usize) -> Neighborhood {
    Neighborhood::new(election.network(), election.profile(), k)
}

#[derive(Clone, Copy, Debug)]
pub struct ExactConfig {
    pub max_voters: usize,
    pub max_neighborhood: u128,
    pub method: IndexMethod,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            max_voters: 10,
            max_neighborhood: 5_000_000,
            method: IndexMethod::Auto,
        }
    }
}

struct Candidate {
    value: RationalValue,
    changes: usize,
    key: Vec<usize>,
    profile: DelegationProfile,
}

/// Better value in the objective's direction, then fewer changes, then the
/// lexicographically smaller profile.
fn better(a: Candidate, b: Candidate, maximize: bool) -> Candidate {
    let by_value = if maximize {
        b.value.cmp(&a.value)
    } else {
        a.value.cmp(&b.value)
    };
    let ord = by_value
        .then(a.changes.cmp(&b.changes))
        .then_with(|| a.key.cmp(&b.key));
    if ord == Ordering::Greater {
        b
    } else {
        a
    }
}

pub fn solve_bribery_exact(problem: &BriberyProblem) -> Result<BriberyOutcome> {
    solve_bribery_exact_with(problem, ExactConfig::default())
}

pub fn solve_bribery_exact_with(problem: &BriberyProblem, config: ExactConfig) -> Result<BriberyOutcome> {
    let e = &problem.election;
    if e.n() > config.max_voters {
        return Err(Error::InstanceTooLargeForEnumeration {
            what: "voters",
            actual: e.n() as u128,
            limit: config.max_voters as u128,
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
    let kind = problem.objective.kind();
    let maximize = problem.objective.maximize();
    let best = enumerate_neighborhood(e, problem.budget)
        .par_bridge()
        .map(|profile| {
            let changes = profile.distance(e.profile());
            let candidate = e.with_profile(profile.clone()).expect("neighborhood profiles are valid");
            Candidate {
                value: evaluate(&candidate, problem.target, kind, config.method),
                changes,
                key: profile.sort_key(),
                profile,
            }
        })
        .reduce_with(|a, b| better(a, b, maximize))
        .expect("the base profile is always in the neighborhood");
    Ok(BriberyOutcome {
        decision: problem.objective.accepts(&best.value, &problem.threshold),
        profile: best.profile,
        value: best.value,
        changes: best.changes,
        skipped: Vec::new(),
    })
}

/// Profile produced by the greedy, before evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyProfile {
    pub profile: DelegationProfile,
    pub changes: usize,
    pub skipped: Vec<VoterId>,
}

/// GAMW's delegation changes for `target` under budget `k`.
pub fn gamw_profile(election: &LiquidElection, target: VoterId, k: usize) -> Result<GreedyProfile> {
    let network = election.network();
    let original = election.profile();
    let mut current = election.partial().clone();
    let mut budget = k;
    let mut skipped = Vec::new();

    if budget > 0 && !current.forest().is_guru(target) {
        let forest = current.forest();
        let delegates = forest.delegates_of(target);
        let forced: u64 = delegates.iter().map(|&v| election.weight(v)).sum();
        if budget >= 2 || forced >= election.quota() {
            current = current.apply_changes(&[(target, Choice::Direct)])?.0;
            budget -= 1;
        } else {
            // One change: pull the heaviest candidate under the target.
            let own_guru = forest.guru(target);
            let mut in_del = vec![false; election.n()];
            for &v in &delegates {
                in_del[v.0] = true;
            }
            let mut candidates: Vec<VoterId> = (0..election.n())
                .map(VoterId)
                .filter(|&v| v != target && !in_del[v.0])
                .filter(|&v| {
                    (forest.is_guru(v) && v != own_guru)
                        || forest.parent(v).is_some_and(|p| in_del[p.0])
                })
                .collect();
            candidates.sort_by_key(|&v| (std::cmp::Reverse(forest.subtree_weight(v)), v));
            for v in candidates {
                if network.has_arc(v, target) {
                    current = current.apply_changes(&[(v, Choice::Delegate(target))])?.0;
                    break;
                }
                skipped.push(v);
            }
            budget = 0;
        }
    }

    while budget > 0 {
        let forest = current.forest();
        let next = forest
            .gurus()
            .filter(|&g| g != target && !skipped.contains(&g))
            .min_by_key(|&g| (std::cmp::Reverse(forest.acc_weight(g)), g));
        let Some(g) = next else { break };
        if network.has_arc(g, target) {
            current = current.apply_changes(&[(g, Choice::Delegate(target))])?.0;
            budget -= 1;
        } else {
            skipped.push(g);
        }
    }
    let changes = current.profile().distance(original);
    Ok(GreedyProfile {
        profile: current.profile().clone(),
        changes,
        skipped,
    })
}

/// GAMW for a maximization problem; the achieved value comes from the
/// dynamic program.
pub fn gamw(problem: &BriberyProblem) -> Result<BriberyOutcome> {
    if !problem.objective.maximize() {
        return Err(Error::InvalidArgument(
            "GAMW applies to the maximization objectives only".to_string(),
        ));
    }
    let greedy = gamw_profile(&problem.election, problem.target, problem.budget)?;
    let e = problem.election.with_profile(greedy.profile.clone())?;
    let value = index_dp(&e, problem.target, problem.objective.kind());
    Ok(BriberyOutcome {
        decision: problem.objective.accepts(&value, &problem.threshold),
        profile: greedy.profile,
        value,
        changes: greedy.changes,
        skipped: greedy.skipped,
    })
}
