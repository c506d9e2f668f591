//! JSON instance format. Voter ids are 1-based on the wire.
//!
//! ```json
//! {"n": 3, "weights": [1,1,1], "arcs": [[1,2],[2,3]],
//!  "delegations": {"1": 2, "2": 2, "3": 3}, "quota": 2}
//! ```
//!
//! `delegations` maps every voter; mapping a voter to itself means voting
//! directly. `quota` is omitted for partial elections.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    validate_with_rule, Choice, DelegationProfile, LiquidElection, PartialElection, QuotaRule,
    SocialNetwork, ValidatedInstance, VoterId, WeightAssignment,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub weights: Vec<u64>,
    pub arcs: Vec<[usize; 2]>,
    pub delegations: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quota: Option<u64>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedInstance(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn into_instance(self) -> Result<ValidatedInstance> {
        self.into_instance_with_rule(QuotaRule::SuperMajority)
    }

    pub fn into_instance_with_rule(self, rule: QuotaRule) -> Result<ValidatedInstance> {
        let n = self.n;
        if self.weights.len() != n {
            return Err(Error::MalformedInstance(format!(
                "{} weights for n = {n}",
                self.weights.len()
            )));
        }
        let mut arcs = Vec::with_capacity(self.arcs.len());
        for [from, to] in &self.arcs {
            arcs.push((one_based(*from, n)?, one_based(*to, n)?));
        }
        let network = SocialNetwork::new(n, arcs)?;
        let weights = WeightAssignment::new(self.weights)?;

        let mut targets = vec![None; n];
        for (key, &to) in &self.delegations {
            let from: usize = key
                .trim()
                .parse()
                .map_err(|_| Error::MalformedInstance(format!("bad voter id {key:?}")))?;
            let from = one_based(from, n)?;
            let to = one_based(to, n)?;
            if targets[from].replace(to).is_some() {
                return Err(Error::MalformedInstance(format!(
                    "voter {} delegates twice",
                    from + 1
                )));
            }
        }
        let choices = targets
            .iter()
            .enumerate()
            .map(|(i, t)| match t {
                None => Err(Error::MalformedInstance(format!(
                    "voter {} has no delegation entry",
                    i + 1
                ))),
                Some(t) if *t == i => Ok(Choice::Direct),
                Some(t) => Ok(Choice::Delegate(VoterId(*t))),
            })
            .collect::<Result<Vec<_>>>()?;
        validate_with_rule(
            network,
            weights,
            DelegationProfile::from_choices(choices),
            self.quota,
            rule,
        )
    }

    pub fn into_election(self) -> Result<LiquidElection> {
        self.into_election_with_rule(QuotaRule::SuperMajority)
    }

    pub fn into_election_with_rule(self, rule: QuotaRule) -> Result<LiquidElection> {
        match self.into_instance_with_rule(rule)? {
            ValidatedInstance::Election(e) => Ok(e),
            ValidatedInstance::Partial(_) => Err(Error::MalformedInstance(
                "instance has no quota".to_string(),
            )),
        }
    }

    pub fn into_partial(self) -> Result<PartialElection> {
        Ok(match self.into_instance()? {
            ValidatedInstance::Election(e) => e.into_partial(),
            ValidatedInstance::Partial(p) => p,
        })
    }

    pub fn from_partial(e: &PartialElection, quota: Option<u64>) -> Self {
        let arcs = e
            .network()
            .arcs()
            .map(|(a, b)| [a.0 + 1, b.0 + 1])
            .collect();
        Self {
            n: e.n(),
            weights: e.weights().as_slice().to_vec(),
            arcs,
            delegations: delegations_map(e.profile()),
            quota,
        }
    }

    pub fn from_election(e: &LiquidElection) -> Self {
        Self::from_partial(e.partial(), Some(e.quota()))
    }
}

/// The `delegations` object for a profile.
pub fn delegations_map(profile: &DelegationProfile) -> BTreeMap<String, usize> {
    (0..profile.len())
        .map(|i| {
            let t = profile.target_or_self(VoterId(i));
            ((i + 1).to_string(), t.0 + 1)
        })
        .collect()
}

fn one_based(id: usize, n: usize) -> Result<usize> {
    if id == 0 || id > n {
        return Err(Error::VoterOutOfRange { voter: id, n });
    }
    Ok(id - 1)
}
