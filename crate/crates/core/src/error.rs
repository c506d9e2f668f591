use thiserror::Error;

use crate::graph::VoterId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The delegation profile contains a cycle; the voters are listed in chain order.
    #[error("delegation cycle through voters {}", fmt_ids(.0))]
    CycleInDelegations(Vec<VoterId>),

    #[error("voter {from} delegates to {to} but the network has no such arc")]
    ArcNotInNetwork { from: VoterId, to: VoterId },

    #[error("quota {quota} outside the admissible range ({total}/2, {total}]")]
    QuotaOutOfRange { quota: u64, total: u64 },

    #[error("voter {0} has non-positive weight")]
    NonPositiveWeight(VoterId),

    #[error("voter {voter} is out of range for an instance of {n} voters")]
    VoterOutOfRange { voter: usize, n: usize },

    #[error("voter {0} is listed twice as an out-neighbor")]
    DuplicateArc(VoterId),

    #[error("self-loop at voter {0}; self-delegation is expressed by the SELF choice")]
    SelfLoop(VoterId),

    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("voter {0} is already a member of the coalition")]
    MemberAlreadyInCoalition(VoterId),

    #[error("composed elections disagree on shared voter {0}")]
    IncompatibleOverlap(usize),

    #[error("instance too large for enumeration: {what} is {actual}, limit {limit}")]
    InstanceTooLargeForEnumeration {
        what: &'static str,
        actual: u128,
        limit: u128,
    },

    #[error("parameter {name} = {value} exceeds the configured limit {limit}")]
    ParameterTooLarge {
        name: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("no spanning arborescence reaches all vertices")]
    NoSpanningArborescence,

    #[error("no acyclic delegation profile with exactly {0} gurus exists")]
    NoFeasibleProfile(usize),

    #[error("measure not supported here: {0}")]
    MeasureNotSupported(&'static str),
}

fn fmt_ids(ids: &[VoterId]) -> String {
    ids.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
