use super::{normalize, WeightMaxOutcome, WeightMaxProblem};
use crate::branching::{optimum_branching, Arc};
use crate::error::{Error, Result};
use crate::graph::{Choice, DelegationProfile, PartialElection, VoterId};

/// Cheapest way to make every voter outside `excluded` reach `target`
/// (already a guru) while excluded voters keep their delegation.
///
/// Arcs are reversed and weighted `m + 1` when they keep the current
/// delegation and `m` otherwise (`m` = number of kept voters), so a maximum
/// branching first maximizes the number of arcs and then the number of kept
/// delegations. Returns the profile and its number of changes.
pub(crate) fn cheapest_full_support(
    election: &PartialElection,
    target: VoterId,
    excluded: &[bool],
) -> Option<(DelegationProfile, usize)> {
    let n = election.n();
    let members: Vec<usize> = (0..n).filter(|&v| !excluded[v]).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let m = members.len() as i64;
    let profile = election.profile();
    let mut arcs = Vec::new();
    let mut original = Vec::new();
    for (u, v) in election.network().arcs() {
        if u == target || excluded[u.0] || excluded[v.0] {
            continue;
        }
        let keep = profile.target(u) == Some(v);
        arcs.push(Arc::new(local[v.0], local[u.0], if keep { m + 1 } else { m }));
        original.push((u, v));
    }
    let chosen = optimum_branching(members.len(), &arcs);
    if chosen.len() + 1 != members.len() {
        return None;
    }
    let mut choices = profile.choices().to_vec();
    for &e in &chosen {
        let (u, v) = original[e];
        choices[u.0] = Choice::Delegate(v);
    }
    let next = DelegationProfile::from_choices(choices);
    let changes = next.distance(profile);
    Some((next, changes))
}

/// Decides instances with `τ = Σw`: every voter must end up behind `i*`.
pub fn solve_full_support(problem: &WeightMaxProblem) -> Result<WeightMaxOutcome> {
    match problem.req_bar() {
        0 => {}
        r if r < 0 => return Ok(WeightMaxOutcome::no(problem)),
        r => {
            return Err(Error::InvalidArgument(format!(
                "full support needs threshold = total weight (slack is {r})"
            )))
        }
    }
    let Some(norm) = normalize(problem)? else {
        return Ok(WeightMaxOutcome::no(problem));
    };
    let excluded = vec![false; problem.election.n()];
    match cheapest_full_support(&norm.election, problem.target, &excluded) {
        Some((profile, changes)) if changes <= norm.budget => WeightMaxOutcome::from_profile(problem, profile),
        _ => Ok(WeightMaxOutcome::no(problem)),
    }
}
