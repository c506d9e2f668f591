use super::full_support::cheapest_full_support;
use super::{normalize, WeightMaxConfig, WeightMaxOutcome, WeightMaxProblem};
use crate::error::{Error, Result};

/// Guesses the set `X` of voters left outside `i*`'s tree (`w(X) ≤ req̄`, by
/// increasing size) and solves the full-support instance on the rest.
pub fn solve_xp_reqbar(problem: &WeightMaxProblem, config: &WeightMaxConfig) -> Result<WeightMaxOutcome> {
    let slack = problem.req_bar();
    if slack < 0 {
        return Ok(WeightMaxOutcome::no(problem));
    }
    let slack = slack as u64;
    if slack > config.max_req_bar {
        return Err(Error::ParameterTooLarge {
            name: "req_bar",
            value: slack,
            limit: config.max_req_bar,
        });
    }
    let Some(norm) = normalize(problem)? else {
        return Ok(WeightMaxOutcome::no(problem));
    };
    let n = problem.election.n();
    let others: Vec<usize> = (0..n).filter(|&v| v != problem.target.0).collect();
    let weights = problem.election.weights().as_slice();
    let max_size = (slack as usize).min(others.len());

    let mut excluded = vec![false; n];
    for size in 0..=max_size {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let w: u64 = combo.iter().map(|&i| weights[others[i]]).sum();
            if w <= slack {
                for &i in &combo {
                    excluded[others[i]] = true;
                }
                let found = cheapest_full_support(&norm.election, problem.target, &excluded);
                for &i in &combo {
                    excluded[others[i]] = false;
                }
                if let Some((profile, _)) = found {
                    let out = WeightMaxOutcome::from_profile(problem, profile)?;
                    if out.decision {
                        return Ok(out);
                    }
                }
            }
            if !next_combination(&mut combo, others.len()) {
                break;
            }
        }
    }
    Ok(WeightMaxOutcome::no(problem))
}

fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let r = combo.len();
    for i in (0..r).rev() {
        if combo[i] < m - r + i {
            combo[i] += 1;
            for j in i + 1..r {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
