use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use liquidpower::bribery::{gamw, solve_bribery_exact, BriberyOutcome, BriberyProblem, Objective};
use liquidpower::dp::index_dp;
use liquidpower::exact::index_exact;
use liquidpower::graph::ValidatedInstance;
use liquidpower::instance::InstanceFile;
use liquidpower::maximin::{mmwp_bruteforce, mmwp_leafmin, MaximinProblem};
use liquidpower::weightmax::{
    solve_fpt_colorcoding, solve_full_support, solve_xp_reqbar, vbamw, wmaxp_exact, Epsilon, WeightMaxConfig,
    WeightMaxOutcome, WeightMaxProblem,
};
use liquidpower::{
    DelegationProfile, IndexKind, LiquidElection, PartialElection, QuotaRule, RationalValue, VoterId,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::output::{rational, Report};
use crate::{BribeMethodArg, Cli, Command, IndexMethodArg, KindArg, QuotaRuleArg, WeightMaxMethodArg};

struct Loaded {
    instance: ValidatedInstance,
    info: Value,
}

fn load(path: &Path, rule: QuotaRule) -> Result<Loaded> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    let text = std::str::from_utf8(&bytes).context("instance is not UTF-8")?;
    let file = InstanceFile::from_json(text)?;
    let quota = file.quota;
    let instance = file.into_instance_with_rule(rule)?;
    let n = match &instance {
        ValidatedInstance::Election(e) => e.n(),
        ValidatedInstance::Partial(p) => p.n(),
    };
    Ok(Loaded {
        instance,
        info: json!({ "path": path.display().to_string(), "sha256": digest, "n": n, "quota": quota }),
    })
}

fn election(loaded: Loaded) -> Result<(LiquidElection, Value)> {
    match loaded.instance {
        ValidatedInstance::Election(e) => Ok((e, loaded.info)),
        ValidatedInstance::Partial(_) => bail!("this command needs an instance with a quota"),
    }
}

fn partial(loaded: Loaded) -> (PartialElection, Value) {
    let p = match loaded.instance {
        ValidatedInstance::Election(e) => e.into_partial(),
        ValidatedInstance::Partial(p) => p,
    };
    (p, loaded.info)
}

fn voter(id: usize, n: usize) -> Result<VoterId> {
    if id == 0 || id > n {
        bail!("voter {id} outside 1..={n}");
    }
    Ok(VoterId(id - 1))
}

fn kind(k: KindArg) -> IndexKind {
    match k {
        KindArg::Banzhaf => IndexKind::Banzhaf,
        KindArg::Shapley => IndexKind::ShapleyShubik,
    }
}

fn kind_name(k: IndexKind) -> &'static str {
    match k {
        IndexKind::Banzhaf => "banzhaf",
        IndexKind::ShapleyShubik => "shapley",
    }
}

/// A profile written back in the instance schema.
fn profile_instance(base: &PartialElection, profile: &DelegationProfile, quota: Option<u64>) -> Result<Value> {
    let e = base.with_profile(profile.clone())?;
    Ok(serde_json::to_value(InstanceFile::from_partial(&e, quota))?)
}

pub fn run(cli: &Cli) -> Result<Report> {
    let rule = match cli.quota_rule {
        QuotaRuleArg::Supermajority => QuotaRule::SuperMajority,
        QuotaRuleArg::Positive => QuotaRule::Positive,
    };
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Index {
            instance,
            kind: k,
            method,
            voter: which,
        } => index(load(instance, rule)?, kind(*k), *method, which)?,
        Command::Bribe {
            instance,
            objective,
            target,
            budget,
            threshold,
            method,
        } => bribe(load(instance, rule)?, objective, *target, *budget, threshold, *method)?,
        Command::Weightmax {
            instance,
            target,
            budget,
            threshold,
            method,
            epsilon,
            delta,
        } => weightmax(
            load(instance, rule)?,
            *target,
            *budget,
            *threshold,
            *method,
            epsilon,
            *delta,
            cli.seed,
        )?,
        Command::Maximin {
            instance,
            gurus,
            kind: k,
        } => maximin(load(instance, rule)?, *gurus, kind(*k), rule)?,
    };
    report.elapsed = start.elapsed();
    Ok(report)
}

fn index(loaded: Loaded, kind: IndexKind, method: IndexMethodArg, which: &str) -> Result<Report> {
    let (e, info) = election(loaded)?;
    let voters: Vec<VoterId> = if which.eq_ignore_ascii_case("all") {
        (0..e.n()).map(VoterId).collect()
    } else {
        vec![voter(which.parse().with_context(|| format!("bad voter {which:?}"))?, e.n())?]
    };
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut agree = true;
    for v in voters {
        let exact = match method {
            IndexMethodArg::Exact | IndexMethodArg::Both => Some(index_exact(&e, v, kind)?),
            IndexMethodArg::Dp => None,
        };
        let dp = match method {
            IndexMethodArg::Dp | IndexMethodArg::Both => Some(index_dp(&e, v, kind)),
            IndexMethodArg::Exact => None,
        };
        let value = exact.clone().or_else(|| dp.clone()).expect("one method ran");
        let mut entry = json!({ "voter": v.0 + 1, "value": rational(&value) });
        if let (Some(a), Some(b)) = (&exact, &dp) {
            let same = a == b;
            agree &= same;
            entry["exact"] = rational(a);
            entry["dp"] = rational(b);
            entry["agree"] = json!(same);
        }
        rows.push(vec![(v.0 + 1).to_string(), value.to_string(), format!("{:.6}", value.to_f64())]);
        entries.push(entry);
    }
    let method_name = match method {
        IndexMethodArg::Exact => "exact",
        IndexMethodArg::Dp => "dp",
        IndexMethodArg::Both => "both",
    };
    Ok(Report {
        instance: info,
        results: json!({ "kind": kind_name(kind), "method": method_name, "agree": agree, "values": entries }),
        ok: agree,
        header: vec!["voter".into(), kind_name(kind).into(), "approx".into()],
        rows,
        elapsed: Default::default(),
    })
}

fn bribe(
    loaded: Loaded,
    objective: &str,
    target: usize,
    budget: usize,
    threshold: &str,
    method: BribeMethodArg,
) -> Result<Report> {
    let (e, info) = election(loaded)?;
    let objective: Objective = objective.parse()?;
    let threshold: RationalValue = threshold
        .parse()
        .map_err(|_| anyhow::anyhow!("cannot parse threshold {threshold:?}"))?;
    let target = voter(target, e.n())?;
    let problem = BriberyProblem::new(e.clone(), target, budget, threshold, objective)?;
    let out: BriberyOutcome = match method {
        BribeMethodArg::Exact => solve_bribery_exact(&problem)?,
        BribeMethodArg::Gamw => gamw(&problem)?,
    };
    let profile = profile_instance(e.partial(), &out.profile, Some(e.quota()))?;
    let results = json!({
        "objective": format!("{objective:?}").to_lowercase(),
        "method": if method == BribeMethodArg::Exact { "exact" } else { "gamw" },
        "decision": out.decision,
        "value": rational(&out.value),
        "changes": out.changes,
        "skipped": out.skipped.iter().map(|v| v.0 + 1).collect::<Vec<_>>(),
        "profile": profile,
    });
    Ok(Report {
        instance: info,
        rows: vec![
            vec!["decision".into(), out.decision.to_string()],
            vec!["value".into(), out.value.to_string()],
            vec!["changes".into(), out.changes.to_string()],
        ],
        header: vec!["field".into(), "value".into()],
        results,
        ok: true,
        elapsed: Default::default(),
    })
}

#[allow(clippy::too_many_arguments)]
fn weightmax(
    loaded: Loaded,
    target: usize,
    budget: usize,
    threshold: u64,
    method: WeightMaxMethodArg,
    epsilon: &str,
    delta: f64,
    seed: u64,
) -> Result<Report> {
    let (e, info) = partial(loaded);
    let quota = info["quota"].as_u64();
    let target = voter(target, e.n())?;
    let problem = WeightMaxProblem::new(e.clone(), target, budget, threshold)?;
    let cfg = WeightMaxConfig::default();
    let mut extra = json!({});
    let out: WeightMaxOutcome = match method {
        WeightMaxMethodArg::Exact => wmaxp_exact(&problem, &cfg)?,
        WeightMaxMethodArg::Branching => solve_full_support(&problem)?,
        WeightMaxMethodArg::Xp => solve_xp_reqbar(&problem, &cfg)?,
        WeightMaxMethodArg::Colorcoding => {
            let (out, stats) = solve_fpt_colorcoding(&problem, delta, seed, &cfg)?;
            extra = json!({
                "delta": delta,
                "seed": seed,
                "colors": stats.colors,
                "repetitions": stats.repetitions,
                "hit": stats.hit,
            });
            out
        }
        WeightMaxMethodArg::Vbamw => {
            let eps: Epsilon = epsilon.parse()?;
            let v = vbamw(&problem, eps)?;
            extra = json!({
                "epsilon": eps.to_string(),
                "trimmed": v.trimmed,
                "tree_cost": v.tree_cost,
                "tree_weight": v.tree_weight,
                "ratio_contract_met": v.ratio_contract_met,
            });
            WeightMaxOutcome {
                decision: v.meets_threshold,
                profile: v.profile,
                weight: v.weight,
                changes: v.changes,
            }
        }
    };
    let method_name = format!("{method:?}").to_lowercase();
    let profile = profile_instance(&e, &out.profile, quota)?;
    let mut results = json!({
        "method": method_name,
        "decision": out.decision,
        "weight": out.weight,
        "changes": out.changes,
        "threshold": threshold,
        "profile": profile,
    });
    for (k, v) in extra.as_object().expect("object").iter() {
        results[k] = v.clone();
    }
    Ok(Report {
        instance: info,
        rows: vec![
            vec!["decision".into(), out.decision.to_string()],
            vec!["weight".into(), out.weight.to_string()],
            vec!["changes".into(), out.changes.to_string()],
        ],
        header: vec!["field".into(), "value".into()],
        results,
        ok: true,
        elapsed: Default::default(),
    })
}

fn maximin(loaded: Loaded, gurus: usize, kind: IndexKind, rule: QuotaRule) -> Result<Report> {
    let (e, info) = election(loaded)?;
    let problem = MaximinProblem::new(
        e.network().clone(),
        e.weights().clone(),
        e.quota(),
        rule,
        gurus,
        kind,
    )?;
    let sol = mmwp_bruteforce(&problem)?;
    let best = e.with_profile(sol.profile.clone())?;
    let leaf_min = match kind {
        IndexKind::Banzhaf => Some(rational(&mmwp_leafmin(&best, kind)?)),
        IndexKind::ShapleyShubik => None,
    };
    let profile = profile_instance(e.partial(), &sol.profile, Some(e.quota()))?;
    let values: Vec<Value> = sol
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| json!({ "voter": i + 1, "value": rational(v) }))
        .collect();
    let mut rows = vec![vec!["mu".into(), sol.mu.to_string(), format!("{:.6}", sol.mu.to_f64())]];
    rows.extend(
        sol.values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![(i + 1).to_string(), v.to_string(), format!("{:.6}", v.to_f64())]),
    );
    Ok(Report {
        instance: info,
        results: json!({
            "kind": kind_name(kind),
            "gurus": gurus,
            "mu": rational(&sol.mu),
            "leaf_min": leaf_min,
            "values": values,
            "profile": profile,
        }),
        ok: true,
        header: vec!["voter".into(), kind_name(kind).into(), "approx".into()],
        rows,
        elapsed: Default::default(),
    })
}
