//! Index values against a from-scratch brute force that shares no code with
//! the library: active weights are recomputed by walking delegation chains.

use liquidpower::dp::{banzhaf_dp, shapley_dp};
use liquidpower::exact::{banzhaf_exact, shapley_exact};
use liquidpower::random::{random_election, InstanceParams};
use liquidpower::{LiquidElection, RationalValue, VoterId};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Total weight of members whose whole chain to a guru lies in `mask`.
fn gamma(targets: &[usize], weights: &[u64], mask: u32) -> u64 {
    let mut total = 0;
    for v in 0..targets.len() {
        let mut cur = v;
        let active = loop {
            if mask >> cur & 1 == 0 {
                break false;
            }
            if targets[cur] == cur {
                break true;
            }
            cur = targets[cur];
        };
        if active {
            total += weights[v];
        }
    }
    total
}

fn brute(e: &LiquidElection, i: usize) -> (RationalValue, RationalValue) {
    let n = e.n();
    let targets: Vec<usize> = (0..n).map(|v| e.profile().target_or_self(VoterId(v)).0).collect();
    let weights = e.weights().as_slice();
    let fact = |k: usize| -> BigInt { (1..=k as u64).map(BigInt::from).product() };
    let mut swings = 0u64;
    let mut shapley = RationalValue::zero();
    for mask in 0u32..1 << n {
        if mask >> i & 1 == 1 {
            continue;
        }
        let without = gamma(&targets, weights, mask) >= e.quota();
        let with = gamma(&targets, weights, mask | 1 << i) >= e.quota();
        if with && !without {
            swings += 1;
            let s = mask.count_ones() as usize;
            shapley = shapley + RationalValue::new(fact(s) * fact(n - s - 1), fact(n));
        }
    }
    (RationalValue::new(swings, 1u64 << (n - 1)), shapley)
}

fn election(seed: u64, n: usize, w: u64, density: f64, rate: f64) -> LiquidElection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_election(&mut rng, InstanceParams::new(n, w).density(density).delegation_rate(rate))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn all_methods_agree_with_brute_force(
        seed in any::<u64>(),
        n in 1usize..=9,
        w in 1u64..=5,
        density in 0.0f64..1.0,
        rate in 0.0f64..1.0,
    ) {
        let e = election(seed, n, w, density, rate);
        for i in 0..n {
            let v = VoterId(i);
            let (db, ds) = brute(&e, i);
            prop_assert_eq!(&banzhaf_exact(&e, v).unwrap(), &db);
            prop_assert_eq!(&banzhaf_dp(&e, v), &db);
            prop_assert_eq!(&shapley_exact(&e, v).unwrap(), &ds);
            prop_assert_eq!(&shapley_dp(&e, v), &ds);
        }
    }

    #[test]
    fn values_lie_in_unit_interval(seed in any::<u64>(), n in 1usize..=12, w in 1u64..=8) {
        let e = election(seed, n, w, 0.4, 0.6);
        for i in 0..n {
            let b = banzhaf_dp(&e, VoterId(i));
            prop_assert!(b >= RationalValue::zero() && b <= RationalValue::one());
        }
    }
}

#[test]
fn larger_instances_agree_with_exact() {
    for seed in 0..6 {
        let e = election(seed, 16, 6, 0.3, 0.7);
        for i in [0, 7, 15] {
            assert_eq!(banzhaf_dp(&e, VoterId(i)), banzhaf_exact(&e, VoterId(i)).unwrap());
            assert_eq!(shapley_dp(&e, VoterId(i)), shapley_exact(&e, VoterId(i)).unwrap());
        }
    }
}
