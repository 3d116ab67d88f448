//! Property tests over randomized instances: invariants that must hold for
//! every network, association, and power profile, not just hand-picked
//! cases.

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crn_core::best_response::waterfill;
use crn_core::jjaspa::coalition_key;
use crn_core::learn::{sample_association, ReplyMemory};
use crn_core::model::{
    generate_snapshot, is_feasible, AssociationProfile, NetworkInstance, PowerProfile,
    ScenarioConfig,
};
use crn_core::physics::{interference_map, potential_ap, rate};

const BUDGET_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-9;

/// Strategy over small but genuinely varied network shapes.
fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..6, 1usize..4).prop_flat_map(|(n, w)| (Just(n), Just(w), w..4 * w + 1))
}

fn instance(n: usize, w: usize, k: usize, seed: u64) -> NetworkInstance {
    generate_snapshot(&ScenarioConfig::new(n, w, k), seed).unwrap()
}

/// Deterministic random association for an instance.
fn random_assoc(inst: &NetworkInstance, rng: &mut ChaCha8Rng) -> AssociationProfile {
    let ap = (0..inst.num_cus)
        .map(|_| rng.gen_range(0..inst.num_aps))
        .collect();
    AssociationProfile::new(ap, inst.num_aps).unwrap()
}

/// Deterministic random feasible powers under an association.
fn random_powers(
    inst: &NetworkInstance,
    assoc: &AssociationProfile,
    rng: &mut ChaCha8Rng,
) -> PowerProfile {
    let mut powers = PowerProfile::zeros(inst, assoc);
    for i in 0..inst.num_cus {
        let m = inst.num_channels_of(assoc.ap[i]);
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let used = rng.gen_range(0.0..1.0) * inst.budgets[i];
        powers.per_cu[i] = raw.into_iter().map(|x| x / total * used).collect();
    }
    powers
}

proptest! {
    #[test]
    fn waterfill_is_feasible_and_spends_the_budget(
        (n, w_count, k) in dims(),
        seed in 0u64..1000,
        cu in 0usize..6,
        ap in 0usize..4,
    ) {
        let inst = instance(n, w_count, k, seed);
        let i = cu % n;
        let w = ap % w_count;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let interference: Vec<f64> = (0..inst.num_channels_of(w))
            .map(|_| rng.gen_range(0.0..0.5))
            .collect();
        let p = waterfill(&inst, i, w, &interference);
        prop_assert!(is_feasible(&inst, i, w, &p).unwrap());
        // Every generated gain is positive, so the whole budget is spent.
        let spent: f64 = p.iter().sum();
        prop_assert!(
            (spent - inst.budgets[i]).abs() <= BUDGET_TOL,
            "spent {spent} of budget {}",
            inst.budgets[i]
        );
    }

    #[test]
    fn waterfill_dominates_random_feasible_points(
        (n, w_count, k) in dims(),
        seed in 0u64..500,
        tries in 1usize..8,
    ) {
        let inst = instance(n, w_count, k, seed);
        let (i, w) = (0, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let m = inst.num_channels_of(w);
        let interference: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..0.5)).collect();
        let p = waterfill(&inst, i, w, &interference);
        let best = rate(&inst, i, w, &p, &interference);
        for _ in 0..tries {
            let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum::<f64>().max(1e-12);
            let q: Vec<f64> = raw
                .iter()
                .map(|x| x / total * inst.budgets[i])
                .collect();
            let challenger = rate(&inst, i, w, &q, &interference);
            prop_assert!(
                best >= challenger - 1e-12,
                "water-filling {best} lost to {challenger}"
            );
        }
    }

    #[test]
    fn unilateral_rate_change_equals_potential_change(
        (n, w_count, k) in dims(),
        seed in 0u64..1000,
        mover in 0usize..6,
    ) {
        let inst = instance(n, w_count, k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1dea);
        let assoc = random_assoc(&inst, &mut rng);
        let mut powers = random_powers(&inst, &assoc, &mut rng);
        let i = mover % n;
        let home = assoc.ap[i];
        let m = inst.num_channels_of(home);

        let p_before = powers.per_cu[i].clone();
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let p_after: Vec<f64> = raw
            .iter()
            .map(|x| x / total * inst.budgets[i] * 0.9)
            .collect();

        let map = interference_map(&inst, &assoc, &powers);
        let row = map.row(i, home);
        let delta_rate =
            rate(&inst, i, home, &p_after, row) - rate(&inst, i, home, &p_before, row);

        let occupants = assoc.occupants(home);
        let refs: Vec<&[f64]> = occupants
            .iter()
            .map(|&j| powers.per_cu[j].as_slice())
            .collect();
        let before = potential_ap(&inst, home, &occupants, &refs);
        powers.per_cu[i] = p_after;
        let refs: Vec<&[f64]> = occupants
            .iter()
            .map(|&j| powers.per_cu[j].as_slice())
            .collect();
        let after = potential_ap(&inst, home, &occupants, &refs);

        prop_assert!(
            (delta_rate - (after - before)).abs() <= IDENTITY_TOL,
            "ΔR = {delta_rate}, ΔP = {}",
            after - before
        );
    }

    #[test]
    fn reply_memory_beta_is_a_probability_vector(
        num_aps in 1usize..6,
        capacity in 1usize..12,
        pushes in prop::collection::vec(0usize..6, 0..30),
    ) {
        let mut memory = ReplyMemory::new(capacity, num_aps);
        for p in pushes {
            memory.push(p % num_aps);
        }
        let beta = memory.beta();
        prop_assert_eq!(beta.len(), num_aps);
        prop_assert!(beta.iter().all(|&b| b >= 0.0));
        let sum: f64 = beta.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12, "Σβ = {sum}");
    }

    #[test]
    fn sampling_never_picks_zero_probability_aps(
        num_aps in 1usize..6,
        pushes in prop::collection::vec(0usize..6, 1..20),
        draw_seed in 0u64..1000,
    ) {
        let mut memory = ReplyMemory::new(pushes.len(), num_aps);
        for p in &pushes {
            memory.push(p % num_aps);
        }
        let beta = memory.beta();
        let mut rng = ChaCha8Rng::seed_from_u64(draw_seed);
        let w = sample_association(&beta, &mut rng);
        prop_assert!(beta[w] > 0.0, "drew AP {w} with β = 0");
    }

    #[test]
    fn coalition_keys_ignore_occupant_order(
        mut members in prop::collection::vec(0usize..32, 0..10),
    ) {
        let key = coalition_key(members.clone());
        prop_assert!(key.windows(2).all(|p| p[0] <= p[1]), "key not sorted");
        members.reverse();
        prop_assert_eq!(coalition_key(members), key);
    }

    #[test]
    fn occupant_lists_partition_the_cus(
        (n, w_count, k) in dims(),
        seed in 0u64..500,
    ) {
        let inst = instance(n, w_count, k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0cc0);
        let assoc = random_assoc(&inst, &mut rng);
        let mut seen = vec![0usize; n];
        for w in 0..w_count {
            let occupants = assoc.occupants(w);
            prop_assert!(occupants.windows(2).all(|p| p[0] < p[1]));
            for i in occupants {
                prop_assert_eq!(assoc.ap[i], w);
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1), "occupancy {seen:?}");
    }

    #[test]
    fn interference_is_nonnegative_and_full_for_outsiders(
        (n, w_count, k) in dims(),
        seed in 0u64..500,
    ) {
        let inst = instance(n, w_count, k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf00d);
        let assoc = random_assoc(&inst, &mut rng);
        let powers = random_powers(&inst, &assoc, &mut rng);
        let map = interference_map(&inst, &assoc, &powers);
        for i in 0..n {
            for w in 0..w_count {
                prop_assert!(map.row(i, w).iter().all(|&x| x >= 0.0));
            }
        }
        // Every CU not at w sees the identical full received power there,
        // and an occupant never sees more than an outsider does.
        for w in 0..w_count {
            let outsiders: Vec<usize> = (0..n).filter(|&i| assoc.ap[i] != w).collect();
            if let Some(&first) = outsiders.first() {
                for &j in &outsiders[1..] {
                    prop_assert_eq!(map.row(j, w), map.row(first, w));
                }
                for i in assoc.occupants(w) {
                    for (own, full) in map.row(i, w).iter().zip(map.row(first, w)) {
                        prop_assert!(*own <= full + 1e-12);
                    }
                }
            }
        }
    }
}
