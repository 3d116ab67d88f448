//! The single-CU best-response operator (water-filling) and the per-AP
//! best-rate estimates that drive every algorithm's AP-selection step.

use rand::Rng;

use crate::model::NetworkInstance;
use crate::physics::rate;

/// Computes the rate-maximizing power vector for CU `i` at AP `w` against
/// fixed per-channel interference: classic water-filling.
///
/// Channels are ranked by their inverse quality `v_k = (n_k + I_k) / g_k`;
/// the active set shares a common water level `λ` with `p_k = λ − v_k`, and
/// the full budget is spent whenever any channel has positive gain.
/// Channels with zero gain never receive power; if every gain is zero the
/// zero vector is returned (any feasible point is optimal, zero is the
/// canonical choice).
///
/// The active set is found in closed form: after sorting `v` ascending, the
/// water level for the `m` cheapest channels is
/// `λ_m = (budget + Σ_{j≤m} v_j) / m`, and the optimal `m` is the largest
/// with `λ_m > v_m`. Cost O(K log K), fully deterministic.
pub fn waterfill(inst: &NetworkInstance, i: usize, w: usize, interference: &[f64]) -> Vec<f64> {
    let channels = inst.channels(w);
    debug_assert_eq!(interference.len(), channels.len());
    let budget = inst.budgets[i];

    // (inverse quality, position) for channels with positive gain.
    let mut usable: Vec<(f64, usize)> = channels
        .iter()
        .enumerate()
        .filter_map(|(j, &k)| {
            let g = inst.gains[i][w][k];
            (g > 0.0).then(|| ((inst.noise[w][k] + interference[j]) / g, j))
        })
        .collect();

    let mut p = vec![0.0; channels.len()];
    if usable.is_empty() {
        return p;
    }
    usable.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Largest active-set size m with water level above the m-th quality.
    let mut level = 0.0;
    let mut active = 0;
    let mut prefix = 0.0;
    for (m, &(v, _)) in usable.iter().enumerate() {
        prefix += v;
        let candidate = (budget + prefix) / (m + 1) as f64;
        if candidate > v {
            level = candidate;
            active = m + 1;
        } else {
            break;
        }
    }

    for &(v, j) in &usable[..active] {
        p[j] = (level - v).max(0.0);
    }
    p
}

/// Best-response rate of CU `i` at AP `w` against the given interference,
/// together with the achieving power vector.
///
/// This is the CU's estimate of what it would earn at `w` treating the
/// current occupants' powers as fixed; it only requires the aggregated
/// interference-plus-noise per channel, not per-user knowledge.
pub fn best_rate_at(
    inst: &NetworkInstance,
    i: usize,
    w: usize,
    interference: &[f64],
) -> (f64, Vec<f64>) {
    let p = waterfill(inst, i, w, interference);
    let r = rate(inst, i, w, &p, interference);
    (r, p)
}

/// Picks the CU's next AP given its best-response rate estimate at every AP.
///
/// The candidate set is every AP whose estimate strictly exceeds
/// `current_rate + cost` (the connection cost is the minimum improvement
/// worth switching for). If no candidate clears the bar the CU stays;
/// otherwise it moves to the best candidate, breaking exact rate ties
/// uniformly at random with the caller's RNG.
pub fn select_best_ap<R: Rng>(
    current_ap: usize,
    rates_per_ap: &[f64],
    current_rate: f64,
    cost: f64,
    rng: &mut R,
) -> usize {
    let threshold = current_rate + cost;
    let mut best = f64::NEG_INFINITY;
    let mut candidates: Vec<usize> = Vec::new();
    for (w, &r) in rates_per_ap.iter().enumerate() {
        if w == current_ap || r.is_nan() || r <= threshold {
            continue;
        }
        if r > best {
            best = r;
            candidates.clear();
            candidates.push(w);
        } else if r == best {
            candidates.push(w);
        }
    }
    match candidates.len() {
        0 => current_ap,
        1 => candidates[0],
        n => candidates[rng.gen_range(0..n)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_snapshot, NetworkInstance, ScenarioConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Hand-built single-AP instance with explicit gains and noise.
    fn bespoke(gains: Vec<f64>, noise: Vec<f64>, budget: f64) -> NetworkInstance {
        let k = gains.len();
        NetworkInstance::from_parts(
            vec![0; k],
            vec![vec![gains]],
            vec![noise],
            vec![budget],
            vec![(0.0, 0.0)],
            vec![(1.0, 1.0)],
            0,
        )
        .unwrap()
    }

    #[test]
    fn single_channel_gets_full_budget() {
        let inst = bespoke(vec![0.8], vec![0.01], 1.5);
        let p = waterfill(&inst, 0, 0, &[0.0]);
        assert_eq!(p, vec![1.5]);
    }

    #[test]
    fn identical_channels_split_evenly() {
        let inst = bespoke(vec![0.5, 0.5], vec![0.02, 0.02], 1.0);
        let p = waterfill(&inst, 0, 0, &[0.3, 0.3]);
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!((p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_gain_channels_get_nothing() {
        let inst = bespoke(vec![0.0, 0.7, 0.0], vec![0.01; 3], 1.0);
        let p = waterfill(&inst, 0, 0, &[0.0; 3]);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[2], 0.0);
        assert!((p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_gains_zero_returns_zero_vector() {
        let inst = bespoke(vec![0.0, 0.0], vec![0.01; 2], 1.0);
        assert_eq!(waterfill(&inst, 0, 0, &[0.0; 2]), vec![0.0, 0.0]);
    }

    #[test]
    fn budget_is_spent_exactly_when_any_gain_positive() {
        for seed in 0..50u64 {
            let inst = generate_snapshot(&ScenarioConfig::new(1, 1, 5), seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
            let interf: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..0.2)).collect();
            let p = waterfill(&inst, 0, 0, &interf);
            let total: f64 = p.iter().sum();
            assert!(
                (total - inst.budgets[0]).abs() < 1e-10,
                "seed {seed}: budget not tight, Σp = {total}"
            );
        }
    }

    #[test]
    fn water_level_is_flat_across_active_channels() {
        // The defining property: active channels share one level
        // p_k + (n_k + I_k)/g_k, and inactive channels sit above it.
        for seed in 0..50u64 {
            let inst = generate_snapshot(&ScenarioConfig::new(1, 1, 6), seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234);
            let interf: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..0.5)).collect();
            let p = waterfill(&inst, 0, 0, &interf);
            let mut level: Option<f64> = None;
            for (j, &k) in inst.channels(0).iter().enumerate() {
                let g = inst.gains[0][0][k];
                if g <= 0.0 {
                    continue;
                }
                let v = (inst.noise[0][k] + interf[j]) / g;
                if p[j] > 1e-10 {
                    let this_level = p[j] + v;
                    if let Some(l) = level {
                        assert!(
                            (this_level - l).abs() <= 1e-8,
                            "seed {seed}: uneven water level"
                        );
                    } else {
                        level = Some(this_level);
                    }
                }
            }
            if let Some(l) = level {
                for (j, &k) in inst.channels(0).iter().enumerate() {
                    let g = inst.gains[0][0][k];
                    if g > 0.0 && p[j] <= 1e-10 {
                        let v = (inst.noise[0][k] + interf[j]) / g;
                        assert!(
                            v >= l - 1e-8,
                            "seed {seed}: inactive channel below water level"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn beats_random_feasible_vectors() {
        let inst = generate_snapshot(&ScenarioConfig::new(1, 1, 4), 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let interf: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..0.3)).collect();
        let (best, _) = best_rate_at(&inst, 0, 0, &interf);
        for _ in 0..100 {
            let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|x| x / total * inst.budgets[0]).collect();
            let r = rate(&inst, 0, 0, &p, &interf);
            assert!(best >= r, "waterfill rate {best} beaten by {r}");
        }
    }

    #[test]
    fn rate_weakly_decreases_with_interference() {
        let inst = generate_snapshot(&ScenarioConfig::new(1, 1, 4), 11).unwrap();
        let (clean, _) = best_rate_at(&inst, 0, 0, &[0.0; 4]);
        let (noisy, _) = best_rate_at(&inst, 0, 0, &[0.4; 4]);
        assert!(noisy <= clean);
    }

    #[test]
    fn selection_with_one_ap_always_stays() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(select_best_ap(0, &[5.0], 3.0, 0.0, &mut rng), 0);
    }

    #[test]
    fn improvement_below_cost_stays_put() {
        // Rate 4.0 at home; an AP offering 6.0 is only +2.0, below the
        // cost threshold of 3.0, so the CU must not move.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let next = select_best_ap(0, &[4.0, 6.0], 4.0, 3.0, &mut rng);
        assert_eq!(next, 0);
        // With the threshold cleared strictly, it moves.
        let next = select_best_ap(0, &[4.0, 7.1], 4.0, 3.0, &mut rng);
        assert_eq!(next, 1);
    }

    #[test]
    fn exact_threshold_is_not_enough() {
        // Strict inequality: improvement equal to the cost keeps the CU home.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(select_best_ap(0, &[4.0, 7.0], 4.0, 3.0, &mut rng), 0);
        assert_eq!(select_best_ap(0, &[4.0, 4.0], 4.0, 0.0, &mut rng), 0);
    }

    #[test]
    fn strictly_better_ap_with_distinct_rates_always_wins() {
        // Two candidate APs with distinct rates: the higher one is chosen in
        // every one of 1000 seeded trials.
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let next = select_best_ap(0, &[1.0, 2.5, 3.5], 1.0, 0.0, &mut rng);
            assert_eq!(next, 2, "seed {seed} picked {next}");
        }
    }

    #[test]
    fn exact_ties_are_broken_uniformly() {
        let mut counts = [0usize; 2];
        for seed in 0..2000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match select_best_ap(0, &[1.0, 2.0, 2.0], 1.0, 0.0, &mut rng) {
                1 => counts[0] += 1,
                2 => counts[1] += 1,
                other => panic!("unexpected AP {other}"),
            }
        }
        // Binomial(2000, ½): 3σ ≈ 67.
        assert!(
            (counts[0] as f64 - 1000.0).abs() < 67.0,
            "tie-break counts skewed: {counts:?}"
        );
    }
}
