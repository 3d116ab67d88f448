//! Ground-truth machinery that never reuses the simulator's own solvers'
//! logic: a projected-gradient maximizer for per-AP potentials, exhaustive
//! enumeration of all association profiles, the resulting throughput upper
//! bound T*, and the two reference baselines (closest-AP assignment and an
//! idealized multi-connectivity network).
//!
//! The per-AP potential is smooth and concave over a product of budget
//! simplices, so the projected-gradient stationarity certificate is global:
//! its maximum is both the best any coalition can do at that AP and the
//! AP's multiple-access sum capacity under the channel partition, which is
//! what makes `max_throughput` a hard cap on every realized sum rate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inner::{aiwf_solve, siwf_solve, StepsizeSchedule, DEFAULT_INNER_MAX_ITERS};
use crate::model::{AssociationProfile, NetworkInstance, PowerProfile};
use crate::physics::{interference_map, potential_ap, realized_rates};
use crate::trace::fmt_float;

/// Stationarity tolerance used by the oracle when the caller has no reason
/// to pick another one.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-9;

/// Hard limit on the number of association profiles the exhaustive sweep
/// will enumerate.
pub const MAX_ASSOCIATION_PROFILES: u128 = 1_000_000;

const PGA_MAX_ITERS: usize = 200_000;
const ARMIJO_SLOPE: f64 = 1e-4;
const MIN_STEP: f64 = 1e-18;

/// Projects `x` onto `{y : y ≥ 0, Σy ≤ budget}` (Euclidean projection).
///
/// When clamping negatives already lands inside the budget, that is the
/// projection; otherwise the result lies on the simplex `Σy = budget` and
/// is found by the sorted threshold construction.
fn project_budget_cap(x: &[f64], budget: f64) -> Vec<f64> {
    let clamped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    if clamped.iter().sum::<f64>() <= budget {
        return clamped;
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (m, &v) in sorted.iter().enumerate() {
        prefix += v;
        let candidate = (prefix - budget) / (m + 1) as f64;
        if v > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    x.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// Gradient of the per-AP potential with respect to every occupant's power
/// on every owned channel.
fn potential_gradient(
    inst: &NetworkInstance,
    w: usize,
    occupants: &[usize],
    powers: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let scale = 1.0 / (inst.num_channels as f64 * std::f64::consts::LN_2);
    inst.channels(w).iter().enumerate().fold(
        vec![vec![0.0; inst.num_channels_of(w)]; occupants.len()],
        |mut grad, (j, &k)| {
            let received: f64 = occupants
                .iter()
                .zip(powers)
                .map(|(&i, p)| inst.gains[i][w][k] * p[j])
                .sum();
            let denom = inst.noise[w][k] + received;
            for (slot, &i) in occupants.iter().enumerate() {
                grad[slot][j] = scale * inst.gains[i][w][k] / denom;
            }
            grad
        },
    )
}

fn potential_of(inst: &NetworkInstance, w: usize, occupants: &[usize], powers: &[Vec<f64>]) -> f64 {
    let refs: Vec<&[f64]> = powers.iter().map(|p| p.as_slice()).collect();
    potential_ap(inst, w, occupants, &refs)
}

/// Maximum of the per-AP potential over all feasible joint powers of
/// `occupants`, computed by projected gradient ascent with backtracking.
///
/// Stops when the unit-step projected-gradient mapping has max-norm ≤ `tol`
/// — a global optimality certificate, since the objective is concave on a
/// convex compact set. An empty occupant set contributes 0.
pub fn equilibrium_potential(
    inst: &NetworkInstance,
    w: usize,
    occupants: &[usize],
    tol: f64,
) -> f64 {
    if occupants.is_empty() {
        return 0.0;
    }
    let m = inst.num_channels_of(w);
    let mut powers: Vec<Vec<f64>> = occupants
        .iter()
        .map(|&i| vec![inst.budgets[i] / m as f64; m])
        .collect();
    let mut value = potential_of(inst, w, occupants, &powers);
    let mut step: f64 = 1.0;

    for _ in 0..PGA_MAX_ITERS {
        let grad = potential_gradient(inst, w, occupants, &powers);

        let mut gap: f64 = 0.0;
        for ((slot, &i), p) in occupants.iter().enumerate().zip(&powers) {
            let moved: Vec<f64> = p.iter().zip(&grad[slot]).map(|(x, g)| x + g).collect();
            let mapped = project_budget_cap(&moved, inst.budgets[i]);
            for (a, b) in mapped.iter().zip(p) {
                gap = gap.max((a - b).abs());
            }
        }
        if gap <= tol {
            break;
        }

        // Backtracking ascent step, warm-started from the last success.
        step = (step * 2.0).min(1e6);
        loop {
            let candidate: Vec<Vec<f64>> = occupants
                .iter()
                .enumerate()
                .map(|(slot, &i)| {
                    let moved: Vec<f64> = powers[slot]
                        .iter()
                        .zip(&grad[slot])
                        .map(|(x, g)| x + step * g)
                        .collect();
                    project_budget_cap(&moved, inst.budgets[i])
                })
                .collect();
            let along: f64 = candidate
                .iter()
                .zip(&powers)
                .zip(&grad)
                .map(|((c, p), g)| {
                    c.iter()
                        .zip(p)
                        .zip(g)
                        .map(|((x, y), gi)| gi * (x - y))
                        .sum::<f64>()
                })
                .sum();
            if along <= 0.0 {
                // No ascent direction left at any step: stationary.
                return value;
            }
            let cand_value = potential_of(inst, w, occupants, &candidate);
            if cand_value >= value + ARMIJO_SLOPE * along {
                powers = candidate;
                value = cand_value;
                break;
            }
            step *= 0.5;
            if step < MIN_STEP {
                return value;
            }
        }
    }
    value
}

/// One row of the exhaustive association table.
#[derive(Debug, Clone)]
pub struct SepEntry {
    /// The association profile (CU `i` → AP `assoc[i]`).
    pub assoc: Vec<usize>,
    /// Equilibrium potential of every AP under this association.
    pub per_ap: Vec<f64>,
    /// The system equilibrium potential: sum of the per-AP values.
    pub sep: f64,
}

/// Every association profile with its per-AP equilibrium potentials, plus
/// the index of the maximizer.
#[derive(Debug, Clone)]
pub struct SepTable {
    /// All Wᴺ profiles in lexicographic order of the association vector.
    pub entries: Vec<SepEntry>,
    /// Index of the SEP maximizer (lexicographically smallest on ties).
    pub best: usize,
}

impl SepTable {
    /// The maximizing entry.
    pub fn best_entry(&self) -> &SepEntry {
        &self.entries[self.best]
    }

    /// The maximizing association as a validated profile.
    pub fn best_assoc(&self, inst: &NetworkInstance) -> AssociationProfile {
        AssociationProfile::new(self.best_entry().assoc.clone(), inst.num_aps)
            .expect("table entries are valid profiles")
    }

    /// CSV dump: association encoding (indices joined by `-`), SEP, then
    /// one equilibrium-potential column per AP.
    pub fn to_csv_string(&self) -> String {
        let num_aps = self.entries.first().map_or(0, |e| e.per_ap.len());
        let mut out = String::from("association,sep");
        for w in 0..num_aps {
            out.push_str(&format!(",ep_{w}"));
        }
        out.push('\n');
        for entry in &self.entries {
            let encoding: Vec<String> = entry.assoc.iter().map(usize::to_string).collect();
            out.push_str(&encoding.join("-"));
            out.push(',');
            out.push_str(&fmt_float(entry.sep));
            for ep in &entry.per_ap {
                out.push(',');
                out.push_str(&fmt_float(*ep));
            }
            out.push('\n');
        }
        out
    }
}

/// Number of association profiles, or an error when it exceeds the sweep
/// limit.
fn association_space(inst: &NetworkInstance) -> Result<usize> {
    let mut combinations: u128 = 1;
    for _ in 0..inst.num_cus {
        combinations = combinations.saturating_mul(inst.num_aps as u128);
        if combinations > MAX_ASSOCIATION_PROFILES {
            return Err(Error::AssociationSpaceTooLarge {
                combinations,
                limit: MAX_ASSOCIATION_PROFILES,
            });
        }
    }
    Ok(combinations as usize)
}

/// Exhaustively evaluates the system equilibrium potential of every
/// association profile and returns the full table with its maximizer.
///
/// Per-AP potentials are memoized per occupant set, so the cost is
/// `W·2ᴺ` maximizations plus a cheap lookup per profile. Entries are
/// produced in lexicographic order and ties go to the lexicographically
/// smallest profile, which makes the table bit-for-bit reproducible.
pub fn exhaustive_sep(inst: &NetworkInstance, tol: f64) -> Result<SepTable> {
    let combinations = association_space(inst)?;
    let n = inst.num_cus;
    let w_count = inst.num_aps;

    if w_count == 1 {
        let occupants: Vec<usize> = (0..n).collect();
        let ep = equilibrium_potential(inst, 0, &occupants, tol);
        return Ok(SepTable {
            entries: vec![SepEntry {
                assoc: vec![0; n],
                per_ap: vec![ep],
                sep: ep,
            }],
            best: 0,
        });
    }

    // Memoized per-AP potentials over every occupant subset. The guard
    // bounds Wᴺ ≤ 10⁶, so N ≤ 19 here and the mask table fits comfortably.
    let subsets = 1usize << n;
    let ep_table: Vec<f64> = (0..w_count * subsets)
        .into_par_iter()
        .map(|flat| {
            let w = flat / subsets;
            let mask = flat % subsets;
            let occupants: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            equilibrium_potential(inst, w, &occupants, tol)
        })
        .collect();

    // Digit weights for decoding profile indices in lexicographic order.
    let weights: Vec<usize> = (0..n).map(|j| w_count.pow((n - 1 - j) as u32)).collect();

    let entries: Vec<SepEntry> = (0..combinations)
        .into_par_iter()
        .map(|idx| {
            let assoc: Vec<usize> = weights.iter().map(|&wt| idx / wt % w_count).collect();
            let mut masks = vec![0usize; w_count];
            for (i, &w) in assoc.iter().enumerate() {
                masks[w] |= 1 << i;
            }
            let per_ap: Vec<f64> = masks
                .iter()
                .enumerate()
                .map(|(w, &mask)| ep_table[w * subsets + mask])
                .collect();
            let sep = per_ap.iter().sum();
            SepEntry { assoc, per_ap, sep }
        })
        .collect();

    let mut best = 0;
    for (idx, entry) in entries.iter().enumerate() {
        if entry.sep > entries[best].sep {
            best = idx;
        }
    }
    Ok(SepTable { entries, best })
}

/// The network throughput upper bound T*: the largest system equilibrium
/// potential over all association profiles. Under the channel partition
/// each AP's maximal potential equals its multiple-access sum capacity, so
/// no realized sum of single-user-decoding rates can exceed T*.
pub fn max_throughput(inst: &NetworkInstance) -> Result<f64> {
    Ok(exhaustive_sep(inst, DEFAULT_ORACLE_TOL)?.best_entry().sep)
}

/// Outcome of the closest-AP baseline.
#[derive(Debug, Clone)]
pub struct BaselineOutcome {
    /// Distance-based association (ties to the lower AP index).
    pub assoc: AssociationProfile,
    /// Equilibrium powers under that association.
    pub powers: PowerProfile,
    /// Realized sum rate (bits).
    pub sum_rate: f64,
    /// Whether every per-AP power solve reached its tolerance.
    pub converged: bool,
}

/// Assigns every CU to its geographically closest AP (ties to the lower
/// index), solves the per-AP power games, and reports the realized sum
/// rate.
pub fn closest_ap_baseline(inst: &NetworkInstance, tol: f64) -> BaselineOutcome {
    let ap: Vec<usize> = (0..inst.num_cus)
        .map(|i| {
            (0..inst.num_aps)
                .fold((0usize, f64::INFINITY), |(best, dist), w| {
                    let d = inst.distance(i, w);
                    if d < dist {
                        (w, d)
                    } else {
                        (best, dist)
                    }
                })
                .0
        })
        .collect();
    let assoc = AssociationProfile::new(ap, inst.num_aps).expect("valid by construction");
    let mut powers = PowerProfile::uniform(inst, &assoc);
    let mut converged = true;
    for w in 0..inst.num_aps {
        let occupants = assoc.occupants(w);
        if occupants.is_empty() {
            continue;
        }
        let init: Vec<Vec<f64>> = occupants
            .iter()
            .map(|&i| powers.per_cu[i].clone())
            .collect();
        let result = siwf_solve(inst, w, &occupants, init, tol, DEFAULT_INNER_MAX_ITERS);
        converged &= result.converged;
        for (&i, p) in occupants.iter().zip(result.powers) {
            powers.per_cu[i] = p;
        }
    }
    let map = interference_map(inst, &assoc, &powers);
    let sum_rate = realized_rates(inst, &assoc, &powers, &map).iter().sum();
    BaselineOutcome {
        assoc,
        powers,
        sum_rate,
        converged,
    }
}

/// Outcome of the multi-connectivity baseline.
#[derive(Debug, Clone)]
pub struct MultiConnectivityOutcome {
    /// Realized sum rate (bits) in the virtual all-channels network.
    pub sum_rate: f64,
    /// System potential of the virtual network at the solved powers.
    pub potential: f64,
    /// Whether the damped water-filling solve converged.
    pub converged: bool,
    /// Sweeps the solve used.
    pub iterations: usize,
}

/// Fuses all K channels into one virtual AP: each channel keeps its gains
/// toward (and noise at) its owning AP, and every CU's budget spans the
/// whole band. This is the network a multi-connectivity CU effectively
/// plays in.
pub fn collapse_to_single_ap(inst: &NetworkInstance) -> Result<NetworkInstance> {
    let gains: Vec<Vec<Vec<f64>>> = (0..inst.num_cus)
        .map(|i| {
            vec![(0..inst.num_channels)
                .map(|k| inst.gains[i][inst.channel_owner[k]][k])
                .collect()]
        })
        .collect();
    let noise: Vec<Vec<f64>> = vec![(0..inst.num_channels)
        .map(|k| inst.noise[inst.channel_owner[k]][k])
        .collect()];
    NetworkInstance::from_parts(
        vec![0; inst.num_channels],
        gains,
        noise,
        inst.budgets.clone(),
        inst.positions_cu.clone(),
        vec![inst.positions_ap[0]],
        inst.rng_seed,
    )
}

/// Idealized network where every CU may spread its budget over all K
/// channels at once: the channels are fused into one virtual AP (see
/// [`collapse_to_single_ap`]) and the resulting single spectrum-sharing
/// game is solved by damped simultaneous water-filling.
pub fn multi_connectivity_baseline(
    inst: &NetworkInstance,
    tol: f64,
) -> Result<MultiConnectivityOutcome> {
    let virtual_inst = collapse_to_single_ap(inst)?;

    let occupants: Vec<usize> = (0..inst.num_cus).collect();
    let result = aiwf_solve(
        &virtual_inst,
        0,
        &occupants,
        crate::inner::uniform_init(&virtual_inst, 0, &occupants),
        StepsizeSchedule::default(),
        tol,
        DEFAULT_INNER_MAX_ITERS,
    );
    let assoc = AssociationProfile::new(vec![0; inst.num_cus], 1).expect("single AP");
    let powers = PowerProfile {
        per_cu: result.powers,
    };
    let map = interference_map(&virtual_inst, &assoc, &powers);
    let sum_rate = realized_rates(&virtual_inst, &assoc, &powers, &map)
        .iter()
        .sum();
    let potential = crate::physics::system_potential(&virtual_inst, &assoc, &powers);
    Ok(MultiConnectivityOutcome {
        sum_rate,
        potential,
        converged: result.converged,
        iterations: result.iterations,
    })
}
