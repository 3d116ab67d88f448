//! J-JASPA: the joint-strategy learning algorithm in which CUs remember
//! whole (association, interference, rate) experiences and APs cache one
//! power/interference record per occupant coalition.
//!
//! Each iteration runs in barrier-separated phases:
//!
//! 1. every CU appends its current AP, its full per-AP interference
//!    snapshot, and its realized rate to three aligned FIFOs;
//! 2. every AP refreshes the record of its current occupant coalition
//!    (visit count, last powers, last interference);
//! 3. every CU samples **one** past iteration uniformly from its memory
//!    window and reads the aligned triple `(â, Î, R̂)`;
//! 4. the CU moves to an AP drawn uniformly from the set of APs whose
//!    best-response rate under the remembered interference strictly beats
//!    the remembered rate, with the sampled `â` always included;
//! 5. at the realized new coalition, the CU replays the AP's record with a
//!    visit-count-damped water-filling step, or draws a random feasible
//!    power when the coalition has never been seen.
//!
//! With a single AP the coalition never changes, so step 5 degenerates to
//! exactly the damped simultaneous water-filling of the inner solver.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};

use crate::best_response::{best_rate_at, waterfill};
use crate::error::Result;
use crate::learn::{GameState, LearnConfig};
use crate::model::{AssociationProfile, NetworkInstance, PowerProfile};
use crate::physics::{interference_map, realized_rates, sum_rate, system_potential};
use crate::trace::{Algorithm, RunTrace, TraceRow};

/// Cap on stored coalition records per AP; beyond it the least recently
/// visited record is evicted (with a trace warning), since the number of
/// possible coalitions grows exponentially in the CU count.
pub const COALITION_CAP: usize = 4096;

/// Canonical order-independent key for an occupant set: the sorted index
/// list. Identical sets map to identical keys; the empty set is valid.
pub fn coalition_key(mut occupants: Vec<usize>) -> Vec<usize> {
    occupants.sort_unstable();
    occupants
}

/// One AP's cached experience with a specific occupant coalition.
#[derive(Debug, Clone)]
pub struct CoalitionRecord {
    /// Last observed powers, aligned with the sorted occupant key.
    pub powers: Vec<Vec<f64>>,
    /// Last observed per-occupant interference on this AP's channels,
    /// aligned with the sorted occupant key.
    pub interference: Vec<Vec<f64>>,
    /// Times this coalition has been the AP's occupant set (≥ 1).
    pub visits: u64,
    /// Iteration of the most recent visit, for eviction ordering.
    last_visit: usize,
}

/// Per-AP coalition store with least-recently-visited eviction.
#[derive(Debug, Clone, Default)]
struct ApRecords {
    map: BTreeMap<Vec<usize>, CoalitionRecord>,
    evictions: u64,
}

impl ApRecords {
    /// Registers a visit of `key` at `iteration`, refreshing the stored
    /// profiles and visit count. Returns true when an old record had to be
    /// evicted to make room.
    fn note_visit(
        &mut self,
        key: Vec<usize>,
        powers: Vec<Vec<f64>>,
        interference: Vec<Vec<f64>>,
        iteration: usize,
        cap: usize,
    ) -> bool {
        if let Some(rec) = self.map.get_mut(&key) {
            rec.visits += 1;
            rec.powers = powers;
            rec.interference = interference;
            rec.last_visit = iteration;
            return false;
        }
        let mut evicted = false;
        if self.map.len() >= cap {
            let stale = self
                .map
                .iter()
                .min_by_key(|(_, rec)| rec.last_visit)
                .map(|(k, _)| k.clone())
                .expect("non-empty map at cap");
            self.map.remove(&stale);
            self.evictions += 1;
            evicted = true;
        }
        self.map.insert(
            key,
            CoalitionRecord {
                powers,
                interference,
                visits: 1,
                last_visit: iteration,
            },
        );
        evicted
    }

    fn get(&self, key: &[usize]) -> Option<&CoalitionRecord> {
        self.map.get(key)
    }

    fn len(&self) -> usize {
        self.map.len()
    }
}

/// A CU's three aligned experience FIFOs: past APs, past full interference
/// snapshots (one vector per AP), and past realized rates. Entries at the
/// same position always originate from the same iteration.
#[derive(Debug, Clone)]
pub struct CuMemories {
    aps: VecDeque<usize>,
    snapshots: VecDeque<Vec<Vec<f64>>>,
    rates: VecDeque<f64>,
    capacity: usize,
}

impl CuMemories {
    /// Empty memories with room for `capacity` iterations.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "memory capacity must be ≥ 1");
        Self {
            aps: VecDeque::with_capacity(capacity + 1),
            snapshots: VecDeque::with_capacity(capacity + 1),
            rates: VecDeque::with_capacity(capacity + 1),
            capacity,
        }
    }

    /// Appends one iteration's experience, evicting the oldest when full.
    pub fn push(&mut self, ap: usize, snapshot: Vec<Vec<f64>>, rate: f64) {
        self.aps.push_back(ap);
        self.snapshots.push_back(snapshot);
        self.rates.push_back(rate);
        if self.aps.len() > self.capacity {
            self.aps.pop_front();
            self.snapshots.pop_front();
            self.rates.pop_front();
        }
        debug_assert!(self.aps.len() == self.snapshots.len() && self.aps.len() == self.rates.len());
    }

    /// Stored iterations (the sampling window M̂ ≤ capacity).
    pub fn len(&self) -> usize {
        self.aps.len()
    }

    /// True before the first push.
    pub fn is_empty(&self) -> bool {
        self.aps.is_empty()
    }

    /// Draws one stored iteration uniformly and returns its aligned
    /// `(â, Î, R̂)` triple.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> (usize, &[Vec<f64>], f64) {
        assert!(!self.is_empty(), "cannot sample an empty memory");
        let idx = if self.len() == 1 {
            0
        } else {
            rng.gen_range(0..self.len())
        };
        (
            self.aps[idx],
            self.snapshots[idx].as_slice(),
            self.rates[idx],
        )
    }

    /// Relative frequency of `ap` among the stored associations.
    pub fn frequency(&self, ap: usize) -> f64 {
        if self.aps.is_empty() {
            return 0.0;
        }
        self.aps.iter().filter(|&&w| w == ap).count() as f64 / self.aps.len() as f64
    }
}

/// The APs a CU considers moving to, given a sampled experience: every AP
/// whose best-response rate under the remembered interference strictly
/// beats the remembered rate, plus the sampled association itself (so a CU
/// is never forced off it). Returned in ascending AP order.
fn candidate_aps(
    inst: &NetworkInstance,
    i: usize,
    a_hat: usize,
    snapshot: &[Vec<f64>],
    r_hat: f64,
) -> Vec<usize> {
    let mut cands = Vec::new();
    for (w, row) in snapshot.iter().enumerate() {
        if w == a_hat {
            cands.push(w);
        } else {
            let (best, _) = best_rate_at(inst, i, w, row);
            if best > r_hat {
                cands.push(w);
            }
        }
    }
    cands
}

/// Runs J-JASPA and reports the trace; see the module docs for the phase
/// structure. `config.costs` and `config.inner_solver` are ignored — the
/// algorithm has no connection-cost rule and never solves inner equilibria.
///
/// Trace rows record the state after the iteration's simultaneous updates;
/// `max_beta_gap` is the worst per-CU share of memory entries naming an AP
/// other than its current one, and `distinct_coalitions` counts the records
/// held across all APs.
pub fn run_jjaspa(inst: &NetworkInstance, config: &LearnConfig, seed: u64) -> Result<RunTrace> {
    run_jjaspa_inner(inst, config, seed, COALITION_CAP, |_, _, _| {}).map(|(trace, _)| trace)
}

/// Full-visibility variant used by tests: `observe` is called with the
/// post-initialization state (iteration 0) and after every iteration's
/// updates, and the per-AP coalition stores are returned.
fn run_jjaspa_inner(
    inst: &NetworkInstance,
    config: &LearnConfig,
    seed: u64,
    cap: usize,
    mut observe: impl FnMut(usize, &AssociationProfile, &PowerProfile),
) -> Result<(RunTrace, Vec<ApRecords>)> {
    config.validate(inst)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GameState::random_init(inst, config.memory, &mut rng);
    let mut memories: Vec<CuMemories> = (0..inst.num_cus)
        .map(|_| CuMemories::new(config.memory))
        .collect();
    let mut records: Vec<ApRecords> = vec![ApRecords::default(); inst.num_aps];
    let window = config.window(inst);
    let scale = config.rate_scale;

    let mut warnings = Vec::new();
    let mut evict_warned = false;
    let mut rows = Vec::new();
    let mut streak = 0usize;
    let mut converged = false;

    observe(0, &state.assoc, &state.powers);

    for t in 0..config.max_iters {
        let map = interference_map(inst, &state.assoc, &state.powers);
        let rates = realized_rates(inst, &state.assoc, &state.powers, &map);

        // Phase 1: memory pushes (full per-AP interference snapshot).
        for i in 0..inst.num_cus {
            let snapshot: Vec<Vec<f64>> =
                (0..inst.num_aps).map(|w| map.row(i, w).to_vec()).collect();
            memories[i].push(state.assoc.ap[i], snapshot, rates[i]);
        }

        // Phase 2: AP records for the current (pre-move) coalitions.
        for (w, record) in records.iter_mut().enumerate() {
            let occupants = state.assoc.occupants(w);
            if occupants.is_empty() {
                continue;
            }
            let powers_q: Vec<Vec<f64>> = occupants
                .iter()
                .map(|&i| state.powers.per_cu[i].clone())
                .collect();
            let interf_q: Vec<Vec<f64>> =
                occupants.iter().map(|&i| map.row(i, w).to_vec()).collect();
            let evicted = record.note_visit(occupants, powers_q, interf_q, t, cap);
            if evicted && !evict_warned {
                warnings.push(format!(
                    "AP {w} exceeded {cap} stored coalitions at iteration {}; evicting \
                     least recently visited records",
                    t + 1
                ));
                evict_warned = true;
            }
        }

        // Phases 3–4: sample an experience, pick the next AP.
        let mut next_ap = vec![0usize; inst.num_cus];
        for i in 0..inst.num_cus {
            let (a_hat, snapshot, r_hat) = memories[i].sample(&mut rng);
            let cands = candidate_aps(inst, i, a_hat, snapshot, r_hat);
            next_ap[i] = if cands.len() == 1 {
                cands[0]
            } else {
                cands[rng.gen_range(0..cands.len())]
            };
        }

        let num_switchers = (0..inst.num_cus)
            .filter(|&i| next_ap[i] != state.assoc.ap[i])
            .count();
        let old_powers = state.powers.clone();
        state.assoc =
            AssociationProfile::new(next_ap, inst.num_aps).expect("valid by construction");

        // Phase 5: power updates under the realized new coalitions.
        let new_occupants: Vec<Vec<usize>> = (0..inst.num_aps)
            .map(|w| state.assoc.occupants(w))
            .collect();
        for i in 0..inst.num_cus {
            let w = state.assoc.ap[i];
            let key = &new_occupants[w];
            state.powers.per_cu[i] = match records[w].get(key) {
                Some(rec) => {
                    let pos = key.binary_search(&i).expect("occupant present in own key");
                    let alpha = config.schedule.alpha((rec.visits - 1) as usize);
                    let best = waterfill(inst, i, w, &rec.interference[pos]);
                    rec.powers[pos]
                        .iter()
                        .zip(&best)
                        .map(|(x, y)| (1.0 - alpha) * x + alpha * y)
                        .collect()
                }
                None => random_feasible_power(inst, i, w, &mut rng),
            };
        }
        debug_assert!(state.powers.is_feasible_under(inst, &state.assoc));

        // Stability: nobody moved and powers barely changed.
        let power_change = if num_switchers == 0 {
            state
                .powers
                .per_cu
                .iter()
                .zip(&old_powers.per_cu)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        let stable = num_switchers == 0 && power_change < config.inner_tol;
        streak = if stable { streak + 1 } else { 0 };

        let mut declare = false;
        if streak >= window {
            let cert =
                crate::learn::certify_jep(inst, &state.assoc, &state.powers, config.cert_tol);
            if cert.passed {
                declare = true;
            } else {
                streak = 0;
            }
        }

        let beta_gap = (0..inst.num_cus)
            .map(|i| 1.0 - memories[i].frequency(state.assoc.ap[i]))
            .fold(0.0, f64::max);
        let distinct: usize = records.iter().map(ApRecords::len).sum();

        rows.push(TraceRow {
            iteration: t + 1,
            sum_rate: sum_rate(inst, &state.assoc, &state.powers) * scale,
            potential: system_potential(inst, &state.assoc, &state.powers) * scale,
            num_switchers,
            max_beta_gap: beta_gap,
            converged: declare,
            distinct_coalitions: Some(distinct),
        });

        state.iteration = t + 1;
        observe(t + 1, &state.assoc, &state.powers);
        if declare {
            converged = true;
            break;
        }
    }

    let final_sum_rate = rows.last().map_or(0.0, |r| r.sum_rate);
    let trace = RunTrace {
        algorithm: Algorithm::JJaspa,
        seed,
        converged,
        iterations_to_converge: converged.then_some(state.iteration),
        rows,
        final_assoc: state.assoc,
        final_powers: state.powers,
        final_sum_rate,
        warnings,
    };
    Ok((trace, records))
}

/// A uniformly random point of the feasible power set at AP `w`: a flat
/// Dirichlet draw over the AP's channels scaled by the CU's full budget
/// (a single-channel AP just gets the whole budget).
fn random_feasible_power<R: Rng>(
    inst: &NetworkInstance,
    i: usize,
    w: usize,
    rng: &mut R,
) -> Vec<f64> {
    let m = inst.num_channels_of(w);
    if m == 1 {
        return vec![inst.budgets[i]];
    }
    let dirichlet = Dirichlet::new(&vec![1.0; m]).expect("flat Dirichlet is valid for m ≥ 2");
    dirichlet
        .sample(rng)
        .into_iter()
        .map(|x| x * inst.budgets[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::{aiwf_solve, uniform_init};
    use crate::learn::certify_jep;
    use crate::model::{generate_snapshot, ScenarioConfig};
    use std::collections::HashMap;

    fn instance(n: usize, w: usize, k: usize, seed: u64) -> NetworkInstance {
        generate_snapshot(&ScenarioConfig::new(n, w, k), seed).unwrap()
    }

    #[test]
    fn memory_triples_stay_aligned() {
        // Tag each iteration's snapshot and rate with the same marker and
        // confirm sampling never mixes iterations.
        let mut mem = CuMemories::new(5);
        for marker in 0..8usize {
            let snapshot = vec![vec![marker as f64; 2]; 2];
            mem.push(marker % 2, snapshot, marker as f64);
        }
        assert_eq!(mem.len(), 5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let (ap, snap, rate) = mem.sample(&mut rng);
            assert_eq!(
                snap[0][0], rate,
                "snapshot and rate from different iterations"
            );
            assert_eq!(
                ap,
                (rate as usize) % 2,
                "ap and rate from different iterations"
            );
            assert!((3.0..=7.0).contains(&rate), "evicted entry sampled");
        }
    }

    #[test]
    fn partial_memory_samples_only_whats_stored() {
        let mut mem = CuMemories::new(10);
        for marker in 0..3usize {
            mem.push(0, vec![vec![0.0]], marker as f64);
        }
        assert_eq!(mem.len(), 3, "window is min(capacity, iterations)");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = [false; 3];
        for _ in 0..500 {
            let (_, _, rate) = mem.sample(&mut rng);
            seen[rate as usize] = true;
        }
        assert!(seen.iter().all(|&s| s), "uniform sampling missed an entry");
    }

    #[test]
    fn candidates_always_include_the_sampled_association() {
        let inst = instance(2, 3, 6, 50);
        // A remembered rate no AP can beat: only the sampled AP remains.
        let snapshot: Vec<Vec<f64>> = (0..inst.num_aps)
            .map(|w| vec![0.0; inst.num_channels_of(w)])
            .collect();
        let only = candidate_aps(&inst, 0, 1, &snapshot, f64::INFINITY);
        assert_eq!(only, vec![1]);
        // A remembered rate of zero: every AP with positive best rate joins,
        // and the sampled AP is still present.
        let all = candidate_aps(&inst, 0, 1, &snapshot, 0.0);
        assert!(all.contains(&1));
        assert!(!all.is_empty());
        for pair in all.windows(2) {
            assert!(pair[0] < pair[1], "candidates not in ascending order");
        }
    }

    #[test]
    fn coalition_keys_are_order_independent() {
        assert_eq!(coalition_key(vec![3, 1, 2]), coalition_key(vec![2, 3, 1]));
        assert_eq!(coalition_key(vec![]), Vec::<usize>::new());
    }

    #[test]
    fn coalition_keys_collide_only_for_equal_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sets: Vec<Vec<usize>> = (0..1000)
            .map(|_| {
                let len = rng.gen_range(0..5);
                let mut s: Vec<usize> = Vec::new();
                while s.len() < len {
                    let x = rng.gen_range(0..8);
                    if !s.contains(&x) {
                        s.push(x);
                    }
                }
                s
            })
            .collect();
        for a in &sets {
            for b in &sets {
                let same_set = {
                    let mut x = a.clone();
                    let mut y = b.clone();
                    x.sort_unstable();
                    y.sort_unstable();
                    x == y
                };
                assert_eq!(
                    coalition_key(a.clone()) == coalition_key(b.clone()),
                    same_set,
                    "key collision mismatch for {a:?} vs {b:?}"
                );
            }
        }
    }

    #[test]
    fn eviction_removes_least_recently_visited() {
        let mut recs = ApRecords::default();
        let profile = |v: f64| (vec![vec![v]], vec![vec![0.0]]);
        let (p, q) = profile(1.0);
        assert!(!recs.note_visit(vec![0], p, q, 0, 2));
        let (p, q) = profile(2.0);
        assert!(!recs.note_visit(vec![1], p, q, 1, 2));
        // Revisit {0} so {1} becomes the stalest.
        let (p, q) = profile(3.0);
        assert!(!recs.note_visit(vec![0], p, q, 2, 2));
        let (p, q) = profile(4.0);
        assert!(
            recs.note_visit(vec![2], p, q, 3, 2),
            "cap reached: must evict"
        );
        assert!(recs.get(&[1]).is_none(), "least recently visited survived");
        assert!(recs.get(&[0]).is_some());
        assert!(recs.get(&[2]).is_some());
        assert_eq!(recs.evictions, 1);
    }

    #[test]
    fn visit_counts_accumulate_and_profiles_refresh() {
        let mut recs = ApRecords::default();
        recs.note_visit(vec![0, 2], vec![vec![1.0]], vec![vec![0.1]], 0, 16);
        recs.note_visit(vec![0, 2], vec![vec![2.0]], vec![vec![0.2]], 1, 16);
        let rec = recs.get(&[0, 2]).unwrap();
        assert_eq!(rec.visits, 2);
        assert_eq!(rec.powers, vec![vec![2.0]]);
        assert_eq!(rec.interference, vec![vec![0.2]]);
    }

    #[test]
    fn single_ap_run_replays_damped_waterfilling() {
        let inst = instance(3, 1, 4, 51);
        let config = LearnConfig {
            max_iters: 2000,
            ..LearnConfig::default()
        };
        let trace = run_jjaspa(&inst, &config, 8).unwrap();
        assert!(trace.converged, "single-AP run failed to converge");

        let occupants = [0usize, 1, 2];
        let inner = aiwf_solve(
            &inst,
            0,
            &occupants,
            uniform_init(&inst, 0, &occupants),
            config.schedule,
            config.inner_tol,
            config.inner_max_iters,
        );
        assert!(inner.converged);
        let inner_final = *inner.potential_steps.last().unwrap();
        let run_final = trace.rows.last().unwrap().potential;
        assert!(
            (run_final - inner_final).abs() < 1e-6,
            "jjaspa {run_final} vs damped inner {inner_final}"
        );
        // The trajectories coincide step for step: trace row t is the
        // potential after the t-th damped update.
        let prefix = trace
            .rows
            .len()
            .min(inner.potential_steps.len() - 1)
            .min(30);
        for t in 0..prefix {
            let a = trace.rows[t].potential;
            let b = inner.potential_steps[t + 1];
            assert!(
                (a - b).abs() < 1e-9,
                "trajectories diverged at step {t}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn visit_counters_match_an_independent_tally() {
        let inst = instance(4, 2, 6, 52);
        // A tolerance no run can meet keeps the loop going to max_iters,
        // exercising plenty of coalition revisits.
        let config = LearnConfig {
            max_iters: 120,
            cert_tol: 1e-300,
            ..LearnConfig::default()
        };
        let mut observed: Vec<Vec<usize>> = Vec::new();
        let (trace, records) = run_jjaspa_inner(&inst, &config, 3, COALITION_CAP, |_, a, _| {
            observed.push(a.ap.clone());
        })
        .unwrap();
        assert!(!trace.converged);

        // Records are updated from the pre-move association of each
        // iteration, i.e. every observed state except the final one.
        let mut tally: HashMap<(usize, Vec<usize>), u64> = HashMap::new();
        for assoc in &observed[..observed.len() - 1] {
            let profile = AssociationProfile::new(assoc.clone(), inst.num_aps).unwrap();
            for w in 0..inst.num_aps {
                let occ = profile.occupants(w);
                if !occ.is_empty() {
                    *tally.entry((w, occ)).or_insert(0) += 1;
                }
            }
        }
        for (w, recs) in records.iter().enumerate() {
            assert_eq!(recs.evictions, 0, "unexpected eviction in a small run");
            for (key, rec) in &recs.map {
                let expected = tally.get(&(w, key.clone())).copied().unwrap_or(0);
                assert_eq!(
                    rec.visits, expected,
                    "AP {w} coalition {key:?}: stored {} vs counted {expected}",
                    rec.visits
                );
            }
            // And nothing was visited without being stored.
            let stored: usize = recs.map.len();
            let counted = tally.keys().filter(|(ap, _)| *ap == w).count();
            assert_eq!(stored, counted);
        }
    }

    #[test]
    fn recurring_coalitions_approach_a_fixed_power_point() {
        // Force a long run, find the association that recurs most, and
        // check that per-AP potentials along its recurrences settle and the
        // last snapshot is a per-AP equilibrium.
        let inst = instance(3, 2, 4, 53);
        let config = LearnConfig {
            max_iters: 1500,
            cert_tol: 1e-300,
            ..LearnConfig::default()
        };
        let mut by_assoc: HashMap<Vec<usize>, Vec<f64>> = HashMap::new();
        let mut last_state: HashMap<Vec<usize>, (AssociationProfile, PowerProfile)> =
            HashMap::new();
        let (_, _) = run_jjaspa_inner(&inst, &config, 5, COALITION_CAP, |iter, a, p| {
            if iter == 0 {
                return;
            }
            by_assoc
                .entry(a.ap.clone())
                .or_default()
                .push(system_potential(&inst, a, p));
            last_state.insert(a.ap.clone(), (a.clone(), p.clone()));
        })
        .unwrap();

        let (assoc_key, potentials) = by_assoc
            .iter()
            .max_by_key(|(_, v)| v.len())
            .expect("at least one association observed");
        assert!(
            potentials.len() >= 200,
            "premise not met: most frequent association recurred only {} times",
            potentials.len()
        );
        let tail = &potentials[potentials.len() - 50..];
        for pair in tail.windows(2) {
            assert!(
                (pair[1] - pair[0]).abs() < 1e-4,
                "recurrence subsequence still moving: {} -> {}",
                pair[0],
                pair[1]
            );
        }

        // Per-AP equilibrium certificate on the last recurrence snapshot:
        // no occupant gains more than 1e-3 by re-water-filling at home.
        let (assoc, powers) = &last_state[assoc_key];
        let map = interference_map(&inst, assoc, powers);
        let rates = realized_rates(&inst, assoc, powers, &map);
        for (i, &rate) in rates.iter().enumerate() {
            let w = assoc.ap[i];
            let (best, _) = best_rate_at(&inst, i, w, map.row(i, w));
            assert!(
                best - rate <= 1e-3,
                "CU {i} still gains {} at its own AP",
                best - rate
            );
        }
    }

    #[test]
    fn converged_runs_pass_the_equilibrium_certificate() {
        let inst = instance(4, 2, 6, 54);
        let config = LearnConfig {
            max_iters: 2000,
            ..LearnConfig::default()
        };
        let trace = run_jjaspa(&inst, &config, 11).unwrap();
        assert!(trace.converged);
        let cert = certify_jep(&inst, &trace.final_assoc, &trace.final_powers, 1e-6);
        assert!(cert.passed, "worst gap {}", cert.worst_gap);
    }

    #[test]
    fn single_channel_aps_always_carry_full_budget() {
        // Two APs owning one channel each: water-filling, damping, and
        // random feasible draws all collapse to the full budget.
        let inst = instance(3, 2, 2, 55);
        let config = LearnConfig {
            max_iters: 60,
            cert_tol: 1e-300,
            ..LearnConfig::default()
        };
        run_jjaspa_inner(&inst, &config, 6, COALITION_CAP, |_, a, p| {
            for i in 0..inst.num_cus {
                assert_eq!(p.per_cu[i].len(), 1);
                let budget = inst.budgets[i];
                assert!(
                    (p.per_cu[i][0] - budget).abs() < 1e-12,
                    "CU {i} at AP {} holds {} instead of its budget {budget}",
                    a.ap[i],
                    p.per_cu[i][0]
                );
            }
        })
        .unwrap();
    }

    #[test]
    fn random_feasible_powers_live_on_the_budget_simplex() {
        let inst = instance(2, 2, 8, 56);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let p = random_feasible_power(&inst, 0, 0, &mut rng);
            assert_eq!(p.len(), inst.num_channels_of(0));
            assert!(p.iter().all(|&x| x >= 0.0));
            let total: f64 = p.iter().sum();
            assert!(
                (total - inst.budgets[0]).abs() < 1e-9,
                "Dirichlet draw sums to {total}"
            );
        }
    }

    #[test]
    fn traces_report_distinct_coalitions_and_reproduce() {
        let inst = instance(4, 3, 6, 57);
        let config = LearnConfig {
            max_iters: 200,
            ..LearnConfig::default()
        };
        let a = run_jjaspa(&inst, &config, 12).unwrap();
        let b = run_jjaspa(&inst, &config, 12).unwrap();
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        let counts: Vec<usize> = a
            .rows
            .iter()
            .map(|r| r.distinct_coalitions.expect("column present"))
            .collect();
        for pair in counts.windows(2) {
            assert!(
                pair[0] <= pair[1],
                "stored coalitions shrank without eviction"
            );
        }
        assert!(*counts.last().unwrap() >= 1);
    }
}
