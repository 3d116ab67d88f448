//! Outer-loop equilibrium-learning algorithms: JASPA, Se-JASPA, and
//! Si-JASPA, plus the reply-memory machinery and the joint-equilibrium
//! certificate they all share.
//!
//! All three runners draw every random decision from a [`ChaCha8Rng`]
//! seeded with the caller's seed, so a run is a pure function of
//! `(instance, config, seed)` and traces reproduce byte for byte.
//!
//! # Rate units
//! Internally all rates are bits (base-2 logs). `LearnConfig::rate_scale`
//! multiplies every rate before it reaches a switching decision or a trace
//! row, so reported values and connection costs live in "report units"
//! (`report = bits × rate_scale`). Scaling all rates by one positive
//! constant never changes an argmax-based decision when costs are zero —
//! a property the tests pin down by running the same seed under two scales.

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::best_response::{best_rate_at, select_best_ap};
use crate::error::{Error, Result};
use crate::inner::{aiwf_solve, siwf_solve, InnerResult, StepsizeSchedule};
use crate::model::{AssociationProfile, NetworkInstance, PowerProfile};
use crate::physics::{interference_map, realized_rates, system_potential, InterferenceMap};
use crate::trace::{Algorithm, RunTrace, TraceRow};

/// Reply distributions count as concentrated when their largest entry is
/// within this gap of 1.
pub const BETA_CONCENTRATION_GAP: f64 = 1e-9;

/// Per-CU connection costs (minimum rate improvement worth switching for),
/// in report units.
#[derive(Debug, Clone)]
pub enum Costs {
    /// The same cost for every CU.
    Uniform(f64),
    /// One cost per CU.
    PerCu(Vec<f64>),
}

impl Costs {
    /// Cost of CU `i`.
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        match self {
            Costs::Uniform(c) => *c,
            Costs::PerCu(v) => v[i],
        }
    }

    fn validate(&self, num_cus: usize) -> Result<()> {
        let all_ok = match self {
            Costs::Uniform(c) => *c >= 0.0,
            Costs::PerCu(v) => {
                if v.len() != num_cus {
                    return Err(Error::DimensionMismatch {
                        expected: num_cus,
                        got: v.len(),
                    });
                }
                v.iter().all(|c| *c >= 0.0)
            }
        };
        if all_ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("connection costs must be ≥ 0".into()))
        }
    }
}

/// Which fixed-association solver the outer loop uses between moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolverKind {
    /// Simultaneous damped iterative water-filling.
    Aiwf,
    /// Sequential best responses (default: deterministic and fast).
    Siwf,
}

/// Shared configuration for the outer-loop runners.
#[derive(Debug, Clone)]
pub struct LearnConfig {
    /// Reply-memory capacity M (≥ 1). Memories at least as long as the CU
    /// count give the strongest convergence behavior; shorter memories are
    /// allowed and flagged with a trace warning.
    pub memory: usize,
    /// Connection costs, in report units.
    pub costs: Costs,
    /// Inner-loop solver for JASPA's per-iteration equilibria.
    pub inner_solver: InnerSolverKind,
    /// Inner-loop best-response residual tolerance.
    pub inner_tol: f64,
    /// Inner-loop sweep cap.
    pub inner_max_iters: usize,
    /// Diminishing step sizes for damped power updates.
    pub schedule: StepsizeSchedule,
    /// Outer iteration cap.
    pub max_iters: usize,
    /// Consecutive stable iterations required before certification is
    /// attempted; 0 means "use the memory length".
    pub stop_window: usize,
    /// Equilibrium certificate tolerance (bits) used as the convergence
    /// hard gate.
    pub cert_tol: f64,
    /// Multiplier turning bits into report units (> 0).
    pub rate_scale: f64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            memory: 10,
            costs: Costs::Uniform(0.0),
            inner_solver: InnerSolverKind::Siwf,
            inner_tol: crate::inner::DEFAULT_INNER_TOL,
            inner_max_iters: crate::inner::DEFAULT_INNER_MAX_ITERS,
            schedule: StepsizeSchedule::default(),
            max_iters: 1000,
            stop_window: 0,
            cert_tol: 1e-6,
            rate_scale: 1.0,
        }
    }
}

impl LearnConfig {
    pub(crate) fn validate(&self, inst: &NetworkInstance) -> Result<()> {
        if self.memory == 0 {
            return Err(Error::InvalidConfig("memory capacity must be ≥ 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be ≥ 1".into()));
        }
        let bad = |x: f64| x.is_nan() || x <= 0.0;
        if bad(self.inner_tol) || bad(self.cert_tol) {
            return Err(Error::InvalidConfig("tolerances must be > 0".into()));
        }
        if bad(self.rate_scale) {
            return Err(Error::InvalidConfig("rate_scale must be > 0".into()));
        }
        self.costs.validate(inst.num_cus)
    }

    /// Effective stability window. A single-AP network has no association
    /// randomness to wait out, so one stable iteration suffices there.
    pub(crate) fn window(&self, inst: &NetworkInstance) -> usize {
        if inst.num_aps == 1 {
            1
        } else if self.stop_window == 0 {
            self.memory
        } else {
            self.stop_window
        }
    }
}

/// Sliding-window memory of a CU's recent best replies, with the empirical
/// distribution β derived from it.
///
/// Pushing beyond capacity evicts the oldest entry, so β is always the
/// arithmetic mean of the stored elementary replies: a probability vector
/// by construction.
#[derive(Debug, Clone)]
pub struct ReplyMemory {
    picks: VecDeque<usize>,
    capacity: usize,
    num_aps: usize,
}

impl ReplyMemory {
    /// Empty memory with room for `capacity` replies over `num_aps` APs.
    pub fn new(capacity: usize, num_aps: usize) -> Self {
        assert!(capacity >= 1, "memory capacity must be ≥ 1");
        Self {
            picks: VecDeque::with_capacity(capacity + 1),
            capacity,
            num_aps,
        }
    }

    /// Records a new best reply, evicting the oldest when full.
    pub fn push(&mut self, ap: usize) {
        debug_assert!(ap < self.num_aps);
        self.picks.push_back(ap);
        if self.picks.len() > self.capacity {
            self.picks.pop_front();
        }
    }

    /// Number of stored replies (≤ capacity).
    pub fn len(&self) -> usize {
        self.picks.len()
    }

    /// True when nothing has been recorded yet.
    pub fn is_empty(&self) -> bool {
        self.picks.is_empty()
    }

    /// The empirical reply distribution β: relative frequency of each AP
    /// among the stored replies. Uniform when the memory is still empty.
    pub fn beta(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.num_aps];
        if self.picks.is_empty() {
            return vec![1.0 / self.num_aps as f64; self.num_aps];
        }
        for &w in &self.picks {
            counts[w] += 1;
        }
        let len = self.picks.len() as f64;
        counts.iter().map(|&c| c as f64 / len).collect()
    }

    /// Largest β entry (1 when the memory unanimously names one AP).
    pub fn max_beta(&self) -> f64 {
        self.beta().iter().fold(0.0, |acc, &b| acc.max(b))
    }
}

/// Draws an AP index from the distribution β.
///
/// APs with zero probability are never drawn; numerical shortfall in the
/// cumulative sum falls through to the last positive entry.
pub fn sample_association<R: Rng>(beta: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen_range(0.0..1.0);
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (w, &b) in beta.iter().enumerate() {
        if b > 0.0 {
            last_positive = w;
            cumulative += b;
            if u < cumulative {
                return w;
            }
        }
    }
    last_positive
}

/// Mutable state of one outer-loop run: association, powers, per-CU reply
/// memories, and per-CU stay durations (used by the damped simultaneous
/// variant).
#[derive(Debug, Clone)]
pub struct GameState {
    /// Current association.
    pub assoc: AssociationProfile,
    /// Current powers, feasible under `assoc` at every iteration.
    pub powers: PowerProfile,
    /// Per-CU reply memories.
    pub memories: Vec<ReplyMemory>,
    /// Per-CU stay durations T_i ≥ 1 (iterations since the last switch).
    pub durations: Vec<u64>,
    /// Completed outer iterations.
    pub iteration: usize,
}

impl GameState {
    /// Random initial association with uniform power splits.
    pub(crate) fn random_init<R: Rng>(inst: &NetworkInstance, memory: usize, rng: &mut R) -> Self {
        let ap: Vec<usize> = (0..inst.num_cus)
            .map(|_| rng.gen_range(0..inst.num_aps))
            .collect();
        let assoc = AssociationProfile::new(ap, inst.num_aps).expect("valid by construction");
        let powers = PowerProfile::uniform(inst, &assoc);
        let memories = (0..inst.num_cus)
            .map(|_| ReplyMemory::new(memory, inst.num_aps))
            .collect();
        Self {
            assoc,
            powers,
            memories,
            durations: vec![1; inst.num_cus],
            iteration: 0,
        }
    }
}

/// Result of a joint-equilibrium certificate check.
#[derive(Debug, Clone, Copy)]
pub struct Certification {
    /// Whether every CU's best deviation gains at most `tol`.
    pub passed: bool,
    /// The largest gain any CU could obtain by deviating (bits; can be
    /// slightly negative due to rounding).
    pub worst_gap: f64,
}

/// Checks whether `(assoc, powers)` is a joint equilibrium to within `tol`
/// bits: no CU can raise its rate by more than `tol` by re-water-filling at
/// its own AP or by moving to any other AP (occupants' powers held fixed).
///
/// Returns the worst deviation gap alongside the verdict.
pub fn certify_jep(
    inst: &NetworkInstance,
    assoc: &AssociationProfile,
    powers: &PowerProfile,
    tol: f64,
) -> Certification {
    certify_with_costs(inst, assoc, powers, &Costs::Uniform(0.0), 1.0, tol)
}

/// Cost-aware certificate used as the runners' convergence gate: moving to
/// a foreign AP only counts as a profitable deviation once it clears that
/// CU's connection cost (costs are in report units; `rate_scale` converts
/// them back to bits). With zero costs this is exactly [`certify_jep`].
pub(crate) fn certify_with_costs(
    inst: &NetworkInstance,
    assoc: &AssociationProfile,
    powers: &PowerProfile,
    costs: &Costs,
    rate_scale: f64,
    tol: f64,
) -> Certification {
    let map = interference_map(inst, assoc, powers);
    let rates = realized_rates(inst, assoc, powers, &map);
    let mut worst = f64::NEG_INFINITY;
    for (i, &rate) in rates.iter().enumerate() {
        let home = assoc.ap[i];
        for w in 0..inst.num_aps {
            let (best, _) = best_rate_at(inst, i, w, map.row(i, w));
            let mut gap = best - rate;
            if w != home {
                gap -= costs.get(i) / rate_scale;
            }
            worst = worst.max(gap);
        }
    }
    Certification {
        passed: worst <= tol,
        worst_gap: worst,
    }
}

/// Best-response rate estimate (and achieving power) of CU `i` at every AP,
/// given the current interference map. Estimates at the home AP exclude the
/// CU's own signal; estimates elsewhere see the AP's full received power.
fn ap_estimates(
    inst: &NetworkInstance,
    i: usize,
    map: &InterferenceMap,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut rates = Vec::with_capacity(inst.num_aps);
    let mut powers = Vec::with_capacity(inst.num_aps);
    for w in 0..inst.num_aps {
        let (r, p) = best_rate_at(inst, i, w, map.row(i, w));
        rates.push(r);
        powers.push(p);
    }
    (rates, powers)
}

fn inner_dispatch(
    inst: &NetworkInstance,
    w: usize,
    occupants: &[usize],
    init: Vec<Vec<f64>>,
    config: &LearnConfig,
) -> InnerResult {
    match config.inner_solver {
        InnerSolverKind::Aiwf => aiwf_solve(
            inst,
            w,
            occupants,
            init,
            config.schedule,
            config.inner_tol,
            config.inner_max_iters,
        ),
        InnerSolverKind::Siwf => siwf_solve(
            inst,
            w,
            occupants,
            init,
            config.inner_tol,
            config.inner_max_iters,
        ),
    }
}

/// Worst per-CU distance from β-certainty.
fn max_beta_gap(memories: &[ReplyMemory]) -> f64 {
    memories
        .iter()
        .map(|m| 1.0 - m.max_beta())
        .fold(0.0, f64::max)
}

/// Runs JASPA: each outer iteration solves the fixed-association power
/// game to equilibrium at every occupied AP, lets every CU name the AP
/// where its best-response rate (minus connection cost) is highest, then
/// re-samples each CU's association from its reply distribution β.
///
/// Convergence is declared once the association is unchanged and every β
/// is fully concentrated for a whole stability window, and the state then
/// passes the cost-aware equilibrium certificate; the certificate is a hard
/// gate — on failure the window restarts.
///
/// Trace rows record the state right after the inner equilibria (before
/// re-sampling), which is the iteration's realized operating point;
/// `num_switchers` counts the subsequent association moves.
pub fn run_jaspa(inst: &NetworkInstance, config: &LearnConfig, seed: u64) -> Result<RunTrace> {
    config.validate(inst)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GameState::random_init(inst, config.memory, &mut rng);
    let window = config.window(inst);
    let scale = config.rate_scale;

    let mut warnings = Vec::new();
    if config.memory < inst.num_cus {
        warnings.push(format!(
            "reply memory {} is shorter than the CU count {}; convergence is only \
             guaranteed for memories at least that long",
            config.memory, inst.num_cus
        ));
    }
    let mut inner_cap_warned = false;

    let mut rows = Vec::new();
    let mut streak = 0usize;
    let mut converged = false;

    for t in 0..config.max_iters {
        // Inner equilibria at every occupied AP, warm-started from the
        // current powers (switchers were reset to a uniform split when
        // they moved).
        for w in 0..inst.num_aps {
            let occupants = state.assoc.occupants(w);
            if occupants.is_empty() {
                continue;
            }
            let init: Vec<Vec<f64>> = occupants
                .iter()
                .map(|&i| state.powers.per_cu[i].clone())
                .collect();
            let result = inner_dispatch(inst, w, &occupants, init, config);
            if !result.converged && !inner_cap_warned {
                warnings.push(format!(
                    "inner loop hit its iteration cap at outer iteration {} (AP {w})",
                    t + 1
                ));
                inner_cap_warned = true;
            }
            for (&i, p) in occupants.iter().zip(result.powers) {
                state.powers.per_cu[i] = p;
            }
        }

        let map = interference_map(inst, &state.assoc, &state.powers);
        let rates = realized_rates(inst, &state.assoc, &state.powers, &map);
        let iteration_sum_rate: f64 = rates.iter().sum::<f64>() * scale;
        let iteration_potential = system_potential(inst, &state.assoc, &state.powers) * scale;

        // Best replies, memory updates, and association re-sampling.
        let mut next_ap = vec![0usize; inst.num_cus];
        for (i, slot) in next_ap.iter_mut().enumerate() {
            let home = state.assoc.ap[i];
            let (est_rates, _) = ap_estimates(inst, i, &map);
            let scaled: Vec<f64> = est_rates.iter().map(|r| r * scale).collect();
            let reply = select_best_ap(home, &scaled, scaled[home], config.costs.get(i), &mut rng);
            state.memories[i].push(reply);
            *slot = sample_association(&state.memories[i].beta(), &mut rng);
        }

        let num_switchers = (0..inst.num_cus)
            .filter(|&i| next_ap[i] != state.assoc.ap[i])
            .count();
        let beta_gap = max_beta_gap(&state.memories);

        let stable = num_switchers == 0 && beta_gap <= BETA_CONCENTRATION_GAP;
        streak = if stable { streak + 1 } else { 0 };

        let mut declare = false;
        if streak >= window {
            let cert = certify_with_costs(
                inst,
                &state.assoc,
                &state.powers,
                &config.costs,
                scale,
                config.cert_tol,
            );
            if cert.passed {
                declare = true;
            } else {
                streak = 0;
            }
        }

        rows.push(TraceRow {
            iteration: t + 1,
            sum_rate: iteration_sum_rate,
            potential: iteration_potential,
            num_switchers,
            max_beta_gap: beta_gap,
            converged: declare,
            distinct_coalitions: None,
        });

        state.iteration = t + 1;
        if declare {
            converged = true;
            break;
        }

        // Apply the sampled association; movers restart from uniform splits.
        for (i, &target) in next_ap.iter().enumerate() {
            if target != state.assoc.ap[i] {
                state.assoc.ap[i] = target;
                let m = inst.num_channels_of(target);
                state.powers.per_cu[i] = vec![inst.budgets[i] / m as f64; m];
            }
        }
        debug_assert!(state.powers.is_feasible_under(inst, &state.assoc));
    }

    let final_sum_rate = rows.last().map_or(0.0, |r| r.sum_rate);
    Ok(RunTrace {
        algorithm: Algorithm::Jaspa,
        seed,
        converged,
        iterations_to_converge: converged.then_some(state.iteration),
        rows,
        final_assoc: state.assoc,
        final_powers: state.powers,
        final_sum_rate,
        warnings,
    })
}

/// Runs Se-JASPA: exactly one CU acts per iteration, in round-robin order.
/// The actor estimates its best-response rate at every AP; it switches to
/// the best foreign AP only when that beats its home best response by more
/// than its connection cost, water-filling against the occupants it finds
/// there, and otherwise re-water-fills at home against the others.
///
/// Every update weakly increases the system potential, which the trace
/// records after each iteration. There are no reply distributions here, so
/// `max_beta_gap` is reported as 0.
pub fn run_se_jaspa(inst: &NetworkInstance, config: &LearnConfig, seed: u64) -> Result<RunTrace> {
    config.validate(inst)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GameState::random_init(inst, config.memory, &mut rng);
    // Each CU must complete a quiet turn before convergence is plausible.
    let window = config.window(inst).max(inst.num_cus);
    let scale = config.rate_scale;

    let mut rows = Vec::new();
    let mut streak = 0usize;
    let mut converged = false;

    for t in 0..config.max_iters {
        let actor = (t + 1) % inst.num_cus;
        let map = interference_map(inst, &state.assoc, &state.powers);
        let home = state.assoc.ap[actor];
        let (est_rates, est_powers) = ap_estimates(inst, actor, &map);
        let scaled: Vec<f64> = est_rates.iter().map(|r| r * scale).collect();
        let target = select_best_ap(
            home,
            &scaled,
            scaled[home],
            config.costs.get(actor),
            &mut rng,
        );

        let old_power = state.powers.per_cu[actor].clone();
        let switched = target != home;
        state.assoc.ap[actor] = target;
        state.powers.per_cu[actor] = est_powers[target].clone();

        let power_change = if switched {
            f64::INFINITY
        } else {
            state.powers.per_cu[actor]
                .iter()
                .zip(&old_power)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };

        let stable = !switched && power_change < config.inner_tol;
        streak = if stable { streak + 1 } else { 0 };

        let mut declare = false;
        if streak >= window {
            let cert = certify_with_costs(
                inst,
                &state.assoc,
                &state.powers,
                &config.costs,
                scale,
                config.cert_tol,
            );
            if cert.passed {
                declare = true;
            } else {
                streak = 0;
            }
        }

        rows.push(TraceRow {
            iteration: t + 1,
            sum_rate: crate::physics::sum_rate(inst, &state.assoc, &state.powers) * scale,
            potential: system_potential(inst, &state.assoc, &state.powers) * scale,
            num_switchers: usize::from(switched),
            max_beta_gap: 0.0,
            converged: declare,
            distinct_coalitions: None,
        });

        state.iteration = t + 1;
        if declare {
            converged = true;
            break;
        }
        debug_assert!(state.powers.is_feasible_under(inst, &state.assoc));
    }

    let final_sum_rate = rows.last().map_or(0.0, |r| r.sum_rate);
    Ok(RunTrace {
        algorithm: Algorithm::SeJaspa,
        seed,
        converged,
        iterations_to_converge: converged.then_some(state.iteration),
        rows,
        final_assoc: state.assoc,
        final_powers: state.powers,
        final_sum_rate,
        warnings: Vec::new(),
    })
}

/// Runs Si-JASPA: every CU acts simultaneously each iteration. Each CU
/// names its best reply (as in JASPA), updates its memory, samples its next
/// AP from β, then updates power — a fresh water-filling at the sampled AP
/// when it moved there, or a stay-duration-damped step
/// `(1−α_T)·p + α_T·p*` at home, where T is the number of consecutive
/// iterations spent at the current AP.
///
/// All decisions in an iteration read the same start-of-iteration
/// interference snapshot; trace rows record the state after the
/// simultaneous updates.
///
/// Stability (per iteration) requires no switches, fully concentrated
/// reply distributions, and best replies within `inner_tol` of the held
/// powers (measured before the damped step, like the fixed-association
/// solver); a [`LearnConfig::window`]-long stable streak must then clear
/// equilibrium certification before convergence is declared.
pub fn run_si_jaspa(inst: &NetworkInstance, config: &LearnConfig, seed: u64) -> Result<RunTrace> {
    config.validate(inst)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GameState::random_init(inst, config.memory, &mut rng);
    let window = config.window(inst);
    let scale = config.rate_scale;

    let mut rows = Vec::new();
    let mut streak = 0usize;
    let mut converged = false;

    for t in 0..config.max_iters {
        let map = interference_map(inst, &state.assoc, &state.powers);

        // Simultaneous reply + sampling pass against the shared snapshot.
        let mut next_ap = vec![0usize; inst.num_cus];
        let mut best_powers: Vec<Vec<Vec<f64>>> = Vec::with_capacity(inst.num_cus);
        for (i, slot) in next_ap.iter_mut().enumerate() {
            let home = state.assoc.ap[i];
            let (est_rates, est_powers) = ap_estimates(inst, i, &map);
            let scaled: Vec<f64> = est_rates.iter().map(|r| r * scale).collect();
            let reply = select_best_ap(home, &scaled, scaled[home], config.costs.get(i), &mut rng);
            state.memories[i].push(reply);
            *slot = sample_association(&state.memories[i].beta(), &mut rng);
            best_powers.push(est_powers);
        }

        // Simultaneous power updates. For stayers, measure how far the
        // fresh best reply sits from the held power before damping toward
        // it: stability requires that residual to vanish, exactly like the
        // fixed-association solver's stopping rule.
        let mut num_switchers = 0;
        let mut reply_residual: f64 = 0.0;
        for i in 0..inst.num_cus {
            let target = next_ap[i];
            if target != state.assoc.ap[i] {
                num_switchers += 1;
                state.durations[i] = 1;
                state.powers.per_cu[i] = best_powers[i][target].clone();
                state.assoc.ap[i] = target;
            } else {
                state.durations[i] += 1;
                let alpha = config.schedule.alpha((state.durations[i] - 1) as usize);
                let best = &best_powers[i][target];
                for (x, y) in state.powers.per_cu[i].iter_mut().zip(best) {
                    reply_residual = reply_residual.max((*x - y).abs());
                    *x = (1.0 - alpha) * *x + alpha * y;
                }
            }
        }
        debug_assert!(state.powers.is_feasible_under(inst, &state.assoc));

        let beta_gap = max_beta_gap(&state.memories);
        let stable = num_switchers == 0
            && beta_gap <= BETA_CONCENTRATION_GAP
            && reply_residual <= config.inner_tol;
        streak = if stable { streak + 1 } else { 0 };

        let mut declare = false;
        if streak >= window {
            let cert = certify_with_costs(
                inst,
                &state.assoc,
                &state.powers,
                &config.costs,
                scale,
                config.cert_tol,
            );
            if cert.passed {
                declare = true;
            } else {
                streak = 0;
            }
        }

        rows.push(TraceRow {
            iteration: t + 1,
            sum_rate: crate::physics::sum_rate(inst, &state.assoc, &state.powers) * scale,
            potential: system_potential(inst, &state.assoc, &state.powers) * scale,
            num_switchers,
            max_beta_gap: beta_gap,
            converged: declare,
            distinct_coalitions: None,
        });

        state.iteration = t + 1;
        if declare {
            converged = true;
            break;
        }
    }

    let final_sum_rate = rows.last().map_or(0.0, |r| r.sum_rate);
    Ok(RunTrace {
        algorithm: Algorithm::SiJaspa,
        seed,
        converged,
        iterations_to_converge: converged.then_some(state.iteration),
        rows,
        final_assoc: state.assoc,
        final_powers: state.powers,
        final_sum_rate,
        warnings: Vec::new(),
    })
}
