//! The acceptance suite: ten self-contained checks covering the exact
//! structural identities, consequences of the potential-game structure,
//! Monte-Carlo convergence behavior, qualitative trends, and
//! reproducibility guarantees the simulator promises. Each check reports PASS/FAIL with its measured
//! values; the full suite also enforces per-check wall-clock budgets
//! (`quick` mode trims seed counts for a sub-minute smoke run).

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::best_response::waterfill;
use crate::experiment::{rate_scale_for_costs, COST_SCALE_TARGET};
use crate::inner::{aiwf_solve, siwf_solve, uniform_init, StepsizeSchedule};
use crate::jjaspa::run_jjaspa;
use crate::learn::{certify_jep, run_jaspa, run_se_jaspa, run_si_jaspa, Costs, LearnConfig};
use crate::model::{
    generate_snapshot, AssociationProfile, NetworkInstance, PowerProfile, ScenarioConfig,
};
use crate::oracle::{closest_ap_baseline, equilibrium_potential, exhaustive_sep};
use crate::physics::{interference_map, potential_ap, rate};
use crate::trace::Algorithm;

/// Outcome of one acceptance check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    /// Human-readable criterion name.
    pub name: &'static str,
    /// Whether the check passed (budget included in full mode).
    pub passed: bool,
    /// Measured values backing the verdict.
    pub details: String,
    /// Wall-clock seconds the check took.
    pub seconds: f64,
}

impl CheckReport {
    /// One-line rendering: `criterion N <name>: PASS/FAIL (<details>)`.
    pub fn line(&self, index: usize) -> String {
        format!(
            "criterion {index} {}: {} ({}; {:.2} s)",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.details,
            self.seconds
        )
    }
}

fn timed(name: &'static str, body: impl FnOnce() -> (bool, String)) -> CheckReport {
    let start = Instant::now();
    let (passed, details) = body();
    CheckReport {
        name,
        passed,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// A per-AP potential function, injectable so the suite can prove it
/// detects a corrupted potential.
pub type PotentialFn<'a> = dyn Fn(&NetworkInstance, usize, &[usize], &[&[f64]]) -> f64 + 'a;

/// Draws a feasible power vector with a uniformly scaled total budget (so
/// interior and near-boundary points both occur).
fn random_feasible<R: Rng>(rng: &mut R, channels: usize, budget: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..channels).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let used: f64 = rng.gen_range(0.0..1.0) * budget;
    raw.into_iter().map(|x| x / total * used).collect()
}

/// Criterion 1 with an injectable potential, the mutation hook: swapping in
/// a corrupted potential function must make this check fail.
pub fn check_exact_potential_with(potential: &PotentialFn, quick: bool) -> CheckReport {
    let trials = if quick { 100 } else { 1000 };
    timed("exact-potential identity", move || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0101);
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let n = rng.gen_range(2..6);
            let w_count = rng.gen_range(1..4);
            let k = rng.gen_range(w_count..4 * w_count + 1);
            let inst = generate_snapshot(&ScenarioConfig::new(n, w_count, k), rng.gen()).unwrap();
            let ap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..w_count)).collect();
            let assoc = AssociationProfile::new(ap, w_count).unwrap();
            let i = rng.gen_range(0..n);
            let home = assoc.ap[i];
            let m = inst.num_channels_of(home);

            let mut powers = PowerProfile::zeros(&inst, &assoc);
            for j in 0..n {
                let mj = inst.num_channels_of(assoc.ap[j]);
                powers.per_cu[j] = random_feasible(&mut rng, mj, inst.budgets[j]);
            }
            let p_before = powers.per_cu[i].clone();
            let p_after = random_feasible(&mut rng, m, inst.budgets[i]);

            // Rate change of CU i alone, everyone else fixed.
            let map = interference_map(&inst, &assoc, &powers);
            let row = map.row(i, home);
            let delta_rate =
                rate(&inst, i, home, &p_after, row) - rate(&inst, i, home, &p_before, row);

            // Potential change at the home AP for the same unilateral move.
            let occupants = assoc.occupants(home);
            let refs_before: Vec<&[f64]> = occupants
                .iter()
                .map(|&j| powers.per_cu[j].as_slice())
                .collect();
            let p_before_potential = potential(&inst, home, &occupants, &refs_before);
            powers.per_cu[i] = p_after;
            let refs_after: Vec<&[f64]> = occupants
                .iter()
                .map(|&j| powers.per_cu[j].as_slice())
                .collect();
            let p_after_potential = potential(&inst, home, &occupants, &refs_after);
            let delta_potential = p_after_potential - p_before_potential;

            worst = worst.max((delta_rate - delta_potential).abs());
        }
        (
            worst <= 1e-9,
            format!("worst |ΔR − ΔP| = {worst:.3e} over {trials} unilateral moves"),
        )
    })
}

/// Criterion 1: unilateral rate changes equal potential changes.
pub fn check_exact_potential(quick: bool) -> CheckReport {
    check_exact_potential_with(&potential_ap, quick)
}

/// Criterion 2: the closed-form water-filler beats a fine grid and carries
/// a flat water level.
pub fn check_waterfill_oracle(quick: bool) -> CheckReport {
    let trials: u64 = if quick { 50 } else { 200 };
    timed("water-filling vs grid oracle", move || {
        let results: Vec<(f64, f64)> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(0x0202 + trial);
                let gains: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..2.0)).collect();
                let noise: Vec<f64> = (0..3).map(|_| rng.gen_range(0.005..0.05)).collect();
                let interference: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..0.5)).collect();
                let budget = rng.gen_range(0.5..2.0);
                let inst = NetworkInstance::from_parts(
                    vec![0, 0, 0],
                    vec![vec![gains.clone()]],
                    vec![noise.clone()],
                    vec![budget],
                    vec![(0.0, 0.0)],
                    vec![(0.0, 0.0)],
                    0,
                )
                .unwrap();

                let p = waterfill(&inst, 0, 0, &interference);
                let rate_wf = rate(&inst, 0, 0, &p, &interference);

                // Grid over the budget simplex at step 1e-3·budget. The
                // rate is increasing in each power, so spending the full
                // budget is optimal and the face grid is exhaustive.
                let steps = 1000usize;
                let delta = budget / steps as f64;
                let mut rate_grid = f64::NEG_INFINITY;
                for a in 0..=steps {
                    for b in 0..=(steps - a) {
                        let candidate = [
                            a as f64 * delta,
                            b as f64 * delta,
                            budget - (a + b) as f64 * delta,
                        ];
                        rate_grid = rate_grid.max(rate(&inst, 0, 0, &candidate, &interference));
                    }
                }
                let shortfall = rate_grid - rate_wf;

                // KKT: active channels share one water level; inactive
                // channels sit above it.
                let levels: Vec<f64> = (0..3)
                    .map(|j| (noise[j] + interference[j]) / gains[j])
                    .collect();
                let active: Vec<f64> = (0..3)
                    .filter(|&j| p[j] > 1e-12)
                    .map(|j| levels[j] + p[j])
                    .collect();
                let mean_level = active.iter().sum::<f64>() / active.len() as f64;
                let mut kkt: f64 = 0.0;
                for level in &active {
                    kkt = kkt.max((level - mean_level).abs());
                }
                for j in 0..3 {
                    if p[j] <= 1e-12 {
                        kkt = kkt.max(mean_level - levels[j]);
                    }
                }
                (shortfall, kkt)
            })
            .collect();
        let worst_shortfall = results
            .iter()
            .map(|r| r.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let worst_kkt = results.iter().map(|r| r.1).fold(0.0, f64::max);
        (
            worst_shortfall <= 1e-6 && worst_kkt <= 1e-8,
            format!(
                "worst grid advantage = {worst_shortfall:.3e}, worst KKT residual = \
                 {worst_kkt:.3e} over {trials} problems"
            ),
        )
    })
}

/// Criterion 3: both inner solvers reach the potential maximum computed by
/// the independent projected-gradient oracle.
pub fn check_inner_optimality(quick: bool) -> CheckReport {
    let trials: u64 = if quick { 10 } else { 50 };
    timed("inner solvers match projected gradient", move || {
        let rels: Vec<(f64, f64)> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let inst =
                    generate_snapshot(&ScenarioConfig::new(3, 1, 4), 0x0303 + trial).unwrap();
                let occupants = [0usize, 1, 2];
                let reference = equilibrium_potential(&inst, 0, &occupants, 1e-10);
                let denom = reference.abs().max(1e-12);
                let a = aiwf_solve(
                    &inst,
                    0,
                    &occupants,
                    uniform_init(&inst, 0, &occupants),
                    StepsizeSchedule::default(),
                    1e-10,
                    50_000,
                );
                let s = siwf_solve(
                    &inst,
                    0,
                    &occupants,
                    uniform_init(&inst, 0, &occupants),
                    1e-10,
                    50_000,
                );
                let rel_a = (a.potential_steps.last().unwrap() - reference).abs() / denom;
                let rel_s = (s.potential_steps.last().unwrap() - reference).abs() / denom;
                (rel_a, rel_s)
            })
            .collect();
        let worst_a = rels.iter().map(|r| r.0).fold(0.0, f64::max);
        let worst_s = rels.iter().map(|r| r.1).fold(0.0, f64::max);
        (
            worst_a <= 1e-4 && worst_s <= 1e-4,
            format!(
                "worst relative gap: damped {worst_a:.3e}, sequential {worst_s:.3e} \
                 over {trials} instances"
            ),
        )
    })
}

/// Criterion 4: the sequential algorithm never decreases the potential.
pub fn check_sequential_monotonicity(quick: bool) -> CheckReport {
    let runs: u64 = if quick { 10 } else { 100 };
    timed("sequential potential monotonicity", move || {
        let drops: Vec<f64> = (0..runs)
            .into_par_iter()
            .map(|seed| {
                let inst = generate_snapshot(&ScenarioConfig::new(8, 3, 12), seed).unwrap();
                let config = LearnConfig {
                    max_iters: 800,
                    ..LearnConfig::default()
                };
                let trace = run_se_jaspa(&inst, &config, seed).unwrap();
                trace
                    .rows
                    .windows(2)
                    .map(|pair| pair[0].potential - pair[1].potential)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let worst_drop = drops.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (
            worst_drop <= 1e-9,
            format!("worst potential drop = {worst_drop:.3e} over {runs} runs"),
        )
    })
}

/// Criterion 5: the exhaustive optimum, with equilibrium powers solved per
/// AP, is itself a joint equilibrium.
pub fn check_optimum_is_equilibrium(quick: bool) -> CheckReport {
    let trials: u64 = if quick { 10 } else { 50 };
    timed("exhaustive optimum is an equilibrium", move || {
        let gaps: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let n = 2 + (trial % 3) as usize;
                let inst =
                    generate_snapshot(&ScenarioConfig::new(n, 2, 4), 0x0505 + trial).unwrap();
                let table = exhaustive_sep(&inst, 1e-10).unwrap();
                let assoc = table.best_assoc(&inst);
                let mut powers = PowerProfile::uniform(&inst, &assoc);
                for w in 0..inst.num_aps {
                    let occupants = assoc.occupants(w);
                    if occupants.is_empty() {
                        continue;
                    }
                    let result = siwf_solve(
                        &inst,
                        w,
                        &occupants,
                        uniform_init(&inst, w, &occupants),
                        1e-12,
                        50_000,
                    );
                    for (&i, p) in occupants.iter().zip(result.powers) {
                        powers.per_cu[i] = p;
                    }
                }
                certify_jep(&inst, &assoc, &powers, 1e-6).worst_gap
            })
            .collect();
        let worst = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let failures = gaps.iter().filter(|&&g| g > 1e-6).count();
        (
            failures == 0,
            format!("{failures}/{trials} failures, worst deviation gap = {worst:.3e}"),
        )
    })
}

/// The Monte-Carlo configuration shared by criteria 6, 7, and 9.
fn monte_carlo_config(max_iters: usize) -> LearnConfig {
    LearnConfig {
        memory: 6,
        max_iters,
        ..LearnConfig::default()
    }
}

fn convergence_threshold(seeds: u64, quick: bool) -> u64 {
    if quick {
        seeds * 9 / 10
    } else {
        seeds * 95 / 100
    }
}

/// Criterion 6: JASPA with memory = N converges, certifies, and fully
/// concentrates its reply distributions on nearly all seeds.
pub fn check_jaspa_convergence(quick: bool) -> CheckReport {
    let seeds: u64 = if quick { 15 } else { 100 };
    timed("jaspa Monte-Carlo convergence", move || {
        let outcomes: Vec<(bool, usize)> = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let inst = generate_snapshot(&ScenarioConfig::new(6, 3, 12), seed).unwrap();
                let config = monte_carlo_config(500);
                let trace = run_jaspa(&inst, &config, seed).unwrap();
                let success = trace.converged
                    && certify_jep(&inst, &trace.final_assoc, &trace.final_powers, 1e-6).passed
                    && trace.rows.last().is_some_and(|r| r.max_beta_gap <= 1e-9);
                (success, trace.rows.len())
            })
            .collect();
        let successes = outcomes.iter().filter(|o| o.0).count() as u64;
        let mean_iters = outcomes.iter().map(|o| o.1).sum::<usize>() as f64 / seeds as f64;
        let needed = convergence_threshold(seeds, quick);
        (
            successes >= needed,
            format!(
                "{successes}/{seeds} converged+certified (need ≥ {needed}), \
                 mean {mean_iters:.1} outer iterations"
            ),
        )
    })
}

/// Criterion 7: J-JASPA converges on nearly all seeds and does so faster
/// (paired mean iterations) than the simultaneous algorithm.
pub fn check_jjaspa_speedup(quick: bool) -> CheckReport {
    let seeds: u64 = if quick { 15 } else { 100 };
    timed("j-jaspa convergence and speed-up", move || {
        const CAP: usize = 2000;
        let outcomes: Vec<(bool, usize, usize)> = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let inst = generate_snapshot(&ScenarioConfig::new(6, 3, 12), seed).unwrap();
                let config = monte_carlo_config(CAP);
                let joint = run_jjaspa(&inst, &config, seed).unwrap();
                let simultaneous = run_si_jaspa(&inst, &config, seed).unwrap();
                let joint_ok = joint.converged
                    && certify_jep(&inst, &joint.final_assoc, &joint.final_powers, 1e-6).passed;
                (
                    joint_ok,
                    joint.iterations_to_converge.unwrap_or(CAP),
                    simultaneous.iterations_to_converge.unwrap_or(CAP),
                )
            })
            .collect();
        let successes = outcomes.iter().filter(|o| o.0).count() as u64;
        let joint_mean = outcomes.iter().map(|o| o.1).sum::<usize>() as f64 / seeds as f64;
        let si_mean = outcomes.iter().map(|o| o.2).sum::<usize>() as f64 / seeds as f64;
        let needed = convergence_threshold(seeds, quick);
        (
            successes >= needed && joint_mean < si_mean,
            format!(
                "{successes}/{seeds} converged+certified (need ≥ {needed}); mean \
                 iterations {joint_mean:.1} (joint) vs {si_mean:.1} (simultaneous)"
            ),
        )
    })
}

/// Criterion 8: realized JASPA sum rates never exceed the exhaustive
/// throughput bound, and the closest-AP baseline sits strictly below JASPA
/// on average. The mean ratio to the bound is reported (soft expectation
/// ≥ 0.8).
pub fn check_throughput_bound(quick: bool) -> CheckReport {
    let seeds: u64 = if quick { 2 } else { 20 };
    timed("throughput bound and baseline gap", move || {
        let grid: Vec<(usize, u64)> = [1usize, 2, 3, 4]
            .iter()
            .flat_map(|&w| (0..seeds).map(move |s| (w, s)))
            .collect();
        let cells: Vec<(f64, f64, f64, bool)> = grid
            .par_iter()
            .map(|&(w, seed)| {
                let inst = generate_snapshot(&ScenarioConfig::new(8, w, 16), seed).unwrap();
                let t_star = exhaustive_sep(&inst, 1e-9).unwrap().best_entry().sep;
                let config = LearnConfig {
                    memory: 8,
                    max_iters: 500,
                    ..LearnConfig::default()
                };
                let trace = run_jaspa(&inst, &config, seed).unwrap();
                let closest = closest_ap_baseline(&inst, config.inner_tol);
                let bounded = trace.final_sum_rate <= t_star + 1e-9;
                (
                    trace.final_sum_rate,
                    closest.sum_rate,
                    trace.final_sum_rate / t_star,
                    bounded,
                )
            })
            .collect();
        let violations = cells.iter().filter(|c| !c.3).count();
        let jaspa_mean = cells.iter().map(|c| c.0).sum::<f64>() / cells.len() as f64;
        let closest_mean = cells.iter().map(|c| c.1).sum::<f64>() / cells.len() as f64;
        let mean_ratio = cells.iter().map(|c| c.2).sum::<f64>() / cells.len() as f64;
        (
            violations == 0 && closest_mean < jaspa_mean,
            format!(
                "{violations} bound violations over {} rows; mean ratio to bound = \
                 {mean_ratio:.3} (soft ≥ 0.8); mean sum rate {jaspa_mean:.3} vs \
                 closest-AP {closest_mean:.3}",
                cells.len()
            ),
        )
    })
}

/// Criterion 9: a meaningful connection cost speeds convergence up and
/// costs throughput, on paired seeds with the documented rate scaling.
pub fn check_cost_trend(quick: bool) -> CheckReport {
    let seeds: u64 = if quick { 12 } else { 40 };
    timed("connection-cost trend", move || {
        const CAP: usize = 500;
        /// Iterations-to-converge and final sum rate of one run.
        type Outcome = (Option<usize>, f64);
        let pairs: Vec<(Outcome, Outcome)> = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let inst = generate_snapshot(&ScenarioConfig::new(6, 3, 12), seed).unwrap();
                let scale = rate_scale_for_costs(&inst, COST_SCALE_TARGET);
                let run_with = |cost: f64| {
                    let config = LearnConfig {
                        costs: Costs::Uniform(cost),
                        rate_scale: scale,
                        ..monte_carlo_config(CAP)
                    };
                    let trace = run_jaspa(&inst, &config, seed).unwrap();
                    (trace.iterations_to_converge, trace.final_sum_rate)
                };
                (run_with(0.0), run_with(3.0))
            })
            .collect();
        let free: Vec<Outcome> = pairs.iter().map(|p| p.0).collect();
        let costed: Vec<Outcome> = pairs.iter().map(|p| p.1).collect();
        let mean_of = |v: &[Outcome]| {
            let iters = v.iter().map(|x| x.0.unwrap_or(CAP)).sum::<usize>() as f64 / v.len() as f64;
            let rates = v.iter().map(|x| x.1).sum::<f64>() / v.len() as f64;
            (iters, rates)
        };
        let (free_iters, free_rate) = mean_of(&free);
        let (cost_iters, cost_rate) = mean_of(&costed);
        (
            cost_iters <= free_iters && cost_rate <= free_rate,
            format!(
                "mean iterations {cost_iters:.2} (c=3) vs {free_iters:.2} (c=0); mean \
                 sum rate {cost_rate:.3} vs {free_rate:.3} (report units) over {seeds} \
                 paired seeds"
            ),
        )
    })
}

/// Criterion 10: every algorithm's trace is byte-identical across reruns.
pub fn check_reproducibility(quick: bool) -> CheckReport {
    let algos: &[Algorithm] = if quick {
        &[Algorithm::Jaspa, Algorithm::JJaspa, Algorithm::ClosestAp]
    } else {
        &[
            Algorithm::Jaspa,
            Algorithm::SeJaspa,
            Algorithm::SiJaspa,
            Algorithm::JJaspa,
            Algorithm::ClosestAp,
            Algorithm::MultiConnectivity,
        ]
    };
    timed("trace reproducibility", move || {
        let inst = generate_snapshot(&ScenarioConfig::new(4, 2, 6), 42).unwrap();
        let config = LearnConfig {
            max_iters: 300,
            ..LearnConfig::default()
        };
        let mut mismatches = Vec::new();
        for &algo in algos {
            let a = crate::experiment::run_algorithm(&inst, algo, &config, 42).unwrap();
            let b = crate::experiment::run_algorithm(&inst, algo, &config, 42).unwrap();
            if a.to_csv_string() != b.to_csv_string() {
                mismatches.push(algo.name());
            }
        }
        (
            mismatches.is_empty(),
            if mismatches.is_empty() {
                format!("byte-identical traces for {} algorithms", algos.len())
            } else {
                format!("trace drift in: {}", mismatches.join(", "))
            },
        )
    })
}

/// Wall-clock budgets (seconds) per criterion in full mode; `None` means
/// the criterion carries no budget.
const BUDGETS: [Option<f64>; 10] = [
    Some(5.0),
    Some(10.0),
    Some(30.0),
    Some(60.0),
    Some(120.0),
    Some(300.0),
    Some(600.0),
    None,
    None,
    None,
];

/// Runs all ten acceptance checks in order, invoking `on_report` with each
/// finished report (1-indexed). In full mode a check that overran its
/// criterion budget fails even if its assertions held.
pub fn run_checks_with(
    quick: bool,
    mut on_report: impl FnMut(usize, &CheckReport),
) -> Vec<CheckReport> {
    let checks: [fn(bool) -> CheckReport; 10] = [
        check_exact_potential,
        check_waterfill_oracle,
        check_inner_optimality,
        check_sequential_monotonicity,
        check_optimum_is_equilibrium,
        check_jaspa_convergence,
        check_jjaspa_speedup,
        check_throughput_bound,
        check_cost_trend,
        check_reproducibility,
    ];
    let mut reports = Vec::with_capacity(checks.len());
    for (index, (check, budget)) in checks.iter().zip(BUDGETS).enumerate() {
        let mut report = check(quick);
        if !quick {
            if let Some(limit) = budget {
                if report.seconds > limit {
                    report.passed = false;
                    report
                        .details
                        .push_str(&format!("; exceeded the {limit:.0} s budget"));
                }
            }
        }
        on_report(index + 1, &report);
        reports.push(report);
    }
    reports
}

/// Runs all ten acceptance checks in order (see [`run_checks_with`]).
pub fn run_all_checks(quick: bool) -> Vec<CheckReport> {
    run_checks_with(quick, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_potential_is_detected() {
        // The mutation hook: a sign error in the potential must flip
        // criterion 1 to FAIL, and the genuine potential must pass.
        let flipped = |inst: &NetworkInstance, w: usize, occ: &[usize], p: &[&[f64]]| {
            -potential_ap(inst, w, occ, p)
        };
        let genuine = check_exact_potential_with(&potential_ap, true);
        assert!(genuine.passed, "{}", genuine.details);
        let corrupted = check_exact_potential_with(&flipped, true);
        assert!(!corrupted.passed, "sign error went unnoticed");
    }

    #[test]
    fn report_lines_carry_verdict_and_details() {
        let report = CheckReport {
            name: "demo",
            passed: true,
            details: "all good".into(),
            seconds: 0.5,
        };
        let line = report.line(3);
        assert!(line.starts_with("criterion 3 demo: PASS"));
        assert!(line.contains("all good"));
    }

    #[test]
    fn quick_waterfill_check_passes() {
        let report = check_waterfill_oracle(true);
        assert!(report.passed, "{}", report.details);
    }

    #[test]
    fn quick_reproducibility_check_passes() {
        let report = check_reproducibility(true);
        assert!(report.passed, "{}", report.details);
    }
}
