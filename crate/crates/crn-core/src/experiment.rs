//! Monte-Carlo experiment drivers: seeded snapshot sweeps over network
//! sizes, AP counts, and connection costs, with long-format summary rows
//! ready for CSV emission and plotting.
//!
//! Every row carries the seed that produced it, and sweeps are evaluated
//! with deterministic work splitting (results are merged in grid order no
//! matter how many workers ran them), so re-running any row's
//! `(algorithm, configuration, seed)` reproduces its numbers exactly.

use rayon::prelude::*;

use crate::best_response::best_rate_at;
use crate::error::Result;
use crate::jjaspa::run_jjaspa;
use crate::learn::{run_jaspa, run_se_jaspa, run_si_jaspa, Costs, LearnConfig};
use crate::model::{NetworkInstance, PowerProfile, ScenarioConfig};
use crate::oracle::{
    closest_ap_baseline, collapse_to_single_ap, equilibrium_potential, exhaustive_sep,
    multi_connectivity_baseline, DEFAULT_ORACLE_TOL,
};
use crate::physics::system_potential;
use crate::trace::{fmt_float, Algorithm, RunTrace, TraceRow};

/// Report-unit value a typical standalone rate is mapped to by
/// [`rate_scale_for_costs`]; a connection cost of 3 then demands roughly a
/// 10% rate improvement before switching pays.
pub const COST_SCALE_TARGET: f64 = 30.0;

/// One long-format summary row.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    /// Experiment label the row belongs to.
    pub experiment: String,
    /// Algorithm (or pseudo-algorithm such as `tstar`) that produced it.
    pub algo: String,
    /// CU count of the snapshot.
    pub n: usize,
    /// AP count of the snapshot.
    pub w: usize,
    /// Channel count of the snapshot.
    pub k: usize,
    /// Seed used for both the snapshot and the run.
    pub seed: u64,
    /// Iterations until convergence was declared; empty when the run hit
    /// its cap (baselines report their single solve).
    pub iters_to_converge: Option<usize>,
    /// Terminal sum rate in the experiment's report units.
    pub sum_rate: f64,
    /// System equilibrium potential of the terminal association, when the
    /// row has one.
    pub sep: Option<f64>,
    /// Terminal sum rate divided by the network throughput bound, when the
    /// oracle ran for this row.
    pub ratio_to_tstar: Option<f64>,
}

/// Column header of the summary CSV.
pub const SUMMARY_HEADER: &str =
    "experiment,algo,n,w,k,seed,iters_to_converge,sum_rate,sep,ratio_to_Tstar";

/// Renders rows to CSV (header always present, floats at 12 significant
/// digits, absent values as empty fields).
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in rows {
        let iters = row
            .iters_to_converge
            .map(|i| i.to_string())
            .unwrap_or_default();
        let sep = row.sep.map(fmt_float).unwrap_or_default();
        let ratio = row.ratio_to_tstar.map(fmt_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.experiment,
            row.algo,
            row.n,
            row.w,
            row.k,
            row.seed,
            iters,
            fmt_float(row.sum_rate),
            sep,
            ratio,
        ));
    }
    out
}

/// Report-unit multiplier that maps the mean standalone best-AP
/// water-filled rate of this snapshot onto `target`: with
/// `target = COST_SCALE_TARGET` a connection cost of 3 demands a rate
/// improvement of about a tenth of what a typical lone CU achieves.
pub fn rate_scale_for_costs(inst: &NetworkInstance, target: f64) -> f64 {
    let total: f64 = (0..inst.num_cus)
        .map(|i| {
            (0..inst.num_aps)
                .map(|w| {
                    let silent = vec![0.0; inst.num_channels_of(w)];
                    best_rate_at(inst, i, w, &silent).0
                })
                .fold(0.0, f64::max)
        })
        .sum();
    let mean = total / inst.num_cus as f64;
    if mean > 0.0 {
        target / mean
    } else {
        1.0
    }
}

/// Runs one algorithm on one snapshot. The learning algorithms run their
/// full loops; the two baselines are solved once and reported as a
/// single-row trace (the multi-connectivity row describes the virtual
/// all-channels network, so its association is the trivial one).
pub fn run_algorithm(
    inst: &NetworkInstance,
    algo: Algorithm,
    config: &LearnConfig,
    seed: u64,
) -> Result<RunTrace> {
    match algo {
        Algorithm::Jaspa => run_jaspa(inst, config, seed),
        Algorithm::SeJaspa => run_se_jaspa(inst, config, seed),
        Algorithm::SiJaspa => run_si_jaspa(inst, config, seed),
        Algorithm::JJaspa => run_jjaspa(inst, config, seed),
        Algorithm::ClosestAp => {
            let outcome = closest_ap_baseline(inst, config.inner_tol);
            let scale = config.rate_scale;
            let row = TraceRow {
                iteration: 1,
                sum_rate: outcome.sum_rate * scale,
                potential: system_potential(inst, &outcome.assoc, &outcome.powers) * scale,
                num_switchers: 0,
                max_beta_gap: 0.0,
                converged: outcome.converged,
                distinct_coalitions: None,
            };
            Ok(RunTrace {
                algorithm: Algorithm::ClosestAp,
                seed,
                converged: outcome.converged,
                iterations_to_converge: outcome.converged.then_some(1),
                final_sum_rate: row.sum_rate,
                rows: vec![row],
                final_assoc: outcome.assoc,
                final_powers: outcome.powers,
                warnings: Vec::new(),
            })
        }
        Algorithm::MultiConnectivity => {
            let outcome = multi_connectivity_baseline(inst, config.inner_tol)?;
            let scale = config.rate_scale;
            let row = TraceRow {
                iteration: 1,
                sum_rate: outcome.sum_rate * scale,
                potential: outcome.potential * scale,
                num_switchers: 0,
                max_beta_gap: 0.0,
                converged: outcome.converged,
                distinct_coalitions: None,
            };
            let virtual_assoc = crate::model::AssociationProfile::new(vec![0; inst.num_cus], 1)
                .expect("trivial profile");
            let virtual_inst = collapse_to_single_ap(inst)?;
            let final_powers = PowerProfile::uniform(&virtual_inst, &virtual_assoc);
            Ok(RunTrace {
                algorithm: Algorithm::MultiConnectivity,
                seed,
                converged: outcome.converged,
                iterations_to_converge: outcome.converged.then_some(outcome.iterations.max(1)),
                final_sum_rate: row.sum_rate,
                rows: vec![row],
                final_assoc: virtual_assoc,
                final_powers,
                warnings: Vec::new(),
            })
        }
    }
}

/// System equilibrium potential of a run's terminal association.
fn terminal_sep(inst: &NetworkInstance, trace: &RunTrace) -> f64 {
    (0..inst.num_aps)
        .map(|w| {
            let occupants = trace.final_assoc.occupants(w);
            equilibrium_potential(inst, w, &occupants, DEFAULT_ORACLE_TOL)
        })
        .sum()
}

fn snapshot_for(base: &ScenarioConfig, n: usize, w: usize, seed: u64) -> Result<NetworkInstance> {
    let mut config = base.clone();
    config.num_cus = n;
    config.num_aps = w;
    crate::model::generate_snapshot(&config, seed)
}

/// Convergence-speed sweep: every algorithm on every CU count on every
/// seed, one row per run. Baselines are excluded (they have no iteration
/// count worth comparing).
pub fn speed_sweep(
    experiment: &str,
    base: &ScenarioConfig,
    learn: &LearnConfig,
    algos: &[Algorithm],
    n_values: &[usize],
    seeds: u64,
) -> Result<Vec<SummaryRow>> {
    let grid: Vec<(usize, u64)> = n_values
        .iter()
        .flat_map(|&n| (0..seeds).map(move |s| (n, s)))
        .collect();
    let nested: Vec<Result<Vec<SummaryRow>>> = grid
        .par_iter()
        .map(|&(n, seed)| {
            let inst = snapshot_for(base, n, base.num_aps, seed)?;
            let scale = learn.rate_scale;
            algos
                .iter()
                .map(|&algo| {
                    let trace = run_algorithm(&inst, algo, learn, seed)?;
                    Ok(SummaryRow {
                        experiment: experiment.to_string(),
                        algo: algo.name().to_string(),
                        n,
                        w: inst.num_aps,
                        k: inst.num_channels,
                        seed,
                        iters_to_converge: trace.iterations_to_converge,
                        sum_rate: trace.final_sum_rate,
                        sep: Some(terminal_sep(&inst, &trace) * scale),
                        ratio_to_tstar: None,
                    })
                })
                .collect()
        })
        .collect();
    flatten_rows(nested)
}

/// Throughput sweep over AP counts: JASPA, JASPA with a connection cost of
/// a tenth of the typical standalone rate, both baselines, and (when the
/// oracle is enabled) the per-snapshot throughput bound as a `tstar`
/// pseudo-row. All rates are in bits so the rows stay comparable.
pub fn throughput_sweep(
    experiment: &str,
    base: &ScenarioConfig,
    learn: &LearnConfig,
    w_values: &[usize],
    seeds: u64,
    with_oracle: bool,
) -> Result<Vec<SummaryRow>> {
    let grid: Vec<(usize, u64)> = w_values
        .iter()
        .flat_map(|&w| (0..seeds).map(move |s| (w, s)))
        .collect();
    let nested: Vec<Result<Vec<SummaryRow>>> = grid
        .par_iter()
        .map(|&(w, seed)| {
            let inst = snapshot_for(base, base.num_cus, w, seed)?;
            let t_star = if with_oracle {
                Some(exhaustive_sep(&inst, DEFAULT_ORACLE_TOL)?.best_entry().sep)
            } else {
                None
            };
            let mut rows = Vec::new();
            let row_for = |algo: &str, trace: &RunTrace, sep: Option<f64>| SummaryRow {
                experiment: experiment.to_string(),
                algo: algo.to_string(),
                n: inst.num_cus,
                w,
                k: inst.num_channels,
                seed,
                iters_to_converge: trace.iterations_to_converge,
                sum_rate: trace.final_sum_rate,
                sep,
                ratio_to_tstar: t_star.map(|t| trace.final_sum_rate / t),
            };

            let plain = run_algorithm(&inst, Algorithm::Jaspa, learn, seed)?;
            rows.push(row_for("jaspa", &plain, Some(terminal_sep(&inst, &plain))));

            // The costed variant expresses its bar in bits directly:
            // 3 report units at the documented scale.
            let cost_bits = 3.0 / rate_scale_for_costs(&inst, COST_SCALE_TARGET);
            let costed_config = LearnConfig {
                costs: Costs::Uniform(cost_bits),
                ..learn.clone()
            };
            let costed = run_algorithm(&inst, Algorithm::Jaspa, &costed_config, seed)?;
            rows.push(row_for(
                "jaspa_cost",
                &costed,
                Some(terminal_sep(&inst, &costed)),
            ));

            let closest = run_algorithm(&inst, Algorithm::ClosestAp, learn, seed)?;
            rows.push(row_for(
                "closest",
                &closest,
                Some(terminal_sep(&inst, &closest)),
            ));

            let multi = run_algorithm(&inst, Algorithm::MultiConnectivity, learn, seed)?;
            let virtual_inst = collapse_to_single_ap(&inst)?;
            let all: Vec<usize> = (0..inst.num_cus).collect();
            let multi_sep = equilibrium_potential(&virtual_inst, 0, &all, DEFAULT_ORACLE_TOL);
            let mut multi_row = row_for("multi", &multi, Some(multi_sep));
            // The virtual network is not bounded by the partitioned T*.
            multi_row.ratio_to_tstar = None;
            rows.push(multi_row);

            if let Some(t) = t_star {
                rows.push(SummaryRow {
                    experiment: experiment.to_string(),
                    algo: "tstar".to_string(),
                    n: inst.num_cus,
                    w,
                    k: inst.num_channels,
                    seed,
                    iters_to_converge: None,
                    sum_rate: t,
                    sep: Some(t),
                    ratio_to_tstar: Some(1.0),
                });
            }
            Ok(rows)
        })
        .collect();
    flatten_rows(nested)
}

/// Connection-cost sweep with paired seeds: each seed's snapshot is run
/// once per cost value, with rates scaled per snapshot so that the cost
/// values are comparable across snapshots (see [`rate_scale_for_costs`]).
pub fn cost_sweep(
    experiment: &str,
    base: &ScenarioConfig,
    learn: &LearnConfig,
    costs: &[f64],
    seeds: u64,
) -> Result<Vec<SummaryRow>> {
    let grid: Vec<u64> = (0..seeds).collect();
    let nested: Vec<Result<Vec<SummaryRow>>> = grid
        .par_iter()
        .map(|&seed| {
            let inst = snapshot_for(base, base.num_cus, base.num_aps, seed)?;
            let scale = rate_scale_for_costs(&inst, COST_SCALE_TARGET);
            costs
                .iter()
                .map(|&c| {
                    let config = LearnConfig {
                        costs: Costs::Uniform(c),
                        rate_scale: scale,
                        ..learn.clone()
                    };
                    let trace = run_algorithm(&inst, Algorithm::Jaspa, &config, seed)?;
                    Ok(SummaryRow {
                        experiment: format!("{experiment}_c{c}"),
                        algo: "jaspa".to_string(),
                        n: inst.num_cus,
                        w: inst.num_aps,
                        k: inst.num_channels,
                        seed,
                        iters_to_converge: trace.iterations_to_converge,
                        sum_rate: trace.final_sum_rate,
                        sep: Some(terminal_sep(&inst, &trace) * scale),
                        ratio_to_tstar: None,
                    })
                })
                .collect()
        })
        .collect();
    flatten_rows(nested)
}

fn flatten_rows(nested: Vec<Result<Vec<SummaryRow>>>) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for group in nested {
        rows.extend(group?);
    }
    Ok(rows)
}

/// Mean of an iteration column where runs that never converged count as
/// `cap`, so speed comparisons stay well-defined when a run times out.
pub fn mean_iterations(rows: &[&SummaryRow], cap: usize) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let total: usize = rows
        .iter()
        .map(|r| r.iters_to_converge.unwrap_or(cap))
        .sum();
    total as f64 / rows.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate_snapshot;

    #[test]
    fn empty_row_set_renders_header_only() {
        assert_eq!(summary_csv(&[]), format!("{SUMMARY_HEADER}\n"));
    }

    #[test]
    fn rows_render_with_stable_precision_and_blank_gaps() {
        let rows = vec![SummaryRow {
            experiment: "demo".into(),
            algo: "jaspa".into(),
            n: 4,
            w: 2,
            k: 6,
            seed: 9,
            iters_to_converge: None,
            sum_rate: 1.5,
            sep: None,
            ratio_to_tstar: Some(0.75),
        }];
        let csv = summary_csv(&rows);
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(
            line,
            "demo,jaspa,4,2,6,9,,1.50000000000e0,,7.50000000000e-1"
        );
    }

    #[test]
    fn scale_maps_typical_standalone_rate_to_target() {
        let inst = generate_snapshot(&ScenarioConfig::new(4, 2, 6), 7).unwrap();
        let scale = rate_scale_for_costs(&inst, COST_SCALE_TARGET);
        let mean: f64 = (0..inst.num_cus)
            .map(|i| {
                (0..inst.num_aps)
                    .map(|w| {
                        let silent = vec![0.0; inst.num_channels_of(w)];
                        best_rate_at(&inst, i, w, &silent).0
                    })
                    .fold(0.0, f64::max)
            })
            .sum::<f64>()
            / inst.num_cus as f64;
        assert!((mean * scale - COST_SCALE_TARGET).abs() < 1e-9);
    }

    #[test]
    fn baseline_dispatch_produces_single_row_traces() {
        let inst = generate_snapshot(&ScenarioConfig::new(3, 2, 4), 11).unwrap();
        let config = LearnConfig::default();
        for algo in [Algorithm::ClosestAp, Algorithm::MultiConnectivity] {
            let trace = run_algorithm(&inst, algo, &config, 0).unwrap();
            assert_eq!(trace.rows.len(), 1);
            assert!(trace.converged);
            assert!(trace.final_sum_rate > 0.0);
        }
    }

    #[test]
    fn speed_sweep_emits_one_row_per_cell_in_grid_order() {
        let base = ScenarioConfig::new(2, 2, 4);
        let learn = LearnConfig {
            max_iters: 120,
            ..LearnConfig::default()
        };
        let rows = speed_sweep(
            "speed",
            &base,
            &learn,
            &[Algorithm::Jaspa, Algorithm::SeJaspa],
            &[2, 3],
            2,
        )
        .unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        let key: Vec<(usize, u64, String)> =
            rows.iter().map(|r| (r.n, r.seed, r.algo.clone())).collect();
        let mut sorted = key.clone();
        sorted.sort_by_key(|a| (a.0, a.1));
        assert_eq!(key, sorted, "rows not in deterministic grid order");
    }

    #[test]
    fn throughput_sweep_bounds_every_row_by_tstar() {
        let base = ScenarioConfig::new(3, 2, 4);
        let learn = LearnConfig {
            max_iters: 200,
            ..LearnConfig::default()
        };
        let rows = throughput_sweep("tp", &base, &learn, &[1, 2], 2, true).unwrap();
        for row in rows.iter().filter(|r| r.algo == "jaspa") {
            let ratio = row.ratio_to_tstar.expect("oracle enabled");
            assert!(
                ratio <= 1.0 + 1e-9,
                "seed {} W={} exceeded the throughput bound: {ratio}",
                row.seed,
                row.w
            );
        }
        assert!(rows.iter().any(|r| r.algo == "tstar"));
        assert!(rows.iter().any(|r| r.algo == "closest"));
        assert!(rows.iter().any(|r| r.algo == "multi"));
    }

    #[test]
    fn cost_sweep_pairs_seeds_across_cost_values() {
        let base = ScenarioConfig::new(3, 2, 4);
        let learn = LearnConfig {
            max_iters: 200,
            ..LearnConfig::default()
        };
        let rows = cost_sweep("fig4", &base, &learn, &[0.0, 3.0], 3).unwrap();
        assert_eq!(rows.len(), 6);
        let zero: Vec<u64> = rows
            .iter()
            .filter(|r| r.experiment.ends_with("c0"))
            .map(|r| r.seed)
            .collect();
        let three: Vec<u64> = rows
            .iter()
            .filter(|r| r.experiment.ends_with("c3"))
            .map(|r| r.seed)
            .collect();
        assert_eq!(zero, three, "cost arms not seed-paired");
    }

    #[test]
    fn rerunning_a_row_reproduces_its_numbers() {
        let base = ScenarioConfig::new(3, 2, 4);
        let learn = LearnConfig {
            max_iters: 150,
            ..LearnConfig::default()
        };
        let rows = speed_sweep("rep", &base, &learn, &[Algorithm::SiJaspa], &[3], 2).unwrap();
        for row in &rows {
            let inst = generate_snapshot(&base, row.seed).unwrap();
            let trace = run_algorithm(&inst, Algorithm::SiJaspa, &learn, row.seed).unwrap();
            assert_eq!(trace.final_sum_rate, row.sum_rate, "seed {}", row.seed);
            assert_eq!(trace.iterations_to_converge, row.iters_to_converge);
        }
    }
}
