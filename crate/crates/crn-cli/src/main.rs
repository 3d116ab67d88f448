//! Command-line harness for the cognitive radio network simulator.
//!
//! Subcommands:
//!
//! - `run` — one algorithm on one seeded snapshot, trace CSV out;
//! - `experiment` — seeded Monte-Carlo sweeps from a JSON config, producing
//!   a long-format summary CSV plus gnuplot-compatible `.dat`/`.gp` files;
//! - `verify` — the acceptance suite, one PASS/FAIL line per criterion;
//! - `oracle` — the exhaustive association table with per-AP equilibrium
//!   potentials and the throughput bound.
//!
//! Exit codes: 0 on success (for `run`: the algorithm converged), 2 when a
//! run finished without converging, 1 on configuration or I/O errors. The
//! `CRN_THREADS` environment variable bounds the worker pool.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crn_core::experiment::{
    cost_sweep, mean_iterations, speed_sweep, summary_csv, throughput_sweep, SummaryRow,
};
use crn_core::learn::{Costs, LearnConfig};
use crn_core::model::{generate_snapshot, ScenarioConfig};
use crn_core::oracle::{exhaustive_sep, DEFAULT_ORACLE_TOL};
use crn_core::physics::potential_ap;
use crn_core::verify::{check_exact_potential_with, run_checks_with};
use crn_core::{Algorithm, NetworkInstance};

/// Routine sweeps stay at desk scale; anything bigger needs `--large`.
const DESK_SCALE_N: usize = 10;
const DESK_SCALE_K: usize = 32;

#[derive(Parser)]
#[command(
    name = "crn",
    version,
    about = "Simulator for joint AP selection and uplink power allocation \
             in multi-AP cognitive radio networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one seeded snapshot and emit its trace CSV.
    Run(RunArgs),
    /// Drive the Monte-Carlo sweeps described by a JSON experiment config.
    Experiment(ExperimentArgs),
    /// Run the acceptance suite (one PASS/FAIL line per criterion).
    Verify(VerifyArgs),
    /// Dump the exhaustive association table and throughput bound.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Algorithm: jaspa, se, si, jjaspa, closest, or multi.
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    /// Scenario JSON file (keys: num_cus, num_aps, num_channels, area_m,
    /// power_budget, noise_floor, seed, d_min). Flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of CUs.
    #[arg(long)]
    n: Option<usize>,
    /// Number of APs.
    #[arg(long)]
    w: Option<usize>,
    /// Number of channels.
    #[arg(long)]
    k: Option<usize>,
    /// Snapshot and run seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Reply-memory length M.
    #[arg(long)]
    memory: Option<usize>,
    /// Uniform connection cost c.
    #[arg(long)]
    cost: Option<f64>,
    /// Outer iteration cap.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Trace CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment JSON file: scenario block, algorithm block, experiments.
    config: PathBuf,
    /// Directory for summary.csv and the .dat/.gp files.
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Allow full-scale sweeps (N > 10 or K > 32); these can run for
    /// hours because the exhaustive oracle is exponential in N.
    #[arg(long)]
    large: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reduced seed counts: finishes in well under a minute.
    #[arg(long)]
    quick: bool,
    /// Harness self-test: run the exact-potential criterion against a
    /// deliberately sign-flipped potential. Expected outcome is FAIL.
    #[arg(long)]
    mutate_potential: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Scenario JSON file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of CUs.
    #[arg(long)]
    n: Option<usize>,
    /// Number of APs.
    #[arg(long)]
    w: Option<usize>,
    /// Number of channels.
    #[arg(long)]
    k: Option<usize>,
    /// Snapshot seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Table CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_algorithm(raw: &str) -> Result<Algorithm, String> {
    Algorithm::from_name(raw).ok_or_else(|| {
        format!("unknown algorithm {raw:?} (expected jaspa, se, si, jjaspa, closest, or multi)")
    })
}

fn main() -> ExitCode {
    if let Err(err) = configure_threads() {
        eprintln!("error: {err:#}");
        return ExitCode::from(1);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let usage_only = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if usage_only {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

/// Applies `CRN_THREADS` to the global worker pool before any sweep runs.
fn configure_threads() -> anyhow::Result<()> {
    match std::env::var("CRN_THREADS") {
        Ok(raw) => {
            let threads: usize = raw
                .trim()
                .parse()
                .context("CRN_THREADS must be a positive integer")?;
            ensure!(threads >= 1, "CRN_THREADS must be ≥ 1");
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .context("initializing the worker pool")?;
            Ok(())
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(err) => Err(err).context("reading CRN_THREADS"),
    }
}

/// Loads the scenario file if given, then applies flag overrides.
fn resolve_scenario(
    config: &Option<PathBuf>,
    n: Option<usize>,
    w: Option<usize>,
    k: Option<usize>,
) -> anyhow::Result<ScenarioConfig> {
    let mut scenario = match config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ScenarioConfig>(&text)
                .with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            let (Some(n), Some(w), Some(k)) = (n, w, k) else {
                bail!("--n, --w, and --k are required unless --config provides them");
            };
            ScenarioConfig::new(n, w, k)
        }
    };
    if let Some(n) = n {
        scenario.num_cus = n;
    }
    if let Some(w) = w {
        scenario.num_aps = w;
    }
    if let Some(k) = k {
        scenario.num_channels = k;
    }
    Ok(scenario)
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let scenario = resolve_scenario(&args.config, args.n, args.w, args.k)?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let inst = generate_snapshot(&scenario, seed)?;

    let mut config = LearnConfig::default();
    if let Some(m) = args.memory {
        config.memory = m;
    }
    if let Some(c) = args.cost {
        config.costs = Costs::Uniform(c);
    }
    if let Some(cap) = args.max_iters {
        config.max_iters = cap;
    }

    let trace = crn_core::experiment::run_algorithm(&inst, args.algo, &config, seed)?;
    write_or_print(&args.out, &trace.to_csv_string())?;

    for warning in &trace.warnings {
        eprintln!("warning: {warning}");
    }
    eprintln!(
        "{}: seed {seed}, {} iterations, {}, final sum rate {:.6}",
        args.algo,
        trace.rows.len(),
        if trace.converged {
            "converged"
        } else {
            "did not converge"
        },
        trace.final_sum_rate
    );
    Ok(if trace.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

/// One experiment config file: a base scenario, shared algorithm settings,
/// and any number of sweep descriptions.
#[derive(Debug, Deserialize)]
struct ExperimentFile {
    scenario: ScenarioConfig,
    #[serde(default)]
    algorithm: AlgorithmBlock,
    #[serde(default)]
    experiments: Vec<ExperimentSpec>,
}

/// Optional overrides of [`LearnConfig`] defaults.
#[derive(Debug, Default, Deserialize)]
struct AlgorithmBlock {
    memory: Option<usize>,
    cost: Option<f64>,
    max_iters: Option<usize>,
    inner_tol: Option<f64>,
    stop_window: Option<usize>,
}

impl AlgorithmBlock {
    fn to_config(&self) -> LearnConfig {
        let mut config = LearnConfig::default();
        if let Some(m) = self.memory {
            config.memory = m;
        }
        if let Some(c) = self.cost {
            config.costs = Costs::Uniform(c);
        }
        if let Some(cap) = self.max_iters {
            config.max_iters = cap;
        }
        if let Some(tol) = self.inner_tol {
            config.inner_tol = tol;
        }
        if let Some(window) = self.stop_window {
            config.stop_window = window;
        }
        config
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ExperimentSpec {
    /// Convergence speed vs CU count, one line per algorithm.
    Speed {
        name: String,
        n_values: Vec<usize>,
        algos: Vec<String>,
        seeds: u64,
    },
    /// Terminal throughput vs AP count for JASPA, costed JASPA, and the
    /// baselines; `oracle: true` adds the exhaustive throughput bound.
    Throughput {
        name: String,
        w_values: Vec<usize>,
        seeds: u64,
        #[serde(default)]
        oracle: bool,
    },
    /// Paired-seed connection-cost comparison.
    Cost {
        name: String,
        costs: Vec<f64>,
        seeds: u64,
    },
}

impl ExperimentSpec {
    fn name(&self) -> &str {
        match self {
            ExperimentSpec::Speed { name, .. }
            | ExperimentSpec::Throughput { name, .. }
            | ExperimentSpec::Cost { name, .. } => name,
        }
    }

    /// Largest CU count the sweep will instantiate.
    fn max_n(&self, base: &ScenarioConfig) -> usize {
        match self {
            ExperimentSpec::Speed { n_values, .. } => {
                n_values.iter().copied().max().unwrap_or(base.num_cus)
            }
            _ => base.num_cus,
        }
    }
}

fn cmd_experiment(args: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let file: ExperimentFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    file.scenario.validate()?;

    if !args.large {
        let max_n = file
            .experiments
            .iter()
            .map(|e| e.max_n(&file.scenario))
            .max()
            .unwrap_or(file.scenario.num_cus);
        if max_n > DESK_SCALE_N || file.scenario.num_channels > DESK_SCALE_K {
            bail!(
                "config asks for N = {max_n}, K = {} — beyond desk scale \
                 (N ≤ {DESK_SCALE_N}, K ≤ {DESK_SCALE_K}); pass --large to \
                 run full-scale sweeps",
                file.scenario.num_channels
            );
        }
    }

    let names: Vec<&str> = file.experiments.iter().map(|e| e.name()).collect();
    let unique: BTreeSet<&str> = names.iter().copied().collect();
    ensure!(
        unique.len() == names.len(),
        "experiment names must be unique (got {names:?})"
    );

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let learn = file.algorithm.to_config();

    let mut all_rows = Vec::new();
    for spec in &file.experiments {
        let rows = run_experiment(spec, &file.scenario, &learn)?;
        write_figure_files(&args.out_dir, spec, &rows, learn.max_iters)?;
        eprintln!("{}: {} summary rows", spec.name(), rows.len());
        all_rows.extend(rows);
    }

    let summary_path = args.out_dir.join("summary.csv");
    fs::write(&summary_path, summary_csv(&all_rows))
        .with_context(|| format!("writing {}", summary_path.display()))?;
    eprintln!(
        "wrote {} ({} rows total)",
        summary_path.display(),
        all_rows.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_experiment(
    spec: &ExperimentSpec,
    scenario: &ScenarioConfig,
    learn: &LearnConfig,
) -> anyhow::Result<Vec<SummaryRow>> {
    let rows = match spec {
        ExperimentSpec::Speed {
            name,
            n_values,
            algos,
            seeds,
        } => {
            let algos: Vec<Algorithm> = algos
                .iter()
                .map(|raw| parse_algorithm(raw).map_err(anyhow::Error::msg))
                .collect::<anyhow::Result<_>>()?;
            speed_sweep(name, scenario, learn, &algos, n_values, *seeds)?
        }
        ExperimentSpec::Throughput {
            name,
            w_values,
            seeds,
            oracle,
        } => throughput_sweep(name, scenario, learn, w_values, *seeds, *oracle)?,
        ExperimentSpec::Cost { name, costs, seeds } => {
            cost_sweep(name, scenario, learn, costs, *seeds)?
        }
    };
    Ok(rows)
}

/// Writes `{name}.dat` (aggregated means) and `{name}.gp` (a plain-text
/// gnuplot script) for one finished experiment.
fn write_figure_files(
    out_dir: &Path,
    spec: &ExperimentSpec,
    rows: &[SummaryRow],
    iteration_cap: usize,
) -> anyhow::Result<()> {
    let (dat, gp) = match spec {
        ExperimentSpec::Speed {
            name,
            n_values,
            algos,
            ..
        } => speed_figure(name, n_values, algos, rows, iteration_cap),
        ExperimentSpec::Throughput {
            name,
            w_values,
            oracle,
            ..
        } => throughput_figure(name, w_values, *oracle, rows),
        ExperimentSpec::Cost { name, costs, .. } => cost_figure(name, costs, rows, iteration_cap),
    };
    let dat_path = out_dir.join(format!("{}.dat", spec.name()));
    fs::write(&dat_path, dat).with_context(|| format!("writing {}", dat_path.display()))?;
    let gp_path = out_dir.join(format!("{}.gp", spec.name()));
    fs::write(&gp_path, gp).with_context(|| format!("writing {}", gp_path.display()))?;
    Ok(())
}

fn mean_sum_rate(rows: &[&SummaryRow]) -> f64 {
    if rows.is_empty() {
        return f64::NAN;
    }
    rows.iter().map(|r| r.sum_rate).sum::<f64>() / rows.len() as f64
}

/// Shared gnuplot preamble: reads `.dat` comments, keys outside the plot.
fn gp_preamble(title: &str, xlabel: &str, ylabel: &str) -> String {
    format!(
        "# gnuplot script — pair with the .dat file next to it\n\
         set datafile commentschars \"#\"\n\
         set title \"{title}\"\n\
         set xlabel \"{xlabel}\"\n\
         set ylabel \"{ylabel}\"\n\
         set key outside\n\
         set grid\n"
    )
}

fn plot_command(dat: &str, series: &[&str]) -> String {
    let parts: Vec<String> = series
        .iter()
        .enumerate()
        .map(|(idx, title)| {
            format!(
                "\"{dat}\" using 1:{} with linespoints title \"{title}\"",
                idx + 2
            )
        })
        .collect();
    format!("plot {}\n", parts.join(", \\\n     "))
}

fn speed_figure(
    name: &str,
    n_values: &[usize],
    algos: &[String],
    rows: &[SummaryRow],
    cap: usize,
) -> (String, String) {
    let mut dat = format!(
        "# mean iterations to convergence by CU count \
         (runs that hit the {cap}-iteration cap count as {cap})\n# n {}\n",
        algos.join(" ")
    );
    for &n in n_values {
        let mut line = n.to_string();
        for algo in algos {
            let matching: Vec<&SummaryRow> = rows
                .iter()
                .filter(|r| r.n == n && r.algo == *algo)
                .collect();
            line.push_str(&format!(" {:.4}", mean_iterations(&matching, cap)));
        }
        dat.push_str(&line);
        dat.push('\n');
    }
    let titles: Vec<&str> = algos.iter().map(String::as_str).collect();
    let gp = format!(
        "{}{}",
        gp_preamble(
            "Convergence speed vs network size",
            "number of CUs (N)",
            "mean iterations to convergence",
        ),
        plot_command(&format!("{name}.dat"), &titles)
    );
    (dat, gp)
}

fn throughput_figure(
    name: &str,
    w_values: &[usize],
    oracle: bool,
    rows: &[SummaryRow],
) -> (String, String) {
    let mut algos = vec!["jaspa", "jaspa_cost", "closest", "multi"];
    if oracle {
        algos.push("tstar");
    }
    let mut dat = format!(
        "# mean terminal sum rate (bits) by AP count\n# w {}\n",
        algos.join(" ")
    );
    for &w in w_values {
        let mut line = w.to_string();
        for algo in &algos {
            let matching: Vec<&SummaryRow> = rows
                .iter()
                .filter(|r| r.w == w && r.algo == *algo)
                .collect();
            line.push_str(&format!(" {:.6}", mean_sum_rate(&matching)));
        }
        dat.push_str(&line);
        dat.push('\n');
    }
    let gp = format!(
        "{}{}",
        gp_preamble(
            "Terminal throughput vs AP count",
            "number of APs (W)",
            "mean sum rate (bits)",
        ),
        plot_command(&format!("{name}.dat"), &algos)
    );
    (dat, gp)
}

fn cost_figure(name: &str, costs: &[f64], rows: &[SummaryRow], cap: usize) -> (String, String) {
    let mut dat = format!(
        "# paired-seed means by connection cost (rates in report units; \
         runs that hit the {cap}-iteration cap count as {cap})\n\
         # cost mean_iterations mean_sum_rate\n"
    );
    for &c in costs {
        let arm = format!("{name}_c{c}");
        let matching: Vec<&SummaryRow> = rows.iter().filter(|r| r.experiment == arm).collect();
        dat.push_str(&format!(
            "{c} {:.4} {:.6}\n",
            mean_iterations(&matching, cap),
            mean_sum_rate(&matching)
        ));
    }
    let gp = format!(
        "{}plot \"{name}.dat\" using 1:2 with linespoints title \"mean iterations\", \\\n     \
         \"{name}.dat\" using 1:3 axes x1y2 with linespoints title \"mean sum rate\"\n",
        gp_preamble(
            "Effect of the connection cost",
            "connection cost c",
            "mean iterations to convergence",
        )
    );
    (dat, gp)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    if args.mutate_potential {
        // Self-test of the suite itself: criterion 1 must catch a potential
        // whose sign is flipped.
        let flipped = |inst: &NetworkInstance, w: usize, occupants: &[usize], powers: &[&[f64]]| {
            -potential_ap(inst, w, occupants, powers)
        };
        let report = check_exact_potential_with(&flipped, args.quick);
        println!("{}", report.line(1));
        println!(
            "mutation self-test: the sign-flipped potential {} detected",
            if report.passed { "was NOT" } else { "was" }
        );
        return Ok(if report.passed {
            // The corrupted potential slipped through: the suite is broken.
            ExitCode::from(1)
        } else {
            ExitCode::SUCCESS
        });
    }

    let mode = if args.quick { "quick" } else { "full" };
    println!("running the {mode} acceptance suite");
    let reports = run_checks_with(args.quick, |index, report| {
        println!("{}", report.line(index));
        let _ = std::io::stdout().flush();
    });
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", reports.len());
    Ok(if passed == reports.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_oracle(args: OracleArgs) -> anyhow::Result<ExitCode> {
    let scenario = resolve_scenario(&args.config, args.n, args.w, args.k)?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let inst = generate_snapshot(&scenario, seed)?;
    let table = exhaustive_sep(&inst, DEFAULT_ORACLE_TOL)?;
    write_or_print(&args.out, &table.to_csv_string())?;
    let best = table.best_entry();
    eprintln!(
        "best association {:?} with throughput bound {:.6} bits over {} profiles",
        best.assoc,
        best.sep,
        table.entries.len()
    );
    Ok(ExitCode::SUCCESS)
}
