//! Per-iteration run records and their CSV emission.
//!
//! Every floating-point value is written with 12 significant digits in
//! scientific notation, so re-running the same `(algorithm, config, seed)`
//! triple reproduces the CSV byte for byte.

use std::io::Write;

use crate::error::Result;
use crate::model::{AssociationProfile, PowerProfile};

/// Identifier of an equilibrium-learning algorithm or baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Outer loop with per-iteration inner equilibria and reply memories.
    Jaspa,
    /// Sequential variant: one round-robin actor per iteration.
    SeJaspa,
    /// Simultaneous variant with stay-duration damped power updates.
    SiJaspa,
    /// Joint-strategy variant with CU memories and AP coalition records.
    JJaspa,
    /// Closest-AP association baseline (geometry only).
    ClosestAp,
    /// Multiple-connectivity baseline (one virtual AP owning all channels).
    MultiConnectivity,
}

impl Algorithm {
    /// Stable lower-case name used in CSV columns and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Jaspa => "jaspa",
            Algorithm::SeJaspa => "se",
            Algorithm::SiJaspa => "si",
            Algorithm::JJaspa => "jjaspa",
            Algorithm::ClosestAp => "closest",
            Algorithm::MultiConnectivity => "multi",
        }
    }

    /// Parses the CLI name.
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "jaspa" => Algorithm::Jaspa,
            "se" => Algorithm::SeJaspa,
            "si" => Algorithm::SiJaspa,
            "jjaspa" => Algorithm::JJaspa,
            "closest" => Algorithm::ClosestAp,
            "multi" => Algorithm::MultiConnectivity,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One iteration's worth of observable state.
#[derive(Debug, Clone)]
pub struct TraceRow {
    /// 1-based iteration number.
    pub iteration: usize,
    /// Sum of realized CU rates (in the run's configured rate units).
    pub sum_rate: f64,
    /// System potential (same units).
    pub potential: f64,
    /// CUs whose association changed this iteration.
    pub num_switchers: usize,
    /// Worst distance-from-certainty of the reply distributions:
    /// `max_i (1 − max_w β_i(w))`. Algorithms without reply distributions
    /// report an analogous concentration gap (see each runner's docs).
    pub max_beta_gap: f64,
    /// True from the iteration convergence was declared onward.
    pub converged: bool,
    /// Total distinct coalitions stored across APs (joint-strategy runs
    /// only; `None` elsewhere, which omits the CSV column).
    pub distinct_coalitions: Option<usize>,
}

/// Full record of one algorithm run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    /// Which algorithm produced the trace.
    pub algorithm: Algorithm,
    /// Seed the run (and its snapshot) was driven by.
    pub seed: u64,
    /// Per-iteration rows, in order.
    pub rows: Vec<TraceRow>,
    /// Whether convergence was declared (and certified) before the
    /// iteration cap.
    pub converged: bool,
    /// Iterations until convergence was declared (equals `rows.len()` when
    /// the run converged; `None` otherwise).
    pub iterations_to_converge: Option<usize>,
    /// Terminal association.
    pub final_assoc: AssociationProfile,
    /// Terminal powers.
    pub final_powers: PowerProfile,
    /// Terminal sum rate (configured units).
    pub final_sum_rate: f64,
    /// Non-fatal observations (memory caps hit, inner loops truncated, …).
    pub warnings: Vec<String>,
}

/// Formats a float with 12 significant digits, locale-independent.
#[inline]
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

impl RunTrace {
    /// Writes the per-iteration rows as CSV.
    ///
    /// Columns: `iteration,sum_rate,potential,num_switchers,max_beta_gap,
    /// converged`, plus `distinct_coalitions` when the run recorded it.
    /// Booleans are 0/1.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let with_coalitions = self.rows.iter().any(|r| r.distinct_coalitions.is_some());
        let mut header =
            "iteration,sum_rate,potential,num_switchers,max_beta_gap,converged".to_string();
        if with_coalitions {
            header.push_str(",distinct_coalitions");
        }
        writeln!(out, "{header}")?;
        for row in &self.rows {
            let mut line = format!(
                "{},{},{},{},{},{}",
                row.iteration,
                fmt_float(row.sum_rate),
                fmt_float(row.potential),
                row.num_switchers,
                fmt_float(row.max_beta_gap),
                u8::from(row.converged),
            );
            if with_coalitions {
                line.push(',');
                line.push_str(
                    &row.distinct_coalitions
                        .map_or_else(String::new, |c| c.to_string()),
                );
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// The CSV content as a string (convenience for tests and diffing).
    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}
