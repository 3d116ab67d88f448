//! Fixed-association spectrum-sharing equilibrium solvers for a single
//! AP's occupant set — the "inner loop" used between association moves.
//!
//! Both solvers stop on the best-response residual
//! `max_i ‖waterfill(I_i) − p_i‖_∞ < tol`, not on raw power stability:
//! the equilibrium set can be connected, so powers may drift along it while
//! every occupant is already best-responding. A vanishing residual is the
//! direct certificate that no occupant can improve.

use crate::best_response::waterfill;
use crate::model::NetworkInstance;
use crate::physics::potential_ap;

/// Diminishing step sizes `α_t = 1/(t+1)^γ`, `t = 0, 1, 2, …`.
///
/// The exponent must satisfy `0.5 < γ ≤ 1` so the series diverges while its
/// squares converge (`Σ α_t = ∞`, `Σ α_t² < ∞`). The first step is `α_0 = 1`
/// — a pure best response — and every subsequent step lies strictly inside
/// `(0, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct StepsizeSchedule {
    gamma: f64,
}

impl StepsizeSchedule {
    /// Default decay exponent. `γ = 1` satisfies the summability conditions
    /// too, but decays so fast that tight tolerances become unreachable in
    /// practice; 0.6 converges orders of magnitude faster and still sits in
    /// the admissible range.
    pub const DEFAULT_GAMMA: f64 = 0.6;

    /// Creates a schedule; `gamma` outside `(0.5, 1]` is rejected.
    pub fn new(gamma: f64) -> crate::error::Result<Self> {
        if !(gamma > 0.5 && gamma <= 1.0) {
            return Err(crate::error::Error::InvalidConfig(format!(
                "stepsize exponent must be in (0.5, 1], got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    /// Step size at iteration `t` (0-based).
    #[inline]
    pub fn alpha(&self, t: usize) -> f64 {
        1.0 / ((t + 1) as f64).powf(self.gamma)
    }
}

impl Default for StepsizeSchedule {
    fn default() -> Self {
        Self {
            gamma: Self::DEFAULT_GAMMA,
        }
    }
}

/// Output of an inner solve.
#[derive(Debug, Clone)]
pub struct InnerResult {
    /// Final powers, aligned with the occupant list handed in.
    pub powers: Vec<Vec<f64>>,
    /// Update sweeps performed.
    pub iterations: usize,
    /// Whether the best-response residual dropped below tolerance.
    pub converged: bool,
    /// Per-AP potential after every sweep (diagnostics; the sequential
    /// solver records one value per individual best response).
    pub potential_steps: Vec<f64>,
}

/// Default best-response residual tolerance.
pub const DEFAULT_INNER_TOL: f64 = 1e-8;
/// Default sweep cap.
pub const DEFAULT_INNER_MAX_ITERS: usize = 5000;

fn interference_at(
    inst: &NetworkInstance,
    w: usize,
    occupants: &[usize],
    powers: &[Vec<f64>],
    exclude: usize,
) -> Vec<f64> {
    inst.channels(w)
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            occupants
                .iter()
                .zip(powers)
                .filter(|(&i, _)| i != exclude)
                .map(|(&i, p)| inst.gains[i][w][k] * p[j])
                .sum()
        })
        .collect()
}

fn record_potential(
    inst: &NetworkInstance,
    w: usize,
    occupants: &[usize],
    powers: &[Vec<f64>],
    steps: &mut Vec<f64>,
) {
    let refs: Vec<&[f64]> = powers.iter().map(|p| p.as_slice()).collect();
    steps.push(potential_ap(inst, w, occupants, &refs));
}

/// Simultaneous damped iterative water-filling.
///
/// Every occupant computes its water-filling best response against the
/// current interference, then moves `p ← (1−α_t)·p + α_t·p*` with the
/// diminishing steps of `schedule`. Stops as soon as the best-response
/// residual `max_i ‖p*_i − p_i‖_∞` falls below `tol` (the current powers
/// are then an equilibrium certificate in themselves), or after
/// `max_iters` sweeps with `converged = false`.
pub fn aiwf_solve(
    inst: &NetworkInstance,
    w: usize,
    occupants: &[usize],
    init_powers: Vec<Vec<f64>>,
    schedule: StepsizeSchedule,
    tol: f64,
    max_iters: usize,
) -> InnerResult {
    assert!(!occupants.is_empty(), "occupant set must be non-empty");
    let mut powers = init_powers;
    let mut potential_steps = Vec::new();
    record_potential(inst, w, occupants, &powers, &mut potential_steps);

    for t in 0..max_iters {
        let best: Vec<Vec<f64>> = occupants
            .iter()
            .map(|&i| {
                let interf = interference_at(inst, w, occupants, &powers, i);
                waterfill(inst, i, w, &interf)
            })
            .collect();

        let residual = best
            .iter()
            .zip(&powers)
            .flat_map(|(b, p)| b.iter().zip(p).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        if residual < tol {
            return InnerResult {
                powers,
                iterations: t,
                converged: true,
                potential_steps,
            };
        }

        let alpha = schedule.alpha(t);
        for (p, b) in powers.iter_mut().zip(&best) {
            for (x, y) in p.iter_mut().zip(b) {
                *x = (1.0 - alpha) * *x + alpha * y;
            }
        }
        record_potential(inst, w, occupants, &powers, &mut potential_steps);
    }

    InnerResult {
        powers,
        iterations: max_iters,
        converged: false,
        potential_steps,
    }
}

/// Sequential iterative water-filling: occupants best-respond one at a time
/// in index order, each replacing its power outright.
///
/// Because each replacement is an exact best response, the per-AP potential
/// is nondecreasing after every individual update. Stopping rule and output
/// conventions match [`aiwf_solve`]; one "iteration" is a full round-robin
/// sweep.
pub fn siwf_solve(
    inst: &NetworkInstance,
    w: usize,
    occupants: &[usize],
    init_powers: Vec<Vec<f64>>,
    tol: f64,
    max_iters: usize,
) -> InnerResult {
    assert!(!occupants.is_empty(), "occupant set must be non-empty");
    let mut powers = init_powers;
    let mut potential_steps = Vec::new();
    record_potential(inst, w, occupants, &powers, &mut potential_steps);

    for t in 0..max_iters {
        let mut residual: f64 = 0.0;
        for idx in 0..occupants.len() {
            let interf = interference_at(inst, w, occupants, &powers, occupants[idx]);
            let best = waterfill(inst, occupants[idx], w, &interf);
            let change = best
                .iter()
                .zip(&powers[idx])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            residual = residual.max(change);
            powers[idx] = best;
            record_potential(inst, w, occupants, &powers, &mut potential_steps);
        }
        // A full-step sweep's max power change IS the best-response
        // residual measured at each occupant's turn.
        if residual < tol {
            return InnerResult {
                powers,
                iterations: t + 1,
                converged: true,
                potential_steps,
            };
        }
    }

    InnerResult {
        powers,
        iterations: max_iters,
        converged: false,
        potential_steps,
    }
}

/// Uniform-split starting point for an occupant list at AP `w`.
pub fn uniform_init(inst: &NetworkInstance, w: usize, occupants: &[usize]) -> Vec<Vec<f64>> {
    let m = inst.num_channels_of(w);
    occupants
        .iter()
        .map(|&i| vec![inst.budgets[i] / m as f64; m])
        .collect()
}
