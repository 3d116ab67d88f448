//! Rates, interference, and the per-AP / system potential functions.
//!
//! Every quantity here is a pure function of an immutable
//! [`NetworkInstance`] plus profiles, so concurrent evaluation is safe.
//!
//! Rates use base-2 logarithms (bits, with the total bandwidth normalized
//! to 1): CU `i` at AP `w` with power `p` against interference `I` earns
//! `(1/K) Σ_k log₂(1 + g_k p_k / (n_k + I_k))`, where the sum runs over the
//! channels `w` owns and `K` is the **total** channel count.
//!
//! The per-AP potential `(1/K) Σ_k [log₂(n_k + Σ_i g_{i,k} p_{i,k}) −
//! log₂ n_k]` is an exact potential for the fixed-association power game:
//! any unilateral change of one occupant's power moves the potential by
//! exactly that occupant's rate change. That identity is the cornerstone
//! the equilibrium machinery builds on, and is enforced to 1e-9 by tests.

use std::f64::consts::LN_2;

use crate::model::{AssociationProfile, NetworkInstance, PowerProfile};

/// `log₂(1 + x)` computed stably for small `x`.
#[inline]
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Aggregate interference-plus-noise context for every (CU, AP) pair.
///
/// `at[i][w][j]` is the interference CU `i` would see at AP `w` on the
/// `j`-th channel of `w` (ordering per [`NetworkInstance::channels`]):
/// the summed received power of all CUs associated with `w` other than `i`.
/// For APs the CU is not associated with, this is the full received power
/// at that AP, since `i` contributes nothing there.
#[derive(Debug, Clone)]
pub struct InterferenceMap {
    /// Interference per CU, per AP, per owned channel.
    pub at: Vec<Vec<Vec<f64>>>,
}

impl InterferenceMap {
    /// Interference seen by CU `i` at AP `w`, one entry per owned channel.
    #[inline]
    pub fn row(&self, i: usize, w: usize) -> &[f64] {
        &self.at[i][w]
    }
}

/// Computes the interference map for the current association and powers.
///
/// For each AP `w` and owned channel `k`, the total received power is
/// `S_w(k) = Σ_{j: a(j)=w} g_{j,w,k} p_j(k)`; CU `i`'s interference at `w`
/// is the total minus its own contribution when associated there (clamped
/// at 0 against rounding), and the full total otherwise.
pub fn interference_map(
    inst: &NetworkInstance,
    assoc: &AssociationProfile,
    powers: &PowerProfile,
) -> InterferenceMap {
    // Total received power per AP per owned-channel position.
    let mut totals: Vec<Vec<f64>> = (0..inst.num_aps)
        .map(|w| vec![0.0; inst.num_channels_of(w)])
        .collect();
    for i in 0..inst.num_cus {
        let w = assoc.ap[i];
        for (j, &k) in inst.channels(w).iter().enumerate() {
            totals[w][j] += inst.gains[i][w][k] * powers.per_cu[i][j];
        }
    }

    let at = (0..inst.num_cus)
        .map(|i| {
            (0..inst.num_aps)
                .map(|w| {
                    let mut row = totals[w].clone();
                    if assoc.ap[i] == w {
                        for (j, &k) in inst.channels(w).iter().enumerate() {
                            let own = inst.gains[i][w][k] * powers.per_cu[i][j];
                            row[j] = (row[j] - own).max(0.0);
                        }
                    }
                    row
                })
                .collect()
        })
        .collect();
    InterferenceMap { at }
}

/// Uplink rate of CU `i` transmitting to AP `w` with power `p` against
/// per-channel interference `interference` (both indexed by `w`'s channel
/// positions). Bits per channel use, normalized by the total channel count.
pub fn rate(inst: &NetworkInstance, i: usize, w: usize, p: &[f64], interference: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), inst.num_channels_of(w));
    debug_assert_eq!(interference.len(), inst.num_channels_of(w));
    let sum: f64 = inst
        .channels(w)
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let g = inst.gains[i][w][k];
            let denom = inst.noise[w][k] + interference[j];
            log2_1p(g * p[j] / denom)
        })
        .sum();
    sum / inst.num_channels as f64
}

/// Per-AP potential: `(1/K) Σ_{k owned by w} [log₂(n_k + Σ_i g p) − log₂ n_k]`
/// over the given occupants and their aligned power vectors.
pub fn potential_ap(
    inst: &NetworkInstance,
    w: usize,
    occupants: &[usize],
    powers_w: &[&[f64]],
) -> f64 {
    debug_assert_eq!(occupants.len(), powers_w.len());
    let sum: f64 = inst
        .channels(w)
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let received: f64 = occupants
                .iter()
                .zip(powers_w)
                .map(|(&i, p)| inst.gains[i][w][k] * p[j])
                .sum();
            log2_1p(received / inst.noise[w][k])
        })
        .sum();
    sum / inst.num_channels as f64
}

/// System potential: sum of the per-AP potentials under the current
/// association and powers.
pub fn system_potential(
    inst: &NetworkInstance,
    assoc: &AssociationProfile,
    powers: &PowerProfile,
) -> f64 {
    (0..inst.num_aps)
        .map(|w| {
            let occupants = assoc.occupants(w);
            let powers_w: Vec<&[f64]> = occupants
                .iter()
                .map(|&i| powers.per_cu[i].as_slice())
                .collect();
            potential_ap(inst, w, &occupants, &powers_w)
        })
        .sum()
}

/// Realized rate of every CU under the current association and powers.
pub fn realized_rates(
    inst: &NetworkInstance,
    assoc: &AssociationProfile,
    powers: &PowerProfile,
    interference: &InterferenceMap,
) -> Vec<f64> {
    (0..inst.num_cus)
        .map(|i| {
            let w = assoc.ap[i];
            rate(inst, i, w, &powers.per_cu[i], interference.row(i, w))
        })
        .collect()
}

/// Sum of all realized CU rates.
pub fn sum_rate(inst: &NetworkInstance, assoc: &AssociationProfile, powers: &PowerProfile) -> f64 {
    let interference = interference_map(inst, assoc, powers);
    realized_rates(inst, assoc, powers, &interference)
        .iter()
        .sum()
}
