//! Network snapshot representation, random scenario generation, and
//! feasibility checking.
//!
//! A snapshot describes an uplink network of `N` cognitive users (CUs) and
//! `W` access points (APs). The `K` channels are partitioned among the APs
//! (every channel has exactly one owner), each CU holds a total transmit
//! power budget, and `gains[i][w][k]` is the squared channel magnitude from
//! CU `i` to AP `w` on channel `k`. Gains are stored only for channels the
//! AP owns; the remaining entries stay zero and are never read.
//!
//! All indices are 0-based. Randomness is always drawn from a seeded
//! [`ChaCha8Rng`] so that identical `(config, seed)` pairs produce
//! bit-identical snapshots on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking power-budget feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Scenario parameters for random snapshot generation.
///
/// Deserializable from a JSON config file; every field except the three
/// network sizes has a default (10 m × 10 m area, unit power budget, noise
/// floor 0.01, seed 0, distance floor 0.1 m).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Number of cognitive users N.
    pub num_cus: usize,
    /// Number of access points W.
    pub num_aps: usize,
    /// Number of channels K (must be ≥ `num_aps` so every AP owns one).
    pub num_channels: usize,
    /// Side length of the square deployment area, in meters.
    #[serde(default = "default_area")]
    pub area_m: f64,
    /// Per-CU total transmit power budget.
    #[serde(default = "default_budget")]
    pub power_budget: f64,
    /// Noise power at every AP on every channel.
    #[serde(default = "default_noise")]
    pub noise_floor: f64,
    /// Seed used when the caller does not supply one explicitly.
    #[serde(default)]
    pub seed: u64,
    /// Lower bound on CU–AP distance, guarding the mean gain 1/d².
    #[serde(default = "default_d_min")]
    pub d_min: f64,
}

fn default_area() -> f64 {
    10.0
}
fn default_budget() -> f64 {
    1.0
}
fn default_noise() -> f64 {
    0.01
}
fn default_d_min() -> f64 {
    0.1
}

impl ScenarioConfig {
    /// Convenience constructor with all defaults except the network sizes.
    pub fn new(num_cus: usize, num_aps: usize, num_channels: usize) -> Self {
        Self {
            num_cus,
            num_aps,
            num_channels,
            area_m: default_area(),
            power_budget: default_budget(),
            noise_floor: default_noise(),
            seed: 0,
            d_min: default_d_min(),
        }
    }

    /// Checks the config for internal consistency.
    pub fn validate(&self) -> Result<()> {
        if self.num_cus == 0 || self.num_aps == 0 || self.num_channels == 0 {
            return Err(Error::InvalidConfig(
                "num_cus, num_aps, and num_channels must all be ≥ 1".into(),
            ));
        }
        if self.num_channels < self.num_aps {
            return Err(Error::InvalidConfig(format!(
                "num_channels ({}) < num_aps ({}): an AP would own no channel",
                self.num_channels, self.num_aps
            )));
        }
        if self.area_m.is_nan() || self.area_m <= 0.0 {
            return Err(Error::InvalidConfig("area_m must be > 0".into()));
        }
        if self.power_budget.is_nan() || self.power_budget <= 0.0 {
            return Err(Error::InvalidConfig("power_budget must be > 0".into()));
        }
        if self.noise_floor.is_nan() || self.noise_floor <= 0.0 {
            return Err(Error::InvalidConfig("noise_floor must be > 0".into()));
        }
        if self.d_min.is_nan() || self.d_min <= 0.0 {
            return Err(Error::InvalidConfig("d_min must be > 0".into()));
        }
        Ok(())
    }
}

/// Immutable snapshot of one network realization.
///
/// Construction validates the structural invariants (channel partition,
/// non-negative gains, positive noise and budgets); afterwards the instance
/// is safely shareable across threads.
#[derive(Debug, Clone)]
pub struct NetworkInstance {
    /// Number of cognitive users N.
    pub num_cus: usize,
    /// Number of access points W.
    pub num_aps: usize,
    /// Number of channels K.
    pub num_channels: usize,
    /// `channel_owner[k]` is the AP owning channel `k` (a partition).
    pub channel_owner: Vec<usize>,
    /// `gains[i][w][k]` = squared channel magnitude CU `i` → AP `w` on `k`.
    /// Entries for channels `w` does not own are 0 and never read.
    pub gains: Vec<Vec<Vec<f64>>>,
    /// `noise[w][k]` = noise power at AP `w` on channel `k` (> 0).
    pub noise: Vec<Vec<f64>>,
    /// `budgets[i]` = total transmit power budget of CU `i` (> 0).
    pub budgets: Vec<f64>,
    /// CU positions in meters.
    pub positions_cu: Vec<(f64, f64)>,
    /// AP positions in meters.
    pub positions_ap: Vec<(f64, f64)>,
    /// Seed the snapshot was generated from (0 for hand-built instances).
    pub rng_seed: u64,
    /// `channels_by_ap[w]` = sorted list of channels owned by AP `w`.
    channels_by_ap: Vec<Vec<usize>>,
}

impl NetworkInstance {
    /// Builds an instance from raw parts, validating every invariant.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        channel_owner: Vec<usize>,
        gains: Vec<Vec<Vec<f64>>>,
        noise: Vec<Vec<f64>>,
        budgets: Vec<f64>,
        positions_cu: Vec<(f64, f64)>,
        positions_ap: Vec<(f64, f64)>,
        rng_seed: u64,
    ) -> Result<Self> {
        let num_cus = budgets.len();
        let num_aps = noise.len();
        let num_channels = channel_owner.len();
        let channels_by_ap = group_channels(&channel_owner, num_aps)?;
        let inst = Self {
            num_cus,
            num_aps,
            num_channels,
            channel_owner,
            gains,
            noise,
            budgets,
            positions_cu,
            positions_ap,
            rng_seed,
            channels_by_ap,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.num_cus == 0 || self.num_aps == 0 || self.num_channels == 0 {
            return Err(Error::InvalidConfig("empty network".into()));
        }
        if self.gains.len() != self.num_cus {
            return Err(Error::DimensionMismatch {
                expected: self.num_cus,
                got: self.gains.len(),
            });
        }
        for per_ap in &self.gains {
            if per_ap.len() != self.num_aps {
                return Err(Error::DimensionMismatch {
                    expected: self.num_aps,
                    got: per_ap.len(),
                });
            }
            for per_ch in per_ap {
                if per_ch.len() != self.num_channels {
                    return Err(Error::DimensionMismatch {
                        expected: self.num_channels,
                        got: per_ch.len(),
                    });
                }
                if per_ch.iter().any(|g| g.is_nan() || *g < 0.0) {
                    return Err(Error::InvalidConfig("gains must be ≥ 0".into()));
                }
            }
        }
        for per_ch in &self.noise {
            if per_ch.len() != self.num_channels {
                return Err(Error::DimensionMismatch {
                    expected: self.num_channels,
                    got: per_ch.len(),
                });
            }
            if per_ch.iter().any(|n| n.is_nan() || *n <= 0.0) {
                return Err(Error::InvalidConfig("noise must be > 0".into()));
            }
        }
        if self.budgets.iter().any(|b| b.is_nan() || *b <= 0.0) {
            return Err(Error::InvalidConfig("budgets must be > 0".into()));
        }
        Ok(())
    }

    /// Channels owned by AP `w`, in ascending channel order.
    #[inline]
    pub fn channels(&self, w: usize) -> &[usize] {
        &self.channels_by_ap[w]
    }

    /// Number of channels owned by AP `w`.
    #[inline]
    pub fn num_channels_of(&self, w: usize) -> usize {
        self.channels_by_ap[w].len()
    }

    /// Euclidean CU–AP distance in meters.
    #[inline]
    pub fn distance(&self, i: usize, w: usize) -> f64 {
        let (cx, cy) = self.positions_cu[i];
        let (ax, ay) = self.positions_ap[w];
        ((cx - ax).powi(2) + (cy - ay).powi(2)).sqrt()
    }
}

/// Groups channels by owner and checks that every AP owns at least one.
fn group_channels(channel_owner: &[usize], num_aps: usize) -> Result<Vec<Vec<usize>>> {
    let mut by_ap = vec![Vec::new(); num_aps];
    for (k, &w) in channel_owner.iter().enumerate() {
        if w >= num_aps {
            return Err(Error::InvalidConfig(format!(
                "channel {k} owned by AP {w}, but only {num_aps} APs exist"
            )));
        }
        by_ap[w].push(k);
    }
    if let Some(w) = by_ap.iter().position(Vec::is_empty) {
        return Err(Error::InvalidConfig(format!("AP {w} owns no channel")));
    }
    Ok(by_ap)
}

/// Generates a random snapshot from `config`, using `seed` for all draws
/// (the config's own `seed` field is ignored here; the CLI resolves which
/// seed applies before calling).
///
/// Draw order (fixed; part of the reproducibility contract):
/// 1. CU positions, uniform i.i.d. in `[0, area]²`, x before y;
/// 2. AP positions, likewise;
/// 3. gains for each (CU, AP, owned channel) triple, CU-major then AP then
///    ascending channel, each exponential with mean `1/d²` where `d` is the
///    CU–AP distance floored at `d_min`.
///
/// Channels are assigned to APs as contiguous blocks of `K / W` in index
/// order, with the remainder going to the last AP.
pub fn generate_snapshot(config: &ScenarioConfig, seed: u64) -> Result<NetworkInstance> {
    config.validate()?;
    let (n, w_count, k_count) = (config.num_cus, config.num_aps, config.num_channels);

    let block = k_count / w_count;
    let mut channel_owner = Vec::with_capacity(k_count);
    for k in 0..k_count {
        // Contiguous blocks; indices ≥ W·block (the remainder) go to AP W−1.
        channel_owner.push((k / block).min(w_count - 1));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw_point = |rng: &mut ChaCha8Rng| {
        let x = rng.gen_range(0.0..config.area_m);
        let y = rng.gen_range(0.0..config.area_m);
        (x, y)
    };
    let positions_cu: Vec<_> = (0..n).map(|_| draw_point(&mut rng)).collect();
    let positions_ap: Vec<_> = (0..w_count).map(|_| draw_point(&mut rng)).collect();

    let mut gains = vec![vec![vec![0.0; k_count]; w_count]; n];
    for (i, cu_pos) in positions_cu.iter().enumerate() {
        for (w, ap_pos) in positions_ap.iter().enumerate() {
            let d = ((cu_pos.0 - ap_pos.0).powi(2) + (cu_pos.1 - ap_pos.1).powi(2))
                .sqrt()
                .max(config.d_min);
            // Exponential with mean 1/d², i.e. rate parameter d².
            let dist = Exp::new(d * d).expect("rate is positive");
            for k in 0..k_count {
                if channel_owner[k] == w {
                    gains[i][w][k] = dist.sample(&mut rng);
                }
            }
        }
    }

    let noise = vec![vec![config.noise_floor; k_count]; w_count];
    let budgets = vec![config.power_budget; n];

    NetworkInstance::from_parts(
        channel_owner,
        gains,
        noise,
        budgets,
        positions_cu,
        positions_ap,
        seed,
    )
}

/// Which AP each CU is associated with: `ap[i] ∈ {0, …, W−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationProfile {
    /// AP index per CU.
    pub ap: Vec<usize>,
}

impl AssociationProfile {
    /// Builds a profile, checking every entry is a valid AP index.
    pub fn new(ap: Vec<usize>, num_aps: usize) -> Result<Self> {
        if let Some(&bad) = ap.iter().find(|&&w| w >= num_aps) {
            return Err(Error::InvalidConfig(format!(
                "association entry {bad} out of range (W = {num_aps})"
            )));
        }
        Ok(Self { ap })
    }

    /// Number of CUs.
    #[inline]
    pub fn len(&self) -> usize {
        self.ap.len()
    }

    /// True when there are no CUs (never the case for valid instances).
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.ap.is_empty()
    }

    /// CUs currently associated with AP `w`, in ascending CU order.
    pub fn occupants(&self, w: usize) -> Vec<usize> {
        (0..self.ap.len()).filter(|&i| self.ap[i] == w).collect()
    }
}

/// Per-CU transmit powers over the channels of the CU's current AP.
///
/// `per_cu[i][j]` is CU `i`'s power on the `j`-th channel of its AP (in the
/// order given by [`NetworkInstance::channels`]).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    /// Power vector per CU.
    pub per_cu: Vec<Vec<f64>>,
}

impl PowerProfile {
    /// Uniform split of each CU's budget over its AP's channels.
    pub fn uniform(inst: &NetworkInstance, assoc: &AssociationProfile) -> Self {
        let per_cu = (0..inst.num_cus)
            .map(|i| {
                let m = inst.num_channels_of(assoc.ap[i]);
                vec![inst.budgets[i] / m as f64; m]
            })
            .collect();
        Self { per_cu }
    }

    /// All-zero powers with the dimensions induced by `assoc`.
    pub fn zeros(inst: &NetworkInstance, assoc: &AssociationProfile) -> Self {
        let per_cu = (0..inst.num_cus)
            .map(|i| vec![0.0; inst.num_channels_of(assoc.ap[i])])
            .collect();
        Self { per_cu }
    }

    /// True when every CU's vector is feasible under `assoc`.
    pub fn is_feasible_under(&self, inst: &NetworkInstance, assoc: &AssociationProfile) -> bool {
        self.per_cu
            .iter()
            .enumerate()
            .all(|(i, p)| matches!(is_feasible(inst, i, assoc.ap[i], p), Ok(true)))
    }
}

/// Checks whether power vector `p` is feasible for CU `i` at AP `w`:
/// all entries ≥ 0 and their sum within the CU's budget (tolerance 1e-12).
///
/// # Errors
/// Returns a dimension error when `p.len()` differs from the number of
/// channels AP `w` owns.
pub fn is_feasible(inst: &NetworkInstance, i: usize, w: usize, p: &[f64]) -> Result<bool> {
    let expected = inst.num_channels_of(w);
    if p.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: p.len(),
        });
    }
    let nonneg = p.iter().all(|&x| x >= 0.0);
    let total: f64 = p.iter().sum();
    Ok(nonneg && total <= inst.budgets[i] + FEASIBILITY_TOL)
}
