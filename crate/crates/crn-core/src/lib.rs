//! Simulation core for a multi-AP cognitive radio network in which
//! cognitive users (CUs) jointly pick an access point and allocate uplink
//! power across that AP's channels.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`] — network instances (channel ownership, gains, noise,
//!   budgets, geometry), scenario generation, association and power
//!   profiles;
//! - [`physics`] — rates, interference maps, and the per-AP exact potential
//!   the equilibrium machinery relies on;
//! - [`best_response`] — closed-form water-filling and cost-aware AP
//!   selection;
//! - [`inner`] — fixed-association power-equilibrium solvers (damped
//!   simultaneous and sequential water-filling);
//! - [`learn`] — the outer association/power learning algorithms (JASPA and
//!   its sequential/simultaneous variants) plus equilibrium certification;
//! - [`jjaspa`] — the joint-strategy variant driven by CU memories and
//!   per-AP coalition records;
//! - [`oracle`] — independent references: projected-gradient potential
//!   maximization, exhaustive association search, throughput bounds, and
//!   baselines;
//! - [`trace`] — per-iteration run records with byte-reproducible CSV
//!   output;
//! - [`experiment`] — parameter sweeps and summary tables;
//! - [`verify`] — the acceptance suite binding everything together.
//!
//! All randomness flows through explicitly seeded ChaCha8 generators, so
//! every run, sweep, and CSV is reproducible byte for byte.

pub mod best_response;
pub mod error;
pub mod experiment;
pub mod inner;
pub mod jjaspa;
pub mod learn;
pub mod model;
pub mod oracle;
pub mod physics;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    generate_snapshot, AssociationProfile, NetworkInstance, PowerProfile, ScenarioConfig,
};
pub use trace::{Algorithm, RunTrace, TraceRow};
