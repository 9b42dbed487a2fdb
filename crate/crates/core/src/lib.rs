//! A deterministic gridworld simulator for agents that must pay for their
//! own computation out of harvested energy.
//!
//! An agent lives on a small 2D grid. Each cell offers an energy potential
//! it can harvest from and a cooling capacity that carries away waste heat.
//! Every action — even sitting still — costs energy, and useful work
//! (`compute`) generates heat. The agent dies when its energy reserve hits
//! zero or its temperature exceeds a critical threshold, so the interesting
//! question is not "what is the reward?" but "how long can it stay alive
//! while still getting work done?".
//!
//! The crate is organized around that question:
//!
//! - [`environment`] describes the world: grid extents, harvest and cooling
//!   fields (optionally time-varying), and the physical constants of the
//!   energy/thermal updates.
//! - [`dynamics`] applies actions: energy bookkeeping, heat flow, boundary
//!   clamping, and terminal detection.
//! - [`policy`] provides three controllers — an always-compute baseline, a
//!   myopic energy maximizer, and a tabular Q-learning agent trained on a
//!   survival-shaped reward.
//! - [`metrics`] turns trajectories into viability numbers: net-surplus
//!   rate, thermal regulation, horizon-estimate error, and a combined
//!   stability score.
//! - [`simulation`] runs seeded episodes, sweeps initial conditions into
//!   survival-horizon maps, and derives plot-ready per-step channels.
//! - [`export`] renders trajectories, maps, and logs into stable CSV text.
//!
//! Everything is deterministic: all randomness flows from a single
//! [`rand_chacha::ChaCha8Rng`] seeded with a caller-supplied `u64`, and all
//! artifacts are byte-identical across runs and thread counts for the same
//! seed.

pub mod dynamics;
pub mod environment;
pub mod error;
pub mod export;
pub mod metrics;
pub mod policy;
pub mod simulation;

pub use error::Error;
