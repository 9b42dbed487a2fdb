//! Command-line front end for the `energentic` simulator.
//!
//! All four subcommands (`run`, `train`, `sweep`, `compare`) share one
//! strict JSON configuration format ([`config::RunConfig`]) and write
//! their artifacts plus a `manifest.json` into an output directory. Exit
//! codes: 0 on success, 2 for configuration problems, 3 for failures
//! writing artifacts.

pub mod commands;
pub mod config;
