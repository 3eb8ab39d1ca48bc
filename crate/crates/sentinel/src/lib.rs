//! File formats, command-line driver and parallel sweeps for the
//! `farm-sentinel-core` inspection simulator.

pub mod cli;
pub mod config;
pub mod output;
pub mod sweep;

pub use config::{load_scenario, parse_scenario, LoadError};
