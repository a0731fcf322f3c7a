//! Batch front-end for the MRT network model: configuration files, figure
//! sweeps as CSV, analytic-versus-simulation validation reports and plot
//! scripts.

pub mod app;
pub mod config;
pub mod plot;
pub mod sweep;
pub mod validate;

pub use config::{parse_config, parse_config_str, write_config, SweepSpec};
pub use sweep::{run_sweep, SweepTable};
pub use validate::{validate, ValidationReport};
