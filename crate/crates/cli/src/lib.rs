//! Experiment runner for discretized isometries: figure data, raster
//! demos and cross-validation reports, each written atomically with its
//! configuration embedded.

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

pub use commands::{
    cmd_equidistribution, cmd_gamma_image, cmd_rho_map, cmd_rotate_image, cmd_tau_curve, cmd_tau_single,
    cmd_translations, cmd_validate, run, Outcome,
};
pub use config::{parse_angle, parse_triple, CommandKind, ExperimentConfig, UsageError};
