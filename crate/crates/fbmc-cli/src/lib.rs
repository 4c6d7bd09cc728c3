//! Command-line front end: configuration files, figure presets, CSV output and plot scripts.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod presets;

pub use config::{parse_config, render, SchemeKind, SimConfig, Size, KEYS};
pub use error::{CliError, CliResult};
pub use output::{format_number, write_csv, Cell, Table};
pub use plot::emit_plot_script;
pub use presets::{columns, preset_config, preset_overrides, run_preset, run_table, sidecar, Scale, PRESETS};
