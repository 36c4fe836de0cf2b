//! Experiment runner behind the `duality-lab` binary: config parsing,
//! parameter sweeps over the core library, the seeded verification suite and
//! CSV/JSON output.

pub mod config;
pub mod experiment;
pub mod output;
pub mod verify;

pub use config::{parse_config, ConfigBuilder, ConfigError, ExperimentSpec, Kind, Origin};
pub use experiment::{run_experiment, Cell, Check, SweepResult};
pub use output::{emit_csv, emit_json};
