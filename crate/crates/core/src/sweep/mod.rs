//! Experiment drivers: configs, `(Δ, g)` grid sweeps, transients and their
//! CSV/JSON tables.

mod config;
mod output;
mod run;

pub use config::{
    parse_config, Config, GridAxis, InitialState, Measure, ModelKind, ModelParams, SolverConfig, SweepConfig,
    TransientConfig, TRANSIENT_OBSERVABLES,
};
pub use output::{csv_body, json_path, sweep_csv, sweep_json, transient_csv, transient_json, write_outputs, VERSION};
pub use run::{run_sweep, run_transient, SweepResult, SweepRow, TransientResult};
