//! Configuration, snapshots, tables, plots and the command line.

mod cli;
mod config;
pub mod csv;
pub mod run;
pub mod snapshot;
pub mod svg;

pub use cli::{cli_main, exit_code};
pub use config::{load_config, parse_config, RunConfig, SolverKind};
pub use csv::{emit_csv, parse_csv, read_csv, CSV_COLUMNS};
pub use snapshot::{
    read_snapshot, read_snapshot_header, write_snapshot, Geometry, Snapshot, SnapshotHeader,
    SnapshotState,
};
