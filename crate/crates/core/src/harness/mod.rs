//! Batch driver around the join engines: stream preparation, runs,
//! side-by-side comparison, measures and synthetic input.

pub mod generator;
pub mod metrics;
pub mod runner;

pub use generator::{generate_records, generate_synthetic, GeneratorConfig, GeneratorError, Profile, HOT_TOKEN};
pub use metrics::{write_comparison_csv, write_metrics_csv, RunMetrics, CSV_COLUMNS};
pub use runner::{
    compare, prepare, run, run_engine, write_snapshots, ContinuousJoin, Event, HarnessError, PreparedStream,
    RunOptions, RunOutput, SnapshotRecord,
};
