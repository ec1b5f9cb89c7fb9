//! Benchmark harness: dataset I/O, synthetic ground truth, sweep
//! configuration, orchestration and reports.

pub mod config;
pub mod csv_io;
pub mod report;
pub mod run;
pub mod synth;

pub use config::{default_q, ConfigFile, DatasetSource, RunConfig};
pub use csv_io::{load_csv, write_csv, write_mask_csv, LoadedCsv};
pub use report::{emit_report, parse_jsonl, render_table, to_jsonl, ReportFormat};
pub use run::{
    cell_seed, load_ground_truth, mask_seed, run_experiments, run_experiments_on, ExperimentRecord,
    TIMEOUT_REASON,
};
pub use synth::{generate_synthetic, SyntheticSpec};
