//! Monte Carlo driver: success-rate sweeps, CSV/JSON output and slot-count
//! tables.

mod output;
mod stats;
mod sweep;
mod timing;

pub use output::{emit_csv, emit_json, format_summary, parse_csv, write_csv, CsvRow, CSV_HEADER};
pub use stats::{wilson_interval, Z_95};
pub use sweep::{
    run_sweep, score_trial, trial_seeds, Cell, CellRecord, ScoreMode, SkippedCell, SweepConfig, SweepResult,
};
pub use timing::emit_timing_table;
