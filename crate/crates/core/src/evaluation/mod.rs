//! Robustness sweeps over starting variants and the statistics reported on them.

mod ndcg;
mod stats;
mod sweep;

pub use ndcg::{ndcg, Gain};
pub use stats::{
    quantile_linear, quartile_curves, snapshots, write_curves_csv, write_snapshots_csv,
    QuartileRow, Snapshot, DEFAULT_SNAPSHOTS,
};
pub use sweep::{load_traces, sweep, trace_file_name, Method, StartSampling, SweepSpec};
