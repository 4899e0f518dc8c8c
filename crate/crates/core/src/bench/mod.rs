//! Error metrics and the seeded experiment harness.

mod metrics;
mod sweep;

pub use metrics::{
    l2_sq_error, normalized_l2_sq, percentile_nearest_rank, relative_objective_error, ObjectiveGap, Summary,
};
pub use sweep::{
    run_diag, run_sweep, scatter_export, write_diag_csv, write_scatter_csv, write_sweep_csv, DiagCell, DiagMetric,
    ErrorMetric, ExactTargets, NoiseScale, ScatterRow, SweepCell, SweepConfig, DIAG_SCHEMA, SCATTER_SCHEMA,
    SWEEP_SCHEMA,
};
