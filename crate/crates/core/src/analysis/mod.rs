//! Evaluation protocol: level sweeps, per-trial centering, pooled regression
//! and the viewpoint report.

mod evaluate;
mod regression;
mod report;
mod sweep;

pub use evaluate::{
    baseline_r2, calibrate_single, evaluate_matrix, evaluate_module, evaluate_pixel, EvalPlan,
    VIEWPOINTS,
};
pub use regression::{regress, RegressionResult};
pub use report::{MultiPixelSummary, Report, ReportRow, CSV_HEADER};
pub use sweep::{
    center_and_regress, characteristic_linearity, pooled_regression, run_module_sweep, run_sweep,
    spread_stats, sweep_levels, CenteredRegression, Direction, MeasurementDataset, SpreadStats,
    TrialSeries, DEFAULT_TRIALS,
};
