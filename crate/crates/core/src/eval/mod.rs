//! Metrics, the majority baseline, cross-validation and report output.

pub mod cv;
pub mod folds;
pub mod metrics;
pub mod report;

pub use cv::{build_dataset, cross_validate, slice_bills, tune_all, CvConfig, Metrics, ModelResult, SliceReport, REPORTED_MODELS};
pub use folds::{complement, feasible_folds, stratified_folds};
pub use metrics::{
    accuracy, auroc, auroc_of, calibration_curve, log_loss, majority_baseline, roc_curve, CalibrationBin,
    MajorityBaseline, RocPoint, LOG_LOSS_EPS,
};
pub use report::{aggregate, write_reports, Aggregate, Spread};
