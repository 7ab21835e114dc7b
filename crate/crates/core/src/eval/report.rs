use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::cv::{Metrics, SliceReport, REPORTED_MODELS};
use super::{calibration_curve, roc_curve};
use crate::error::{Error, Result};
use crate::features::FeatureSet;

pub const CALIBRATION_BINS: usize = 10;

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

const SLICE_HEADER: &str = "state\tchamber\tfeature_set\tmodel\tfolds\tn\tpositives\taccuracy\tlog_loss\tauroc\tsingle_class";

fn metric_cells(m: &Metrics) -> String {
    format!("{}\t{}\t{:.6}\t{:.6}\t{}", m.n, m.positives, m.accuracy, m.log_loss, fmt_opt(m.auroc))
}

/// One row per (slice, feature set, model) with pooled metrics.
pub fn slice_tsv(reports: &[SliceReport]) -> String {
    let mut out = format!("{SLICE_HEADER}\n");
    for r in reports {
        for m in &r.models {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.state,
                r.chamber,
                r.feature_set,
                m.model,
                r.folds,
                metric_cells(&m.pooled),
                r.single_class
            );
        }
    }
    out
}

/// One row per (slice, feature set, model, fold).
pub fn per_fold_tsv(reports: &[SliceReport]) -> String {
    let mut out = String::from("state\tchamber\tfeature_set\tmodel\tfold\tn\tpositives\taccuracy\tlog_loss\tauroc\n");
    for r in reports {
        for m in &r.models {
            for (f, fm) in m.per_fold.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{f}\t{}",
                    r.state,
                    r.chamber,
                    r.feature_set,
                    m.model,
                    metric_cells(fm)
                );
            }
        }
    }
    out
}

/// Mean and standard deviation of a metric across slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
}

fn spread(values: &[(f64, f64)]) -> Spread {
    let total: f64 = values.iter().map(|&(_, w)| w).sum();
    if values.is_empty() || total <= 0.0 {
        return Spread { mean: f64::NAN, std: f64::NAN };
    }
    let mean = values.iter().map(|&(v, w)| v * w).sum::<f64>() / total;
    let var = values.iter().map(|&(v, w)| w * (v - mean).powi(2)).sum::<f64>() / total;
    Spread { mean, std: var.sqrt() }
}

/// Aggregate of one (feature set, model) across slices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub feature_set: FeatureSet,
    pub model: String,
    pub slices: usize,
    pub accuracy: Spread,
    pub log_loss: Spread,
    pub auroc: Spread,
    /// Metrics over every slice's held-out predictions taken together.
    pub pooled: Metrics,
}

/// Averages across slices, equally weighted unless `weight_by_count`.
/// Single-class slices are left out.
pub fn aggregate(reports: &[SliceReport], weight_by_count: bool) -> Result<Vec<Aggregate>> {
    let mut sets: Vec<FeatureSet> = reports.iter().map(|r| r.feature_set).collect();
    sets.sort();
    sets.dedup();
    let mut out = Vec::new();
    for fs in sets {
        for model in REPORTED_MODELS {
            let mut acc = Vec::new();
            let mut ll = Vec::new();
            let mut au = Vec::new();
            let mut probs = Vec::new();
            let mut labels = Vec::new();
            for r in reports.iter().filter(|r| r.feature_set == fs && !r.single_class) {
                let Some(m) = r.model(model) else { continue };
                let w = if weight_by_count { m.pooled.n as f64 } else { 1.0 };
                acc.push((m.pooled.accuracy, w));
                ll.push((m.pooled.log_loss, w));
                if let Some(a) = m.pooled.auroc {
                    au.push((a, w));
                }
                probs.extend_from_slice(&m.probabilities);
                labels.extend_from_slice(&r.labels);
            }
            if acc.is_empty() {
                continue;
            }
            out.push(Aggregate {
                feature_set: fs,
                model: model.to_string(),
                slices: acc.len(),
                accuracy: spread(&acc),
                log_loss: spread(&ll),
                auroc: spread(&au),
                pooled: Metrics::compute(&probs, &labels)?,
            });
        }
    }
    Ok(out)
}

pub fn summary_tsv(aggregates: &[Aggregate]) -> String {
    let mut out = String::from(
        "feature_set\tmodel\tslices\taccuracy_mean\taccuracy_std\tlog_loss_mean\tlog_loss_std\tauroc_mean\tauroc_std\tpooled_n\tpooled_accuracy\tpooled_log_loss\tpooled_auroc\n",
    );
    for a in aggregates {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{:.6}\t{:.6}\t{}",
            a.feature_set,
            a.model,
            a.slices,
            a.accuracy.mean,
            a.accuracy.std,
            a.log_loss.mean,
            a.log_loss.std,
            a.auroc.mean,
            a.auroc.std,
            a.pooled.n,
            a.pooled.accuracy,
            a.pooled.log_loss,
            fmt_opt(a.pooled.auroc)
        );
    }
    out
}

pub fn roc_tsv(probs: &[f64], labels: &[bool]) -> Result<String> {
    let mut out = String::from("threshold\tfpr\ttpr\n");
    for p in roc_curve(probs, labels)? {
        let _ = writeln!(out, "{:.6}\t{:.6}\t{:.6}", p.threshold, p.fpr, p.tpr);
    }
    Ok(out)
}

pub fn calibration_tsv(probs: &[f64], labels: &[bool]) -> Result<String> {
    let mut out = String::from("lo\thi\tmean_predicted\tempirical_rate\tcount\n");
    for b in calibration_curve(probs, labels, CALIBRATION_BINS)? {
        let _ = writeln!(
            out,
            "{:.2}\t{:.2}\t{:.6}\t{:.6}\t{}",
            b.lo, b.hi, b.mean_predicted, b.empirical_rate, b.count
        );
    }
    Ok(out)
}

/// `bill_id, label, one probability column per model`.
pub fn predictions_tsv(report: &SliceReport) -> String {
    let mut out = String::from("bill_id\tlabel");
    for m in &report.models {
        out.push('\t');
        out.push_str(&m.model);
    }
    out.push('\n');
    for (i, id) in report.bill_ids.iter().enumerate() {
        let _ = write!(out, "{id}\t{}", report.labels[i] as u8);
        for m in &report.models {
            let _ = write!(out, "\t{:.6}", m.probabilities[i]);
        }
        out.push('\n');
    }
    out
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `report.tsv`, `summary.tsv`, optionally `per_fold.tsv`, and per
/// slice the prediction, ROC and calibration dumps. Returns the written
/// paths.
pub fn write_reports(reports: &[SliceReport], out: &Path, weight_by_count: bool, per_fold: bool) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut emit = |path: PathBuf, text: &str| -> Result<()> {
        write(&path, text)?;
        written.push(path);
        Ok(())
    };
    emit(out.join("report.tsv"), &slice_tsv(reports))?;
    emit(out.join("summary.tsv"), &summary_tsv(&aggregate(reports, weight_by_count)?))?;
    if per_fold {
        emit(out.join("per_fold.tsv"), &per_fold_tsv(reports))?;
    }
    for r in reports {
        let stem = format!("{}_{}", r.slice_id(), r.feature_set);
        emit(out.join("predictions").join(format!("{stem}.tsv")), &predictions_tsv(r))?;
        if r.single_class {
            continue;
        }
        for m in &r.models {
            emit(
                out.join("roc").join(format!("{stem}_{}.tsv", m.model)),
                &roc_tsv(&m.probabilities, &r.labels)?,
            )?;
            emit(
                out.join("calibration").join(format!("{stem}_{}.tsv", m.model)),
                &calibration_tsv(&m.probabilities, &r.labels)?,
            )?;
        }
    }
    Ok(written)
}
