use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::decide;

pub const LOG_LOSS_EPS: f64 = 1e-15;

fn check(len_a: usize, len_b: usize) -> Result<()> {
    if len_a != len_b {
        return Err(Error::DimensionMismatch {
            expected: len_a,
            got: len_b,
        });
    }
    if len_a == 0 {
        return Err(Error::InvalidInput("metric of zero examples".into()));
    }
    Ok(())
}

/// Fraction of correct decisions at the 0.5 threshold.
pub fn accuracy(probs: &[f64], labels: &[bool]) -> Result<f64> {
    check(probs.len(), labels.len())?;
    let correct = probs.iter().zip(labels).filter(|(&p, &y)| decide(p) == y).count();
    Ok(correct as f64 / labels.len() as f64)
}

/// Mean binary cross-entropy. The probability given to the observed class is
/// floored at `eps = 1e-15`, so one confident mistake costs at most
/// `-ln(eps)`; a perfect prediction costs exactly 0.
pub fn log_loss(probs: &[f64], labels: &[bool]) -> Result<f64> {
    check(probs.len(), labels.len())?;
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(0.0, 1.0);
            let observed = if y { p } else { 1.0 - p };
            -observed.max(LOG_LOSS_EPS).ln()
        })
        .sum();
    Ok(total / labels.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

/// ROC curve sweeping distinct scores from high to low. Tied scores form a
/// single step. Starts at `(0, 0)` with threshold `+inf`, ends at `(1, 1)`.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<Vec<RocPoint>> {
    Ok(roc_counts(scores, labels)?
        .into_iter()
        .map(|c| c.point())
        .collect())
}

#[derive(Debug, Clone, Copy)]
struct Counts {
    threshold: f64,
    tp: u64,
    fp: u64,
    pos: u64,
    neg: u64,
}

impl Counts {
    fn point(&self) -> RocPoint {
        RocPoint {
            threshold: self.threshold,
            tpr: self.tp as f64 / self.pos as f64,
            fpr: self.fp as f64 / self.neg as f64,
        }
    }
}

fn roc_counts(scores: &[f64], labels: &[bool]) -> Result<Vec<Counts>> {
    check(scores.len(), labels.len())?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidInput("NaN score".into()));
    }
    let pos = labels.iter().filter(|&&y| y).count() as u64;
    let neg = labels.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut out = vec![Counts {
        threshold: f64::INFINITY,
        tp: 0,
        fp: 0,
        pos,
        neg,
    }];
    let (mut tp, mut fp) = (0, 0);
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if labels[order[k]] {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        out.push(Counts {
            threshold: s,
            tp,
            fp,
            pos,
            neg,
        });
    }
    Ok(out)
}

/// Trapezoidal area under the curve: `sum tpr_prev * dfpr + dtpr * dfpr / 2`.
pub fn auroc(curve: &[RocPoint]) -> f64 {
    curve
        .windows(2)
        .map(|w| {
            let dfpr = w[1].fpr - w[0].fpr;
            let dtpr = w[1].tpr - w[0].tpr;
            w[0].tpr * dfpr + 0.5 * dtpr * dfpr
        })
        .sum()
}

/// AUROC of `scores`. The trapezoid sum is taken over integer counts and
/// divided once, so it equals the tie-aware pair-counting statistic exactly.
pub fn auroc_of(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let counts = roc_counts(scores, labels)?;
    let (pos, neg) = (counts[0].pos, counts[0].neg);
    // twice the area in units of one (positive, negative) pair
    let twice: u128 = counts
        .windows(2)
        .map(|w| {
            let dfp = (w[1].fp - w[0].fp) as u128;
            (w[0].tp as u128 + w[1].tp as u128) * dfp
        })
        .sum();
    Ok(twice as f64 / (2.0 * pos as f64 * neg as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lo: f64,
    pub hi: f64,
    pub mean_predicted: f64,
    pub empirical_rate: f64,
    pub count: usize,
}

/// Equal-width reliability bins on `[0, 1]`; empty bins are omitted.
pub fn calibration_curve(probs: &[f64], labels: &[bool], bins: usize) -> Result<Vec<CalibrationBin>> {
    if bins < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 bins, got {bins}")));
    }
    if probs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: probs.len(),
            got: labels.len(),
        });
    }
    let mut sum_p = vec![0.0; bins];
    let mut sum_y = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    for (&p, &y) in probs.iter().zip(labels) {
        let b = ((p.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        sum_p[b] += p;
        sum_y[b] += y as u8 as f64;
        count[b] += 1;
    }
    Ok((0..bins)
        .filter(|&b| count[b] > 0)
        .map(|b| CalibrationBin {
            lo: b as f64 / bins as f64,
            hi: (b + 1) as f64 / bins as f64,
            mean_predicted: sum_p[b] / count[b] as f64,
            empirical_rate: sum_y[b] / count[b] as f64,
            count: count[b],
        })
        .collect())
}

/// Constant predictor of the training-majority class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorityBaseline {
    pub floor_action: bool,
    /// Training rate of the majority class.
    pub majority_rate: f64,
}

impl MajorityBaseline {
    /// Probability of floor action assigned to every bill: the majority rate
    /// when the majority is floor action, its complement otherwise.
    pub fn probability(&self) -> f64 {
        if self.floor_action {
            self.majority_rate
        } else {
            1.0 - self.majority_rate
        }
    }
}

/// Fits the majority baseline; an exact tie predicts floor action.
pub fn majority_baseline(labels: &[bool]) -> Result<MajorityBaseline> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("majority baseline of zero labels".into()));
    }
    let rate = labels.iter().filter(|&&y| y).count() as f64 / labels.len() as f64;
    Ok(if rate >= 0.5 {
        MajorityBaseline {
            floor_action: true,
            majority_rate: rate,
        }
    } else {
        MajorityBaseline {
            floor_action: false,
            majority_rate: 1.0 - rate,
        }
    })
}
