use serde::{Deserialize, Serialize};

use super::optim::{lbfgs, MAX_ITERATIONS, TOLERANCE};
use super::{expand, Dataset};
use crate::calibration::{platt_fit, PlattScaler};
use crate::error::{Error, Result};
use crate::eval::folds::{complement, feasible_folds, stratified_folds};
use crate::features::FeatureVector;
use crate::util::{derive_seed, sigmoid};

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_BETA: f64 = 0.25;
const CALIBRATION_FOLDS: usize = 3;

/// Presence indicators: every stored (nonzero) entry becomes 1.
pub fn binarize(x: &FeatureVector) -> FeatureVector {
    FeatureVector::from_pairs(x.iter().map(|(j, _)| (j, 1.0)).collect())
}

/// Log-count ratio `r = ln((p/|p|_1) / (q/|q|_1))` with
/// `p = alpha + sum of binarized positive rows`, `q` likewise for negatives.
pub fn nbsvm_log_count_ratio(data: &Dataset, alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be > 0, got {alpha}")));
    }
    let mut pos = vec![0u64; data.dim];
    let mut neg = vec![0u64; data.dim];
    for (x, &y) in data.rows.iter().zip(&data.labels) {
        let target = if y { &mut pos } else { &mut neg };
        for (j, _) in x.iter() {
            target[j as usize] += 1;
        }
    }
    let p: Vec<f64> = pos.iter().map(|&c| alpha + c as f64).collect();
    let q: Vec<f64> = neg.iter().map(|&c| alpha + c as f64).collect();
    let (p1, q1): (f64, f64) = (p.iter().sum(), q.iter().sum());
    Ok(p.iter().zip(&q).map(|(pi, qi)| ((pi / p1) / (qi / q1)).ln()).collect())
}

/// Sign-preserving interpolation `(1 - beta) * mean|w| * sign(w) + beta * w`.
/// `beta = 1` returns `w`; `beta = 0` gives every nonzero weight the mean
/// magnitude.
pub fn interpolate(w: &[f64], beta: f64) -> Vec<f64> {
    if w.is_empty() {
        return Vec::new();
    }
    let mean_abs = w.iter().map(|v| v.abs()).sum::<f64>() / w.len() as f64;
    w.iter()
        .map(|&v| {
            let sign = if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            };
            (1.0 - beta) * mean_abs * sign + beta * v
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbsvmParams {
    pub c: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl Default for NbsvmParams {
    fn default() -> Self {
        NbsvmParams {
            c: 1.0,
            beta: DEFAULT_BETA,
            alpha: DEFAULT_ALPHA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbsvmModel {
    pub r: Vec<f64>,
    /// Interpolated weights.
    pub w: Vec<f64>,
    pub bias: f64,
    pub beta: f64,
    pub alpha: f64,
}

impl NbsvmModel {
    fn scaled(&self, x: &FeatureVector) -> f64 {
        x.iter()
            .filter(|&(j, _)| (j as usize) < self.r.len())
            .map(|(j, _)| self.r[j as usize] * self.w[j as usize])
            .sum()
    }

    /// Raw SVM margin `w'.(binarize(x) * r) + b`.
    pub fn margin(&self, x: &FeatureVector) -> f64 {
        self.scaled(x) + self.bias
    }

    /// `sigmoid(margin)`: uncalibrated.
    pub fn raw_proba(&self, x: &FeatureVector) -> f64 {
        sigmoid(self.margin(x))
    }
}

/// Squared-hinge L2 SVM on `binarize(x) * r`:
/// `min C sum max(0, 1 - y (w.z + b))^2 + ||w||^2`, bias unpenalized,
/// solved in the primal by L-BFGS, followed by weight interpolation.
/// The solver is deterministic; `seed` is accepted for interface symmetry.
pub fn nbsvm_train(data: &Dataset, params: &NbsvmParams, _seed: u64) -> Result<NbsvmModel> {
    data.require_both_classes()?;
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::InvalidInput(format!("C must be > 0, got {}", params.c)));
    }
    if !(0.0..=1.0).contains(&params.beta) {
        return Err(Error::InvalidInput(format!("beta must lie in [0, 1], got {}", params.beta)));
    }
    let r = nbsvm_log_count_ratio(data, params.alpha)?;
    let (compact, columns) = data.compact();
    let d = compact.dim;
    let z: Vec<Vec<(usize, f64)>> = compact
        .rows
        .iter()
        .map(|x| x.iter().map(|(j, _)| (j as usize, r[columns[j as usize] as usize])).collect())
        .collect();
    let y: Vec<f64> = data.labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let n = data.len() as f64;
    let c = params.c;

    let mut theta = vec![0.0; d + 1];
    lbfgs(
        &mut theta,
        |t, g| {
            g.iter_mut().for_each(|v| *v = 0.0);
            let mut f = 0.0;
            for j in 0..d {
                f += t[j] * t[j];
                g[j] = 2.0 * t[j];
            }
            for (zi, &yi) in z.iter().zip(&y) {
                let m = zi.iter().map(|&(j, v)| t[j] * v).sum::<f64>() + t[d];
                let slack = 1.0 - yi * m;
                if slack > 0.0 {
                    f += c * slack * slack;
                    let coef = -2.0 * c * slack * yi;
                    for &(j, v) in zi {
                        g[j] += coef * v;
                    }
                    g[d] += coef;
                }
            }
            g.iter_mut().for_each(|v| *v /= n);
            f / n
        },
        TOLERANCE,
        MAX_ITERATIONS,
    );
    let bias = theta.pop().expect("bias present");
    Ok(NbsvmModel {
        w: interpolate(&expand(&theta, &columns, data.dim), params.beta),
        r,
        bias,
        beta: params.beta,
        alpha: params.alpha,
    })
}

/// NBSVM whose margins are mapped to probabilities by a Platt scaler fitted on
/// out-of-fold margins from an inner stratified 3-fold split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedNbsvm {
    pub svm: NbsvmModel,
    pub scaler: PlattScaler,
}

impl CalibratedNbsvm {
    pub fn train(data: &Dataset, params: &NbsvmParams, seed: u64) -> Result<Self> {
        let svm = nbsvm_train(data, params, seed)?;
        let scaler = match feasible_folds(&data.labels, CALIBRATION_FOLDS) {
            Some(k) => {
                let folds = stratified_folds(&data.labels, k, derive_seed(seed, &[0xca1]))?;
                let mut margins = vec![0.0; data.len()];
                for (f, held) in folds.iter().enumerate() {
                    let inner = nbsvm_train(&data.subset(&complement(&folds, f)), params, seed)?;
                    for &i in held {
                        margins[i] = inner.margin(&data.rows[i]);
                    }
                }
                platt_fit(&margins, &data.labels)?
            }
            None => {
                log::warn!("too few examples of one class for held-out calibration; using sigmoid(margin)");
                PlattScaler::IDENTITY
            }
        };
        Ok(CalibratedNbsvm { svm, scaler })
    }

    pub fn margin(&self, x: &FeatureVector) -> f64 {
        self.svm.margin(x)
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> f64 {
        self.scaler.apply(self.svm.margin(x))
    }
}
