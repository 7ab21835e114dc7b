//! The three base classifiers and their shared contracts.
//!
//! Every model maps a [`FeatureVector`] to the probability of floor action.
//! The decision rule is `p >= 0.5`, so a probability of exactly one half
//! predicts floor action ([`decide`]).

mod container;
mod gbm;
mod loglinear;
mod nbsvm;
pub(crate) mod optim;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use container::{ModelContainer, CONTAINER_FORMAT, CONTAINER_VERSION};
pub use gbm::{gbm_predict_proba, gbm_train, GbmModel, GbmParams, Node, Tree};
pub use loglinear::{loglinear_nll_grad, loglinear_train, LinearModel, LogLinearParams, Regularization};
pub use nbsvm::{
    binarize, interpolate, nbsvm_log_count_ratio, nbsvm_train, CalibratedNbsvm, NbsvmModel, NbsvmParams,
    DEFAULT_ALPHA, DEFAULT_BETA,
};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Probability threshold of the decision rule.
pub const DECISION_THRESHOLD: f64 = 0.5;

/// `true` (floor action) iff `probability >= 0.5`.
pub fn decide(probability: f64) -> bool {
    probability >= DECISION_THRESHOLD
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probability: f64,
    pub floor_action: bool,
}

impl Prediction {
    pub fn new(probability: f64) -> Self {
        let probability = if probability.is_nan() { 0.5 } else { probability.clamp(0.0, 1.0) };
        Prediction {
            probability,
            floor_action: decide(probability),
        }
    }
}

/// Labelled sparse design matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub rows: Vec<FeatureVector>,
    pub labels: Vec<bool>,
    pub dim: usize,
}

impl Dataset {
    pub fn new(rows: Vec<FeatureVector>, labels: Vec<bool>, dim: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                got: labels.len(),
            });
        }
        if let Some(max) = rows.iter().filter_map(FeatureVector::max_id).max() {
            if max as usize >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: max as usize + 1,
                });
            }
        }
        Ok(Dataset { rows, labels, dim })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y).count()
    }

    pub fn positive_rate(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.positives() as f64 / self.len() as f64
    }

    pub fn has_both_classes(&self) -> bool {
        let p = self.positives();
        p > 0 && p < self.len()
    }

    pub(crate) fn require_both_classes(&self) -> Result<()> {
        if self.has_both_classes() {
            Ok(())
        } else {
            Err(Error::SingleClass)
        }
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            dim: self.dim,
        }
    }

    /// The same problem restricted to the columns that occur in some row,
    /// renumbered densely, plus the original id of each new column. Linear
    /// models with a weight penalty leave absent columns at exactly zero, so
    /// solving the compact problem is equivalent and much cheaper.
    pub(crate) fn compact(&self) -> (Dataset, Vec<u32>) {
        let mut seen = vec![false; self.dim];
        for row in &self.rows {
            for (j, _) in row.iter() {
                seen[j as usize] = true;
            }
        }
        let mut remap = vec![u32::MAX; self.dim];
        let mut columns = Vec::new();
        for (j, _) in seen.iter().enumerate().filter(|(_, &s)| s) {
            remap[j] = columns.len() as u32;
            columns.push(j as u32);
        }
        let rows = self
            .rows
            .iter()
            .map(|r| FeatureVector::from_pairs(r.iter().map(|(j, v)| (remap[j as usize], v)).collect()))
            .collect();
        let data = Dataset {
            rows,
            labels: self.labels.clone(),
            dim: columns.len(),
        };
        (data, columns)
    }

    /// Same rows with every feature outside `keep` removed.
    pub fn filtered(&self, keep: impl Fn(u32) -> bool) -> Dataset {
        Dataset {
            rows: self.rows.iter().map(|r| r.filtered(&keep)).collect(),
            labels: self.labels.clone(),
            dim: self.dim,
        }
    }
}

/// Scatters compact weights back to `dim` columns.
pub(crate) fn expand(compact: &[f64], columns: &[u32], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (&j, &w) in columns.iter().zip(compact) {
        out[j as usize] = w;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[serde(rename = "loglinear")]
    LogLinear,
    Nbsvm,
    Gbm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::LogLinear, ModelKind::Nbsvm, ModelKind::Gbm];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::LogLinear => "loglinear",
            ModelKind::Nbsvm => "nbsvm",
            ModelKind::Gbm => "gbm",
        }
    }

    pub fn default_params(self) -> BaseParams {
        match self {
            ModelKind::LogLinear => BaseParams::LogLinear(LogLinearParams::default()),
            ModelKind::Nbsvm => BaseParams::Nbsvm(NbsvmParams::default()),
            ModelKind::Gbm => BaseParams::Gbm(GbmParams::default()),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown model `{s}`")))
    }
}

/// Hyperparameters of one base model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseParams {
    #[serde(rename = "loglinear")]
    LogLinear(LogLinearParams),
    Nbsvm(NbsvmParams),
    Gbm(GbmParams),
}

impl BaseParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            BaseParams::LogLinear(_) => ModelKind::LogLinear,
            BaseParams::Nbsvm(_) => ModelKind::Nbsvm,
            BaseParams::Gbm(_) => ModelKind::Gbm,
        }
    }
}

/// A trained base model. NBSVM is always Platt-calibrated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseModel {
    #[serde(rename = "loglinear")]
    LogLinear(LinearModel),
    Nbsvm(CalibratedNbsvm),
    Gbm(GbmModel),
}

impl BaseModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            BaseModel::LogLinear(_) => ModelKind::LogLinear,
            BaseModel::Nbsvm(_) => ModelKind::Nbsvm,
            BaseModel::Gbm(_) => ModelKind::Gbm,
        }
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> f64 {
        match self {
            BaseModel::LogLinear(m) => m.predict_proba(x),
            BaseModel::Nbsvm(m) => m.predict_proba(x),
            BaseModel::Gbm(m) => gbm_predict_proba(m, x),
        }
    }

    pub fn predict(&self, x: &FeatureVector) -> Prediction {
        Prediction::new(self.predict_proba(x))
    }
}

/// Trains the model described by `params`. `seed` drives every random choice
/// (NBSVM's inner calibration split, GBM row subsampling).
pub fn train_base(data: &Dataset, params: &BaseParams, seed: u64) -> Result<BaseModel> {
    Ok(match params {
        BaseParams::LogLinear(p) => BaseModel::LogLinear(loglinear_train(data, p)?),
        BaseParams::Nbsvm(p) => BaseModel::Nbsvm(CalibratedNbsvm::train(data, p, seed)?),
        BaseParams::Gbm(p) => BaseModel::Gbm(gbm_train(data, p, seed)?),
    })
}
