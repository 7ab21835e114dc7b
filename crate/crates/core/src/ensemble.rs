//! Out-of-fold stacking: a log-linear meta model over the probabilities of
//! the three base models.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::folds::{complement, feasible_folds, stratified_folds};
use crate::features::FeatureVector;
use crate::models::{
    loglinear_train, train_base, BaseModel, BaseParams, Dataset, LinearModel, LogLinearParams, ModelKind,
    Regularization,
};
use crate::util::derive_seed;

pub const DEFAULT_INNER_FOLDS: usize = 5;
pub const DEFAULT_META_LAMBDA: f64 = 1.0;

/// Record of which training rows produced each out-of-fold prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageAudit {
    /// Inner fold that scored each example.
    pub scored_by: Vec<usize>,
    /// Training rows of each inner fold's models.
    pub trained_on: Vec<Vec<usize>>,
}

impl LeakageAudit {
    /// Examples whose scoring models saw them during training.
    pub fn violations(&self) -> Vec<usize> {
        self.scored_by
            .iter()
            .enumerate()
            .filter(|&(i, &f)| self.trained_on[f].binary_search(&i).is_ok())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn passes(&self) -> bool {
        self.violations().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutOfFold {
    /// One probability per base model, in `ModelKind::ALL` order.
    pub matrix: Vec<[f64; 3]>,
    pub folds: Vec<Vec<usize>>,
    pub audit: LeakageAudit,
}

fn check_params(params: &[BaseParams; 3]) -> Result<()> {
    for (p, kind) in params.iter().zip(ModelKind::ALL) {
        if p.kind() != kind {
            return Err(Error::InvalidInput(format!(
                "stack expects {kind} in that slot, got {}",
                p.kind()
            )));
        }
    }
    Ok(())
}

/// Scores every training example with base models fitted on the other
/// inner folds. The fold count drops (to at least 2) when a class is too
/// small for `inner_folds`; a class with fewer than two examples is an error.
pub fn oof_predictions(data: &Dataset, params: &[BaseParams; 3], inner_folds: usize, seed: u64) -> Result<OutOfFold> {
    check_params(params)?;
    let k = feasible_folds(&data.labels, inner_folds).ok_or(Error::SingleClass)?;
    if k < inner_folds {
        log::warn!("reducing stacking folds from {inner_folds} to {k}");
    }
    let folds = stratified_folds(&data.labels, k, derive_seed(seed, &[0x57ac]))?;
    let trained_on: Vec<Vec<usize>> = (0..k).map(|f| complement(&folds, f)).collect();
    let jobs: Vec<(usize, usize)> = (0..k).flat_map(|f| (0..3).map(move |m| (f, m))).collect();
    let scored: Vec<((usize, usize), Vec<f64>)> = jobs
        .par_iter()
        .map(|&(f, m)| {
            let model = train_base(&data.subset(&trained_on[f]), &params[m], derive_seed(seed, &[f as u64, m as u64]))?;
            Ok(((f, m), folds[f].iter().map(|&i| model.predict_proba(&data.rows[i])).collect()))
        })
        .collect::<Result<_>>()?;
    let mut matrix = vec![[0.0; 3]; data.len()];
    let mut scored_by = vec![0; data.len()];
    for ((f, m), probs) in scored {
        for (&i, p) in folds[f].iter().zip(probs) {
            matrix[i][m] = p;
            scored_by[i] = f;
        }
    }
    Ok(OutOfFold {
        matrix,
        folds,
        audit: LeakageAudit { scored_by, trained_on },
    })
}

fn meta_row(p: &[f64; 3]) -> FeatureVector {
    FeatureVector::from_pairs(p.iter().enumerate().map(|(j, &v)| (j as u32, v)).collect())
}

/// L2 log-linear meta model over the raw probability 3-vectors.
pub fn train_stack(oof: &[[f64; 3]], labels: &[bool], lambda: f64) -> Result<LinearModel> {
    let data = Dataset::new(oof.iter().map(meta_row).collect(), labels.to_vec(), 3)?;
    loglinear_train(
        &data,
        &LogLinearParams {
            lambda,
            regularization: Regularization::L2,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackedModel {
    /// Base models trained on the full training data, in `ModelKind::ALL` order.
    pub bases: Vec<BaseModel>,
    pub meta: LinearModel,
}

impl StackedModel {
    pub fn base_probabilities(&self, x: &FeatureVector) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (o, m) in out.iter_mut().zip(&self.bases) {
            *o = m.predict_proba(x);
        }
        out
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> f64 {
        stack_predict(self, x)
    }
}

pub fn stack_predict(model: &StackedModel, x: &FeatureVector) -> f64 {
    model.meta.predict_proba(&meta_row(&model.base_probabilities(x)))
}

/// Stacked model plus the out-of-fold matrix its meta model was fit on.
#[derive(Debug, Clone)]
pub struct StackTraining {
    pub model: StackedModel,
    pub oof: OutOfFold,
}

/// Full stacking run: out-of-fold matrix, meta model, then the three base
/// models refit on all of `data`.
pub fn train_stacked(
    data: &Dataset,
    params: &[BaseParams; 3],
    inner_folds: usize,
    meta_lambda: f64,
    seed: u64,
) -> Result<StackTraining> {
    let oof = oof_predictions(data, params, inner_folds, seed)?;
    if !oof.audit.passes() {
        return Err(Error::InvalidInput("out-of-fold audit failed".into()));
    }
    let meta = train_stack(&oof.matrix, &data.labels, meta_lambda)?;
    let bases = params
        .par_iter()
        .enumerate()
        .map(|(m, p)| train_base(data, p, derive_seed(seed, &[0xf011, m as u64])))
        .collect::<Result<Vec<_>>>()?;
    Ok(StackTraining {
        model: StackedModel { bases, meta },
        oof,
    })
}

/// Any model the pipeline trains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TrainedModel {
    Base(BaseModel),
    Stacked(StackedModel),
}

impl TrainedModel {
    pub fn predict_proba(&self, x: &FeatureVector) -> f64 {
        match self {
            TrainedModel::Base(m) => m.predict_proba(x),
            TrainedModel::Stacked(m) => m.predict_proba(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TrainedModel::Base(m) => m.kind().as_str(),
            TrainedModel::Stacked(_) => "stacked",
        }
    }
}
