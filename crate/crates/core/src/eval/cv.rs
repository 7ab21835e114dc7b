use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{accuracy, auroc_of, complement, feasible_folds, log_loss, majority_baseline, stratified_folds};
use crate::corpus::{Bill, BillType, Chamber, ChamberSlice, Corpus};
use crate::ensemble::{train_stacked, DEFAULT_INNER_FOLDS, DEFAULT_META_LAMBDA};
use crate::error::{Error, Result};
use crate::features::{FeatureSet, Featurizer, FeaturizerConfig};
use crate::hyperopt::tune_base;
use crate::models::{decide, BaseParams, Dataset, ModelKind};
use crate::util::derive_seed;

/// Models reported per slice, in report order.
pub const REPORTED_MODELS: [&str; 5] = ["baseline", "loglinear", "nbsvm", "gbm", "stacked"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    /// Hyperparameter trials per base model and fold; 0 uses defaults.
    pub trials: usize,
    pub inner_folds: usize,
    pub meta_lambda: f64,
    pub featurizer: FeaturizerConfig,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            trials: 0,
            inner_folds: DEFAULT_INNER_FOLDS,
            meta_lambda: DEFAULT_META_LAMBDA,
            featurizer: FeaturizerConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n: usize,
    pub positives: usize,
    pub accuracy: f64,
    pub log_loss: f64,
    /// `None` when the scored examples hold a single class.
    pub auroc: Option<f64>,
}

impl Metrics {
    pub fn compute(probs: &[f64], labels: &[bool]) -> Result<Self> {
        Self::compute_ranked(probs, probs, labels)
    }

    /// Like [`compute`](Self::compute) but ranks by `scores` for AUROC.
    pub fn compute_ranked(probs: &[f64], scores: &[f64], labels: &[bool]) -> Result<Self> {
        let positives = labels.iter().filter(|&&y| y).count();
        Ok(Metrics {
            n: labels.len(),
            positives,
            accuracy: accuracy(probs, labels)?,
            log_loss: log_loss(probs, labels)?,
            auroc: if positives > 0 && positives < labels.len() {
                Some(auroc_of(scores, labels)?)
            } else {
                None
            },
        })
    }
}

/// Held-out predictions of one model over a whole slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub model: String,
    /// Probability per bill, aligned with [`SliceReport::bill_ids`].
    pub probabilities: Vec<f64>,
    pub pooled: Metrics,
    /// Metrics of each held-out fold on its own.
    pub per_fold: Vec<Metrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub state: String,
    pub chamber: Chamber,
    pub feature_set: FeatureSet,
    pub folds: usize,
    /// Set when the slice holds one class only; then only the baseline is
    /// reported.
    pub single_class: bool,
    pub bill_ids: Vec<String>,
    pub labels: Vec<bool>,
    pub models: Vec<ModelResult>,
    /// True when every held-out bill was scored only by models fitted
    /// without it.
    pub leakage_audit_passed: bool,
    /// Tuned hyperparameters per fold, in `ModelKind::ALL` order.
    pub params: Vec<[BaseParams; 3]>,
}

impl SliceReport {
    pub fn slice_id(&self) -> String {
        format!("{}_{}", self.state, self.chamber)
    }

    pub fn model(&self, name: &str) -> Option<&ModelResult> {
        self.models.iter().find(|m| m.model == name)
    }
}

/// Bills of a slice that are prediction targets, and the resolutions that
/// only feed effectiveness.
pub fn slice_bills<'a>(corpus: &'a Corpus, slice: &ChamberSlice) -> (Vec<&'a Bill>, Vec<&'a Bill>) {
    slice
        .bills
        .iter()
        .map(|&i| &corpus.bills[i])
        .partition(|b| b.bill_type == BillType::Bill)
}

/// Featurizes `bills` under `spec` into a dataset sized to the registry.
pub fn build_dataset(featurizer: &Featurizer, corpus: &Corpus, bills: &[&Bill], spec: FeatureSet) -> Result<Dataset> {
    let rows = bills
        .iter()
        .map(|b| featurizer.assemble(corpus, b, spec))
        .collect::<Result<Vec<_>>>()?;
    let labels = bills.iter().map(|b| b.label.is_positive()).collect();
    Dataset::new(rows, labels, featurizer.dim())
}

/// Splits a training set into a 4/5 fitting part and a 1/5 development
/// part, stratified.
fn dev_split(data: &Dataset, seed: u64) -> Option<(Dataset, Dataset)> {
    let k = feasible_folds(&data.labels, 5)?;
    let folds = stratified_folds(&data.labels, k, seed).ok()?;
    let fit = complement(&folds, 0);
    Some((data.subset(&fit), data.subset(&folds[0])))
}

/// Tunes all three base models on `train`, or returns the defaults.
pub fn tune_all(train: &Dataset, trials: usize, seed: u64) -> Result<[BaseParams; 3]> {
    let defaults = ModelKind::ALL.map(|k| k.default_params());
    if trials == 0 {
        return Ok(defaults);
    }
    let Some((fit, dev)) = dev_split(train, derive_seed(seed, &[0xde5])) else {
        log::warn!("training portion too small for a development split; using defaults");
        return Ok(defaults);
    };
    let tuned = ModelKind::ALL
        .par_iter()
        .enumerate()
        .map(|(m, &kind)| tune_base(kind, &fit, &dev, trials, derive_seed(seed, &[0x7e, m as u64])).map(|t| t.params))
        .collect::<Result<Vec<_>>>()?;
    Ok([tuned[0].clone(), tuned[1].clone(), tuned[2].clone()])
}

struct FoldOutcome {
    /// Probabilities per reported model, aligned with the fold's test bills.
    probs: Vec<Vec<f64>>,
    audit: bool,
    params: [BaseParams; 3],
}

struct SliceJob<'a> {
    corpus: &'a Corpus,
    targets: Vec<&'a Bill>,
    extra: Vec<&'a Bill>,
    spec: FeatureSet,
    config: &'a CvConfig,
}

fn run_fold(job: &SliceJob<'_>, train_idx: &[usize], test_idx: &[usize], seed: u64) -> Result<FoldOutcome> {
    let SliceJob {
        corpus,
        ref targets,
        ref extra,
        spec,
        config,
    } = *job;
    let train: Vec<&Bill> = train_idx.iter().map(|&i| targets[i]).collect();
    let test: Vec<&Bill> = test_idx.iter().map(|&i| targets[i]).collect();
    let featurizer = Featurizer::fit(corpus, &train, extra, &config.featurizer)?;
    let train_data = build_dataset(&featurizer, corpus, &train, spec)?;
    let test_data = build_dataset(&featurizer, corpus, &test, spec)?;

    let baseline = majority_baseline(&train_data.labels)?.probability();
    let params = tune_all(&train_data, config.trials, derive_seed(seed, &[1]))?;
    let stack = train_stacked(&train_data, &params, config.inner_folds, config.meta_lambda, derive_seed(seed, &[2]))?;

    let mut probs: Vec<Vec<f64>> = vec![vec![baseline; test.len()]];
    for base in &stack.model.bases {
        probs.push(test_data.rows.iter().map(|x| base.predict_proba(x)).collect());
    }
    probs.push(test_data.rows.iter().map(|x| stack.model.predict_proba(x)).collect());
    let held_out: std::collections::HashSet<&str> = test.iter().map(|b| b.id.as_str()).collect();
    let audit = stack.oof.audit.passes() && train.iter().all(|b| !held_out.contains(b.id.as_str()));
    Ok(FoldOutcome { probs, audit, params })
}

/// Stratified k-fold evaluation of one slice under one feature set.
///
/// Each fold refits the featurizer, tunes and trains the stack on its
/// training bills only, then scores its held-out bills. Metrics are
/// computed once over the pooled held-out predictions; per-fold metrics are
/// kept alongside. Folds run in parallel.
pub fn cross_validate(corpus: &Corpus, slice: &ChamberSlice, spec: FeatureSet, config: &CvConfig) -> Result<SliceReport> {
    if config.folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {}", config.folds)));
    }
    let (targets, extra) = slice_bills(corpus, slice);
    if targets.is_empty() {
        return Err(Error::InvalidInput(format!("slice {} has no bills", slice.id())));
    }
    let labels: Vec<bool> = targets.iter().map(|b| b.label.is_positive()).collect();
    let mut report = SliceReport {
        state: slice.state.clone(),
        chamber: slice.chamber,
        feature_set: spec,
        folds: 0,
        single_class: false,
        bill_ids: targets.iter().map(|b| b.id.clone()).collect(),
        labels: labels.clone(),
        models: Vec::new(),
        leakage_audit_passed: true,
        params: Vec::new(),
    };

    let Some(k) = feasible_folds(&labels, config.folds) else {
        log::warn!("slice {} is effectively single-class; reporting the baseline only", slice.id());
        let p = majority_baseline(&labels)?.probability();
        let probs = vec![p; labels.len()];
        report.single_class = true;
        report.models.push(ModelResult {
            model: "baseline".into(),
            pooled: Metrics::compute(&probs, &labels)?,
            probabilities: probs,
            per_fold: Vec::new(),
        });
        return Ok(report);
    };
    if k < config.folds {
        log::warn!("slice {}: reducing folds from {} to {k}", slice.id(), config.folds);
    }
    report.folds = k;

    let slice_seed = derive_seed(config.seed, &[crate::util::fnv1a(&slice.id()), crate::util::fnv1a(spec.as_str())]);
    let folds = stratified_folds(&labels, k, slice_seed)?;
    let job = SliceJob {
        corpus,
        targets,
        extra,
        spec,
        config,
    };
    let outcomes = (0..k)
        .into_par_iter()
        .map(|f| run_fold(&job, &complement(&folds, f), &folds[f], derive_seed(slice_seed, &[f as u64])))
        .collect::<Result<Vec<_>>>()?;

    // The baseline is a class guesser: it is ranked by its decision, not by
    // the fold-to-fold jitter of its training rate.
    let metrics = |name: &str, probs: &[f64], labels: &[bool]| {
        if name == "baseline" {
            let decisions: Vec<f64> = probs.iter().map(|&p| decide(p) as u8 as f64).collect();
            Metrics::compute_ranked(probs, &decisions, labels)
        } else {
            Metrics::compute(probs, labels)
        }
    };
    for (m, name) in REPORTED_MODELS.iter().enumerate() {
        let mut pooled = vec![0.0; labels.len()];
        let mut per_fold = Vec::with_capacity(k);
        for (fold, outcome) in folds.iter().zip(&outcomes) {
            for (&i, &p) in fold.iter().zip(&outcome.probs[m]) {
                pooled[i] = p;
            }
            let fold_labels: Vec<bool> = fold.iter().map(|&i| labels[i]).collect();
            per_fold.push(metrics(name, &outcome.probs[m], &fold_labels)?);
        }
        report.models.push(ModelResult {
            model: name.to_string(),
            pooled: metrics(name, &pooled, &labels)?,
            probabilities: pooled,
            per_fold,
        });
    }
    report.leakage_audit_passed = outcomes.iter().all(|o| o.audit);
    report.params = outcomes.into_iter().map(|o| o.params).collect();
    Ok(report)
}
