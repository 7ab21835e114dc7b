//! Feature importance rankings and their aggregation across slices, plus
//! the most and least floor-predictive phrases of a text model.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ensemble::TrainedModel;
use crate::error::{Error, Result};
use crate::features::{FeatureRegistry, Group};
use crate::models::{BaseModel, LinearModel};

/// A feature counts toward a slice's "top" tally when ranked below this.
pub const TOP_RANKS: usize = 20;
/// Ranks at or past this are treated as unranked when aggregating.
pub const RANKED_CUTOFF: usize = 400;
pub const DEFAULT_PHRASES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub feature: String,
    /// Share of the model's total importance.
    pub weight: f64,
    pub rank: usize,
}

/// One model's features, most important first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRankTable {
    pub slice: String,
    pub model: String,
    pub rows: Vec<RankRow>,
}

impl FeatureRankTable {
    pub fn rank_of(&self, feature: &str) -> Option<usize> {
        self.rows.iter().find(|r| r.feature == feature).map(|r| r.rank)
    }
}

fn check_dim(got: usize, registry: &FeatureRegistry) -> Result<()> {
    if got != registry.len() {
        return Err(Error::DimensionMismatch {
            expected: registry.len(),
            got,
        });
    }
    Ok(())
}

/// Raw importance per feature id.
fn importances(model: &BaseModel, registry: &FeatureRegistry) -> Result<Vec<f64>> {
    match model {
        BaseModel::LogLinear(m) => {
            check_dim(m.dim(), registry)?;
            Ok(m.weights.iter().map(|w| w.abs()).collect())
        }
        BaseModel::Nbsvm(m) => {
            // the margin is linear in the binarized input with slope r_j w_j
            let inner = &m.svm;
            check_dim(inner.w.len(), registry)?;
            Ok(inner.w.iter().zip(&inner.r).map(|(w, r)| (w * r).abs()).collect())
        }
        BaseModel::Gbm(m) => {
            let mut out = vec![0.0; registry.len()];
            for (j, gain) in m.gain_by_feature() {
                let slot = out.get_mut(j as usize).ok_or(Error::DimensionMismatch {
                    expected: registry.len(),
                    got: j as usize + 1,
                })?;
                *slot = gain.max(0.0);
            }
            Ok(out)
        }
    }
}

/// Ranks every registry feature of `model` by importance share.
///
/// Linear models use `|w_j|`, NBSVM its effective slope `|r_j w_j|`, GBM the
/// total split gain. Shares sum to 1 unless the model is all zeros. Ties,
/// including the all-zero case, are broken by feature name.
pub fn rank_features(model: &BaseModel, registry: &FeatureRegistry, slice: &str) -> Result<FeatureRankTable> {
    let raw = importances(model, registry)?;
    let total: f64 = raw.iter().sum();
    let mut rows: Vec<RankRow> = registry
        .names()
        .iter()
        .zip(&raw)
        .map(|(name, &v)| RankRow {
            feature: name.clone(),
            weight: if total > 0.0 { v / total } else { 0.0 },
            rank: 0,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.weight
            .partial_cmp(&a.weight)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.feature.cmp(&b.feature))
    });
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i;
    }
    Ok(FeatureRankTable {
        slice: slice.to_string(),
        model: model.kind().as_str().to_string(),
        rows,
    })
}

/// Ranks the base model inside a trained container; stacked models are
/// ranked through their GBM.
pub fn rank_trained(model: &TrainedModel, registry: &FeatureRegistry, slice: &str) -> Result<FeatureRankTable> {
    match model {
        TrainedModel::Base(m) => rank_features(m, registry, slice),
        TrainedModel::Stacked(s) => {
            let gbm = s
                .bases
                .iter()
                .find(|b| matches!(b, BaseModel::Gbm(_)))
                .ok_or_else(|| Error::InvalidInput("stacked model without a GBM base".into()))?;
            rank_features(gbm, registry, slice)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianRank {
    pub feature: String,
    /// `None` when no slice ranked the feature within the cutoff.
    pub median: Option<f64>,
    /// Slices ranking the feature within [`TOP_RANKS`].
    pub top: usize,
    /// Slices ranking the feature within [`RANKED_CUTOFF`].
    pub ranked_in: usize,
}

fn median(values: &mut [usize]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    })
}

/// Median rank of each of `features` over the tables that rank it within
/// [`RANKED_CUTOFF`], with the number of tables placing it in the top
/// [`TOP_RANKS`]. Output follows the order of `features`.
pub fn median_rank_across(tables: &[FeatureRankTable], features: &[String]) -> Vec<MedianRank> {
    features
        .iter()
        .map(|f| {
            let mut ranks: Vec<usize> = tables
                .iter()
                .filter_map(|t| t.rank_of(f))
                .filter(|&r| r < RANKED_CUTOFF)
                .collect();
            MedianRank {
                feature: f.clone(),
                top: ranks.iter().filter(|&&r| r < TOP_RANKS).count(),
                ranked_in: ranks.len(),
                median: median(&mut ranks),
            }
        })
        .collect()
}

/// Features of `group` seen in any table, sorted by name.
pub fn features_in_group(tables: &[FeatureRankTable], group: Group) -> Vec<String> {
    let mut out: Vec<String> = tables
        .iter()
        .flat_map(|t| t.rows.iter())
        .filter(|r| Group::of(&r.feature) == Some(group))
        .map(|r| r.feature.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phrase {
    /// `title` or `desc`.
    pub field: String,
    pub ngram: String,
    pub weight: f64,
}

/// The `k` text features with the largest signed weight and the `k` with the
/// smallest. Non-text features are skipped. Both lists are cut from one
/// total order, so they never share a phrase while `2k` does not exceed the
/// number of text features.
pub fn top_bottom_phrases(model: &LinearModel, registry: &FeatureRegistry, k: usize) -> Result<(Vec<Phrase>, Vec<Phrase>)> {
    check_dim(model.dim(), registry)?;
    let mut phrases: Vec<Phrase> = registry
        .names()
        .iter()
        .zip(&model.weights)
        .filter_map(|(name, &w)| {
            let rest = name.strip_prefix(Group::Text.prefix())?;
            let (field, ngram) = rest.split_once(':')?;
            Some(Phrase {
                field: field.to_string(),
                ngram: ngram.to_string(),
                weight: w,
            })
        })
        .collect();
    phrases.sort_by(|a, b| {
        b.weight
            .partial_cmp(&a.weight)
            .unwrap_or(Ordering::Equal)
            .then_with(|| (&a.ngram, &a.field).cmp(&(&b.ngram, &b.field)))
    });
    let k_top = k.min(phrases.len());
    let top = phrases[..k_top].to_vec();
    let k_bottom = k.min(phrases.len() - k_top);
    let bottom = phrases.iter().rev().take(k_bottom).cloned().collect();
    Ok((top, bottom))
}

/// `slice, model, feature, weight, rank` for every ranked row.
pub fn slice_ranks_tsv(tables: &[FeatureRankTable]) -> String {
    let mut out = String::from("slice\tmodel\tfeature\tweight\trank\n");
    for t in tables {
        for r in &t.rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{:.6}\t{}", t.slice, t.model, r.feature, r.weight, r.rank);
        }
    }
    out
}

/// One row per feature with its median rank, top count and the feature set
/// the ranking came from. Rows sort by median rank, unranked last.
pub fn ranks_tsv(rows: &[(String, MedianRank)]) -> String {
    let mut sorted: Vec<&(String, MedianRank)> = rows.iter().collect();
    sorted.sort_by(|(_, a), (_, b)| {
        let key = |m: &MedianRank| m.median.unwrap_or(f64::INFINITY);
        key(a)
            .partial_cmp(&key(b))
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.feature.cmp(&b.feature))
    });
    let mut out = format!("feature\tsource\tmedian_rank\ttop{TOP_RANKS}\tranked_slices\n");
    for (source, m) in sorted {
        let median = m.median.map_or_else(|| "-".to_string(), |v| format!("{v:.1}"));
        let _ = writeln!(out, "{}\t{source}\t{median}\t{}\t{}", m.feature, m.top, m.ranked_in);
    }
    out
}

pub fn phrases_tsv(top: &[Phrase], bottom: &[Phrase]) -> String {
    let mut out = String::from("list\trank\tfield\tngram\tweight\n");
    for (list, phrases) in [("top", top), ("bottom", bottom)] {
        for (i, p) in phrases.iter().enumerate() {
            let _ = writeln!(out, "{list}\t{i}\t{}\t{}\t{:.6}", p.field, p.ngram, p.weight);
        }
    }
    out
}

/// Groups tables by model name, keeping slice order.
pub fn by_model(tables: Vec<FeatureRankTable>) -> BTreeMap<String, Vec<FeatureRankTable>> {
    let mut out: BTreeMap<String, Vec<FeatureRankTable>> = BTreeMap::new();
    for t in tables {
        out.entry(t.model.clone()).or_default().push(t);
    }
    out
}
