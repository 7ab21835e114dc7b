//! Sparse feature vectors for bills.
//!
//! Features are grouped as sponsor, committee, bill, text and action
//! features; a [`FeatureSet`] picks the groups used by one experimental
//! condition. A [`Featurizer`] is fitted on one training fold (text
//! vocabularies, effectiveness scores, referral rates, session calendars,
//! discretization populations and the frozen [`FeatureRegistry`]) and then
//! turns any bill into a [`FeatureVector`].

mod discretize;
mod extract;
mod registry;
mod vector;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Bill, Corpus};
use crate::effectiveness::{EffectivenessConfig, EffectivenessTable};
use crate::error::{Error, Result};
use crate::textfeat::{fit_tfidf, Field, TfIdfModel, DEFAULT_MAX_TERMS};
use crate::util;

pub use discretize::{bucket_names, discretize_count, CountPopulation, RANK_BUCKETS, Z_BUCKETS};
pub use extract::{
    action_features, bill_features, committee_features, sponsor_features, EffectivenessView,
    Fragment, ReferralRates, SessionCalendars, ACTION_FEATURES,
};
pub use registry::FeatureRegistry;
pub use vector::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Sponsor,
    Committee,
    Bill,
    Text,
    Action,
}

impl Group {
    pub const ALL: [Group; 5] = [Group::Sponsor, Group::Committee, Group::Bill, Group::Text, Group::Action];

    pub fn prefix(self) -> &'static str {
        match self {
            Group::Sponsor => "spon:",
            Group::Committee => "cmte:",
            Group::Bill => "bill:",
            Group::Text => "txt:",
            Group::Action => "act:",
        }
    }

    /// Group of a feature name, from its prefix.
    pub fn of(name: &str) -> Option<Group> {
        Group::ALL.into_iter().find(|g| name.starts_with(g.prefix()))
    }
}

/// The experimental conditions: which feature groups a model sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    Combined,
    NoTxt,
    NoTxtSpon,
    JustTxt,
    JustSpon,
    CombinedAct,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 6] = [
        FeatureSet::Combined,
        FeatureSet::NoTxt,
        FeatureSet::NoTxtSpon,
        FeatureSet::JustTxt,
        FeatureSet::JustSpon,
        FeatureSet::CombinedAct,
    ];

    pub fn groups(self) -> &'static [Group] {
        use Group::*;
        match self {
            FeatureSet::Combined => &[Sponsor, Committee, Bill, Text],
            FeatureSet::NoTxt => &[Sponsor, Committee, Bill],
            FeatureSet::NoTxtSpon => &[Committee, Bill],
            FeatureSet::JustTxt => &[Text],
            FeatureSet::JustSpon => &[Sponsor],
            FeatureSet::CombinedAct => &[Sponsor, Committee, Bill, Text, Action],
        }
    }

    pub fn includes(self, group: Group) -> bool {
        self.groups().contains(&group)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Combined => "combined",
            FeatureSet::NoTxt => "no_txt",
            FeatureSet::NoTxtSpon => "no_txt_spon",
            FeatureSet::JustTxt => "just_txt",
            FeatureSet::JustSpon => "just_spon",
            FeatureSet::CombinedAct => "combined_act",
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let folded = s.trim().to_ascii_lowercase().replace(['-', '+'], "_");
        FeatureSet::ALL
            .into_iter()
            .find(|f| f.as_str() == folded)
            .ok_or_else(|| Error::InvalidInput(format!("unknown feature set `{s}`")))
    }
}

/// Count features that also get rank / decile / z-score indicators.
pub const DISCRETIZED: [&str; 6] = [
    "spon:num_sponsors",
    "spon:num_dem",
    "spon:num_rep",
    "spon:eff_primary",
    "cmte:num_committees",
    "cmte:num_sponsor_members",
];

pub const DEFAULT_CROSS_FIT: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturizerConfig {
    /// Vocabulary size per text field.
    pub max_terms: usize,
    pub effectiveness: EffectivenessConfig,
    /// Training bills see effectiveness scores and referral rates fitted on
    /// the other `cross_fit` parts of the training fold, so their own
    /// outcome never feeds their features. Values below 2 fit everything
    /// in-sample.
    pub cross_fit: usize,
}

impl Default for FeaturizerConfig {
    fn default() -> Self {
        FeaturizerConfig {
            max_terms: DEFAULT_MAX_TERMS,
            effectiveness: EffectivenessConfig::default(),
            cross_fit: DEFAULT_CROSS_FIT,
        }
    }
}

/// Everything fitted on one training fold that is needed to featurize bills.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Featurizer {
    pub registry: FeatureRegistry,
    pub title: TfIdfModel,
    pub description: TfIdfModel,
    pub effectiveness: EffectivenessTable,
    pub referral: ReferralRates,
    pub calendars: SessionCalendars,
    populations: BTreeMap<String, CountPopulation>,
    eff_mean: f64,
    /// Cross-fitted statistics and the part each training bill belongs to.
    /// Not persisted: a loaded featurizer treats every bill as unseen.
    #[serde(skip)]
    parts: Vec<(EffectivenessTable, ReferralRates)>,
    #[serde(skip)]
    training: HashMap<String, usize>,
}

/// Part of a training bill under `k`-way cross-fitting, fixed by its id.
fn cross_fit_part(bill: &Bill, k: usize) -> usize {
    (util::fnv1a(&bill.id) % k as u64) as usize
}

fn description(bill: &Bill) -> &str {
    bill.description.as_deref().unwrap_or("")
}

impl Featurizer {
    /// Fits on `train`. `extra` bills (typically resolutions of the same
    /// chamber) only feed the effectiveness tallies.
    pub fn fit(corpus: &Corpus, train: &[&Bill], extra: &[&Bill], config: &FeaturizerConfig) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::InvalidInput("cannot fit a featurizer on zero bills".into()));
        }
        let titles: Vec<&str> = train.iter().map(|b| b.title.as_str()).collect();
        let descriptions: Vec<&str> = train.iter().map(|b| description(b)).collect();
        let title = fit_tfidf(&titles, Field::Title, config.max_terms)?;
        let description = fit_tfidf(&descriptions, Field::Description, config.max_terms)?;

        let mut pool: Vec<&Bill> = train.to_vec();
        pool.extend_from_slice(extra);
        let effectiveness = EffectivenessTable::fit(corpus, &pool, &config.effectiveness);

        let k = if config.cross_fit >= 2 { config.cross_fit } else { 0 };
        let parts = (0..k)
            .map(|part| {
                let rest: Vec<&Bill> = train.iter().copied().filter(|b| cross_fit_part(b, k) != part).collect();
                let mut pool = rest.clone();
                pool.extend_from_slice(extra);
                (
                    EffectivenessTable::fit(corpus, &pool, &config.effectiveness),
                    ReferralRates::fit(&rest),
                )
            })
            .collect();
        let training = if k > 0 {
            train.iter().map(|b| (b.id.clone(), cross_fit_part(b, k))).collect()
        } else {
            HashMap::new()
        };

        let mut featurizer = Featurizer {
            registry: FeatureRegistry::new(),
            title,
            description,
            effectiveness,
            referral: ReferralRates::fit(train),
            calendars: SessionCalendars::fit(train),
            populations: BTreeMap::new(),
            eff_mean: 0.0,
            parts,
            training,
        };
        let scores: Vec<f64> = featurizer.effectiveness.scores().map(|s| s.normalized).collect();
        featurizer.eff_mean = if scores.is_empty() { 5.0 } else { util::mean(&scores) };

        let raw: Vec<Fragment> = train
            .iter()
            .map(|b| featurizer.raw_fragment(corpus, b, &Group::ALL))
            .collect();
        let mut values: BTreeMap<&str, Vec<f64>> = DISCRETIZED.iter().map(|&n| (n, Vec::new())).collect();
        for frag in &raw {
            for (name, v) in frag {
                if let Some(list) = values.get_mut(name.as_str()) {
                    list.push(*v);
                }
            }
        }
        for (name, list) in values {
            if !list.is_empty() {
                featurizer
                    .populations
                    .insert(name.to_string(), CountPopulation::new(&list)?);
            }
        }

        let mut registry = FeatureRegistry::new();
        for frag in &raw {
            for (name, _) in frag {
                registry.insert(name)?;
            }
        }
        for name in featurizer.populations.keys() {
            for bucket in bucket_names(name) {
                registry.insert(&bucket)?;
            }
        }
        for (model, field) in [(&featurizer.title, "title"), (&featurizer.description, "desc")] {
            for term in &model.vocabulary.terms {
                registry.insert(&format!("txt:{field}:{term}"))?;
            }
        }
        for name in ACTION_FEATURES {
            registry.insert(name)?;
        }
        registry.insert("spon:unknown_eff")?;
        registry.freeze();
        featurizer.registry = registry;
        Ok(featurizer)
    }

    fn raw_fragment(&self, corpus: &Corpus, bill: &Bill, groups: &[Group]) -> Fragment {
        let (table, rates) = match self.training.get(&bill.id) {
            Some(&part) => (&self.parts[part].0, &self.parts[part].1),
            None => (&self.effectiveness, &self.referral),
        };
        let mut out = Fragment::new();
        for &group in groups {
            match group {
                Group::Sponsor => {
                    let view = EffectivenessView {
                        table,
                        leave_out: false,
                        fallback: self.eff_mean,
                    };
                    out.extend(sponsor_features(bill, corpus, Some(&view)));
                }
                Group::Committee => out.extend(committee_features(bill, corpus, rates, false)),
                Group::Bill => out.extend(bill_features(bill, corpus, &self.calendars)),
                Group::Text => {
                    for (id, w) in self.title.transform(&bill.title) {
                        out.push((format!("txt:title:{}", self.title.vocabulary.terms[id as usize]), w));
                    }
                    for (id, w) in self.description.transform(description(bill)) {
                        out.push((format!("txt:desc:{}", self.description.vocabulary.terms[id as usize]), w));
                    }
                }
                Group::Action => out.extend(action_features(bill)),
            }
        }
        out
    }

    /// Named features of `bill` restricted to `spec`, including the
    /// discretized indicators. Names absent from the registry are kept here;
    /// [`assemble`](Self::assemble) drops them.
    pub fn named_features(&self, corpus: &Corpus, bill: &Bill, spec: FeatureSet) -> Fragment {
        let mut out = self.raw_fragment(corpus, bill, spec.groups());
        let mut buckets = Fragment::new();
        for (name, v) in &out {
            if let Some(pop) = self.populations.get(name.as_str()) {
                buckets.extend(discretize_count(name, *v, pop));
            }
        }
        out.extend(buckets);
        out
    }

    /// Feature vector of `bill` under `spec`. Ids come from the frozen
    /// registry; unseen names are dropped.
    ///
    /// Only the action group looks at events after introduction.
    pub fn assemble(&self, corpus: &Corpus, bill: &Bill, spec: FeatureSet) -> Result<FeatureVector> {
        if !self.registry.is_frozen() {
            return Err(Error::UnfrozenRegistry);
        }
        let mut pairs = Vec::new();
        for (name, v) in self.named_features(corpus, bill, spec) {
            if let Some(id) = self.registry.id(&name)? {
                pairs.push((id, v));
            }
        }
        Ok(FeatureVector::from_pairs(pairs))
    }

    pub fn dim(&self) -> usize {
        self.registry.len()
    }

    pub fn population(&self, name: &str) -> Option<&CountPopulation> {
        self.populations.get(name)
    }
}
