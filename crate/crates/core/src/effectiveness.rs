//! Legislator effectiveness scores.
//!
//! Every legislator gets twelve factors: for each of six pipeline stages, how
//! many bills and how many resolutions they sponsored reached that stage.
//! Per stage, a legislator's weighted count is divided by the chamber's
//! weighted total; the six ratios are combined with increasing stage weights
//! and min-max scaled to 0..10 within each (state, chamber, session).
//!
//! ```
//! use floorcast::effectiveness::{combine_stages, EffectivenessConfig};
//! let raw = combine_stages(&[0.25, 0.25, 0.5, 0.0, 0.0, 0.0], &EffectivenessConfig::default().stage_weights);
//! assert!((raw - 2.25 / 21.0).abs() < 1e-12);
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Bill, BillType, Chamber, Corpus, Status};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Sponsored,
    OutOfCommittee,
    ReachedFloor,
    PassedChamber,
    PassedLegislature,
    Enacted,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Sponsored,
        Stage::OutOfCommittee,
        Stage::ReachedFloor,
        Stage::PassedChamber,
        Stage::PassedLegislature,
        Stage::Enacted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Sponsored => "sponsored",
            Stage::OutOfCommittee => "out_of_committee",
            Stage::ReachedFloor => "reached_floor",
            Stage::PassedChamber => "passed_chamber",
            Stage::PassedLegislature => "passed_legislature",
            Stage::Enacted => "enacted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessConfig {
    pub bill_weight: f64,
    pub resolution_weight: f64,
    pub stage_weights: [f64; 6],
    /// When set, cosponsors are credited with this fraction of a bill.
    pub cosponsor_weight: Option<f64>,
}

impl Default for EffectivenessConfig {
    fn default() -> Self {
        EffectivenessConfig {
            bill_weight: 2.0,
            resolution_weight: 1.0,
            stage_weights: [1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            cosponsor_weight: None,
        }
    }
}

/// The twelve factors of one legislator: `counts[stage][0]` bills,
/// `counts[stage][1]` resolutions. Fractional when cosponsors are credited.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageCounts {
    pub legislator: String,
    pub counts: [[f64; 2]; 6],
}

impl StageCounts {
    pub fn new(legislator: impl Into<String>) -> Self {
        StageCounts {
            legislator: legislator.into(),
            counts: [[0.0; 2]; 6],
        }
    }

    pub fn bills(&self, stage: Stage) -> f64 {
        self.counts[stage as usize][0]
    }

    pub fn resolutions(&self, stage: Stage) -> f64 {
        self.counts[stage as usize][1]
    }

    fn add(&mut self, bill_type: BillType, furthest: Stage, weight: f64) {
        let column = match bill_type {
            BillType::Bill => 0,
            BillType::Resolution => 1,
        };
        for stage in 0..=furthest as usize {
            self.counts[stage][column] += weight;
        }
    }

    fn weighted(&self, stage: usize, config: &EffectivenessConfig) -> f64 {
        config.bill_weight * self.counts[stage][0] + config.resolution_weight * self.counts[stage][1]
    }
}

/// Furthest stage a bill reached. Bills are counted at every stage up to
/// this one, which keeps the twelve factors monotone along the pipeline.
pub fn furthest_stage(bill: &Bill, unicameral: bool) -> Stage {
    let mut stage = Stage::Sponsored;
    let mut bump = |s: Stage| stage = stage.max(s);
    for e in &bill.events {
        match e.normalized {
            Status::ReportedFromCommittee => bump(Stage::OutOfCommittee),
            Status::Passed if bill.in_home_chamber(e) => {
                bump(Stage::PassedChamber);
                if unicameral {
                    bump(Stage::PassedLegislature);
                }
            }
            Status::Passed => bump(Stage::PassedLegislature),
            Status::Enacted => bump(Stage::Enacted),
            _ => {}
        }
    }
    if bill.label.is_positive() {
        bump(Stage::ReachedFloor);
    }
    stage
}

fn credited(bill: &Bill, config: &EffectivenessConfig) -> Vec<(String, f64)> {
    let mut out = vec![(bill.primary_sponsor().to_string(), 1.0)];
    if let Some(w) = config.cosponsor_weight {
        for id in &bill.sponsor_ids[1..] {
            if out.iter().all(|(seen, _)| seen != id) {
                out.push((id.clone(), w));
            }
        }
    }
    out
}

/// Stage counts of `legislator` over `bills`.
pub fn tally_stage_counts(
    legislator: &str,
    bills: &[&Bill],
    unicameral: bool,
    config: &EffectivenessConfig,
) -> StageCounts {
    let mut counts = StageCounts::new(legislator);
    for bill in bills {
        for (id, weight) in credited(bill, config) {
            if id == legislator {
                counts.add(bill.bill_type, furthest_stage(bill, unicameral), weight);
            }
        }
    }
    counts
}

/// Share of the chamber's weighted activity at `stage` held by `counts`;
/// zero when nobody in the chamber reached the stage.
pub fn stage_partial_score(
    counts: &StageCounts,
    chamber: &[StageCounts],
    stage: Stage,
    config: &EffectivenessConfig,
) -> f64 {
    let total: f64 = chamber.iter().map(|m| m.weighted(stage as usize, config)).sum();
    partial(counts.weighted(stage as usize, config), total)
}

fn partial(own: f64, total: f64) -> f64 {
    if total > 0.0 {
        own / total
    } else {
        0.0
    }
}

pub fn combine_stages(partials: &[f64; 6], stage_weights: &[f64; 6]) -> f64 {
    let norm: f64 = stage_weights.iter().sum();
    partials.iter().zip(stage_weights).map(|(p, w)| p * w).sum::<f64>() / norm
}

/// Min-max scales to 0..10; if every score is equal, everyone gets 5.
pub fn normalize_scores(raw: &[f64]) -> Vec<f64> {
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    raw.iter().map(|&r| scale(r, lo, hi)).collect()
}

fn scale(raw: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (10.0 * (raw - lo) / (hi - lo)).clamp(0.0, 10.0)
    } else {
        5.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessScore {
    pub legislator: String,
    pub state: String,
    pub chamber: Chamber,
    pub session: String,
    pub counts: StageCounts,
    pub raw: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChamberSession {
    /// Weighted chamber totals per stage.
    totals: [f64; 6],
    lo: f64,
    hi: f64,
    members: BTreeMap<String, EffectivenessScore>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Contribution {
    legislator: String,
    bill_type: BillType,
    furthest: Stage,
    weight: f64,
}

/// Effectiveness scores fitted on one training fold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectivenessTable {
    config: EffectivenessConfig,
    groups: BTreeMap<String, ChamberSession>,
    /// Legislator and session -> group key.
    #[serde(with = "pairs")]
    index: HashMap<(String, String), String>,
    /// What each fitted bill added to its sponsors' tallies.
    contributions: HashMap<String, Vec<Contribution>>,
}

mod pairs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        map: &HashMap<(String, String), String>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let sorted: BTreeMap<_, _> = map.iter().collect();
        s.collect_seq(sorted)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<HashMap<(String, String), String>, D::Error> {
        let list: Vec<((String, String), String)> = Deserialize::deserialize(d)?;
        Ok(list.into_iter().collect())
    }
}

fn group_key(state: &str, chamber: Chamber, session: &str) -> String {
    format!("{state}\t{chamber}\t{session}")
}

impl EffectivenessTable {
    /// Scores every legislator of each (state, chamber, session) touched by
    /// `bills`. Legislators on record for that chamber who sponsored nothing
    /// are included with zero counts.
    pub fn fit(corpus: &Corpus, bills: &[&Bill], config: &EffectivenessConfig) -> Self {
        let mut tallies: BTreeMap<String, BTreeMap<String, StageCounts>> = BTreeMap::new();
        let mut meta: BTreeMap<String, (String, Chamber, String)> = BTreeMap::new();
        let mut contributions: HashMap<String, Vec<Contribution>> = HashMap::new();

        for bill in bills {
            let key = group_key(&bill.state, bill.chamber, &bill.session);
            meta.entry(key.clone())
                .or_insert_with(|| (bill.state.clone(), bill.chamber, bill.session.clone()));
            let furthest = furthest_stage(bill, corpus.is_unicameral(&bill.state));
            let members = tallies.entry(key).or_default();
            let mut added = Vec::new();
            for (id, weight) in credited(bill, config) {
                members
                    .entry(id.clone())
                    .or_insert_with(|| StageCounts::new(&id))
                    .add(bill.bill_type, furthest, weight);
                added.push(Contribution {
                    legislator: id,
                    bill_type: bill.bill_type,
                    furthest,
                    weight,
                });
            }
            contributions.insert(bill.id.clone(), added);
        }

        for (key, (state, chamber, _)) in &meta {
            let members = tallies.get_mut(key).expect("group exists");
            for l in corpus.legislators.values() {
                if &l.state == state && l.chamber == *chamber {
                    members
                        .entry(l.id.clone())
                        .or_insert_with(|| StageCounts::new(&l.id));
                }
            }
        }

        let mut groups = BTreeMap::new();
        let mut index = HashMap::new();
        for (key, members) in tallies {
            let (state, chamber, session) = meta[&key].clone();
            let mut totals = [0.0; 6];
            for m in members.values() {
                for (s, t) in totals.iter_mut().enumerate() {
                    *t += m.weighted(s, config);
                }
            }
            let raws: Vec<f64> = members
                .values()
                .map(|m| raw_score(m, &totals, config))
                .collect();
            let lo = raws.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = raws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let scored = members
                .into_iter()
                .zip(raws)
                .map(|((id, counts), raw)| {
                    index.insert((id.clone(), session.clone()), key.clone());
                    let score = EffectivenessScore {
                        legislator: id.clone(),
                        state: state.clone(),
                        chamber,
                        session: session.clone(),
                        counts,
                        raw,
                        normalized: scale(raw, lo, hi),
                    };
                    (id, score)
                })
                .collect();
            groups.insert(
                key,
                ChamberSession {
                    totals,
                    lo,
                    hi,
                    members: scored,
                },
            );
        }

        EffectivenessTable {
            config: config.clone(),
            groups,
            index,
            contributions,
        }
    }

    pub fn config(&self) -> &EffectivenessConfig {
        &self.config
    }

    pub fn get(&self, legislator: &str, session: &str) -> Option<&EffectivenessScore> {
        let key = self.index.get(&(legislator.to_string(), session.to_string()))?;
        self.groups[key].members.get(legislator)
    }

    /// Normalized score of `legislator` in `session`.
    pub fn score(&self, legislator: &str, session: &str) -> Option<f64> {
        self.get(legislator, session).map(|s| s.normalized)
    }

    /// Normalized score with `bill`'s own contribution removed from both the
    /// legislator's tallies and the chamber totals. Bills that were not part
    /// of the fit get the plain score.
    ///
    /// Used for training bills, whose own outcome would otherwise leak into
    /// their sponsors' scores.
    pub fn score_excluding(&self, legislator: &str, session: &str, bill_id: &str) -> Option<f64> {
        let entry = self.get(legislator, session)?;
        let Some(contribs) = self.contributions.get(bill_id) else {
            return Some(entry.normalized);
        };
        let group = &self.groups[&self.index[&(legislator.to_string(), session.to_string())]];
        let mut own = entry.counts.clone();
        let mut totals = group.totals;
        for c in contribs {
            let mut delta = StageCounts::new("");
            delta.add(c.bill_type, c.furthest, c.weight);
            for (s, t) in totals.iter_mut().enumerate() {
                *t -= delta.weighted(s, &self.config);
            }
            if c.legislator == legislator {
                for s in 0..6 {
                    for k in 0..2 {
                        own.counts[s][k] -= delta.counts[s][k];
                    }
                }
            }
        }
        let raw = raw_score(&own, &totals, &self.config);
        Some(scale(raw, group.lo, group.hi))
    }

    pub fn scores(&self) -> impl Iterator<Item = &EffectivenessScore> {
        self.groups.values().flat_map(|g| g.members.values())
    }

    /// `legislator, state, chamber, session, 12 factors, raw, normalized`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("legislator\tstate\tchamber\tsession");
        for stage in Stage::ALL {
            let _ = write!(out, "\t{0}_bills\t{0}_resolutions", stage.as_str());
        }
        out.push_str("\traw\tnormalized\n");
        for s in self.scores() {
            let _ = write!(out, "{}\t{}\t{}\t{}", s.legislator, s.state, s.chamber, s.session);
            for c in &s.counts.counts {
                let _ = write!(out, "\t{}\t{}", c[0], c[1]);
            }
            let _ = writeln!(out, "\t{:.6}\t{:.6}", s.raw, s.normalized);
        }
        out
    }

    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

fn raw_score(counts: &StageCounts, totals: &[f64; 6], config: &EffectivenessConfig) -> f64 {
    let mut partials = [0.0; 6];
    for (s, p) in partials.iter_mut().enumerate() {
        *p = partial(counts.weighted(s, config), totals[s]);
    }
    combine_stages(&partials, &config.stage_weights)
}
