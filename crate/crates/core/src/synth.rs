//! Synthetic corpora with planted signal.
//!
//! Every bill's floor-action probability is a logistic function of three
//! latent channels (sponsor, committee, text), each standardized to unit
//! variance over the corpus so the channel weights read as logit standard
//! deviations. A fourth weight controls how much the pre-floor timeline
//! (committee reports, amendments, readings) reveals the outcome. The
//! planted parameters are written next to the corpus as `manifest.json`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    detect_companions, label_floor_action, write_corpus, ActionEvent, Bill, BillType, Chamber,
    Committee, CommitteeMembership, Corpus, Label, Legislator, Party, Role, Status,
    DEFAULT_COMPANION_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::util::{self, sigmoid};

/// Two-letter codes of the bicameral legislatures.
const BICAMERAL: [&str; 49] = [
    "ak", "al", "ar", "az", "ca", "co", "ct", "de", "fl", "ga", "hi", "ia", "id", "il", "in", "ks",
    "ky", "la", "ma", "md", "me", "mi", "mn", "mo", "ms", "mt", "nc", "nd", "nh", "nj", "nm", "nv",
    "ny", "oh", "ok", "or", "pa", "ri", "sc", "sd", "tn", "tx", "ut", "va", "vt", "wa", "wi", "wv",
    "wy",
];
const UNICAMERAL: [&str; 2] = ["ne", "dc"];

const COMMITTEE_NAMES: [&str; 12] = [
    "Appropriations",
    "Judiciary",
    "Education",
    "Health",
    "Transportation",
    "Finance",
    "Agriculture",
    "Commerce",
    "Environment",
    "Rules",
    "Labor",
    "Veterans Affairs",
];

/// Phrases whose presence moves the text channel, with their raw weights.
const PHRASES: [(&str, f64); 12] = [
    ("budget appropriation", 1.6),
    ("school funding", 1.0),
    ("highway maintenance", 1.0),
    ("veterans services", 1.0),
    ("water infrastructure", 1.0),
    ("emergency medical care", 1.0),
    ("constitutional amendment", -1.0),
    ("firearm possession", -1.0),
    ("income tax repeal", -1.0),
    ("term limits", -1.0),
    ("voter identification", -1.0),
    ("lottery proceeds", -1.0),
];

/// Sponsor-channel features that carry planted signal.
pub const SPONSOR_SIGNAL_FEATURES: [&str; 3] = ["spon:in_majority", "spon:bipartisan", "spon:eff_primary"];

/// Committee-channel features that carry planted signal.
pub const COMMITTEE_SIGNAL_FEATURES: [&str; 3] =
    ["cmte:sponsor_role=chair", "cmte:sponsor_on_committee", "cmte:referral_rate"];

/// Logit standard deviation of each channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalWeights {
    pub sponsor: f64,
    pub committee: f64,
    pub text: f64,
    /// Log-odds shift of each pre-floor timeline event between outcomes.
    pub action: f64,
}

impl SignalWeights {
    pub const NONE: SignalWeights = SignalWeights {
        sponsor: 0.0,
        committee: 0.0,
        text: 0.0,
        action: 0.0,
    };
}

impl Default for SignalWeights {
    fn default() -> Self {
        SignalWeights {
            sponsor: 1.3,
            committee: 1.9,
            text: 1.0,
            action: 1.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_states: usize,
    /// 1 or 2.
    pub chambers_per_state: usize,
    /// How many of the states only have an upper chamber regardless of
    /// `chambers_per_state`.
    pub unicameral_states: usize,
    pub sessions: usize,
    pub bills_per_slice: usize,
    pub resolutions_per_slice: usize,
    pub legislators_per_chamber: usize,
    pub committees_per_chamber: usize,
    pub base_rate: f64,
    pub weights: SignalWeights,
    /// Number of distinct noise words.
    pub vocab_size: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_states: 10,
            chambers_per_state: 2,
            unicameral_states: 0,
            sessions: 10,
            bills_per_slice: 1000,
            resolutions_per_slice: 50,
            legislators_per_chamber: 30,
            committees_per_chamber: 8,
            base_rate: 0.41,
            weights: SignalWeights::default(),
            vocab_size: 600,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.base_rate > 0.0 && self.base_rate < 1.0) {
            return bad(format!("base rate {} is outside (0, 1)", self.base_rate));
        }
        for (name, v) in [
            ("n_states", self.n_states),
            ("sessions", self.sessions),
            ("bills_per_slice", self.bills_per_slice),
            ("legislators_per_chamber", self.legislators_per_chamber),
            ("committees_per_chamber", self.committees_per_chamber),
            ("vocab_size", self.vocab_size),
        ] {
            if v < 1 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if !(1..=2).contains(&self.chambers_per_state) {
            return bad(format!("chambers_per_state must be 1 or 2, got {}", self.chambers_per_state));
        }
        if self.n_states > BICAMERAL.len() + UNICAMERAL.len() {
            return bad(format!("at most {} states are available", BICAMERAL.len() + UNICAMERAL.len()));
        }
        if self.unicameral_states > self.n_states || self.unicameral_states > UNICAMERAL.len() {
            return bad(format!("cannot make {} states unicameral", self.unicameral_states));
        }
        if self.n_states - self.unicameral_states > BICAMERAL.len() {
            return bad("too many bicameral states".into());
        }
        if self.committees_per_chamber > COMMITTEE_NAMES.len() {
            return bad(format!("at most {} committees per chamber", COMMITTEE_NAMES.len()));
        }
        if self.legislators_per_chamber < 2 {
            return bad("need at least 2 legislators per chamber".into());
        }
        let w = self.weights;
        if [w.sponsor, w.committee, w.text, w.action].iter().any(|x| !x.is_finite()) {
            return bad("signal weights must be finite".into());
        }
        Ok(())
    }

    /// State codes paired with their chambers.
    pub fn states(&self) -> Vec<(String, Vec<Chamber>)> {
        let n_bi = self.n_states - self.unicameral_states;
        let both = if self.chambers_per_state == 2 {
            vec![Chamber::Upper, Chamber::Lower]
        } else {
            vec![Chamber::Upper]
        };
        let mut out: Vec<(String, Vec<Chamber>)> =
            BICAMERAL[..n_bi].iter().map(|s| (s.to_string(), both.clone())).collect();
        out.extend(
            UNICAMERAL[..self.unicameral_states]
                .iter()
                .map(|s| (s.to_string(), vec![Chamber::Upper])),
        );
        out
    }

    pub fn session_names(&self) -> Vec<String> {
        (0..self.sessions).map(|i| (2001 + i).to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedPhrase {
    pub text: String,
    /// The phrase after tokenizing and stemming, as it appears in n-gram
    /// vocabularies.
    pub ngram: String,
    pub weight: f64,
}

/// Mean and standard deviation used to standardize one raw channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelScale {
    pub mean: f64,
    pub sd: f64,
}

impl ChannelScale {
    fn of(values: &[f64]) -> Self {
        let sd = util::std_dev(values);
        ChannelScale {
            mean: util::mean(values),
            sd: if sd > 0.0 { sd } else { 1.0 },
        }
    }

    fn apply(&self, v: f64) -> f64 {
        (v - self.mean) / self.sd
    }
}

/// Standardized channel values and the true probability of one bill.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BillTruth {
    pub id: String,
    pub sponsor: f64,
    pub committee: f64,
    pub text: f64,
    pub probability: f64,
}

impl BillTruth {
    pub fn signals(&self) -> [f64; 3] {
        [self.sponsor, self.committee, self.text]
    }
}

/// Everything planted by the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SynthConfig,
    pub intercept: f64,
    pub scales: BTreeMap<String, ChannelScale>,
    pub sponsor_features: Vec<String>,
    pub committee_features: Vec<String>,
    pub phrases: Vec<PlantedPhrase>,
    pub legislator_skill: BTreeMap<String, f64>,
    pub committee_effect: BTreeMap<String, f64>,
    pub bills: Vec<BillTruth>,
}

impl Manifest {
    pub fn truth(&self, bill_id: &str) -> Option<&BillTruth> {
        self.bills.iter().find(|b| b.id == bill_id)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub struct Synthetic {
    pub corpus: Corpus,
    pub manifest: Manifest,
}

struct Member {
    id: String,
    party: Party,
    skill: f64,
    committees: Vec<(usize, Role)>,
}

struct ChamberPlan {
    state: String,
    chamber: Chamber,
    bicameral: bool,
    members: Vec<Member>,
    committees: Vec<(String, String, f64)>,
    majority: Vec<Party>,
}

struct Draft {
    bill: Bill,
    raw: [f64; 3],
}

fn noise_vocabulary(size: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    const ONSETS: [&str; 14] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let reserved: BTreeSet<String> = PHRASES
        .iter()
        .flat_map(|(p, _)| crate::textfeat::tokenize_stem(p))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let syllables = rng.random_range(2..=3);
        let word: String = (0..syllables)
            .map(|_| format!("{}{}", ONSETS.choose(rng).unwrap(), VOWELS.choose(rng).unwrap()))
            .collect();
        let stem = porter_stemmer::stem(&word);
        if !reserved.contains(&stem) && seen.insert(stem) {
            out.push(word);
        }
    }
    out
}

fn party_of(rng: &mut ChaCha8Rng) -> Party {
    if rng.random_bool(0.5) {
        Party::Dem
    } else {
        Party::Rep
    }
}

fn other(p: Party) -> Party {
    match p {
        Party::Dem => Party::Rep,
        _ => Party::Dem,
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn plan_chamber(
    config: &SynthConfig,
    state: &str,
    chamber: Chamber,
    bicameral: bool,
    rng: &mut ChaCha8Rng,
) -> ChamberPlan {
    let tag = match chamber {
        Chamber::Upper => "u",
        Chamber::Lower => "l",
    };
    let mut majority = vec![party_of(rng)];
    for _ in 1..config.sessions {
        let last = *majority.last().unwrap();
        majority.push(if rng.random_bool(0.3) { other(last) } else { last });
    }
    let mut members: Vec<Member> = (0..config.legislators_per_chamber)
        .map(|i| Member {
            id: format!("{state}-{tag}{i:03}"),
            party: if i % 2 == 0 { Party::Dem } else { Party::Rep },
            skill: normal(rng),
            committees: Vec::new(),
        })
        .collect();
    members.shuffle(rng);
    let committees: Vec<(String, String, f64)> = COMMITTEE_NAMES[..config.committees_per_chamber]
        .iter()
        .map(|name| {
            let slug = name.to_lowercase().replace(' ', "_");
            (format!("{state}-{tag}-{slug}"), name.to_string(), normal(rng))
        })
        .collect();

    let chair_party = majority[0];
    let n = members.len();
    for c in 0..committees.len() {
        let chair = (0..n)
            .filter(|&i| members[i].party == chair_party && members[i].committees.is_empty())
            .chain((0..n).filter(|&i| members[i].party == chair_party))
            .next();
        let ranking = (0..n)
            .filter(|&i| members[i].party != chair_party && members[i].committees.is_empty())
            .chain((0..n).filter(|&i| members[i].party != chair_party))
            .next();
        for (who, role) in [(chair, Role::Chair), (ranking, Role::RankingMember)] {
            if let Some(i) = who {
                if members[i].committees.iter().all(|&(k, _)| k != c) {
                    members[i].committees.push((c, role));
                }
            }
        }
    }
    for m in &mut members {
        while m.committees.len() < 2.min(committees.len()) {
            let c = rng.random_range(0..committees.len());
            if m.committees.iter().all(|&(k, _)| k != c) {
                m.committees.push((c, Role::Member));
            }
        }
    }
    ChamberPlan {
        state: state.to_string(),
        chamber,
        bicameral,
        members,
        committees,
        majority,
    }
}

struct Timeline<'a> {
    bill: &'a Bill,
    day: i64,
    events: Vec<ActionEvent>,
}

impl Timeline<'_> {
    fn push(&mut self, gap: i64, raw: &str, status: Status, chamber: Option<Chamber>, floor_vote: bool) {
        self.day += gap;
        self.events.push(ActionEvent {
            date: self.bill.introduced_date + Duration::days(self.day),
            raw_text: raw.to_string(),
            normalized: status,
            chamber,
            floor_vote,
        });
    }
}

fn chamber_name(c: Chamber) -> &'static str {
    match c {
        Chamber::Upper => "Senate",
        Chamber::Lower => "House",
    }
}

/// Event history consistent with `floor`. Pre-floor events are drawn with
/// odds shifted by `±action` depending on the outcome.
fn timeline(bill: &Bill, committee_name: &str, floor: bool, bicameral: bool, action: f64, rng: &mut ChaCha8Rng) -> Vec<ActionEvent> {
    let shift = if floor { action } else { -action };
    let draw = |base: f64, rng: &mut ChaCha8Rng| rng.random_bool(sigmoid(base + shift));
    let mut t = Timeline {
        bill,
        day: 0,
        events: Vec::new(),
    };
    t.push(0, "Introduced and read first time", Status::Introduced, None, false);
    t.push(rng.random_range(1..=4), &format!("Referred to {committee_name} Committee"), Status::AssignedToCommittee, None, false);
    if draw(0.0, rng) {
        t.push(rng.random_range(7..=30), "Reported favorably by committee", Status::ReportedFromCommittee, None, false);
    }
    if draw(-1.0, rng) {
        t.push(rng.random_range(1..=5), "Floor amendment offered", Status::AmendmentIntroduced, None, false);
        if rng.random_bool(0.5) {
            t.push(rng.random_range(1..=3), "Amendment adopted", Status::AmendmentAdopted, None, false);
        } else {
            t.push(rng.random_range(1..=3), "Amendment rejected", Status::AmendmentRejected, None, false);
        }
    }
    if draw(-0.5, rng) {
        t.push(rng.random_range(1..=5), "Second reading", Status::Reading, None, false);
    }
    let home = bill.chamber;
    if floor {
        if rng.random_bool(0.85) {
            t.push(rng.random_range(1..=10), &format!("Passed {}", chamber_name(home)), Status::Passed, None, false);
            let mut passed_legislature = !bicameral;
            if bicameral {
                let opp = home.opposite();
                t.push(rng.random_range(1..=5), &format!("Referred to {committee_name} Committee"), Status::AssignedToCommittee, Some(opp), false);
                if rng.random_bool(0.6) {
                    t.push(rng.random_range(5..=30), &format!("Passed {}", chamber_name(opp)), Status::Passed, Some(opp), false);
                    passed_legislature = true;
                }
            }
            if passed_legislature && rng.random_bool(0.8) {
                t.push(rng.random_range(3..=20), "Signed by Governor", Status::Enacted, None, false);
            }
        } else {
            t.push(rng.random_range(1..=10), "Third reading roll call failed", Status::Vote, None, true);
        }
    } else if rng.random_bool(0.3) {
        t.push(rng.random_range(10..=60), "Held in committee", Status::Other, None, false);
    }
    t.events
}

fn zipf_weights(n: usize) -> Vec<f64> {
    (0..n).map(|r| 1.0 / ((r + 1) as f64).powf(0.8)).collect()
}

/// Intercept making the mean true probability equal `rate`.
fn calibrate_intercept(scores: &[f64], rate: f64) -> f64 {
    let mean_at = |b: f64| scores.iter().map(|&s| sigmoid(b + s)).sum::<f64>() / scores.len().max(1) as f64;
    let (mut lo, mut hi) = (-50.0, 50.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Generates a corpus in memory. Companion links are detected the same way
/// [`load_corpus`](crate::corpus::load_corpus) does, so writing and loading
/// the result gives back the same bills.
pub fn generate(config: &SynthConfig) -> Result<Synthetic> {
    config.validate()?;
    let mut rng = util::rng(config.seed);
    let vocab = noise_vocabulary(config.vocab_size, &mut rng);
    let word_dist = WeightedIndex::new(zipf_weights(vocab.len())).expect("positive weights");
    let sessions = config.session_names();

    let mut plans = Vec::new();
    for (state, chambers) in config.states() {
        for &chamber in &chambers {
            plans.push(plan_chamber(config, &state, chamber, chambers.len() == 2, &mut rng));
        }
    }

    let quarter_effect = [0.5, 0.2, -0.2, -0.5];
    let mut drafts: Vec<Draft> = Vec::new();
    for plan in &plans {
        let partner = plans
            .iter()
            .position(|q| q.state == plan.state && q.chamber != plan.chamber);
        let per_kind = [(BillType::Bill, config.bills_per_slice), (BillType::Resolution, config.resolutions_per_slice)];
        for (kind, count) in per_kind {
            let mut numbers: BTreeMap<&str, u32> = BTreeMap::new();
            for i in 0..count {
                let session = &sessions[i * sessions.len() / count];
                let s_idx = i * sessions.len() / count;
                let number = numbers.entry(session).or_insert(0);
                *number += 1;
                let prefix = match (plan.bicameral, plan.chamber, kind) {
                    (false, _, BillType::Bill) => "LB",
                    (false, _, BillType::Resolution) => "LR",
                    (true, Chamber::Upper, BillType::Bill) => "SB",
                    (true, Chamber::Upper, BillType::Resolution) => "SR",
                    (true, Chamber::Lower, BillType::Bill) => "HB",
                    (true, Chamber::Lower, BillType::Resolution) => "HR",
                };
                let id = format!("{}-{}-{}{:04}", plan.state.to_uppercase(), session, prefix, number);
                let year: i32 = session.parse().expect("numeric session");
                let offset = rng.random_range(0..300);
                let introduced =
                    NaiveDate::from_ymd_opt(year, 1, 10).expect("valid date") + Duration::days(offset);

                let primary = rng.random_range(0..plan.members.len());
                let lead = &plan.members[primary];
                let mut sponsors = vec![lead.id.clone()];
                let mut parties = vec![lead.party];
                for _ in 0..rng.random_range(0..=4) {
                    let cross = plan.bicameral && partner.is_some() && rng.random_bool(0.1);
                    let pool = if cross { &plans[partner.unwrap()].members } else { &plan.members };
                    let want = if rng.random_bool(0.7) { lead.party } else { other(lead.party) };
                    let candidates: Vec<&Member> = pool.iter().filter(|m| m.party == want).collect();
                    if let Some(m) = candidates.choose(&mut rng) {
                        if !sponsors.contains(&m.id) {
                            sponsors.push(m.id.clone());
                            parties.push(m.party);
                        }
                    }
                }
                let mut committees = vec![rng.random_range(0..plan.committees.len())];
                if plan.committees.len() > 1 && rng.random_bool(0.15) {
                    let c = rng.random_range(0..plan.committees.len());
                    if c != committees[0] {
                        committees.push(c);
                    }
                }

                let n_phrases = match rng.random_range(0..10) {
                    0..=2 => 0,
                    3..=7 => 1,
                    _ => 2,
                };
                let chosen: Vec<usize> = rand::seq::index::sample(&mut rng, PHRASES.len(), n_phrases).into_vec();
                let mut title_words: Vec<String> =
                    (0..rng.random_range(3..=5)).map(|_| vocab[word_dist.sample(&mut rng)].clone()).collect();
                for &k in &chosen {
                    let at = rng.random_range(0..=title_words.len());
                    title_words.insert(at, PHRASES[k].0.to_string());
                }
                let title = title_words.join(" ");
                let extra: Vec<String> =
                    (0..rng.random_range(4..=8)).map(|_| vocab[word_dist.sample(&mut rng)].clone()).collect();
                let description = format!("An act relating to {title}; {}", extra.join(" "));

                let in_majority = lead.party == plan.majority[s_idx];
                let bipartisan = parties.contains(&Party::Dem) && parties.contains(&Party::Rep);
                let sponsor_raw = 0.8 * lead.skill
                    + if in_majority { 0.8 } else { -0.8 }
                    + if bipartisan { 0.7 } else { -0.7 };
                let role = committees
                    .iter()
                    .filter_map(|&c| lead.committees.iter().find(|&&(k, _)| k == c).map(|&(_, r)| r))
                    .max();
                let quarter = (offset * 4 / 300) as usize;
                let committee_raw = plan.committees[committees[0]].2
                    + match role {
                        Some(Role::Chair) => 1.5,
                        Some(_) => 0.8,
                        None => 0.0,
                    }
                    + quarter_effect[quarter.min(3)];
                let text_raw: f64 = chosen.iter().map(|&k| PHRASES[k].1).sum();

                let bill = Bill {
                    id,
                    state: plan.state.clone(),
                    chamber: plan.chamber,
                    session: session.clone(),
                    bill_type: kind,
                    title,
                    description: Some(description),
                    sponsor_ids: sponsors,
                    committee_ids: committees.iter().map(|&c| plan.committees[c].0.clone()).collect(),
                    introduced_date: introduced,
                    events: Vec::new(),
                    companion_ids: Vec::new(),
                    label: Label::Failed,
                };
                drafts.push(Draft {
                    bill,
                    raw: [sponsor_raw, committee_raw, text_raw],
                });
            }
        }
    }

    let channel = |k: usize| ChannelScale::of(&drafts.iter().map(|d| d.raw[k]).collect::<Vec<_>>());
    let scales = [channel(0), channel(1), channel(2)];
    let w = config.weights;
    let standardized: Vec<[f64; 3]> = drafts
        .iter()
        .map(|d| [scales[0].apply(d.raw[0]), scales[1].apply(d.raw[1]), scales[2].apply(d.raw[2])])
        .collect();
    let scores: Vec<f64> = standardized
        .iter()
        .map(|z| w.sponsor * z[0] + w.committee * z[1] + w.text * z[2])
        .collect();
    let intercept = calibrate_intercept(&scores, config.base_rate);

    let committee_names: BTreeMap<String, String> = plans
        .iter()
        .flat_map(|p| p.committees.iter().map(|(id, name, _)| (id.clone(), name.clone())))
        .collect();
    let bicameral: BTreeMap<&str, bool> = plans.iter().map(|p| (p.state.as_str(), p.bicameral)).collect();
    let mut truths = Vec::with_capacity(drafts.len());
    let mut bills = Vec::with_capacity(drafts.len());
    for ((mut draft, z), s) in drafts.into_iter().zip(&standardized).zip(&scores) {
        let probability = sigmoid(intercept + s);
        let floor = rng.random_bool(probability);
        let cname = &committee_names[&draft.bill.committee_ids[0]];
        draft.bill.events = timeline(&draft.bill, cname, floor, bicameral[draft.bill.state.as_str()], w.action, &mut rng);
        draft.bill.label = label_floor_action(&draft.bill);
        debug_assert_eq!(draft.bill.label.is_positive(), floor);
        truths.push(BillTruth {
            id: draft.bill.id.clone(),
            sponsor: z[0],
            committee: z[1],
            text: z[2],
            probability,
        });
        bills.push(draft.bill);
    }

    let mut legislators = Vec::new();
    let mut committees = Vec::new();
    let mut legislator_skill = BTreeMap::new();
    let mut committee_effect = BTreeMap::new();
    for plan in &plans {
        for m in &plan.members {
            legislator_skill.insert(m.id.clone(), m.skill);
            legislators.push(Legislator {
                id: m.id.clone(),
                state: plan.state.clone(),
                chamber: plan.chamber,
                party: m.party,
                committee_memberships: m
                    .committees
                    .iter()
                    .map(|&(c, role)| CommitteeMembership {
                        committee_id: plan.committees[c].0.clone(),
                        role,
                        session: None,
                    })
                    .collect(),
                in_majority: sessions
                    .iter()
                    .zip(&plan.majority)
                    .map(|(s, &maj)| (s.clone(), m.party == maj))
                    .collect(),
            });
        }
        for (id, _, effect) in &plan.committees {
            committee_effect.insert(id.clone(), *effect);
            committees.push(Committee {
                id: id.clone(),
                state: plan.state.clone(),
                chamber: plan.chamber,
                chair_party: plan.majority[0],
                referral_rate: None,
            });
        }
    }

    let mut corpus = Corpus::new(bills, legislators, committees)?;
    let pairs = detect_companions(&corpus.bills, DEFAULT_COMPANION_THRESHOLD)?;
    corpus.set_companions(&pairs);

    let manifest = Manifest {
        config: config.clone(),
        intercept,
        scales: ["sponsor", "committee", "text"]
            .iter()
            .zip(scales)
            .map(|(n, s)| (n.to_string(), s))
            .collect(),
        sponsor_features: SPONSOR_SIGNAL_FEATURES.iter().map(|s| s.to_string()).collect(),
        committee_features: COMMITTEE_SIGNAL_FEATURES.iter().map(|s| s.to_string()).collect(),
        phrases: PHRASES
            .iter()
            .map(|&(text, weight)| PlantedPhrase {
                text: text.to_string(),
                ngram: crate::textfeat::tokenize_stem(text).join(" "),
                weight,
            })
            .collect(),
        legislator_skill,
        committee_effect,
        bills: truths,
    };
    Ok(Synthetic { corpus, manifest })
}

/// Writes the corpus files under `<out>/corpus/` plus `<out>/manifest.json`.
pub fn generate_corpus(config: &SynthConfig, out: &Path) -> Result<Manifest> {
    let synthetic = generate(config)?;
    write_corpus(&synthetic.corpus, out)?;
    let path = out.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&synthetic.manifest)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    log::info!(
        "wrote {} synthetic bills to {}",
        synthetic.corpus.bills.len(),
        out.display()
    );
    Ok(synthetic.manifest)
}
