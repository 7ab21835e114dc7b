//! Normalized legislative data model.
//!
//! Bills, legislators and committees are read from line-delimited JSON files
//! (see [`load_corpus`]). Raw action strings are mapped onto [`Status`] by an
//! ordered [`StatusRulebook`], bill types are folded into bills and
//! resolutions, every bill is labelled by [`label_floor_action`], and
//! cross-chamber companions are linked by lexical similarity.

mod companion;
mod io;
mod slice;
mod status;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use companion::{detect_companions, CompanionPair, DEFAULT_COMPANION_THRESHOLD};
pub use io::{load_corpus, write_corpus, LoadOptions};
pub use slice::{partition_state_chamber, ChamberSlice};
pub use status::{classify_bill_type, normalize_bill_type, normalize_status, StatusRulebook};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chamber {
    Upper,
    Lower,
}

impl Chamber {
    pub fn opposite(self) -> Chamber {
        match self {
            Chamber::Upper => Chamber::Lower,
            Chamber::Lower => Chamber::Upper,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Chamber::Upper => "upper",
            Chamber::Lower => "lower",
        }
    }
}

impl fmt::Display for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Chamber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "upper" | "senate" => Ok(Chamber::Upper),
            "lower" | "house" | "assembly" => Ok(Chamber::Lower),
            other => Err(Error::InvalidInput(format!("unknown chamber `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BillType {
    Bill,
    Resolution,
}

impl BillType {
    pub fn as_str(self) -> &'static str {
        match self {
            BillType::Bill => "bill",
            BillType::Resolution => "resolution",
        }
    }
}

/// Normalized legislative action status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Introduced,
    AssignedToCommittee,
    ReportedFromCommittee,
    Passed,
    AmendmentIntroduced,
    AmendmentAdopted,
    AmendmentRejected,
    Vote,
    Reading,
    Enacted,
    Other,
}

impl Status {
    pub const ALL: [Status; 11] = [
        Status::Introduced,
        Status::AssignedToCommittee,
        Status::ReportedFromCommittee,
        Status::Passed,
        Status::AmendmentIntroduced,
        Status::AmendmentAdopted,
        Status::AmendmentRejected,
        Status::Vote,
        Status::Reading,
        Status::Enacted,
        Status::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Introduced => "introduced",
            Status::AssignedToCommittee => "assigned_to_committee",
            Status::ReportedFromCommittee => "reported_from_committee",
            Status::Passed => "passed",
            Status::AmendmentIntroduced => "amendment_introduced",
            Status::AmendmentAdopted => "amendment_adopted",
            Status::AmendmentRejected => "amendment_rejected",
            Status::Vote => "vote",
            Status::Reading => "reading",
            Status::Enacted => "enacted",
            Status::Other => "other",
        }
    }

    /// Accepts `assigned_to_committee`, `ASSIGNED_TO_COMMITTEE` and
    /// `AssignedToCommittee`.
    pub fn parse(name: &str) -> Option<Status> {
        let folded: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Status::ALL
            .into_iter()
            .find(|s| s.as_str().replace('_', "") == folded)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Dem,
    Rep,
    Other,
}

impl Party {
    pub fn as_str(self) -> &'static str {
        match self {
            Party::Dem => "dem",
            Party::Rep => "rep",
            Party::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Member,
    RankingMember,
    Chair,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Member => "member",
            Role::RankingMember => "ranking_member",
            Role::Chair => "chair",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    FloorAction,
    Failed,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::FloorAction
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionEvent {
    pub date: NaiveDate,
    pub raw_text: String,
    pub normalized: Status,
    /// Chamber the action took place in; `None` means the introductory chamber.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chamber: Option<Chamber>,
    /// Set on votes taken by the full chamber rather than inside a committee.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub floor_vote: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bill {
    pub id: String,
    pub state: String,
    pub chamber: Chamber,
    pub session: String,
    pub bill_type: BillType,
    pub title: String,
    #[serde(default)]
    pub description: Option<String>,
    pub sponsor_ids: Vec<String>,
    #[serde(default)]
    pub committee_ids: Vec<String>,
    pub introduced_date: NaiveDate,
    #[serde(default)]
    pub events: Vec<ActionEvent>,
    #[serde(default)]
    pub companion_ids: Vec<String>,
    pub label: Label,
}

impl Bill {
    pub fn primary_sponsor(&self) -> &str {
        &self.sponsor_ids[0]
    }

    /// Whether `event` happened in this bill's introductory chamber.
    pub fn in_home_chamber(&self, event: &ActionEvent) -> bool {
        event.chamber.is_none_or(|c| c == self.chamber)
    }

    /// Index of the first event that counts as floor action, if any.
    pub fn first_floor_action(&self) -> Option<usize> {
        self.events.iter().position(|e| self.is_floor_event(e))
    }

    fn is_floor_event(&self, event: &ActionEvent) -> bool {
        match event.normalized {
            Status::Passed => self.in_home_chamber(event),
            Status::Vote => event.floor_vote,
            _ => false,
        }
    }

    /// Latest normalized status on or before `date`.
    pub fn status_on(&self, date: NaiveDate) -> Option<Status> {
        self.events
            .iter()
            .take_while(|e| e.date <= date)
            .last()
            .map(|e| e.normalized)
    }
}

/// Labels a bill: floor action iff it passed its introductory chamber or had
/// a recorded floor vote. Everything else, including bills reported out of
/// committee but never considered on the floor, is a failure.
pub fn label_floor_action(bill: &Bill) -> Label {
    if bill.first_floor_action().is_some() {
        Label::FloorAction
    } else {
        Label::Failed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitteeMembership {
    pub committee_id: String,
    pub role: Role,
    /// Session the role applies to; `None` means every session.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Legislator {
    pub id: String,
    pub state: String,
    pub chamber: Chamber,
    pub party: Party,
    #[serde(default)]
    pub committee_memberships: Vec<CommitteeMembership>,
    /// Majority membership keyed by session.
    #[serde(default)]
    pub in_majority: BTreeMap<String, bool>,
}

impl Legislator {
    pub fn role_on(&self, committee_id: &str, session: &str) -> Option<Role> {
        self.committee_memberships
            .iter()
            .filter(|m| m.committee_id == committee_id)
            .filter(|m| m.session.as_deref().is_none_or(|s| s == session))
            .map(|m| m.role)
            .max()
    }

    pub fn in_majority(&self, session: &str) -> Option<bool> {
        self.in_majority.get(session).copied()
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for m in &self.committee_memberships {
            if !seen.insert((m.committee_id.as_str(), m.session.as_deref())) {
                return Err(Error::InvalidInput(format!(
                    "legislator `{}` holds more than one role on committee `{}`",
                    self.id, m.committee_id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Committee {
    pub id: String,
    pub state: String,
    pub chamber: Chamber,
    pub chair_party: Party,
    /// Historical referral rate as shipped in the source data. Models never
    /// read this; they refit rates on each training fold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub referral_rate: Option<f64>,
}

/// An immutable, validated corpus.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub bills: Vec<Bill>,
    pub legislators: BTreeMap<String, Legislator>,
    pub committees: BTreeMap<String, Committee>,
    bill_index: HashMap<String, usize>,
    chambers_by_state: BTreeMap<String, BTreeSet<Chamber>>,
    majority: BTreeMap<(String, Chamber, String), Party>,
}

impl Corpus {
    pub fn new(
        bills: Vec<Bill>,
        legislators: Vec<Legislator>,
        committees: Vec<Committee>,
    ) -> Result<Self> {
        let mut bill_index = HashMap::with_capacity(bills.len());
        let mut chambers_by_state: BTreeMap<String, BTreeSet<Chamber>> = BTreeMap::new();
        for (i, bill) in bills.iter().enumerate() {
            if bill.sponsor_ids.is_empty() {
                return Err(Error::InvalidInput(format!("bill `{}` has no sponsors", bill.id)));
            }
            if let Some(e) = bill.events.iter().find(|e| e.date < bill.introduced_date) {
                return Err(Error::InvalidInput(format!(
                    "bill `{}` has an event dated {} before its introduction on {}",
                    bill.id, e.date, bill.introduced_date
                )));
            }
            if bill_index.insert(bill.id.clone(), i).is_some() {
                return Err(Error::DuplicateId {
                    kind: "bill",
                    id: bill.id.clone(),
                });
            }
            chambers_by_state
                .entry(bill.state.clone())
                .or_default()
                .insert(bill.chamber);
        }

        let mut legislator_map = BTreeMap::new();
        let mut majority = BTreeMap::new();
        for legislator in legislators {
            legislator.validate()?;
            for (session, &in_majority) in &legislator.in_majority {
                if in_majority && legislator.party != Party::Other {
                    majority.insert(
                        (legislator.state.clone(), legislator.chamber, session.clone()),
                        legislator.party,
                    );
                }
            }
            let id = legislator.id.clone();
            if legislator_map.insert(id.clone(), legislator).is_some() {
                return Err(Error::DuplicateId {
                    kind: "legislator",
                    id,
                });
            }
        }

        let mut committee_map = BTreeMap::new();
        for committee in committees {
            let id = committee.id.clone();
            if let Some(rate) = committee.referral_rate {
                if !(0.0..=1.0).contains(&rate) {
                    return Err(Error::InvalidInput(format!(
                        "committee `{id}` has referral rate {rate} outside [0, 1]"
                    )));
                }
            }
            if committee_map.insert(id.clone(), committee).is_some() {
                return Err(Error::DuplicateId {
                    kind: "committee",
                    id,
                });
            }
        }

        Ok(Corpus {
            bills,
            legislators: legislator_map,
            committees: committee_map,
            bill_index,
            chambers_by_state,
            majority,
        })
    }

    pub fn bill(&self, id: &str) -> Option<&Bill> {
        self.bill_index.get(id).map(|&i| &self.bills[i])
    }

    pub fn bill_position(&self, id: &str) -> Option<usize> {
        self.bill_index.get(id).copied()
    }

    pub fn legislator(&self, id: &str) -> Option<&Legislator> {
        self.legislators.get(id)
    }

    pub fn committee(&self, id: &str) -> Option<&Committee> {
        self.committees.get(id)
    }

    /// True when every bill of `state` sits in a single chamber.
    pub fn is_unicameral(&self, state: &str) -> bool {
        self.chambers_by_state
            .get(state)
            .is_some_and(|chambers| chambers.len() == 1)
    }

    /// Party holding the majority of `chamber` in `session`, if the
    /// legislator records say.
    pub fn majority_party(&self, state: &str, chamber: Chamber, session: &str) -> Option<Party> {
        self.majority
            .get(&(state.to_string(), chamber, session.to_string()))
            .copied()
    }

    /// Replaces the companion links of every bill.
    pub fn set_companions(&mut self, pairs: &[CompanionPair]) {
        for bill in &mut self.bills {
            bill.companion_ids.clear();
        }
        for pair in pairs {
            let (a, b) = (self.bill_index[&pair.a], self.bill_index[&pair.b]);
            self.bills[a].companion_ids.push(pair.b.clone());
            self.bills[b].companion_ids.push(pair.a.clone());
        }
        for bill in &mut self.bills {
            bill.companion_ids.sort();
            bill.companion_ids.dedup();
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    pub fn event(day: u32, status: Status) -> ActionEvent {
        ActionEvent {
            date: date(2015, 1, day),
            raw_text: status.as_str().to_string(),
            normalized: status,
            chamber: None,
            floor_vote: false,
        }
    }

    pub fn bill(id: &str, events: Vec<ActionEvent>) -> Bill {
        let mut bill = Bill {
            id: id.to_string(),
            state: "nm".to_string(),
            chamber: Chamber::Upper,
            session: "2015".to_string(),
            bill_type: BillType::Bill,
            title: format!("title of {id}"),
            description: None,
            sponsor_ids: vec!["s1".to_string()],
            committee_ids: vec![],
            introduced_date: date(2015, 1, 1),
            events,
            companion_ids: vec![],
            label: Label::Failed,
        };
        bill.label = label_floor_action(&bill);
        bill
    }
}
