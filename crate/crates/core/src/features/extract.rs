use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::corpus::{Bill, Corpus, Party, Role, Status};
use crate::effectiveness::{furthest_stage, EffectivenessTable, Stage};

/// Named feature values produced by one group extractor.
pub type Fragment = Vec<(String, f64)>;

fn flag(out: &mut Fragment, name: impl Into<String>) {
    out.push((name.into(), 1.0));
}

/// Effectiveness scores as seen by one bill.
pub struct EffectivenessView<'a> {
    pub table: &'a EffectivenessTable,
    /// Remove the bill's own contribution (it was in the fitting fold).
    pub leave_out: bool,
    /// Imputed for sponsors without a score.
    pub fallback: f64,
}

impl EffectivenessView<'_> {
    fn score(&self, legislator: &str, bill: &Bill) -> Option<f64> {
        if self.leave_out {
            self.table.score_excluding(legislator, &bill.session, &bill.id)
        } else {
            self.table.score(legislator, &bill.session)
        }
    }
}

/// Identities, parties, counts, bicameral / bipartisan / majority status and
/// effectiveness of the bill's sponsors.
pub fn sponsor_features(bill: &Bill, corpus: &Corpus, eff: Option<&EffectivenessView<'_>>) -> Fragment {
    let mut out = Fragment::new();
    let mut seen = HashSet::new();
    let sponsors: Vec<&str> = bill
        .sponsor_ids
        .iter()
        .map(String::as_str)
        .filter(|id| seen.insert(*id))
        .collect();
    let records: Vec<_> = sponsors.iter().map(|id| corpus.legislator(id)).collect();

    flag(&mut out, format!("spon:primary={}", sponsors[0]));
    for id in &sponsors[1..] {
        flag(&mut out, format!("spon:cosponsor={id}"));
    }
    if records.iter().any(Option::is_none) {
        flag(&mut out, "spon:unknown_sponsor");
    }

    let parties: Vec<Party> = records.iter().flatten().map(|l| l.party).collect();
    if let Some(primary) = records[0] {
        flag(&mut out, format!("spon:primary_party={}", primary.party.as_str()));
        match primary.in_majority(&bill.session) {
            Some(true) => flag(&mut out, "spon:in_majority"),
            Some(false) => flag(&mut out, "spon:in_minority"),
            None => {}
        }
    }
    let cosponsor_parties: BTreeSet<Party> = records[1..].iter().flatten().map(|l| l.party).collect();
    for p in cosponsor_parties {
        flag(&mut out, format!("spon:cosponsor_party={}", p.as_str()));
    }

    let num_dem = parties.iter().filter(|&&p| p == Party::Dem).count();
    let num_rep = parties.iter().filter(|&&p| p == Party::Rep).count();
    out.push(("spon:num_sponsors".into(), sponsors.len() as f64));
    out.push(("spon:num_dem".into(), num_dem as f64));
    out.push(("spon:num_rep".into(), num_rep as f64));
    if num_dem > 0 && num_rep > 0 {
        flag(&mut out, "spon:bipartisan");
    }
    if records.iter().flatten().any(|l| l.chamber != bill.chamber) {
        flag(&mut out, "spon:bicameral");
    }
    if let Some(party) = corpus.majority_party(&bill.state, bill.chamber, &bill.session) {
        flag(&mut out, format!("spon:majority_party={}", party.as_str()));
    }

    if let Some(eff) = eff {
        let scores: Vec<Option<f64>> = sponsors.iter().map(|id| eff.score(id, bill)).collect();
        let known: Vec<f64> = scores.iter().flatten().copied().collect();
        let primary = scores[0].unwrap_or_else(|| {
            flag(&mut out, "spon:unknown_eff");
            eff.fallback
        });
        let (avg, best) = if known.is_empty() {
            (eff.fallback, eff.fallback)
        } else {
            (
                known.iter().sum::<f64>() / known.len() as f64,
                known.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            )
        };
        out.push(("spon:eff_primary".into(), primary));
        out.push(("spon:eff_avg".into(), avg));
        out.push(("spon:eff_best".into(), best));
    }
    out
}

/// Per-committee share of training bills that made it out of committee.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReferralRates {
    /// Committee -> (bills reported out, bills referred).
    counts: BTreeMap<String, (u32, u32)>,
    global: f64,
    /// Outcome of each fitted bill, for leave-one-out rates.
    outcomes: BTreeMap<String, bool>,
}

fn reported(bill: &Bill) -> bool {
    furthest_stage(bill, false) >= Stage::OutOfCommittee
}

impl ReferralRates {
    pub fn fit(bills: &[&Bill]) -> Self {
        let mut counts: BTreeMap<String, (u32, u32)> = BTreeMap::new();
        let (mut hits, mut total) = (0u32, 0u32);
        let mut outcomes = BTreeMap::new();
        for bill in bills {
            outcomes.insert(bill.id.clone(), reported(bill));
            let r = reported(bill) as u32;
            hits += r;
            total += 1;
            for c in committee_list(bill) {
                let e = counts.entry(c.to_string()).or_default();
                e.0 += r;
                e.1 += 1;
            }
        }
        ReferralRates {
            counts,
            global: if total > 0 { hits as f64 / total as f64 } else { 0.0 },
            outcomes,
        }
    }

    pub fn global(&self) -> f64 {
        self.global
    }

    /// Rate of `committee`. With `exclude`, that fitted bill's own outcome
    /// (as recorded at fit time) is taken back out first. Committees with no
    /// other bills fall back to the global rate.
    pub fn rate(&self, committee: &str, exclude: Option<&Bill>) -> f64 {
        let (mut hits, mut total) = self.counts.get(committee).copied().unwrap_or((0, 0));
        if let Some(bill) = exclude {
            let outcome = self.outcomes.get(&bill.id);
            if let (Some(&r), true) = (outcome, committee_list(bill).any(|c| c == committee)) {
                hits -= r as u32;
                total -= 1;
            }
        }
        if total == 0 {
            self.global
        } else {
            hits as f64 / total as f64
        }
    }
}

fn committee_list(bill: &Bill) -> impl Iterator<Item = &str> {
    let mut seen = HashSet::new();
    bill.committee_ids
        .iter()
        .map(String::as_str)
        .filter(move |c| seen.insert(*c))
}

/// Committee identities, counts, sponsor roles and referral rates.
pub fn committee_features(
    bill: &Bill,
    corpus: &Corpus,
    rates: &ReferralRates,
    leave_out: bool,
) -> Fragment {
    let mut out = Fragment::new();
    let committees: Vec<&str> = committee_list(bill).collect();
    for c in &committees {
        flag(&mut out, format!("cmte:id={c}"));
    }
    if committees.iter().any(|c| corpus.committee(c).is_none()) {
        flag(&mut out, "cmte:unknown_committee");
    }
    out.push(("cmte:num_committees".into(), committees.len() as f64));

    let sponsors: BTreeSet<&str> = bill.sponsor_ids.iter().map(String::as_str).collect();
    let members = sponsors
        .iter()
        .filter_map(|id| corpus.legislator(id))
        .filter(|l| committees.iter().any(|c| l.role_on(c, &bill.session).is_some()))
        .count();
    out.push(("cmte:num_sponsor_members".into(), members as f64));
    if members == 0 {
        flag(&mut out, "cmte:no_cmte_member");
    }

    if let Some(primary) = corpus.legislator(bill.primary_sponsor()) {
        let role: Option<Role> = committees
            .iter()
            .filter_map(|c| primary.role_on(c, &bill.session))
            .max();
        match role {
            Some(r) => {
                flag(&mut out, format!("cmte:sponsor_role={}", r.as_str()));
                flag(&mut out, "cmte:sponsor_on_committee");
            }
            None => flag(&mut out, "cmte:sponsor_role=not_on_committee"),
        }
        let same_party = committees
            .iter()
            .filter_map(|c| corpus.committee(c))
            .any(|c| c.chair_party == primary.party);
        if same_party {
            flag(&mut out, "cmte:same_party_as_chair");
        }
    }

    if !committees.is_empty() {
        let exclude = leave_out.then_some(bill);
        let rate = committees.iter().map(|c| rates.rate(c, exclude)).sum::<f64>() / committees.len() as f64;
        out.push(("cmte:referral_rate".into(), rate));
    }
    out
}

/// First and last introduction date of each session in the training fold.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionCalendars {
    spans: BTreeMap<String, (NaiveDate, NaiveDate)>,
}

impl SessionCalendars {
    pub fn fit(bills: &[&Bill]) -> Self {
        let mut spans: BTreeMap<String, (NaiveDate, NaiveDate)> = BTreeMap::new();
        for b in bills {
            let d = b.introduced_date;
            spans
                .entry(b.session.clone())
                .and_modify(|(lo, hi)| {
                    *lo = (*lo).min(d);
                    *hi = (*hi).max(d);
                })
                .or_insert((d, d));
        }
        SessionCalendars { spans }
    }

    pub fn insert(&mut self, session: &str, start: NaiveDate, end: NaiveDate) {
        self.spans.insert(session.to_string(), (start, end));
    }

    /// Quarter (1..=4) of the session's introduction window containing `date`.
    pub fn quarter(&self, session: &str, date: NaiveDate) -> Option<u8> {
        let &(start, end) = self.spans.get(session)?;
        let span = (end - start).num_days() + 1;
        let offset = (date - start).num_days().clamp(0, span - 1);
        Some((1 + 4 * offset / span) as u8)
    }
}

/// Chamber, type, session, introduction timing and companion information.
pub fn bill_features(bill: &Bill, corpus: &Corpus, calendars: &SessionCalendars) -> Fragment {
    let mut out = Fragment::new();
    flag(&mut out, format!("bill:chamber={}", bill.chamber));
    flag(&mut out, format!("bill:type={}", bill.bill_type.as_str()));
    flag(&mut out, format!("bill:session={}", bill.session));
    flag(&mut out, format!("bill:intro_month={}", bill.introduced_date.month()));
    if let Some(q) = calendars.quarter(&bill.session, bill.introduced_date) {
        flag(&mut out, format!("bill:intro_quarter={q}"));
    }
    let companions: Vec<&Bill> = bill.companion_ids.iter().filter_map(|id| corpus.bill(id)).collect();
    if !companions.is_empty() {
        flag(&mut out, "bill:companion_exists");
        let statuses: BTreeSet<&str> = companions
            .iter()
            .map(|c| {
                if c.introduced_date > bill.introduced_date {
                    "not_yet_introduced"
                } else {
                    c.status_on(bill.introduced_date).unwrap_or(Status::Introduced).as_str()
                }
            })
            .collect();
        for s in statuses {
            flag(&mut out, format!("bill:companion_status={s}"));
        }
    }
    out
}

pub const ACTION_FEATURES: [&str; 7] = [
    "act:referred",
    "act:reported",
    "act:amend_intro",
    "act:amend_adopted",
    "act:amend_rejected",
    "act:vote",
    "act:reading",
];

/// Binary occurrence of each action kind strictly before the first floor
/// action. Repeats count once.
pub fn action_features(bill: &Bill) -> Fragment {
    let cutoff = bill.first_floor_action().unwrap_or(bill.events.len());
    let fired: BTreeSet<&str> = bill.events[..cutoff]
        .iter()
        .filter_map(|e| match e.normalized {
            Status::AssignedToCommittee => Some("act:referred"),
            Status::ReportedFromCommittee => Some("act:reported"),
            Status::AmendmentIntroduced => Some("act:amend_intro"),
            Status::AmendmentAdopted => Some("act:amend_adopted"),
            Status::AmendmentRejected => Some("act:amend_rejected"),
            Status::Vote => Some("act:vote"),
            Status::Reading => Some("act:reading"),
            _ => None,
        })
        .collect();
    fired.into_iter().map(|n| (n.to_string(), 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::{bill, date, event};
    use crate::corpus::{label_floor_action, Chamber, Committee, CommitteeMembership, Legislator};

    fn legislator(id: &str, party: Party, majority: bool) -> Legislator {
        Legislator {
            id: id.to_string(),
            state: "nm".into(),
            chamber: Chamber::Upper,
            party,
            committee_memberships: vec![],
            in_majority: [("2015".to_string(), majority)].into_iter().collect(),
        }
    }

    fn value(frag: &Fragment, name: &str) -> Option<f64> {
        frag.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    #[test]
    fn bipartisan_pair() {
        let mut b = bill("b", vec![]);
        b.sponsor_ids = vec!["d".into(), "r".into()];
        let corpus = Corpus::new(
            vec![b.clone()],
            vec![legislator("d", Party::Dem, true), legislator("r", Party::Rep, false)],
            vec![],
        )
        .unwrap();
        let f = sponsor_features(&b, &corpus, None);
        assert_eq!(value(&f, "spon:bipartisan"), Some(1.0));
        assert_eq!(value(&f, "spon:num_sponsors"), Some(2.0));
        assert_eq!(value(&f, "spon:num_dem"), Some(1.0));
        assert_eq!(value(&f, "spon:num_rep"), Some(1.0));
        assert_eq!(value(&f, "spon:majority_party=dem"), Some(1.0));
    }

    #[test]
    fn lone_majority_sponsor() {
        let b = bill("b", vec![]);
        let corpus = Corpus::new(vec![b.clone()], vec![legislator("s1", Party::Rep, true)], vec![]).unwrap();
        let f = sponsor_features(&b, &corpus, None);
        assert_eq!(value(&f, "spon:in_majority"), Some(1.0));
        assert_eq!(value(&f, "spon:in_minority"), None);
        assert_eq!(value(&f, "spon:bipartisan"), None);
        assert_eq!(value(&f, "spon:unknown_sponsor"), None);
    }

    #[test]
    fn unresolvable_sponsor_is_flagged() {
        let b = bill("b", vec![]);
        let corpus = Corpus::new(vec![b.clone()], vec![], vec![]).unwrap();
        let f = sponsor_features(&b, &corpus, None);
        assert_eq!(value(&f, "spon:unknown_sponsor"), Some(1.0));
    }

    fn committee(id: &str, chair_party: Party) -> Committee {
        Committee {
            id: id.into(),
            state: "nm".into(),
            chamber: Chamber::Upper,
            chair_party,
            referral_rate: None,
        }
    }

    #[test]
    fn chair_sponsor_roles() {
        let mut b = bill("b", vec![]);
        b.committee_ids = vec!["fin".into()];
        let mut chair = legislator("s1", Party::Dem, true);
        chair.committee_memberships.push(CommitteeMembership {
            committee_id: "fin".into(),
            role: Role::Chair,
            session: None,
        });
        let corpus = Corpus::new(vec![b.clone()], vec![chair], vec![committee("fin", Party::Dem)]).unwrap();
        let f = committee_features(&b, &corpus, &ReferralRates::default(), false);
        assert_eq!(value(&f, "cmte:sponsor_role=chair"), Some(1.0));
        assert_eq!(value(&f, "cmte:sponsor_on_committee"), Some(1.0));
        assert_eq!(value(&f, "cmte:same_party_as_chair"), Some(1.0));
        assert_eq!(value(&f, "cmte:no_cmte_member"), None);
    }

    #[test]
    fn no_member_and_unknown_committee() {
        let mut b = bill("b", vec![]);
        b.committee_ids = vec!["ghost".into()];
        let corpus = Corpus::new(vec![b.clone()], vec![legislator("s1", Party::Dem, true)], vec![]).unwrap();
        let f = committee_features(&b, &corpus, &ReferralRates::default(), false);
        assert_eq!(value(&f, "cmte:no_cmte_member"), Some(1.0));
        assert_eq!(value(&f, "cmte:unknown_committee"), Some(1.0));
        assert_eq!(value(&f, "cmte:sponsor_role=not_on_committee"), Some(1.0));
    }

    #[test]
    fn referral_rate_counts_reported_bills() {
        let mk = |id: &str, reported: bool| {
            let events = if reported {
                vec![event(2, Status::ReportedFromCommittee)]
            } else {
                vec![event(2, Status::AssignedToCommittee)]
            };
            let mut b = bill(id, events);
            b.committee_ids = vec!["fin".into()];
            b
        };
        let bills = [mk("a", true), mk("b", true), mk("c", true), mk("d", false)];
        let refs: Vec<&Bill> = bills.iter().collect();
        let rates = ReferralRates::fit(&refs);
        assert_eq!(rates.rate("fin", None), 0.75);
        assert_eq!(rates.rate("fin", Some(&bills[3])), 1.0);
        assert_eq!(rates.rate("other", None), 0.75);
    }

    #[test]
    fn companion_status_snapshot() {
        let mut target = bill("t", vec![]);
        target.introduced_date = date(2015, 1, 10);
        target.companion_ids = vec!["c".into()];
        let mut companion = bill("c", vec![event(3, Status::AssignedToCommittee), event(20, Status::Passed)]);
        companion.chamber = Chamber::Lower;
        companion.label = label_floor_action(&companion);
        let corpus = Corpus::new(vec![target.clone(), companion], vec![], vec![]).unwrap();
        let f = bill_features(&target, &corpus, &SessionCalendars::default());
        assert_eq!(value(&f, "bill:companion_exists"), Some(1.0));
        assert_eq!(value(&f, "bill:companion_status=assigned_to_committee"), Some(1.0));
        assert_eq!(value(&f, "bill:companion_status=passed"), None);

        let lone = bill("l", vec![]);
        let f = bill_features(&lone, &corpus, &SessionCalendars::default());
        assert!(f.iter().all(|(n, _)| !n.starts_with("bill:companion")));
    }

    #[test]
    fn session_quarters() {
        let mut cal = SessionCalendars::default();
        cal.insert("2015", date(2015, 1, 1), date(2015, 4, 30));
        assert_eq!(cal.quarter("2015", date(2015, 1, 5)), Some(1));
        assert_eq!(cal.quarter("2015", date(2015, 4, 30)), Some(4));
        assert_eq!(cal.quarter("2015", date(2015, 3, 1)), Some(2));
        assert_eq!(cal.quarter("2015", date(2014, 12, 1)), Some(1));
        assert_eq!(cal.quarter("2016", date(2016, 1, 1)), None);
        // 120 days: day offsets 0..30 -> 1, 30..60 -> 2, 60..90 -> 3, 90..120 -> 4
        assert_eq!(cal.quarter("2015", date(2015, 3, 2)), Some(3));
    }

    #[test]
    fn action_examples() {
        use Status::*;
        let b = bill("b", vec![event(1, Introduced), event(2, AmendmentIntroduced), event(3, AmendmentAdopted)]);
        let f = action_features(&b);
        assert_eq!(value(&f, "act:amend_intro"), Some(1.0));
        assert_eq!(value(&f, "act:amend_adopted"), Some(1.0));
        assert_eq!(value(&f, "act:vote"), None);

        let passed = bill("p", vec![event(1, Introduced), event(2, Reading), event(3, Reading), event(4, Passed), event(5, Vote)]);
        let f = action_features(&passed);
        assert_eq!(f, vec![("act:reading".to_string(), 1.0)]);
    }
}
