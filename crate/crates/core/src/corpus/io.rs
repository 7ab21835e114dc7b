use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{
    detect_companions, label_floor_action, normalize_bill_type, normalize_status, ActionEvent,
    Bill, Chamber, Committee, Corpus, Label, Legislator, Status, StatusRulebook,
    DEFAULT_COMPANION_THRESHOLD,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Overrides `rules/status_map.txt` and the bundled rulebook.
    pub rulebook: Option<StatusRulebook>,
    /// `None` keeps the companion links stored in the files.
    pub companion_threshold: Option<f64>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            rulebook: None,
            companion_threshold: Some(DEFAULT_COMPANION_THRESHOLD),
        }
    }
}

#[derive(Debug, Deserialize)]
struct EventRecord {
    date: NaiveDate,
    raw_text: String,
    #[serde(default)]
    normalized: Option<Status>,
    #[serde(default)]
    chamber: Option<Chamber>,
    #[serde(default)]
    floor_vote: bool,
}

#[derive(Debug, Deserialize)]
struct BillRecord {
    id: String,
    state: String,
    chamber: Chamber,
    session: String,
    bill_type: String,
    title: String,
    #[serde(default)]
    description: Option<String>,
    sponsor_ids: Vec<String>,
    #[serde(default)]
    committee_ids: Vec<String>,
    introduced_date: NaiveDate,
    #[serde(default)]
    events: Vec<EventRecord>,
    #[serde(default)]
    companion_ids: Vec<String>,
    #[serde(default)]
    label: Option<Label>,
}

/// Directory holding the three record files: `<root>/corpus` when present,
/// otherwise `root` itself.
pub(crate) fn records_dir(root: &Path) -> PathBuf {
    let nested = root.join("corpus");
    if nested.join("bills.jsonl").is_file() {
        nested
    } else {
        root.to_path_buf()
    }
}

fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, record));
    }
    Ok(out)
}

fn normalize_bill(record: BillRecord, rulebook: &StatusRulebook) -> std::result::Result<Bill, String> {
    if record.sponsor_ids.is_empty() {
        return Err("bill has no sponsors".into());
    }
    let mut events: Vec<ActionEvent> = record
        .events
        .into_iter()
        .map(|e| ActionEvent {
            normalized: e
                .normalized
                .unwrap_or_else(|| normalize_status(&e.raw_text, rulebook)),
            date: e.date,
            raw_text: e.raw_text,
            chamber: e.chamber,
            floor_vote: e.floor_vote,
        })
        .collect();
    if let Some(e) = events.iter().find(|e| e.date < record.introduced_date) {
        return Err(format!(
            "event `{}` on {} precedes introduction on {}",
            e.raw_text, e.date, record.introduced_date
        ));
    }
    events.sort_by_key(|e| e.date);
    let mut bill = Bill {
        id: record.id,
        state: record.state.to_ascii_lowercase(),
        chamber: record.chamber,
        session: record.session,
        bill_type: normalize_bill_type(&record.bill_type),
        title: record.title,
        description: record.description,
        sponsor_ids: record.sponsor_ids,
        committee_ids: record.committee_ids,
        introduced_date: record.introduced_date,
        events,
        companion_ids: record.companion_ids,
        label: Label::Failed,
    };
    bill.label = label_floor_action(&bill);
    if record.label.is_some_and(|l| l != bill.label) {
        log::debug!("bill `{}`: stored label disagrees with its timeline, relabelled", bill.id);
    }
    Ok(bill)
}

/// Loads and validates a corpus rooted at `root`.
///
/// Statuses missing from event records are filled in from the rulebook,
/// labels are recomputed from the timelines, and companions are detected
/// unless `options.companion_threshold` is `None`.
pub fn load_corpus(root: &Path, options: &LoadOptions) -> Result<Corpus> {
    let dir = records_dir(root);
    let rulebook = match &options.rulebook {
        Some(rb) => rb.clone(),
        None => {
            let custom = root.join("rules").join("status_map.txt");
            if custom.is_file() {
                StatusRulebook::from_path(&custom)?
            } else {
                StatusRulebook::default()
            }
        }
    };

    let bills_path = dir.join("bills.jsonl");
    let mut bills = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line, record) in read_records::<BillRecord>(&bills_path)? {
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateId {
                kind: "bill",
                id: record.id,
            });
        }
        let bill = normalize_bill(record, &rulebook).map_err(|message| Error::Parse {
            path: bills_path.clone(),
            line,
            message,
        })?;
        bills.push(bill);
    }

    let legislators: Vec<Legislator> = read_records(&dir.join("legislators.jsonl"))?
        .into_iter()
        .map(|(_, l)| l)
        .collect();
    let committees: Vec<Committee> = read_records(&dir.join("committees.jsonl"))?
        .into_iter()
        .map(|(_, c)| c)
        .collect();

    let mut corpus = Corpus::new(bills, legislators, committees)?;
    if let Some(threshold) = options.companion_threshold {
        let pairs = detect_companions(&corpus.bills, threshold)?;
        corpus.set_companions(&pairs);
    }
    log::info!(
        "loaded {} bills, {} legislators, {} committees from {}",
        corpus.bills.len(),
        corpus.legislators.len(),
        corpus.committees.len(),
        dir.display()
    );
    Ok(corpus)
}

fn write_records<'a, T: Serialize + 'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a T>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for record in records {
        serde_json::to_writer(&mut w, record)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `<root>/corpus/{bills,legislators,committees}.jsonl`.
pub fn write_corpus(corpus: &Corpus, root: &Path) -> Result<()> {
    let dir = root.join("corpus");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_records(&dir.join("bills.jsonl"), &corpus.bills)?;
    write_records(&dir.join("legislators.jsonl"), corpus.legislators.values())?;
    write_records(&dir.join("committees.jsonl"), corpus.committees.values())?;
    Ok(())
}
