use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Chamber, Corpus};

/// All bills of one (state, chamber); the unit a separate model is built for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberSlice {
    pub state: String,
    pub chamber: Chamber,
    /// Positions into [`Corpus::bills`], in corpus order.
    pub bills: Vec<usize>,
    pub sessions: BTreeSet<String>,
}

impl ChamberSlice {
    /// Stable slice name such as `ca_upper`.
    pub fn id(&self) -> String {
        format!("{}_{}", self.state, self.chamber)
    }
}

/// Splits the corpus by (state, chamber). Every bill lands in exactly one
/// slice; slices come out ordered by state, upper chamber first.
pub fn partition_state_chamber(corpus: &Corpus) -> Vec<ChamberSlice> {
    let mut groups: BTreeMap<(String, Chamber), ChamberSlice> = BTreeMap::new();
    for (i, bill) in corpus.bills.iter().enumerate() {
        let slice = groups
            .entry((bill.state.clone(), bill.chamber))
            .or_insert_with(|| ChamberSlice {
                state: bill.state.clone(),
                chamber: bill.chamber,
                bills: Vec::new(),
                sessions: BTreeSet::new(),
            });
        slice.bills.push(i);
        slice.sessions.insert(bill.session.clone());
    }
    groups.into_values().collect()
}
