use std::path::Path;

use regex::{Regex, RegexBuilder};

use super::{BillType, Status};
use crate::error::{Error, Result};

const DEFAULT_RULES: &str = include_str!("../../rules/status_map.txt");

const RESOLUTION_TYPES: &[&str] = &[
    "appointment",
    "resolution",
    "joint resolution",
    "concurrent resolution",
    "joint memorial",
    "memorial",
    "proclamation",
    "nomination",
];

const BILL_TYPES: &[&str] = &[
    "bill",
    "amendment",
    "urgency",
    "appropriation",
    "tax levy",
    "constitutional amendment",
];

/// Ordered list of case-insensitive patterns mapping raw action text onto a
/// [`Status`]. The first match wins; text that matches nothing is `Other`.
#[derive(Debug, Clone)]
pub struct StatusRulebook {
    rules: Vec<(Regex, Status)>,
}

impl StatusRulebook {
    pub fn new(rules: Vec<(Regex, Status)>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Config("status rulebook has no rules".into()));
        }
        Ok(StatusRulebook { rules })
    }

    /// Parses `pattern<TAB>STATUS` lines. Blank lines and lines starting with
    /// `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::Config(format!("status rule {}: {message}", n + 1));
            let (pattern, target) = line
                .rsplit_once('\t')
                .ok_or_else(|| bad("expected `pattern<TAB>STATUS`".into()))?;
            let status =
                Status::parse(target).ok_or_else(|| bad(format!("unknown status `{target}`")))?;
            let regex = RegexBuilder::new(pattern)
                .case_insensitive(true)
                .build()
                .map_err(|e| bad(e.to_string()))?;
            rules.push((regex, status));
        }
        Self::new(rules)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

impl Default for StatusRulebook {
    fn default() -> Self {
        Self::parse(DEFAULT_RULES).expect("bundled rulebook parses")
    }
}

pub fn normalize_status(raw_text: &str, rulebook: &StatusRulebook) -> Status {
    rulebook
        .rules
        .iter()
        .find(|(re, _)| re.is_match(raw_text))
        .map_or(Status::Other, |&(_, status)| status)
}

fn fold_type(raw: &str) -> String {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Classifies a raw legislation type, or `None` when it is not a known type.
pub fn classify_bill_type(raw_type: &str) -> Option<BillType> {
    let folded = fold_type(raw_type);
    if RESOLUTION_TYPES.contains(&folded.as_str()) {
        Some(BillType::Resolution)
    } else if BILL_TYPES.contains(&folded.as_str()) {
        Some(BillType::Bill)
    } else {
        None
    }
}

/// Like [`classify_bill_type`] but unknown types fall back to `Bill` with a
/// logged warning.
pub fn normalize_bill_type(raw_type: &str) -> BillType {
    classify_bill_type(raw_type).unwrap_or_else(|| {
        log::warn!("unknown legislation type `{raw_type}`, treating it as a bill");
        BillType::Bill
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_rulebook_examples() {
        let rb = StatusRulebook::default();
        assert_eq!(
            normalize_status("Read first time and referred to Judiciary", &rb),
            Status::AssignedToCommittee
        );
        assert_eq!(normalize_status("Passed", &rb), Status::Passed);
        assert_eq!(normalize_status("", &rb), Status::Other);
        assert_eq!(normalize_status("Reported do pass as amended", &rb), Status::ReportedFromCommittee);
        assert_eq!(normalize_status("Floor amendment 2 adopted", &rb), Status::AmendmentAdopted);
        assert_eq!(normalize_status("Amendment 1 failed", &rb), Status::AmendmentRejected);
        assert_eq!(normalize_status("Committee amendment offered", &rb), Status::AmendmentIntroduced);
        assert_eq!(normalize_status("Roll call 31-7", &rb), Status::Vote);
        assert_eq!(normalize_status("Second reading", &rb), Status::Reading);
        assert_eq!(normalize_status("Introduced and read first time", &rb), Status::Introduced);
        assert_eq!(normalize_status("Signed by Governor", &rb), Status::Enacted);
    }

    #[test]
    fn empty_rulebook_is_a_config_error() {
        assert!(matches!(StatusRulebook::parse("# nothing\n"), Err(Error::Config(_))));
        assert!(matches!(StatusRulebook::new(vec![]), Err(Error::Config(_))));
    }

    #[test]
    fn first_match_wins() {
        let rb = StatusRulebook::parse("pass\tPASSED\npass\tVOTE\n").unwrap();
        assert_eq!(normalize_status("PASS", &rb), Status::Passed);
        assert_eq!(normalize_status("nothing", &rb), Status::Other);
    }

    #[test]
    fn malformed_rules_report_their_line() {
        let err = StatusRulebook::parse("ok\tPASSED\nbroken line\n").unwrap_err();
        assert!(err.to_string().contains("rule 2"), "{err}");
        assert!(StatusRulebook::parse("x\tNOT_A_STATUS").is_err());
    }

    #[test]
    fn bill_types() {
        assert_eq!(normalize_bill_type("joint memorial"), BillType::Resolution);
        assert_eq!(normalize_bill_type("tax levy"), BillType::Bill);
        assert_eq!(normalize_bill_type("Constitutional Amendment"), BillType::Bill);
        assert_eq!(normalize_bill_type("Concurrent_Resolution"), BillType::Resolution);
        assert_eq!(classify_bill_type("widget"), None);
        assert_eq!(normalize_bill_type("widget"), BillType::Bill);
    }

    proptest! {
        #[test]
        fn normalization_is_deterministic(text in ".{0,40}") {
            let a = StatusRulebook::default();
            let b = StatusRulebook::default();
            prop_assert_eq!(normalize_status(&text, &a), normalize_status(&text, &b));
        }
    }
}
