use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Bill, Chamber};
use crate::error::{Error, Result};
use crate::textfeat::{fit_tfidf, Field};

pub const DEFAULT_COMPANION_THRESHOLD: f64 = 0.85;

/// Two bills introduced with near-identical text in opposite chambers.
/// `a` is the upper-chamber bill.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanionPair {
    pub a: String,
    pub b: String,
    pub cosine: f64,
}

pub(crate) fn companion_text(bill: &Bill) -> String {
    match &bill.description {
        Some(d) => format!("{} {}", bill.title, d),
        None => bill.title.clone(),
    }
}

/// Pairs bills of the same state and session sitting in opposite chambers
/// whose tf-idf cosine over title and description reaches `threshold`.
///
/// The tf-idf model is fitted per (state, session) group.
pub fn detect_companions(bills: &[Bill], threshold: f64) -> Result<Vec<CompanionPair>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "companion threshold {threshold} is outside (0, 1]"
        )));
    }
    let mut groups: BTreeMap<(&str, &str), Vec<&Bill>> = BTreeMap::new();
    for bill in bills {
        groups
            .entry((bill.state.as_str(), bill.session.as_str()))
            .or_default()
            .push(bill);
    }

    let mut pairs = Vec::new();
    for group in groups.values() {
        let (upper, lower): (Vec<&Bill>, Vec<&Bill>) =
            group.iter().partition(|b| b.chamber == Chamber::Upper);
        if upper.is_empty() || lower.is_empty() {
            continue;
        }
        let texts: Vec<String> = group.iter().map(|b| companion_text(b)).collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let model = fit_tfidf(&refs, Field::Title, usize::MAX)?;

        let mut postings: HashMap<u32, Vec<(usize, f64)>> = HashMap::new();
        for (j, bill) in lower.iter().enumerate() {
            for (t, w) in model.transform(&companion_text(bill)) {
                postings.entry(t).or_default().push((j, w));
            }
        }
        for bill in &upper {
            let mut dots: HashMap<usize, f64> = HashMap::new();
            for (t, w) in model.transform(&companion_text(bill)) {
                for &(j, v) in postings.get(&t).into_iter().flatten() {
                    *dots.entry(j).or_insert(0.0) += w * v;
                }
            }
            let mut hits: Vec<(usize, f64)> = dots
                .into_iter()
                // guard against rounding just under 1.0 for identical text
                .filter(|&(_, c)| c >= threshold - 1e-12)
                .collect();
            hits.sort_by_key(|&(j, _)| j);
            for (j, cosine) in hits {
                pairs.push(CompanionPair {
                    a: bill.id.clone(),
                    b: lower[j].id.clone(),
                    cosine: cosine.min(1.0),
                });
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::bill;
    use crate::textfeat::{extract_ngrams, tokenize_stem};
    use proptest::prelude::*;

    fn make(id: &str, chamber: Chamber, title: &str) -> Bill {
        let mut b = bill(id, vec![]);
        b.chamber = chamber;
        b.title = title.to_string();
        b
    }

    /// Dense tf-idf cosine computed straight from the definitions.
    fn oracle_cosine(docs: &[&str], i: usize, j: usize) -> f64 {
        let grams: Vec<Vec<String>> =
            docs.iter().map(|d| extract_ngrams(&tokenize_stem(d), (1, 3))).collect();
        let mut vocab: Vec<&String> = grams.iter().flatten().collect();
        vocab.sort();
        vocab.dedup();
        let n = docs.len() as f64;
        let vec_of = |g: &Vec<String>| -> Vec<f64> {
            vocab
                .iter()
                .map(|t| {
                    let tf = g.iter().filter(|x| x == t).count() as f64;
                    let df = grams.iter().filter(|d| d.contains(t)).count() as f64;
                    tf * (((1.0 + n) / (1.0 + df)).ln() + 1.0)
                })
                .collect()
        };
        let (u, v) = (vec_of(&grams[i]), vec_of(&grams[j]));
        let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        dot / (nu * nv)
    }

    #[test]
    fn identical_titles_pair_at_any_threshold() {
        let bills = vec![
            make("u", Chamber::Upper, "relating to school bus safety"),
            make("l", Chamber::Lower, "relating to school bus safety"),
        ];
        let pairs = detect_companions(&bills, 1.0).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].cosine - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disjoint_vocabularies_do_not_pair() {
        let bills = vec![
            make("u", Chamber::Upper, "school buses"),
            make("l", Chamber::Lower, "property taxes"),
        ];
        assert!(detect_companions(&bills, 0.01).unwrap().is_empty());
    }

    #[test]
    fn same_chamber_duplicates_do_not_pair() {
        let bills = vec![
            make("u1", Chamber::Upper, "school buses"),
            make("u2", Chamber::Upper, "school buses"),
        ];
        assert!(detect_companions(&bills, 0.5).unwrap().is_empty());
    }

    #[test]
    fn near_duplicate_fixture_gives_one_pair() {
        let docs = [
            "rural broadband access grant fund program rules update annual",
            "broadband access grant fund program rules update annual",
            "rural road safety",
        ];
        let c01 = oracle_cosine(&docs, 0, 1);
        let c02 = oracle_cosine(&docs, 0, 2);
        assert!((c01 - 0.91).abs() < 0.01, "fixture cosine drifted: {c01}");
        assert!(c02 < 0.85);
        let bills = vec![
            make("u", Chamber::Upper, docs[0]),
            make("l1", Chamber::Lower, docs[1]),
            make("l2", Chamber::Lower, docs[2]),
        ];
        let pairs = detect_companions(&bills, 0.85).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].a.as_str(), pairs[0].b.as_str()), ("u", "l1"));
        assert!((pairs[0].cosine - c01).abs() < 1e-9);
    }

    #[test]
    fn empty_input_gives_no_pairs() {
        assert!(detect_companions(&[], 0.85).unwrap().is_empty());
        assert!(detect_companions(&[], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn relation_is_cross_chamber_and_irreflexive(
            titles in prop::collection::vec((prop::sample::select(vec!["tax credit", "school bus", "tax credit school", "road"]), any::<bool>()), 0..10),
            threshold in 0.3f64..1.0,
        ) {
            let bills: Vec<Bill> = titles.iter().enumerate().map(|(i, (t, up))| {
                make(&format!("b{i}"), if *up { Chamber::Upper } else { Chamber::Lower }, t)
            }).collect();
            let pairs = detect_companions(&bills, threshold).unwrap();
            let by_id: HashMap<&str, &Bill> = bills.iter().map(|b| (b.id.as_str(), b)).collect();
            for p in &pairs {
                prop_assert_ne!(&p.a, &p.b);
                prop_assert_ne!(by_id[p.a.as_str()].chamber, by_id[p.b.as_str()].chamber);
                prop_assert!(p.cosine >= threshold - 1e-9);
            }
        }
    }
}
