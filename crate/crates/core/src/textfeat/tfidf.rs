use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{extract_ngrams, tokenize_stem};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_TERMS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Title,
    Description,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Title => "title",
            Field::Description => "desc",
        }
    }
}

/// Retained n-grams of one field, sorted lexicographically; a term's id is
/// its position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub field: Field,
    pub terms: Vec<String>,
    pub df: Vec<u32>,
    /// Summed normalized tf-idf weight over the fitted documents.
    pub mass: Vec<f64>,
    pub n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.terms
            .binary_search_by(|t| t.as_str().cmp(term))
            .ok()
            .map(|i| i as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    pub vocabulary: Vocabulary,
    pub idf: Vec<f64>,
}

// Ordered so floating-point sums over a document are reproducible.
fn count_ngrams(text: &str) -> BTreeMap<String, u32> {
    let mut counts = BTreeMap::new();
    for gram in extract_ngrams(&tokenize_stem(text), (1, 3)) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

fn idf(n_docs: usize, df: u32) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Fits a smoothed tf-idf model on `texts` and keeps the `k` n-grams with
/// the most summed tf-idf mass (ties go to the lexicographically smaller
/// n-gram). Pass `usize::MAX` to keep everything.
///
/// ```
/// use floorcast::textfeat::{fit_tfidf, Field};
/// let model = fit_tfidf(&["school meals", "school buses", "road tolls"], Field::Title, 10).unwrap();
/// let x = model.transform("school lunch");
/// assert_eq!(x.len(), 1); // "lunch" was never seen
/// assert!((x[0].1 - 1.0).abs() < 1e-12);
/// ```
pub fn fit_tfidf(texts: &[&str], field: Field, k: usize) -> Result<TfIdfModel> {
    if texts.is_empty() {
        return Err(Error::InvalidInput(format!(
            "cannot fit a {} vocabulary on zero documents",
            field.as_str()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInput("vocabulary size k must be at least 1".into()));
    }

    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut terms: Vec<String> = Vec::new();
    let mut df: Vec<u32> = Vec::new();
    let docs: Vec<Vec<(usize, u32)>> = texts
        .iter()
        .map(|text| {
            let mut doc: Vec<(usize, u32)> = count_ngrams(text)
                .into_iter()
                .map(|(gram, count)| {
                    let id = *ids.entry(gram).or_insert_with_key(|g| {
                        terms.push(g.clone());
                        df.push(0);
                        terms.len() - 1
                    });
                    df[id] += 1;
                    (id, count)
                })
                .collect();
            doc.sort_unstable();
            doc
        })
        .collect();

    let n_docs = texts.len();
    let idf_all: Vec<f64> = df.iter().map(|&d| idf(n_docs, d)).collect();
    let mut mass = vec![0.0; terms.len()];
    for doc in &docs {
        let norm = doc
            .iter()
            .map(|&(t, c)| (c as f64 * idf_all[t]).powi(2))
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 {
            for &(t, c) in doc {
                mass[t] += c as f64 * idf_all[t] / norm;
            }
        }
    }

    let full = Vocabulary {
        field,
        terms,
        df,
        mass,
        n_docs,
    };
    Ok(TfIdfModel::from_vocabulary(full).truncate(k))
}

impl TfIdfModel {
    fn from_vocabulary(mut vocabulary: Vocabulary) -> Self {
        let mut order: Vec<usize> = (0..vocabulary.terms.len()).collect();
        order.sort_by(|&a, &b| vocabulary.terms[a].cmp(&vocabulary.terms[b]));
        vocabulary.terms = order.iter().map(|&i| std::mem::take(&mut vocabulary.terms[i])).collect();
        vocabulary.df = order.iter().map(|&i| vocabulary.df[i]).collect();
        vocabulary.mass = order.iter().map(|&i| vocabulary.mass[i]).collect();
        let idf = vocabulary.df.iter().map(|&d| idf(vocabulary.n_docs, d)).collect();
        TfIdfModel { vocabulary, idf }
    }

    /// Keeps the `k` highest-mass terms.
    pub fn truncate(self, k: usize) -> Self {
        let v = &self.vocabulary;
        if k >= v.len() {
            return self;
        }
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&a, &b| v.mass[b].total_cmp(&v.mass[a]).then_with(|| v.terms[a].cmp(&v.terms[b])));
        let mut keep = order[..k].to_vec();
        keep.sort_unstable();
        let vocabulary = Vocabulary {
            field: v.field,
            terms: keep.iter().map(|&i| v.terms[i].clone()).collect(),
            df: keep.iter().map(|&i| v.df[i]).collect(),
            mass: keep.iter().map(|&i| v.mass[i]).collect(),
            n_docs: v.n_docs,
        };
        TfIdfModel {
            idf: keep.iter().map(|&i| self.idf[i]).collect(),
            vocabulary,
        }
    }

    pub fn field(&self) -> Field {
        self.vocabulary.field
    }

    /// L2-normalized tf-idf weights of the retained n-grams in `text`,
    /// sorted by term id. Unseen n-grams are dropped.
    pub fn transform(&self, text: &str) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = count_ngrams(text)
            .into_iter()
            .filter_map(|(gram, count)| {
                self.vocabulary
                    .id(&gram)
                    .map(|id| (id, count as f64 * self.idf[id as usize]))
            })
            .collect();
        out.sort_unstable_by_key(|&(id, _)| id);
        let norm = out.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in &mut out {
                *w /= norm;
            }
        }
        out
    }

    /// `term<TAB>id<TAB>idf` lines.
    pub fn vocabulary_tsv(&self) -> String {
        let mut out = String::new();
        for (i, term) in self.vocabulary.terms.iter().enumerate() {
            let _ = writeln!(out, "{term}\t{i}\t{:.6}", self.idf[i]);
        }
        out
    }

    pub fn write_vocabulary(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.vocabulary_tsv()).map_err(|e| Error::io(path, e))
    }
}
