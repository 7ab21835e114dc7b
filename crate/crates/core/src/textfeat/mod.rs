//! Lexical features from titles and descriptions.
//!
//! Text is lowercased, split on non-alphanumerics and Porter-stemmed, then
//! turned into (1,3)-grams weighted by smoothed tf-idf. Each field keeps its
//! own vocabulary, truncated to the `k` n-grams carrying the most tf-idf
//! mass on the training documents.

mod tfidf;

pub use tfidf::{fit_tfidf, Field, TfIdfModel, Vocabulary, DEFAULT_MAX_TERMS};

/// Token that replaces every all-digit token.
pub const NUMBER_TOKEN: &str = "<num>";

/// Lowercases, splits on anything that is not alphanumeric, maps numbers to
/// [`NUMBER_TOKEN`] and Porter-stems the rest.
///
/// ```
/// use floorcast::textfeat::tokenize_stem;
/// assert_eq!(tokenize_stem("Registration Plates"), ["registr", "plate"]);
/// assert_eq!(tokenize_stem("FY 2016 budget"), ["fy", "<num>", "budget"]);
/// ```
pub fn tokenize_stem(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if t.chars().all(|c| c.is_ascii_digit()) {
                NUMBER_TOKEN.to_string()
            } else {
                porter_stemmer::stem(&t.to_lowercase())
            }
        })
        .collect()
}

/// Contiguous n-grams with `lo <= n <= hi`, joined by single spaces, in order
/// of length then position. Duplicates are kept.
pub fn extract_ngrams(tokens: &[String], (lo, hi): (usize, usize)) -> Vec<String> {
    let mut out = Vec::new();
    for n in lo.max(1)..=hi {
        if n > tokens.len() {
            break;
        }
        out.extend(tokens.windows(n).map(|w| w.join(" ")));
    }
    out
}
