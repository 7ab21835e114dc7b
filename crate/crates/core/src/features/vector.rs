use serde::{Deserialize, Serialize};

/// Sparse feature vector: `(id, value)` pairs sorted by id, no duplicates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector {
    entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    /// Sorts by id, sums duplicates and drops zeros and non-finite values.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.retain(|(_, v)| v.is_finite());
        pairs.sort_by_key(|&(id, _)| id);
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(pairs.len());
        for (id, v) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == id => last.1 += v,
                _ => entries.push((id, v)),
            }
        }
        entries.retain(|&(_, v)| v != 0.0);
        FeatureVector { entries }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: u32) -> f64 {
        self.entries
            .binary_search_by_key(&id, |&(i, _)| i)
            .map_or(0.0, |i| self.entries[i].1)
    }

    /// Inner product with a dense weight vector; ids past its end count as 0.
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.entries
            .iter()
            .filter_map(|&(i, v)| w.get(i as usize).map(|wi| wi * v))
            .sum()
    }

    pub fn max_id(&self) -> Option<u32> {
        self.entries.last().map(|&(i, _)| i)
    }

    /// Keeps only ids for which `keep` holds.
    pub fn filtered(&self, keep: impl Fn(u32) -> bool) -> Self {
        FeatureVector {
            entries: self.entries.iter().copied().filter(|&(i, _)| keep(i)).collect(),
        }
    }
}
