use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::util::rng;

/// Stratified k-fold split. Returns the held-out indices of each fold,
/// sorted ascending. Each class is shuffled and dealt round-robin, so fold
/// sizes differ by at most one and every fold's class balance matches the
/// whole within one example per class.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {k}")));
    }
    if k > labels.len() {
        return Err(Error::InvalidInput(format!(
            "{k} folds requested for {} examples",
            labels.len()
        )));
    }
    let mut r = rng(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut r);
        for i in idx {
            folds[next % k].push(i);
            next += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Training indices for fold `held_out`: everything not in it, ascending.
pub fn complement(folds: &[Vec<usize>], held_out: usize) -> Vec<usize> {
    let mut out: Vec<usize> = folds
        .iter()
        .enumerate()
        .filter(|&(f, _)| f != held_out)
        .flat_map(|(_, idx)| idx.iter().copied())
        .collect();
    out.sort_unstable();
    out
}

/// Largest fold count in `2..=k` that leaves every class in every fold;
/// `None` when a class has fewer than two examples.
pub fn feasible_folds(labels: &[bool], k: usize) -> Option<usize> {
    let pos = labels.iter().filter(|&&y| y).count();
    let smallest = pos.min(labels.len() - pos);
    (smallest >= 2).then(|| k.min(smallest).max(2))
}
