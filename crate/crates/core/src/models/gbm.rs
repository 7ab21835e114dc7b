use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::util::{rng, sigmoid, softplus};

const MAX_BINS: usize = 32;
const LEAF_L2: f64 = 1.0;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Fraction of rows drawn (without replacement) for each tree.
    pub subsample: f64,
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams {
            n_trees: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_leaf: 10,
            subsample: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: u32,
        threshold: f64,
        gain: f64,
        left: u32,
        right: u32,
    },
    Leaf { value: f64 },
}

/// Regression tree stored as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &FeatureVector) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => at = if x.get(*feature) <= *threshold { *left } else { *right } as usize,
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    pub f0: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
}

impl GbmModel {
    /// `F0 + nu * sum t_k(x)`.
    pub fn raw_score(&self, x: &FeatureVector) -> f64 {
        self.f0 + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    /// Total split gain per feature id.
    pub fn gain_by_feature(&self) -> Vec<(u32, f64)> {
        let mut gains = std::collections::BTreeMap::new();
        for tree in &self.trees {
            for node in &tree.nodes {
                if let Node::Split { feature, gain, .. } = node {
                    *gains.entry(*feature).or_insert(0.0) += gain;
                }
            }
        }
        gains.into_iter().collect()
    }
}

pub fn gbm_predict_proba(model: &GbmModel, x: &FeatureVector) -> f64 {
    sigmoid(model.raw_score(x))
}

#[cfg(test)]
/// Binomial deviance `-2 sum log p(y | F)`.
pub(crate) fn deviance(labels: &[bool], scores: &[f64]) -> f64 {
    2.0 * labels
        .iter()
        .zip(scores)
        .map(|(&y, &f)| softplus(f) - if y { f } else { 0.0 })
        .sum::<f64>()
}

/// Per-feature bin edges: `{0}` plus up to `MAX_BINS - 1` quantiles of the
/// nonzero training values. A value's bin is the number of edges below it.
struct Binner {
    cuts: Vec<Vec<f64>>,
    offsets: Vec<usize>,
    zero_bin: Vec<u8>,
}

impl Binner {
    fn fit(data: &Dataset) -> Self {
        let mut values: Vec<Vec<f64>> = vec![Vec::new(); data.dim];
        for x in &data.rows {
            for (j, v) in x.iter() {
                values[j as usize].push(v);
            }
        }
        let mut cuts = Vec::with_capacity(data.dim);
        let mut offsets = Vec::with_capacity(data.dim + 1);
        let mut zero_bin = Vec::with_capacity(data.dim);
        let mut offset = 0;
        for mut vals in values {
            vals.sort_by(f64::total_cmp);
            let mut c = vec![0.0];
            if !vals.is_empty() {
                let q = (MAX_BINS - 1).min(vals.len());
                for i in 0..q {
                    c.push(vals[(i * vals.len()) / q]);
                }
                c.push(*vals.last().expect("nonempty"));
            }
            c.sort_by(f64::total_cmp);
            c.dedup();
            c.truncate(MAX_BINS - 1);
            zero_bin.push(c.iter().filter(|&&e| e < 0.0).count() as u8);
            offsets.push(offset);
            offset += c.len() + 1;
            cuts.push(c);
        }
        offsets.push(offset);
        Binner { cuts, offsets, zero_bin }
    }

    fn bin(&self, feature: usize, v: f64) -> u8 {
        self.cuts[feature].partition_point(|&e| e < v) as u8
    }
}

struct Grower<'a> {
    params: &'a GbmParams,
    binner: &'a Binner,
    rows: &'a [Vec<(u32, u8)>],
    grad: &'a [f64],
    hess: &'a [f64],
    hist_g: Vec<f64>,
    hist_n: Vec<u32>,
    touched: Vec<u32>,
    mark: Vec<bool>,
    nodes: Vec<Node>,
}

struct Candidate {
    feature: u32,
    bin: u8,
    gain: f64,
}

impl Grower<'_> {
    fn grow(&mut self, members: Vec<usize>, depth: usize) -> u32 {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 });
        let split = if depth < self.params.max_depth && members.len() >= 2 * self.params.min_leaf {
            self.best_split(&members)
        } else {
            None
        };
        match split {
            Some(c) => {
                let (left, right): (Vec<usize>, Vec<usize>) = members.into_iter().partition(|&i| {
                    let b = self.rows[i]
                        .binary_search_by_key(&c.feature, |&(f, _)| f)
                        .map_or(self.binner.zero_bin[c.feature as usize], |k| self.rows[i][k].1);
                    b <= c.bin
                });
                let threshold = self.binner.cuts[c.feature as usize][c.bin as usize];
                let l = self.grow(left, depth + 1);
                let r = self.grow(right, depth + 1);
                self.nodes[id] = Node::Split {
                    feature: c.feature,
                    threshold,
                    gain: c.gain,
                    left: l,
                    right: r,
                };
            }
            None => {
                let (g, h): (f64, f64) = members.iter().fold((0.0, 0.0), |(g, h), &i| (g + self.grad[i], h + self.hess[i]));
                self.nodes[id] = Node::Leaf { value: g / (h + LEAF_L2) };
            }
        }
        id as u32
    }

    fn best_split(&mut self, members: &[usize]) -> Option<Candidate> {
        let n = members.len() as f64;
        let total: f64 = members.iter().map(|&i| self.grad[i]).sum();
        for &i in members {
            for &(f, b) in &self.rows[i] {
                if !self.mark[f as usize] {
                    self.mark[f as usize] = true;
                    self.touched.push(f);
                }
                let slot = self.binner.offsets[f as usize] + b as usize;
                self.hist_g[slot] += self.grad[i];
                self.hist_n[slot] += 1;
            }
        }
        self.touched.sort_unstable();
        let min_leaf = self.params.min_leaf.max(1) as u32;
        let mut best: Option<Candidate> = None;
        let base = total * total / n;
        for &f in &self.touched {
            let fu = f as usize;
            let (start, end) = (self.binner.offsets[fu], self.binner.offsets[fu + 1]);
            let explicit: u32 = self.hist_n[start..end].iter().sum();
            // a side made only of explicit entries must reach min_leaf
            if explicit < min_leaf {
                continue;
            }
            let explicit_g: f64 = self.hist_g[start..end].iter().sum();
            let zb = start + self.binner.zero_bin[fu] as usize;
            self.hist_g[zb] += total - explicit_g;
            self.hist_n[zb] += members.len() as u32 - explicit;
            let (mut gl, mut nl) = (0.0, 0u32);
            for slot in start..end - 1 {
                gl += self.hist_g[slot];
                nl += self.hist_n[slot];
                let nr = members.len() as u32 - nl;
                if nl < min_leaf || nr < min_leaf {
                    continue;
                }
                let gr = total - gl;
                let gain = gl * gl / nl as f64 + gr * gr / nr as f64 - base;
                if gain > 1e-12 && best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Candidate {
                        feature: f,
                        bin: (slot - start) as u8,
                        gain,
                    });
                }
            }
        }
        for &f in &self.touched {
            let fu = f as usize;
            let (start, end) = (self.binner.offsets[fu], self.binner.offsets[fu + 1]);
            self.hist_g[start..end].iter_mut().for_each(|v| *v = 0.0);
            self.hist_n[start..end].iter_mut().for_each(|v| *v = 0);
            self.mark[fu] = false;
        }
        self.touched.clear();
        best
    }
}

/// Stagewise boosting on binomial deviance.
///
/// Each tree is fit to the residuals `y - p` with variance-reduction splits on
/// histogram bins; leaf values are the Newton step `sum r / (sum p(1-p) + 1)`.
/// A leaf whose step would raise the deviance of its own rows is halved until
/// it does not, so training deviance never increases from one stage to the
/// next. A single-class training set yields the constant `F0` model.
pub fn gbm_train(data: &Dataset, params: &GbmParams, seed: u64) -> Result<GbmModel> {
    if params.n_trees == 0 {
        return Err(Error::InvalidInput("number of trees must be at least 1".into()));
    }
    if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
        return Err(Error::InvalidInput(format!("learning rate must lie in (0, 1], got {}", params.learning_rate)));
    }
    if !(params.subsample > 0.0 && params.subsample <= 1.0) {
        return Err(Error::InvalidInput(format!("subsample must lie in (0, 1], got {}", params.subsample)));
    }
    if data.len() < 2 * params.min_leaf.max(1) {
        return Err(Error::InvalidInput(format!(
            "{} examples cannot fill two leaves of {}",
            data.len(),
            params.min_leaf
        )));
    }
    let rate = data.positive_rate();
    let f0 = if data.has_both_classes() {
        (rate / (1.0 - rate)).ln()
    } else {
        let r = rate.clamp(1e-6, 1.0 - 1e-6);
        (r / (1.0 - r)).ln()
    };
    let mut model = GbmModel {
        f0,
        learning_rate: params.learning_rate,
        trees: Vec::new(),
    };
    if !data.has_both_classes() {
        log::debug!("single-class training data; GBM reduces to its initial log-odds");
        return Ok(model);
    }

    let binner = Binner::fit(data);
    let rows: Vec<Vec<(u32, u8)>> = data
        .rows
        .iter()
        .map(|x| x.iter().map(|(j, v)| (j, binner.bin(j as usize, v))).collect())
        .collect();
    let n = data.len();
    let y: Vec<f64> = data.labels.iter().map(|&l| l as u8 as f64).collect();
    let mut scores = vec![f0; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let hist_len = *binner.offsets.last().expect("offsets");
    let mut hist_g = vec![0.0; hist_len];
    let mut hist_n = vec![0u32; hist_len];
    let mut mark = vec![false; data.dim];
    let mut r = rng(seed);
    let sample_size = ((params.subsample * n as f64).round() as usize).clamp(2 * params.min_leaf.max(1), n);

    for _ in 0..params.n_trees {
        for i in 0..n {
            let p = sigmoid(scores[i]);
            grad[i] = y[i] - p;
            hess[i] = p * (1.0 - p);
        }
        let members: Vec<usize> = if sample_size < n {
            let mut picked = rand::seq::index::sample(&mut r, n, sample_size).into_vec();
            picked.sort_unstable();
            picked
        } else {
            (0..n).collect()
        };
        let mut grower = Grower {
            params,
            binner: &binner,
            rows: &rows,
            grad: &grad,
            hess: &hess,
            hist_g: std::mem::take(&mut hist_g),
            hist_n: std::mem::take(&mut hist_n),
            touched: Vec::new(),
            mark: std::mem::take(&mut mark),
            nodes: Vec::new(),
        };
        grower.grow(members, 0);
        let Grower {
            hist_g: hg,
            hist_n: hn,
            mark: mk,
            mut nodes,
            ..
        } = grower;
        (hist_g, hist_n, mark) = (hg, hn, mk);

        // route every row, then shrink leaves that would raise their deviance
        let mut tree = Tree { nodes: nodes.clone() };
        let mut by_leaf: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
        for (i, x) in data.rows.iter().enumerate() {
            by_leaf.entry(leaf_of(&tree, x)).or_default().push(i);
        }
        for (leaf, members) in &by_leaf {
            let Node::Leaf { value } = &mut nodes[*leaf] else { unreachable!("routed to a leaf") };
            let before: f64 = members
                .iter()
                .map(|&i| row_deviance(data.labels[i], scores[i]))
                .sum();
            let mut halvings = 0;
            loop {
                let after: f64 = members
                    .iter()
                    .map(|&i| row_deviance(data.labels[i], scores[i] + params.learning_rate * *value))
                    .sum();
                if after <= before || halvings >= MAX_HALVINGS {
                    if after > before {
                        *value = 0.0;
                    }
                    break;
                }
                *value *= 0.5;
                halvings += 1;
            }
            for &i in members {
                scores[i] += params.learning_rate * *value;
            }
        }
        tree.nodes = nodes;
        model.trees.push(tree);
    }
    Ok(model)
}

fn leaf_of(tree: &Tree, x: &FeatureVector) -> usize {
    let mut at = 0usize;
    loop {
        match &tree.nodes[at] {
            Node::Leaf { .. } => return at,
            Node::Split {
                feature,
                threshold,
                left,
                right,
                ..
            } => at = if x.get(*feature) <= *threshold { *left } else { *right } as usize,
        }
    }
}

fn row_deviance(y: bool, f: f64) -> f64 {
    2.0 * (softplus(f) - if y { f } else { 0.0 })
}
