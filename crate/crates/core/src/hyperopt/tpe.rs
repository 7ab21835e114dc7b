use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use super::space::{Dimension, Point, SearchSpace};
use super::Trial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpeConfig {
    /// Fraction of trials forming the "good" density.
    pub gamma: f64,
    /// Trials sampled uniformly before the model kicks in.
    pub n_startup: usize,
    /// Candidates drawn from the good density per suggestion.
    pub n_candidates: usize,
}

impl Default for TpeConfig {
    fn default() -> Self {
        TpeConfig {
            gamma: 0.25,
            n_startup: 20,
            n_candidates: 24,
        }
    }
}

/// Mixture of Gaussians truncated to `[lo, hi]`, one kernel per observation
/// plus a wide prior kernel at the midpoint.
struct Parzen {
    mus: Vec<f64>,
    sigmas: Vec<f64>,
    lo: f64,
    hi: f64,
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

impl Parzen {
    fn fit(observations: &[f64], lo: f64, hi: f64) -> Self {
        let range = hi - lo;
        let mut mus: Vec<f64> = observations.to_vec();
        mus.push(0.5 * (lo + hi));
        let mut order: Vec<usize> = (0..mus.len()).collect();
        order.sort_by(|&a, &b| mus[a].total_cmp(&mus[b]));
        let mut sigmas = vec![0.0; mus.len()];
        for (k, &i) in order.iter().enumerate() {
            let left = if k > 0 { mus[i] - mus[order[k - 1]] } else { mus[i] - lo };
            let right = if k + 1 < order.len() { mus[order[k + 1]] - mus[i] } else { hi - mus[i] };
            sigmas[i] = left.max(right).clamp(range / 50.0, range);
        }
        let prior = mus.len() - 1;
        sigmas[prior] = range;
        Parzen { mus, sigmas, lo, hi }
    }

    fn log_pdf(&self, x: f64) -> f64 {
        let mut total = 0.0;
        for (&mu, &s) in self.mus.iter().zip(&self.sigmas) {
            let z = (x - mu) / s;
            let mass = normal_cdf((self.hi - mu) / s) - normal_cdf((self.lo - mu) / s);
            total += (-0.5 * z * z).exp() / (s * (2.0 * std::f64::consts::PI).sqrt() * mass.max(1e-300));
        }
        (total / self.mus.len() as f64).max(1e-300).ln()
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        let k = rng.random_range(0..self.mus.len());
        let normal = Normal::new(self.mus[k], self.sigmas[k]).expect("positive bandwidth");
        for _ in 0..100 {
            let x = normal.sample(rng);
            if (self.lo..=self.hi).contains(&x) {
                return x;
            }
        }
        self.mus[k].clamp(self.lo, self.hi)
    }
}

/// Smoothed categorical frequencies: one pseudo-count per choice.
struct Frequencies {
    weights: Vec<f64>,
}

impl Frequencies {
    fn fit(observations: &[f64], n_choices: usize) -> Self {
        let mut weights = vec![1.0; n_choices];
        for &o in observations {
            weights[(o as usize).min(n_choices - 1)] += 1.0;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Frequencies { weights }
    }

    fn log_pmf(&self, x: f64) -> f64 {
        self.weights[x as usize].ln()
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        WeightedIndex::new(&self.weights).expect("positive weights").sample(rng) as f64
    }
}

enum Density {
    Continuous(Parzen),
    Discrete(Frequencies),
}

impl Density {
    fn fit(dim: &Dimension, observations: &[f64]) -> Self {
        match (dim, dim.internal_bounds()) {
            (Dimension::Categorical { choices }, _) => Density::Discrete(Frequencies::fit(observations, choices.len())),
            (_, Some((lo, hi))) => Density::Continuous(Parzen::fit(observations, lo, hi)),
            _ => unreachable!("non-categorical dimensions have bounds"),
        }
    }

    fn log_density(&self, x: f64) -> f64 {
        match self {
            Density::Continuous(p) => p.log_pdf(x),
            Density::Discrete(f) => f.log_pmf(x),
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            Density::Continuous(p) => p.sample(rng),
            Density::Discrete(f) => f.sample(rng),
        }
    }
}

/// Proposes the next point.
///
/// With fewer than `n_startup` trials the point is uniform. Otherwise the
/// trials are split at the `gamma` quantile of their objectives, each
/// dimension gets a Parzen density over the good trials and one over the
/// rest, and the candidate (drawn from the good densities) with the highest
/// summed log ratio wins.
pub fn suggest(history: &[Trial], space: &SearchSpace, config: &TpeConfig, rng: &mut impl Rng) -> Point {
    if history.len() < config.n_startup.max(2) {
        return space.sample_uniform(rng);
    }
    let mut order: Vec<&Trial> = history.iter().collect();
    order.sort_by(|a, b| a.objective.total_cmp(&b.objective).then(a.id.cmp(&b.id)));
    let n_good = ((config.gamma * order.len() as f64).ceil() as usize).clamp(1, order.len() - 1);
    let (good, bad) = order.split_at(n_good);

    let models: Vec<(Density, Density)> = space
        .dims()
        .iter()
        .map(|(name, dim)| {
            let coords = |set: &[&Trial]| -> Vec<f64> {
                set.iter()
                    .filter_map(|t| t.point.get(name))
                    .map(|v| dim.to_internal(v))
                    .filter(|u| u.is_finite())
                    .collect()
            };
            (Density::fit(dim, &coords(good)), Density::fit(dim, &coords(bad)))
        })
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..config.n_candidates.max(1) {
        let cand: Vec<f64> = models.iter().map(|(l, _)| l.sample(rng)).collect();
        let score: f64 = cand
            .iter()
            .zip(&models)
            .map(|(&u, (l, g))| l.log_density(u) - g.log_density(u))
            .sum();
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, cand));
        }
    }
    let (_, cand) = best.expect("at least one candidate");
    space
        .dims()
        .iter()
        .zip(cand)
        .map(|((name, dim), u)| (name.clone(), dim.from_internal(u)))
        .collect::<Point>()
}
