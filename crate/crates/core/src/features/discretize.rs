use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util;

pub const RANK_BUCKETS: [&str; 5] = ["top1", "top5", "top10", "top20", "other"];
pub const Z_BUCKETS: [&str; 6] = ["le_m2", "m2_m1", "m1_0", "0_1", "1_2", "gt_2"];

/// Training-fold values of one count feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountPopulation {
    sorted: Vec<f64>,
    mean: f64,
    std: f64,
}

impl CountPopulation {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty population for discretization".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(CountPopulation {
            mean: util::mean(values),
            std: util::std_dev(values),
            sorted,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// 1 + number of population values strictly greater than `value`.
    pub fn rank(&self, value: f64) -> usize {
        1 + self.sorted.len() - self.sorted.partition_point(|&x| x <= value)
    }

    pub fn rank_bucket(&self, value: f64) -> &'static str {
        match self.rank(value) {
            1 => "top1",
            2..=5 => "top5",
            6..=10 => "top10",
            11..=20 => "top20",
            _ => "other",
        }
    }

    /// ceil(10 * fraction of the population at or below `value`), in 1..=10.
    pub fn decile(&self, value: f64) -> u8 {
        let at_or_below = self.sorted.partition_point(|&x| x <= value);
        let d = (10 * at_or_below).div_ceil(self.sorted.len());
        d.clamp(1, 10) as u8
    }

    /// z-score bucket; a zero-variance population puts everything in (-1, 0].
    pub fn z_bucket(&self, value: f64) -> &'static str {
        if self.std == 0.0 {
            return "m1_0";
        }
        let z = (value - self.mean) / self.std;
        if z <= -2.0 {
            "le_m2"
        } else if z <= -1.0 {
            "m2_m1"
        } else if z <= 0.0 {
            "m1_0"
        } else if z <= 1.0 {
            "0_1"
        } else if z <= 2.0 {
            "1_2"
        } else {
            "gt_2"
        }
    }
}

/// Every indicator name `discretize_count` can emit for `name`.
pub fn bucket_names(name: &str) -> Vec<String> {
    let mut out: Vec<String> = RANK_BUCKETS.iter().map(|b| format!("{name}#rank={b}")).collect();
    out.extend((1..=10).map(|d| format!("{name}#decile={d}")));
    out.extend(Z_BUCKETS.iter().map(|b| format!("{name}#z={b}")));
    out
}

/// One rank-bucket, one decile and one z-bucket indicator for `value`.
///
/// ```
/// use floorcast::features::{discretize_count, CountPopulation};
/// let pop = CountPopulation::new(&(1..=100).map(f64::from).collect::<Vec<_>>()).unwrap();
/// let names: Vec<String> = discretize_count("spon:num_sponsors", 73.0, &pop).into_iter().map(|(n, _)| n).collect();
/// assert_eq!(names, ["spon:num_sponsors#rank=other", "spon:num_sponsors#decile=8", "spon:num_sponsors#z=0_1"]);
/// ```
pub fn discretize_count(name: &str, value: f64, population: &CountPopulation) -> Vec<(String, f64)> {
    vec![
        (format!("{name}#rank={}", population.rank_bucket(value)), 1.0),
        (format!("{name}#decile={}", population.decile(value)), 1.0),
        (format!("{name}#z={}", population.z_bucket(value)), 1.0),
    ]
}
