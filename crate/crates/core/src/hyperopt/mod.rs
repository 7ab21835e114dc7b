//! Sequential model-based hyperparameter search with the tree-structured
//! Parzen estimator, plus the default search spaces of the base models.

mod space;
mod tpe;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use space::{Dimension, ParamValue, Point, SearchSpace};
pub use tpe::{suggest, TpeConfig};

use crate::error::{Error, Result};
use crate::eval::log_loss;
use crate::models::{
    train_base, BaseParams, Dataset, GbmParams, LogLinearParams, ModelKind, NbsvmParams, Regularization,
};
use crate::util::{derive_seed, rng};

/// Objective assigned to a failed trial when nothing has been observed yet.
pub const FIRST_FAILURE_PENALTY: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub id: usize,
    pub point: Point,
    pub objective: f64,
    pub status: TrialStatus,
}

impl Trial {
    /// `trial_id<TAB>params_json<TAB>objective`.
    pub fn log_line(&self) -> String {
        let params = serde_json::to_string(&self.point).expect("points serialize");
        format!("{}\t{}\t{}", self.id, params, self.objective)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimization {
    pub best: Trial,
    pub history: Vec<Trial>,
}

/// Runs `n_trials` suggest/evaluate/observe steps. `objective` returns
/// `None` (or a non-finite value) for a failed evaluation, which is recorded
/// at the worst objective seen so far plus one.
pub fn optimize(
    mut objective: impl FnMut(&Point) -> Option<f64>,
    space: &SearchSpace,
    n_trials: usize,
    seed: u64,
    config: &TpeConfig,
) -> Result<Optimization> {
    if n_trials < 1 {
        return Err(Error::InvalidInput("at least one trial is required".into()));
    }
    let mut r = rng(seed);
    let mut history: Vec<Trial> = Vec::with_capacity(n_trials);
    for id in 0..n_trials {
        let point = suggest(&history, space, config, &mut r);
        let (objective, status) = match objective(&point) {
            Some(v) if v.is_finite() => (v, TrialStatus::Ok),
            _ => {
                let worst = history.iter().map(|t| t.objective).fold(f64::NEG_INFINITY, f64::max);
                let penalty = if worst.is_finite() { worst + 1.0 } else { FIRST_FAILURE_PENALTY };
                (penalty, TrialStatus::Failed)
            }
        };
        history.push(Trial {
            id,
            point,
            objective,
            status,
        });
    }
    let best = history
        .iter()
        .min_by(|a, b| a.objective.total_cmp(&b.objective).then(a.id.cmp(&b.id)))
        .cloned()
        .expect("n_trials >= 1");
    Ok(Optimization { best, history })
}

pub fn trial_log(history: &[Trial]) -> String {
    history.iter().fold(String::new(), |mut s, t| {
        let _ = writeln!(s, "{}", t.log_line());
        s
    })
}

/// Appends the trials to `path`.
pub fn append_trial_log(history: &[Trial], path: &Path) -> Result<()> {
    use std::io::Write;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    f.write_all(trial_log(history).as_bytes()).map_err(|e| Error::io(path, e))
}

/// Default search space of each base model.
pub fn model_space(kind: ModelKind) -> SearchSpace {
    let dims = match kind {
        ModelKind::LogLinear => vec![
            ("lambda".to_string(), Dimension::LogUniform { lo: 1e-4, hi: 1e2 }),
            (
                "regularization".to_string(),
                Dimension::Categorical {
                    choices: vec!["l1".into(), "l2".into()],
                },
            ),
        ],
        ModelKind::Nbsvm => vec![
            ("c".to_string(), Dimension::LogUniform { lo: 1e-3, hi: 1e2 }),
            ("beta".to_string(), Dimension::Uniform { lo: 0.0, hi: 1.0 }),
        ],
        ModelKind::Gbm => vec![
            ("n_trees".to_string(), Dimension::Integer { lo: 50, hi: 500 }),
            ("learning_rate".to_string(), Dimension::LogUniform { lo: 0.01, hi: 0.3 }),
            ("max_depth".to_string(), Dimension::Integer { lo: 2, hi: 8 }),
            ("min_leaf".to_string(), Dimension::Integer { lo: 1, hi: 50 }),
        ],
    };
    SearchSpace::new(dims).expect("built-in spaces are valid")
}

/// Hyperparameters named by `point`.
pub fn params_from_point(kind: ModelKind, point: &Point) -> Result<BaseParams> {
    let real = |name: &str| {
        point
            .get(name)
            .and_then(ParamValue::as_f64)
            .ok_or_else(|| Error::InvalidInput(format!("point lacks numeric `{name}`")))
    };
    Ok(match kind {
        ModelKind::LogLinear => BaseParams::LogLinear(LogLinearParams {
            lambda: real("lambda")?,
            regularization: point
                .get("regularization")
                .and_then(ParamValue::as_str)
                .unwrap_or("l2")
                .parse::<Regularization>()?,
        }),
        ModelKind::Nbsvm => BaseParams::Nbsvm(NbsvmParams {
            c: real("c")?,
            beta: real("beta")?,
            ..Default::default()
        }),
        ModelKind::Gbm => BaseParams::Gbm(GbmParams {
            n_trees: real("n_trees")? as usize,
            learning_rate: real("learning_rate")?,
            max_depth: real("max_depth")? as usize,
            min_leaf: real("min_leaf")? as usize,
            ..Default::default()
        }),
    })
}

/// Result of tuning one base model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tuned {
    pub params: BaseParams,
    pub history: Vec<Trial>,
}

/// Picks hyperparameters for `kind` by development-set log-loss. With
/// `n_trials == 0` the model's defaults are returned untried.
pub fn tune_base(kind: ModelKind, train: &Dataset, dev: &Dataset, n_trials: usize, seed: u64) -> Result<Tuned> {
    if n_trials == 0 {
        return Ok(Tuned {
            params: kind.default_params(),
            history: Vec::new(),
        });
    }
    let space = model_space(kind);
    let fit_seed = derive_seed(seed, &[1]);
    let run = optimize(
        |point| {
            let params = params_from_point(kind, point).ok()?;
            let model = train_base(train, &params, fit_seed).ok()?;
            let probs: Vec<f64> = dev.rows.iter().map(|x| model.predict_proba(x)).collect();
            log_loss(&probs, &dev.labels).ok()
        },
        &space,
        n_trials,
        derive_seed(seed, &[2]),
        &TpeConfig::default(),
    )?;
    let params = if run.best.status == TrialStatus::Ok {
        params_from_point(kind, &run.best.point)?
    } else {
        log::warn!("every {kind} trial failed; falling back to defaults");
        kind.default_params()
    };
    Ok(Tuned {
        params,
        history: run.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::testdata;
    use proptest::prelude::*;
    use rand::Rng;

    fn quadratic_space() -> SearchSpace {
        SearchSpace::new(vec![("x".into(), Dimension::Uniform { lo: -10.0, hi: 10.0 })]).unwrap()
    }

    fn best_distance(history: &[Trial]) -> f64 {
        history
            .iter()
            .map(|t| (t.point["x"].as_f64().unwrap() - 2.0).abs())
            .fold(f64::INFINITY, f64::min)
    }

    fn median(mut v: Vec<f64>) -> f64 {
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(optimize(|_| Some(0.0), &quadratic_space(), 0, 0, &TpeConfig::default()).is_err());
    }

    #[test]
    fn one_trial_evaluates_once() {
        let mut calls = 0;
        let run = optimize(
            |_| {
                calls += 1;
                Some(1.0)
            },
            &quadratic_space(),
            1,
            0,
            &TpeConfig::default(),
        )
        .unwrap();
        assert_eq!(calls, 1);
        assert_eq!(run.history.len(), 1);
    }

    #[test]
    fn constant_objective_keeps_first_trial() {
        let run = optimize(|_| Some(3.0), &quadratic_space(), 30, 4, &TpeConfig::default()).unwrap();
        assert_eq!(run.best.id, 0);
    }

    #[test]
    fn failures_are_penalized() {
        let mut i = 0;
        let run = optimize(
            |_| {
                i += 1;
                match i {
                    1 => None,
                    2 => Some(0.5),
                    3 => Some(0.9),
                    _ => Some(f64::NAN),
                }
            },
            &quadratic_space(),
            4,
            0,
            &TpeConfig::default(),
        )
        .unwrap();
        let obj: Vec<f64> = run.history.iter().map(|t| t.objective).collect();
        assert_eq!(obj, vec![FIRST_FAILURE_PENALTY, 0.5, 0.9, FIRST_FAILURE_PENALTY + 1.0]);
        assert_eq!(run.history[3].status, TrialStatus::Failed);
        assert_eq!(run.best.id, 1);
    }

    #[test]
    fn tpe_beats_random_search_on_a_quadratic() {
        let f = |p: &Point| {
            let x = p["x"].as_f64().unwrap();
            Some((x - 2.0) * (x - 2.0))
        };
        let mut tpe = Vec::new();
        let mut random = Vec::new();
        for seed in 0..20 {
            let run = optimize(f, &quadratic_space(), 60, seed, &TpeConfig::default()).unwrap();
            tpe.push(best_distance(&run.history));
            let mut r = rng(seed);
            random.push((0..60).map(|_| (r.random_range(-10.0..=10.0) - 2.0f64).abs()).fold(f64::INFINITY, f64::min));
        }
        let (mt, mr) = (median(tpe.clone()), median(random));
        assert!(mt < 0.2, "tpe median {mt}");
        assert!(mt < mr, "tpe {mt} vs random {mr}");
        assert!(tpe.iter().filter(|&&d| d < 0.2).count() >= 18);
    }

    #[test]
    fn trial_log_format() {
        let run = optimize(|_| Some(0.25), &model_space(ModelKind::Nbsvm), 2, 0, &TpeConfig::default()).unwrap();
        let log = trial_log(&run.history);
        let lines: Vec<&str> = log.lines().collect();
        assert_eq!(lines.len(), 2);
        let fields: Vec<&str> = lines[0].split('\t').collect();
        assert_eq!(fields[0], "0");
        let params: serde_json::Value = serde_json::from_str(fields[1]).unwrap();
        assert!(params.get("beta").is_some());
        assert_eq!(fields[2], "0.25");

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.tsv");
        append_trial_log(&run.history, &path).unwrap();
        append_trial_log(&run.history, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 4);
    }

    #[test]
    fn model_points_map_to_params() {
        let mut r = rng(0);
        for kind in ModelKind::ALL {
            let space = model_space(kind);
            let p = space.sample_uniform(&mut r);
            assert_eq!(params_from_point(kind, &p).unwrap().kind(), kind);
        }
    }

    #[test]
    fn tuning_returns_a_trained_configuration() {
        let (data, _) = testdata::logistic(6, 200, 6);
        let train = data.subset(&(0..150).collect::<Vec<_>>());
        let dev = data.subset(&(150..200).collect::<Vec<_>>());
        let tuned = tune_base(ModelKind::LogLinear, &train, &dev, 5, 1).unwrap();
        assert_eq!(tuned.history.len(), 5);
        assert_eq!(tune_base(ModelKind::Gbm, &train, &dev, 0, 1).unwrap().params, ModelKind::Gbm.default_params());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn suggestions_respect_bounds(seed in any::<u64>()) {
            let space = SearchSpace::new(vec![
                ("a".into(), Dimension::Uniform { lo: -1.0, hi: 1.0 }),
                ("b".into(), Dimension::LogUniform { lo: 1e-3, hi: 1e2 }),
                ("c".into(), Dimension::Integer { lo: 1, hi: 50 }),
                ("d".into(), Dimension::Categorical { choices: vec!["x".into(), "y".into(), "z".into()] }),
            ]).unwrap();
            let config = TpeConfig { n_startup: 5, ..Default::default() };
            let run = optimize(
                |p| Some(p["a"].as_f64().unwrap().powi(2) + p["c"].as_f64().unwrap()),
                &space, 60, seed, &config,
            ).unwrap();
            for t in &run.history {
                prop_assert!(space.contains(&t.point));
            }
            let again = optimize(
                |p| Some(p["a"].as_f64().unwrap().powi(2) + p["c"].as_f64().unwrap()),
                &space, 60, seed, &config,
            ).unwrap();
            prop_assert_eq!(&run.history, &again.history);
            let mut best = f64::INFINITY;
            for t in &run.history {
                let next = best.min(t.objective);
                prop_assert!(next <= best);
                best = next;
            }
        }
    }
}
