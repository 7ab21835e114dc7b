//! Acceptance suite. Runs every criterion in order and prints one
//! `PASS`/`FAIL` line per criterion; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use floorcast::cli::{run, Cli, MODEL_SUFFIX};
use floorcast::corpus::{partition_state_chamber, Bill, BillType, Label, Status};
use floorcast::effectiveness::{
    combine_stages, normalize_scores, stage_partial_score, EffectivenessConfig, EffectivenessTable, Stage, StageCounts,
};
use floorcast::eval::{auroc, auroc_of, cross_validate, log_loss, roc_curve, CvConfig};
use floorcast::features::{FeatureSet, FeatureVector, Featurizer, FeaturizerConfig};
use floorcast::hyperopt::{optimize, Dimension, SearchSpace, TpeConfig};
use floorcast::models::{
    gbm_train, interpolate, loglinear_nll_grad, nbsvm_log_count_ratio, nbsvm_train, Dataset, GbmParams, NbsvmParams,
    Regularization,
};
use floorcast::calibration::platt_fit;
use floorcast::synth::{generate, generate_corpus, SynthConfig};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn cli(args: &[&str]) -> std::result::Result<Vec<PathBuf>, String> {
    let parsed = Cli::try_parse_from(std::iter::once("floorcast").chain(args.iter().copied())).map_err(|e| e.to_string())?;
    run(&parsed.command).map_err(|e| e.to_string())
}

fn metric_oracles() -> Check {
    let perfect = log_loss(&[1.0, 0.0, 1.0], &[true, false, true]).unwrap();
    ensure!(perfect == 0.0, "log_loss(perfect) = {perfect}");
    let half = log_loss(&[0.5; 4], &[true, false, true, false]).unwrap();
    ensure!((half - std::f64::consts::LN_2).abs() < 1e-12, "log_loss(0.5) = {half}");
    let mut r = rng(1);
    for fixture in 0..200 {
        let n = r.random_range(2..=200usize);
        let mut labels: Vec<bool> = (0..n).map(|_| r.random_bool(0.4)).collect();
        labels[0] = true;
        labels[1] = false;
        // half the fixtures are tie-heavy
        let scores: Vec<f64> = if fixture % 2 == 0 {
            (0..n).map(|_| r.random_range(0..8) as f64 / 8.0).collect()
        } else {
            (0..n).map(|_| r.random::<f64>()).collect()
        };
        let (mut twice, mut pos, mut neg) = (0u64, 0u64, 0u64);
        for i in 0..n {
            if labels[i] {
                pos += 1;
            } else {
                neg += 1;
            }
            for j in 0..n {
                if labels[i] && !labels[j] {
                    twice += if scores[i] > scores[j] {
                        2
                    } else if scores[i] == scores[j] {
                        1
                    } else {
                        0
                    };
                }
            }
        }
        let brute = twice as f64 / (2.0 * pos as f64 * neg as f64);
        let exact = auroc_of(&scores, &labels).unwrap();
        ensure!(exact == brute, "fixture {fixture}: auroc {exact} vs pairs {brute}");
        let trapezoid = auroc(&roc_curve(&scores, &labels).unwrap());
        ensure!((trapezoid - brute).abs() < 1e-12, "fixture {fixture}: curve area {trapezoid} vs {brute}");
    }
    Ok("log-loss anchors exact; 200 AUROC fixtures match pair counting".into())
}

fn random_sparse(r: &mut ChaCha8Rng, n: usize, d: usize, density: f64) -> Vec<FeatureVector> {
    (0..n)
        .map(|_| {
            let mut pairs = Vec::new();
            for j in 0..d as u32 {
                if r.random_bool(density) {
                    pairs.push((j, r.random_range(-2.0..2.0)));
                }
            }
            FeatureVector::from_pairs(pairs)
        })
        .collect()
}

fn gradient_check() -> Check {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for inst in 0..50 {
        let n = r.random_range(1..=30usize);
        let d = r.random_range(1..=50usize);
        let rows = random_sparse(&mut r, n, d, 0.3);
        let labels = (0..n).map(|_| r.random_bool(0.5)).collect();
        let data = Dataset::new(rows, labels, d).unwrap();
        let reg = if inst % 2 == 0 { Regularization::L2 } else { Regularization::L1 };
        let lambda = r.random_range(0.01..1.0);
        // keep L1 coordinates away from the kink at zero
        let theta: Vec<f64> = (0..=d)
            .map(|_| {
                let v: f64 = r.random_range(-1.0..1.0);
                if v.abs() < 0.05 { 0.05f64.copysign(v) } else { v }
            })
            .collect();
        let (_, grad) = loglinear_nll_grad(&theta, &data, lambda, reg).unwrap();
        let h = 1e-5;
        for j in 0..theta.len() {
            let mut up = theta.clone();
            let mut down = theta.clone();
            up[j] += h;
            down[j] -= h;
            let fu = loglinear_nll_grad(&up, &data, lambda, reg).unwrap().0;
            let fd = loglinear_nll_grad(&down, &data, lambda, reg).unwrap().0;
            let numeric = (fu - fd) / (2.0 * h);
            let rel = (grad[j] - numeric).abs() / grad[j].abs().max(numeric.abs()).max(1e-3);
            worst = worst.max(rel);
        }
    }
    ensure!(worst < 1e-4, "max relative error {worst:e}");
    Ok(format!("max relative error {worst:.2e} over 50 instances"))
}

fn nbsvm_ratio() -> Check {
    // two positives on feature 0, two negatives on feature 1
    let one = |j: u32| FeatureVector::from_pairs(vec![(j, 1.0)]);
    let fixture = Dataset::new(vec![one(0), one(0), one(1), one(1)], vec![true, true, false, false], 2).unwrap();
    let r = nbsvm_log_count_ratio(&fixture, 1.0).unwrap();
    let ln3 = 3f64.ln();
    ensure!((r[0] - ln3).abs() < 1e-15 && (r[1] + ln3).abs() < 1e-15, "fixture r = {r:?}");

    let mut g = rng(3);
    for fixture in 0..100 {
        let n = g.random_range(2..=20usize);
        let d = g.random_range(1..=10usize);
        let rows: Vec<FeatureVector> = (0..n)
            .map(|_| {
                let mut pairs = Vec::new();
                for j in 0..d as u32 {
                    if g.random_bool(0.4) {
                        pairs.push((j, g.random_range(0.1..5.0)));
                    }
                }
                FeatureVector::from_pairs(pairs)
            })
            .collect();
        let labels: Vec<bool> = (0..n).map(|_| g.random_bool(0.5)).collect();
        let alpha = g.random_range(0.1..2.0);
        let count = |class: bool, j: u32| {
            rows.iter().zip(&labels).filter(|&(x, &y)| y == class && x.get(j) != 0.0).count() as f64
        };
        let p: Vec<f64> = (0..d as u32).map(|j| alpha + count(true, j)).collect();
        let q: Vec<f64> = (0..d as u32).map(|j| alpha + count(false, j)).collect();
        let (p1, q1): (f64, f64) = (p.iter().sum(), q.iter().sum());
        let oracle: Vec<f64> = (0..d).map(|j| ((p[j] / p1) / (q[j] / q1)).ln()).collect();
        let data = Dataset::new(rows, labels, d).unwrap();
        let got = nbsvm_log_count_ratio(&data, alpha).unwrap();
        ensure!(got == oracle, "fixture {fixture}: {got:?} vs {oracle:?}");
    }

    let w = [0.5, -2.0, 0.0, 1.5];
    ensure!(interpolate(&w, 1.0) == w, "beta = 1 must return w");
    let mean = (0.5 + 2.0 + 1.5) / 4.0;
    ensure!(interpolate(&w, 0.0) == [mean, -mean, 0.0, mean], "beta = 0 must give uniform magnitudes");

    let rows = random_sparse(&mut g, 80, 12, 0.4);
    let labels: Vec<bool> = rows.iter().map(|x| x.get(0) + x.get(1) > 0.0).collect();
    let data = Dataset::new(rows, labels, 12).unwrap();
    let flat = nbsvm_train(&data, &NbsvmParams { beta: 0.0, ..NbsvmParams::default() }, 0).unwrap();
    let mags: Vec<f64> = flat.w.iter().filter(|v| **v != 0.0).map(|v| v.abs()).collect();
    ensure!(mags.windows(2).all(|m| (m[0] - m[1]).abs() < 1e-12), "beta = 0 model magnitudes differ");
    Ok("ln 3 fixture and 100 counting fixtures exact; beta endpoints hold".into())
}

fn gbm_monotone() -> Check {
    let mut r = rng(4);
    let (n, d) = (2000, 50);
    let rows: Vec<FeatureVector> = (0..n)
        .map(|_| FeatureVector::from_pairs((0..d as u32).map(|j| (j, r.random_range(-1.0..1.0))).collect()))
        .collect();
    let labels: Vec<bool> = rows
        .iter()
        .map(|x| {
            let z = 2.0 * x.get(0) - 1.5 * x.get(1) + 2.0 * (x.get(2) * x.get(3)) + 0.5;
            r.random_bool(sigmoid(z))
        })
        .collect();
    let data = Dataset::new(rows, labels, d).unwrap();
    let params = GbmParams { n_trees: 200, ..GbmParams::default() };
    let model = gbm_train(&data, &params, 11).unwrap();
    ensure!(model.trees.len() == 200, "{} stages", model.trees.len());
    let rate = data.positive_rate();
    ensure!((sigmoid(model.f0) - rate).abs() < 1e-12, "sigmoid(F0) {} vs rate {rate}", sigmoid(model.f0));
    let deviance = |scores: &[f64]| -> f64 {
        2.0 * scores
            .iter()
            .zip(&data.labels)
            .map(|(&f, &y)| (1.0 + f.exp()).ln() - if y { f } else { 0.0 })
            .sum::<f64>()
    };
    let mut scores = vec![model.f0; n];
    let mut prev = deviance(&scores);
    let first = prev;
    for (k, tree) in model.trees.iter().enumerate() {
        for (s, x) in scores.iter_mut().zip(&data.rows) {
            *s += model.learning_rate * tree.predict(x);
        }
        let dev = deviance(&scores);
        ensure!(dev <= prev + 1e-9 * prev.abs(), "stage {k}: deviance rose {prev} -> {dev}");
        prev = dev;
    }
    Ok(format!("deviance {first:.1} -> {prev:.1} over 200 stages, never rising"))
}

fn tpe_beats_random() -> Check {
    let space = SearchSpace::new(vec![("x".into(), Dimension::Uniform { lo: -10.0, hi: 10.0 })]).unwrap();
    let mut tpe = Vec::new();
    let mut random = Vec::new();
    for seed in 0..20u64 {
        let opt = optimize(
            |p| p["x"].as_f64().map(|x| (x - 2.0).powi(2)),
            &space,
            60,
            seed,
            &TpeConfig::default(),
        )
        .unwrap();
        tpe.push(opt.best.objective.sqrt());
        let mut r = rng(1000 + seed);
        let best = (0..60)
            .map(|_| (space.sample_uniform(&mut r)["x"].as_f64().unwrap() - 2.0).abs())
            .fold(f64::INFINITY, f64::min);
        random.push(best);
    }
    let (t, u) = (median(tpe), median(random));
    ensure!(t < 0.2, "TPE median best |x-2| = {t}");
    ensure!(t < u, "TPE {t} not below random {u}");
    Ok(format!("median best |x-2|: TPE {t:.4}, random {u:.4}"))
}

fn platt() -> Check {
    let mut r = rng(6);
    let d = 300;
    let w: Vec<f64> = (0..d).map(|_| r.random_range(-1.5..1.5)).collect();
    let mut make = |n: usize| {
        let rows: Vec<FeatureVector> = (0..n)
            .map(|_| {
                let mut ids: Vec<u32> = (0..15).map(|_| r.random_range(0..d as u32)).collect();
                ids.sort_unstable();
                ids.dedup();
                FeatureVector::from_pairs(ids.into_iter().map(|j| (j, 1.0)).collect())
            })
            .collect();
        let labels: Vec<bool> = rows.iter().map(|x| r.random_bool(sigmoid(x.dot(&w) - 0.3))).collect();
        Dataset::new(rows, labels, d).unwrap()
    };
    let (train, calib, test) = (make(2000), make(1000), make(2000));
    let svm = nbsvm_train(&train, &NbsvmParams::default(), 0).unwrap();
    let margins = |data: &Dataset| -> Vec<f64> { data.rows.iter().map(|x| svm.margin(x)).collect() };
    let scaler = platt_fit(&margins(&calib), &calib.labels).unwrap();
    let test_margins = margins(&test);
    let raw: Vec<f64> = test_margins.iter().map(|&m| sigmoid(m)).collect();
    let scaled: Vec<f64> = test_margins.iter().map(|&m| scaler.apply(m)).collect();
    let (a_raw, a_scaled) = (auroc_of(&test_margins, &test.labels).unwrap(), auroc_of(&scaled, &test.labels).unwrap());
    ensure!(a_raw == a_scaled, "AUROC changed: {a_raw} -> {a_scaled}");
    let (ll_raw, ll_scaled) = (log_loss(&raw, &test.labels).unwrap(), log_loss(&scaled, &test.labels).unwrap());
    ensure!(ll_raw - ll_scaled >= 0.01, "log-loss {ll_raw:.4} -> {ll_scaled:.4}");
    Ok(format!("AUROC {a_raw:.4} unchanged; held-out log-loss {ll_raw:.4} -> {ll_scaled:.4}"))
}

fn single_slice(bills: usize, seed: u64) -> SynthConfig {
    SynthConfig {
        n_states: 1,
        chambers_per_state: 1,
        bills_per_slice: bills,
        seed,
        ..SynthConfig::default()
    }
}

fn stacking() -> Check {
    let syn = generate(&single_slice(5000, 7)).unwrap();
    let slice = &partition_state_chamber(&syn.corpus)[0];
    let config = CvConfig { folds: 5, seed: 7, ..CvConfig::default() };
    let report = cross_validate(&syn.corpus, slice, FeatureSet::Combined, &config).map_err(|e| e.to_string())?;
    ensure!(report.leakage_audit_passed, "leakage audit failed");
    let ll = |m: &str| report.model(m).unwrap().pooled.log_loss;
    let best_base = ["loglinear", "nbsvm", "gbm"].iter().map(|m| ll(m)).fold(f64::INFINITY, f64::min);
    let stacked = ll("stacked");
    ensure!(stacked <= best_base + 0.01, "stacked {stacked:.4} vs best base {best_base:.4}");
    Ok(format!(
        "{} bills: stacked log-loss {stacked:.4}, best base {best_base:.4}; audit passed",
        report.labels.len()
    ))
}

fn tsv_rows(path: &Path) -> Vec<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split('\t').map(str::to_string)).collect())
        .collect()
}

fn end_to_end_ordering() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("synthetic");
    generate_corpus(&SynthConfig::default(), &corpus).unwrap();
    let out = tmp.path().join("eval");
    let (c, o) = (corpus.to_str().unwrap(), out.to_str().unwrap());
    cli(&["evaluate", "--corpus", c, "--out", o, "--feature-set", "all", "--folds", "5", "--seed", "7", "--jobs", "4"])?;
    let rows = tsv_rows(&out.join("summary.tsv"));
    let pooled = |fs: &str, model: &str| -> f64 {
        rows.iter()
            .find(|r| r["feature_set"] == fs && r["model"] == model)
            .map(|r| r["pooled_accuracy"].parse().unwrap())
            .unwrap_or(f64::NAN)
    };
    let baseline = pooled("combined", "baseline");
    let order = ["just_txt", "just_spon", "no_txt_spon", "no_txt", "combined", "combined_act"];
    let mut chain = vec![("baseline", baseline)];
    chain.extend(order.iter().map(|&fs| (fs, pooled(fs, "stacked"))));
    let shown: Vec<String> = chain.iter().map(|(n, a)| format!("{n} {a:.4}")).collect();
    ensure!(chain.windows(2).all(|w| w[0].1 < w[1].1), "order broken: {}", shown.join(" < "));
    let gap = pooled("combined", "stacked") - baseline;
    ensure!(gap >= 0.10, "combined - baseline = {gap:.4}");
    Ok(format!("{}; combined - baseline = {gap:.3}", shown.join(" < ")))
}

fn leakage_guard() -> Check {
    let syn = generate(&single_slice(1000, 9)).unwrap();
    let corpus = &syn.corpus;
    let bills: Vec<&Bill> = corpus.bills.iter().filter(|b| b.bill_type == BillType::Bill).collect();
    let featurizer = Featurizer::fit(corpus, &bills, &[], &FeaturizerConfig::default()).unwrap();
    let mut checked = 0;
    for bill in bills.iter().take(1000) {
        let mut bare = (*bill).clone();
        bare.events.retain(|e| e.date <= bare.introduced_date);
        for spec in FeatureSet::ALL.into_iter().filter(|&s| s != FeatureSet::CombinedAct) {
            let full = featurizer.assemble(corpus, bill, spec).unwrap();
            let stripped = featurizer.assemble(corpus, &bare, spec).unwrap();
            ensure!(full == stripped, "{} under {spec} changed without its later events", bill.id);
        }
        checked += 1;
    }
    ensure!(checked == 1000, "only {checked} bills sampled");
    Ok("1000 bills x 5 feature sets unchanged without post-introduction events".into())
}

fn random_counts(r: &mut ChaCha8Rng) -> [[f64; 2]; 6] {
    let mut out = [[0.0; 2]; 6];
    let (mut b, mut s) = (0.0, 0.0);
    for stage in (0..6).rev() {
        b += r.random_range(0..4) as f64;
        s += r.random_range(0..3) as f64;
        out[stage] = [b, s];
    }
    out
}

/// Furthest stage by walking the timeline independently of the library.
fn walk(bill: &Bill, unicameral: bool) -> usize {
    let mut reached = 0;
    for e in &bill.events {
        let home = e.chamber.is_none_or(|c| c == bill.chamber);
        let stage = match e.normalized {
            Status::ReportedFromCommittee => 1,
            Status::Passed if home && unicameral => 4,
            Status::Passed if home => 3,
            Status::Passed => 4,
            Status::Enacted => 5,
            _ => 0,
        };
        reached = reached.max(stage);
    }
    if bill.label == Label::FloorAction {
        reached = reached.max(2);
    }
    reached
}

fn effectiveness() -> Check {
    let cfg = EffectivenessConfig::default();
    let mut r = rng(10);
    let mut strict = 0;
    for pair in 0..1000 {
        let others = r.random_range(0..6);
        let b = StageCounts { legislator: "b".into(), counts: random_counts(&mut r) };
        let extra = random_counts(&mut r);
        let mut a = StageCounts { legislator: "a".into(), counts: b.counts };
        for s in 0..6 {
            for k in 0..2 {
                a.counts[s][k] += extra[s][k];
            }
        }
        let mut chamber: Vec<StageCounts> = (0..others)
            .map(|i| StageCounts { legislator: format!("o{i}"), counts: random_counts(&mut r) })
            .collect();
        chamber.push(a.clone());
        chamber.push(b.clone());
        let raw: Vec<f64> = chamber
            .iter()
            .map(|m| {
                let partials = Stage::ALL.map(|s| stage_partial_score(m, &chamber, s, &cfg));
                combine_stages(&partials, &cfg.stage_weights)
            })
            .collect();
        let norm = normalize_scores(&raw);
        let (na, nb) = (norm[others], norm[others + 1]);
        ensure!(norm.iter().all(|v| (0.0..=10.0).contains(v)), "pair {pair}: score out of range");
        ensure!(na >= nb, "pair {pair}: dominating legislator scored {na} < {nb}");
        strict += (raw[others] > raw[others + 1]) as usize;
    }

    let syn = generate(&SynthConfig { n_states: 2, bills_per_slice: 300, sessions: 3, ..SynthConfig::default() }).unwrap();
    let corpus = &syn.corpus;
    let all: Vec<&Bill> = corpus.bills.iter().collect();
    let table = EffectivenessTable::fit(corpus, &all, &cfg);
    let mut scored = 0;
    for s in table.scores() {
        ensure!((0.0..=10.0).contains(&s.normalized), "{} scored {}", s.legislator, s.normalized);
        let mut recount = [[0.0; 2]; 6];
        for bill in corpus.bills.iter().filter(|b| {
            b.primary_sponsor() == s.legislator && b.session == s.session && b.state == s.state && b.chamber == s.chamber
        }) {
            let column = (bill.bill_type == BillType::Resolution) as usize;
            for row in recount.iter_mut().take(walk(bill, corpus.is_unicameral(&bill.state)) + 1) {
                row[column] += 1.0;
            }
        }
        ensure!(recount == s.counts.counts, "{} {}: factors {:?} vs walk {:?}", s.legislator, s.session, s.counts.counts, recount);
        scored += 1;
    }
    ensure!(scored > 0, "no scores fitted");
    Ok(format!("1000 dominance pairs hold ({strict} strict); {scored} legislator-sessions recounted"))
}

fn model_count() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("mini");
    let config = SynthConfig {
        n_states: 51,
        unicameral_states: 2,
        sessions: 1,
        bills_per_slice: 40,
        resolutions_per_slice: 4,
        legislators_per_chamber: 8,
        committees_per_chamber: 2,
        vocab_size: 40,
        seed: 11,
        ..SynthConfig::default()
    };
    generate_corpus(&config, &corpus).unwrap();
    let out = tmp.path().join("models");
    let (c, o) = (corpus.to_str().unwrap(), out.to_str().unwrap());
    cli(&["train", "--corpus", c, "--out", o, "--feature-set", "just_spon", "--seed", "3", "--jobs", "4"])?;
    let root = out.join("models").join("just_spon");
    let mut slices = 0;
    let mut models = 0;
    for entry in std::fs::read_dir(&root).unwrap() {
        let dir = entry.unwrap().path();
        slices += 1;
        let here = std::fs::read_dir(&dir)
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(MODEL_SUFFIX))
            .count();
        ensure!(here == 4, "{} holds {here} models", dir.display());
        models += here;
    }
    ensure!(slices == 100, "{slices} slices");
    ensure!(models == 400, "{models} models");
    Ok("49 bicameral + 2 unicameral states -> 100 slices, 400 model files".into())
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("c");
    generate_corpus(
        &SynthConfig { n_states: 2, sessions: 2, bills_per_slice: 150, seed: 5, ..SynthConfig::default() },
        &corpus,
    )
    .unwrap();
    let c = corpus.to_str().unwrap();
    let runs: Vec<PathBuf> = ["a", "b"].iter().map(|n| tmp.path().join(n)).collect();
    for out in &runs {
        cli(&[
            "evaluate", "--corpus", c, "--out", out.to_str().unwrap(), "--feature-set", "combined,no_txt", "--folds", "3",
            "--seed", "12", "--per-fold", "--jobs", "4",
        ])?;
    }
    let (fa, fb) = (files_under(&runs[0]), files_under(&runs[1]));
    ensure!(fa == fb && !fa.is_empty(), "different file sets");
    for f in &fa {
        let (x, y) = (std::fs::read(runs[0].join(f)).unwrap(), std::fs::read(runs[1].join(f)).unwrap());
        ensure!(x == y, "{} differs", f.display());
    }
    Ok(format!("{} report files byte-identical across two runs", fa.len()))
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let mins = |m: u64| Duration::from_secs(60 * m);
    let criteria = [
        Criterion { name: "metric oracles", limit: Duration::from_secs(5), run: metric_oracles },
        Criterion { name: "log-linear gradient check", limit: Duration::from_secs(10), run: gradient_check },
        Criterion { name: "NBSVM log-count ratio", limit: Duration::from_secs(5), run: nbsvm_ratio },
        Criterion { name: "GBM deviance and base rate", limit: Duration::from_secs(60), run: gbm_monotone },
        Criterion { name: "TPE versus random search", limit: Duration::from_secs(30), run: tpe_beats_random },
        Criterion { name: "Platt scaling", limit: Duration::from_secs(30), run: platt },
        Criterion { name: "stacking and leakage audit", limit: mins(5), run: stacking },
        Criterion { name: "end-to-end feature-set ordering", limit: mins(30), run: end_to_end_ordering },
        Criterion { name: "post-introduction leakage guard", limit: Duration::from_secs(10), run: leakage_guard },
        Criterion { name: "effectiveness scores", limit: Duration::from_secs(10), run: effectiveness },
        Criterion { name: "model-count census", limit: mins(10), run: model_count },
        Criterion { name: "evaluate determinism", limit: mins(10), run: determinism },
    ];
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    println!("acceptance: {} criteria, {cores} core(s) available", criteria.len());
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > c.limit => Err(format!("{detail}; took {took:.1?}, limit {:?}", c.limit)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {} ({took:.1?}): {detail}", c.name),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {} ({took:.1?}): {why}", c.name);
            }
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}

