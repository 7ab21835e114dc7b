//! Command-line front end: `synth`, `ingest`, `featurize`, `train`,
//! `evaluate` and `analyze`.
//!
//! Every artifact lands under `--out`:
//!
//! ```text
//! synth      corpus/*.jsonl, manifest.json
//! ingest     corpus/*.jsonl (normalized), labels.tsv
//! featurize  features/<set>/<state>_<chamber>/{registry.tsv,vectors.tsv}
//! train      models/<set>/<state>_<chamber>/{registry.json,<model>.model.json}
//! evaluate   report.tsv, summary.tsv, per_fold.tsv, predictions/, roc/, calibration/
//! analyze    analysis/{ranks.tsv,slice_ranks.tsv,phrases_<state>_<chamber>.tsv}
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::analysis::{
    features_in_group, median_rank_across, phrases_tsv, rank_trained, ranks_tsv, slice_ranks_tsv, top_bottom_phrases,
    FeatureRankTable, MedianRank, DEFAULT_PHRASES,
};
use crate::corpus::{load_corpus, partition_state_chamber, write_corpus, Chamber, ChamberSlice, Corpus, LoadOptions};
use crate::ensemble::{train_stacked, TrainedModel, DEFAULT_INNER_FOLDS, DEFAULT_META_LAMBDA};
use crate::error::{Error, Result};
use crate::eval::{build_dataset, cross_validate, slice_bills, tune_all, write_reports, CvConfig};
use crate::features::{FeatureRegistry, FeatureSet, Featurizer, FeaturizerConfig, Group};
use crate::models::{BaseModel, ModelContainer, ModelKind};
use crate::synth::{generate_corpus, SignalWeights, SynthConfig};
use crate::util::{derive_seed, fnv1a};

/// Suffix of trained model containers.
pub const MODEL_SUFFIX: &str = ".model.json";
pub const LOG_ENV: &str = "FLOORCAST_LOG";

#[derive(Debug, Parser)]
#[command(name = "floorcast", version, about = "Predict which state bills reach floor action")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus with planted signal.
    Synth(SynthArgs),
    /// Validate a corpus, normalize statuses and recompute labels.
    Ingest(RunArgs),
    /// Fit featurizers per slice and write registries and vectors.
    Featurize(RunArgs),
    /// Train the base models and the stack per slice.
    Train(RunArgs),
    /// Cross-validate per slice and write reports.
    Evaluate(RunArgs),
    /// Rank features and extract phrases from trained models.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Corpus root (a directory holding `corpus/` or the jsonl files).
    #[arg(long, default_value = ".")]
    pub corpus: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Comma-separated feature sets, or `all`.
    #[arg(long = "feature-set", value_delimiter = ',')]
    pub feature_set: Vec<String>,
    /// Comma-separated state codes.
    #[arg(long, value_delimiter = ',')]
    pub states: Vec<String>,
    #[arg(long)]
    pub chamber: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Hyperparameter trials per base model; 0 keeps the defaults.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long = "weight-by-count")]
    pub weight_by_count: bool,
    #[arg(long = "per-fold")]
    pub per_fold: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Also write the top and bottom phrases of each just_txt log-linear model.
    #[arg(long)]
    pub phrases: bool,
    /// Phrases per list.
    #[arg(long, default_value_t = DEFAULT_PHRASES)]
    pub top: usize,
    /// Model whose importances are ranked.
    #[arg(long, default_value = "gbm")]
    pub model: String,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "n-states", default_value_t = 10)]
    pub n_states: usize,
    /// 1 or 2.
    #[arg(long, default_value_t = 2)]
    pub chambers: usize,
    #[arg(long, default_value_t = 0)]
    pub unicameral: usize,
    #[arg(long, default_value_t = 10)]
    pub sessions: usize,
    #[arg(long = "bills-per-slice", default_value_t = 1000)]
    pub bills_per_slice: usize,
    #[arg(long = "resolutions-per-slice", default_value_t = 50)]
    pub resolutions_per_slice: usize,
    #[arg(long = "base-rate", default_value_t = 0.41)]
    pub base_rate: f64,
    /// Plant no signal in any channel.
    #[arg(long = "no-signal")]
    pub no_signal: bool,
}

impl SynthArgs {
    pub fn config(&self) -> SynthConfig {
        SynthConfig {
            n_states: self.n_states,
            chambers_per_state: self.chambers,
            unicameral_states: self.unicameral,
            sessions: self.sessions,
            bills_per_slice: self.bills_per_slice,
            resolutions_per_slice: self.resolutions_per_slice,
            base_rate: self.base_rate,
            weights: if self.no_signal { SignalWeights::NONE } else { SignalWeights::default() },
            seed: self.seed,
            ..SynthConfig::default()
        }
    }
}

/// Validated settings shared by the corpus-reading subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub out: PathBuf,
    /// Empty means the subcommand's default.
    pub feature_sets: Vec<FeatureSet>,
    pub states: Vec<String>,
    pub chamber: Option<Chamber>,
    pub folds: usize,
    pub trials: usize,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub weight_by_count: bool,
    pub per_fold: bool,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let mut feature_sets = Vec::new();
        for name in &args.feature_set {
            if name.eq_ignore_ascii_case("all") {
                feature_sets.extend(FeatureSet::ALL);
            } else {
                feature_sets.push(name.parse().map_err(|_| Error::Config(format!("unknown feature set `{name}`")))?);
            }
        }
        feature_sets.dedup();
        if args.folds < 2 {
            return Err(Error::Config(format!("--folds must be at least 2, got {}", args.folds)));
        }
        let chamber = match &args.chamber {
            None => None,
            Some(c) if c == "both" => None,
            Some(c) => Some(c.parse().map_err(|_| Error::Config(format!("unknown chamber `{c}`")))?),
        };
        Ok(RunConfig {
            corpus: args.corpus.clone(),
            out: args.out.clone(),
            feature_sets,
            states: args.states.iter().map(|s| s.trim().to_ascii_lowercase()).collect(),
            chamber,
            folds: args.folds,
            trials: args.trials,
            seed: args.seed,
            jobs: args.jobs,
            weight_by_count: args.weight_by_count,
            per_fold: args.per_fold,
        })
    }

    fn seed(&self, command: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config(format!("`{command}` trains models and needs --seed")))
    }

    fn sets_or(&self, default: &[FeatureSet]) -> Vec<FeatureSet> {
        if self.feature_sets.is_empty() {
            default.to_vec()
        } else {
            self.feature_sets.clone()
        }
    }

    fn wants(&self, slice: &ChamberSlice) -> bool {
        (self.states.is_empty() || self.states.iter().any(|s| s.eq_ignore_ascii_case(&slice.state)))
            && self.chamber.is_none_or(|c| c == slice.chamber)
    }

    fn slices(&self, corpus: &Corpus) -> Result<Vec<ChamberSlice>> {
        let slices: Vec<ChamberSlice> = partition_state_chamber(corpus).into_iter().filter(|s| self.wants(s)).collect();
        if slices.is_empty() {
            return Err(Error::InvalidInput("no slice matches --states / --chamber".into()));
        }
        Ok(slices)
    }

    fn load(&self) -> Result<Corpus> {
        load_corpus(&self.corpus, &LoadOptions::default())
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn slice_seed(seed: u64, slice: &ChamberSlice, spec: FeatureSet) -> u64 {
    derive_seed(seed, &[fnv1a(&slice.id()), fnv1a(spec.as_str())])
}

pub fn synth(args: &SynthArgs) -> Result<Vec<PathBuf>> {
    let config = args.config();
    generate_corpus(&config, &args.out)?;
    let dir = args.out.join("corpus");
    Ok(vec![
        dir.join("bills.jsonl"),
        dir.join("legislators.jsonl"),
        dir.join("committees.jsonl"),
        args.out.join("manifest.json"),
    ])
}

pub fn ingest(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let corpus = config.load()?;
    write_corpus(&corpus, &config.out)?;
    let mut labels = String::from("bill_id\tstate\tchamber\tsession\tbill_type\tlabel\n");
    for b in &corpus.bills {
        let _ = writeln!(
            labels,
            "{}\t{}\t{}\t{}\t{}\t{}",
            b.id,
            b.state,
            b.chamber,
            b.session,
            b.bill_type.as_str(),
            b.label.is_positive() as u8
        );
    }
    let path = config.out.join("labels.tsv");
    write_file(&path, &labels)?;
    let dir = config.out.join("corpus");
    Ok(vec![
        dir.join("bills.jsonl"),
        dir.join("legislators.jsonl"),
        dir.join("committees.jsonl"),
        path,
    ])
}

pub fn featurize(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let corpus = config.load()?;
    let slices = config.slices(&corpus)?;
    let jobs: Vec<(FeatureSet, &ChamberSlice)> = config
        .sets_or(&[FeatureSet::Combined])
        .into_iter()
        .flat_map(|fs| slices.iter().map(move |s| (fs, s)))
        .collect();
    let written = jobs
        .par_iter()
        .map(|&(fs, slice)| {
            let (targets, extra) = slice_bills(&corpus, slice);
            let featurizer = Featurizer::fit(&corpus, &targets, &extra, &FeaturizerConfig::default())?;
            let data = build_dataset(&featurizer, &corpus, &targets, fs)?;
            let mut vectors = String::from("bill_id\tlabel\tfeatures\n");
            for (bill, row) in targets.iter().zip(&data.rows) {
                let cells: Vec<String> = row.iter().map(|(j, v)| format!("{j}:{v}")).collect();
                let _ = writeln!(vectors, "{}\t{}\t{}", bill.id, bill.label.is_positive() as u8, cells.join(" "));
            }
            let dir = config.out.join("features").join(fs.as_str()).join(slice.id());
            write_file(&dir.join("registry.tsv"), &featurizer.registry.manifest())?;
            write_file(&dir.join("vectors.tsv"), &vectors)?;
            Ok(vec![dir.join("registry.tsv"), dir.join("vectors.tsv")])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(written.into_iter().flatten().collect())
}

fn train_slice(corpus: &Corpus, slice: &ChamberSlice, fs: FeatureSet, config: &RunConfig, seed: u64) -> Result<Vec<PathBuf>> {
    let (targets, extra) = slice_bills(corpus, slice);
    let featurizer = Featurizer::fit(corpus, &targets, &extra, &FeaturizerConfig::default())?;
    let data = build_dataset(&featurizer, corpus, &targets, fs)?;
    if !data.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let seed = slice_seed(seed, slice, fs);
    let params = tune_all(&data, config.trials, derive_seed(seed, &[1]))?;
    let stack = train_stacked(&data, &params, DEFAULT_INNER_FOLDS, DEFAULT_META_LAMBDA, derive_seed(seed, &[2]))?;

    let dir = config.out.join("models").join(fs.as_str()).join(slice.id());
    let registry_path = dir.join("registry.json");
    write_file(&registry_path, &(serde_json::to_string(&featurizer.registry)? + "\n"))?;
    let hash = featurizer.registry.hash();
    let mut written = vec![registry_path];
    for (base, p) in stack.model.bases.iter().zip(&params) {
        let path = dir.join(format!("{}{MODEL_SUFFIX}", base.kind()));
        ModelContainer::new(base.kind().as_str(), &hash, serde_json::to_value(p)?, TrainedModel::Base(base.clone()))
            .save(&path)?;
        written.push(path);
    }
    let hyper = serde_json::json!({
        "bases": params,
        "inner_folds": DEFAULT_INNER_FOLDS,
        "meta_lambda": DEFAULT_META_LAMBDA,
    });
    let path = dir.join(format!("stacked{MODEL_SUFFIX}"));
    ModelContainer::new("stacked", &hash, hyper, TrainedModel::Stacked(stack.model)).save(&path)?;
    written.push(path);
    Ok(written)
}

/// Trains every requested (slice, feature set). Slices that cannot be
/// trained are reported together after the others finish.
pub fn train(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let seed = config.seed("train")?;
    let corpus = config.load()?;
    let slices = config.slices(&corpus)?;
    let jobs: Vec<(FeatureSet, &ChamberSlice)> = config
        .sets_or(&[FeatureSet::Combined])
        .into_iter()
        .flat_map(|fs| slices.iter().map(move |s| (fs, s)))
        .collect();
    let results: Vec<(String, Result<Vec<PathBuf>>)> = jobs
        .par_iter()
        .map(|&(fs, slice)| {
            (
                format!("{}/{fs}", slice.id()),
                train_slice(&corpus, slice, fs, config, seed),
            )
        })
        .collect();
    let mut written = Vec::new();
    let mut failed = Vec::new();
    for (name, r) in results {
        match r {
            Ok(paths) => written.extend(paths),
            Err(e) => {
                log::error!("{name}: {e}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        return Err(Error::InvalidInput(format!("training failed for {}", failed.join(", "))));
    }
    Ok(written)
}

pub fn evaluate(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let seed = config.seed("evaluate")?;
    let corpus = config.load()?;
    let slices = config.slices(&corpus)?;
    let cv = CvConfig {
        folds: config.folds,
        trials: config.trials,
        seed,
        ..CvConfig::default()
    };
    let jobs: Vec<(FeatureSet, &ChamberSlice)> = config
        .sets_or(&FeatureSet::ALL)
        .into_iter()
        .flat_map(|fs| slices.iter().map(move |s| (fs, s)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(fs, slice)| {
            log::info!("evaluating {} under {fs}", slice.id());
            cross_validate(&corpus, slice, fs, &cv)
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(r) = reports.iter().find(|r| !r.leakage_audit_passed) {
        return Err(Error::InvalidInput(format!("leakage audit failed for {}", r.slice_id())));
    }
    write_reports(&reports, &config.out, config.weight_by_count, config.per_fold)
}

/// Slice directories under `models/<set>`, sorted.
fn model_dirs(out: &Path, fs: FeatureSet) -> Result<Vec<PathBuf>> {
    let root = out.join("models").join(fs.as_str());
    if !root.is_dir() {
        return Ok(Vec::new());
    }
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(&root)
        .map_err(|e| Error::io(&root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    Ok(dirs)
}

fn load_trained(dir: &Path, model: &str) -> Result<(FeatureRegistry, TrainedModel)> {
    let registry_path = dir.join("registry.json");
    let text = std::fs::read_to_string(&registry_path).map_err(|e| Error::io(&registry_path, e))?;
    let registry: FeatureRegistry = serde_json::from_str(&text)?;
    let container = ModelContainer::<TrainedModel>::load(&dir.join(format!("{model}{MODEL_SUFFIX}")), Some(&registry.hash()))?;
    Ok((registry, container.model))
}

fn dir_name(dir: &Path) -> String {
    dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn wants_dir(config: &RunConfig, name: &str) -> bool {
    let Some((state, chamber)) = name.rsplit_once('_') else { return false };
    (config.states.is_empty() || config.states.iter().any(|s| s.eq_ignore_ascii_case(state)))
        && config.chamber.is_none_or(|c| c.as_str() == chamber)
}

/// Feature rankings and, with `phrases`, phrase tables.
///
/// Without `--feature-set`, sponsor features are ranked in the `just_spon`
/// models and committee features in the `no_txt_spon` models; with it,
/// every feature of each named set is ranked.
pub fn analyze(config: &RunConfig, phrases: bool, k: usize, model: &str) -> Result<Vec<PathBuf>> {
    if model != "stacked" {
        model
            .parse::<ModelKind>()
            .map_err(|_| Error::Config(format!("unknown model `{model}`")))?;
    }
    let sources: Vec<(FeatureSet, Option<Group>)> = if config.feature_sets.is_empty() {
        vec![
            (FeatureSet::JustSpon, Some(Group::Sponsor)),
            (FeatureSet::NoTxtSpon, Some(Group::Committee)),
        ]
    } else {
        config.feature_sets.iter().map(|&fs| (fs, None)).collect()
    };
    let dir = config.out.join("analysis");
    let mut written = Vec::new();
    let mut all_tables: Vec<FeatureRankTable> = Vec::new();
    let mut medians: Vec<(String, MedianRank)> = Vec::new();
    for (fs, group) in sources {
        let dirs: Vec<PathBuf> = model_dirs(&config.out, fs)?
            .into_iter()
            .filter(|d| wants_dir(config, &dir_name(d)))
            .collect();
        let tables = dirs
            .par_iter()
            .map(|d| {
                let (registry, trained) = load_trained(d, model)?;
                rank_trained(&trained, &registry, &dir_name(d))
            })
            .collect::<Result<Vec<_>>>()?;
        let features = match group {
            Some(g) => features_in_group(&tables, g),
            None => {
                let mut f: Vec<String> = tables.iter().flat_map(|t| t.rows.iter().map(|r| r.feature.clone())).collect();
                f.sort();
                f.dedup();
                f
            }
        };
        medians.extend(median_rank_across(&tables, &features).into_iter().map(|m| (fs.to_string(), m)));
        all_tables.extend(tables);
    }
    if all_tables.is_empty() && !phrases {
        return Err(Error::InvalidInput(format!(
            "no trained models under {}; run `train` first",
            config.out.join("models").display()
        )));
    }
    if !all_tables.is_empty() {
        let path = dir.join("ranks.tsv");
        write_file(&path, &ranks_tsv(&medians))?;
        written.push(path);
        let path = dir.join("slice_ranks.tsv");
        write_file(&path, &slice_ranks_tsv(&all_tables))?;
        written.push(path);
    }
    if phrases {
        let dirs: Vec<PathBuf> = model_dirs(&config.out, FeatureSet::JustTxt)?
            .into_iter()
            .filter(|d| wants_dir(config, &dir_name(d)))
            .collect();
        if dirs.is_empty() {
            return Err(Error::InvalidInput(
                "no just_txt models to extract phrases from; run `train --feature-set just_txt` first".into(),
            ));
        }
        for d in dirs {
            let (registry, trained) = load_trained(&d, ModelKind::LogLinear.as_str())?;
            let TrainedModel::Base(BaseModel::LogLinear(linear)) = trained else {
                return Err(Error::InvalidInput(format!("{}: not a log-linear model", d.display())));
            };
            let (top, bottom) = top_bottom_phrases(&linear, &registry, k)?;
            let path = dir.join(format!("phrases_{}.tsv", dir_name(&d)));
            write_file(&path, &phrases_tsv(&top, &bottom))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn dispatch(command: &Command) -> Result<Vec<PathBuf>> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Ingest(a) => ingest(&RunConfig::from_args(a)?),
        Command::Featurize(a) => featurize(&RunConfig::from_args(a)?),
        Command::Train(a) => train(&RunConfig::from_args(a)?),
        Command::Evaluate(a) => evaluate(&RunConfig::from_args(a)?),
        Command::Analyze(a) => analyze(&RunConfig::from_args(&a.run)?, a.phrases, a.top, &a.model),
    }
}

fn jobs_of(command: &Command) -> usize {
    match command {
        Command::Synth(_) => 1,
        Command::Ingest(a) | Command::Featurize(a) | Command::Train(a) | Command::Evaluate(a) => a.jobs,
        Command::Analyze(a) => a.run.jobs,
    }
}

/// Runs one subcommand on a worker pool of `--jobs` threads and returns the
/// artifacts it wrote.
pub fn run(command: &Command) -> Result<Vec<PathBuf>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs_of(command))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(command))
}

/// Exit status for an error: 2 for bad invocations, 1 for everything else.
pub fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Config(_) => 2,
        _ => 1,
    }
}

/// Entry point of the `floorcast` binary.
pub fn main() -> ExitCode {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli.command) {
        Ok(paths) => {
            for p in paths {
                log::info!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("floorcast: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("floorcast").chain(args.iter().copied()))
    }

    #[test]
    fn flags_parse_into_a_run_config() {
        let cli = parse(&[
            "evaluate",
            "--corpus",
            "c",
            "--out",
            "o",
            "--feature-set",
            "combined,just_txt",
            "--states",
            "AK,ca",
            "--chamber",
            "upper",
            "--folds",
            "5",
            "--trials",
            "3",
            "--seed",
            "7",
            "--jobs",
            "2",
            "--weight-by-count",
            "--per-fold",
        ])
        .unwrap();
        let Command::Evaluate(a) = cli.command else { panic!() };
        let c = RunConfig::from_args(&a).unwrap();
        assert_eq!(c.feature_sets, [FeatureSet::Combined, FeatureSet::JustTxt]);
        assert_eq!(c.states, ["ak", "ca"]);
        assert_eq!(c.chamber, Some(Chamber::Upper));
        assert_eq!((c.folds, c.trials, c.seed, c.jobs), (5, 3, Some(7), 2));
        assert!(c.weight_by_count && c.per_fold);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(parse(&["bogus"]).unwrap_err().exit_code(), 2);
        assert_eq!(parse(&["evaluate", "--nope"]).unwrap_err().exit_code(), 2);
        let Command::Evaluate(a) = parse(&["evaluate", "--folds", "1"]).unwrap().command else { panic!() };
        let e = RunConfig::from_args(&a).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        let Command::Evaluate(a) = parse(&["evaluate", "--feature-set", "everything"]).unwrap().command else { panic!() };
        assert!(RunConfig::from_args(&a).is_err());
        let Command::Train(a) = parse(&["train"]).unwrap().command else { panic!() };
        let e = train(&RunConfig::from_args(&a).unwrap()).unwrap_err();
        assert_eq!(exit_code(&e), 2);
    }

    #[test]
    fn all_expands_to_every_set() {
        let Command::Evaluate(a) = parse(&["evaluate", "--feature-set", "all"]).unwrap().command else { panic!() };
        assert_eq!(RunConfig::from_args(&a).unwrap().feature_sets, FeatureSet::ALL);
    }
}
